#include <algorithm>

#include "haur/error.hpp"
#include "haur/oracle.hpp"
#include "haur/utf8.hpp"

namespace haur {

namespace {

constexpr std::size_t kMaxBruteForceLength = 8;

std::size_t edit(std::u32string_view a, std::u32string_view b) {
  if (a.empty()) return b.size();
  if (b.empty()) return a.size();
  const std::size_t keep = edit(a.substr(1), b.substr(1)) + (a[0] == b[0] ? 0 : 1);
  const std::size_t drop = edit(a.substr(1), b) + 1;
  const std::size_t insert = edit(a, b.substr(1)) + 1;
  return std::min({keep, drop, insert});
}

}  // namespace

std::size_t brute_force_levenshtein(std::string_view a, std::string_view b) {
  const auto x = utf8::decode(a);
  const auto y = utf8::decode(b);
  if (x.size() > kMaxBruteForceLength || y.size() > kMaxBruteForceLength) {
    throw Error(ErrorCode::InputTooLong, "brute force is limited to 8 characters");
  }
  return edit(x, y);
}

}  // namespace haur
