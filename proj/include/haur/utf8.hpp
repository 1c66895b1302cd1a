#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace haur::utf8 {

// Decodes UTF-8 into Unicode scalar values. Malformed bytes decode to U+FFFD,
// one replacement per offending byte.
std::u32string decode(std::string_view text);

std::string encode(char32_t cp);
std::string encode(std::u32string_view text);

// Decodes the scalar starting at `pos` and advances `pos` past it.
char32_t next(std::string_view text, std::size_t& pos);

std::size_t length(std::string_view text);

// Byte offset reached by stepping `count` scalars forward from `from`,
// clamped to `limit`.
std::size_t advance(std::string_view text, std::size_t from, std::size_t count,
                    std::size_t limit);

// Byte offset reached by stepping `count` scalars backward from `from`,
// clamped to `floor`.
std::size_t retreat(std::string_view text, std::size_t from, std::size_t count,
                    std::size_t floor);

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace haur::utf8
