#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "haur/corpus.hpp"

namespace haur::test {

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("haur_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::filesystem::path corpus_dir() { return HAUR_CORPUS_DIR; }

// Two short documents with several multi-sentence paragraphs each.
inline std::vector<SourceDocument> tiny_corpus() {
  const char* a =
      "The Whale\n\n"
      "Call me Ishmael. Some years ago I went to sea. It was a damp, drizzly November in my soul.\n\n"
      "Whenever I find myself growing grim about the mouth, I account it high time to get to sea. "
      "This is my substitute for pistol and ball.\n\n"
      "There now is your insular city of the Manhattoes, belted round by wharves. "
      "Right and left, the streets take you waterward. Its extreme downtown is the battery.\n";
  const char* b =
      "Annual Message\n\n"
      "Fellow citizens of the Senate and House of Representatives: In the midst of unprecedented "
      "political troubles we have cause of great gratitude. The health of the country is good.\n\n"
      "A disloyal portion of the American people have during the whole year been engaged in an "
      "attempt to divide and destroy the Union. Our commerce has suffered.\n\n"
      "The people of the country have sustained the Government. I have thought it proper to keep "
      "the subject in view. The estimates are submitted herewith.\n";
  return {load_document(a, "alpha"), load_document(b, "beta")};
}

}  // namespace haur::test
