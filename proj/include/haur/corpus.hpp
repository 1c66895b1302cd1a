#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace haur {

// Half-open byte range [begin, end).
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool empty() const { return end <= begin; }
  bool intersects(const Span& other) const {
    return begin < other.end && other.begin < end;
  }
  bool contains(const Span& other) const {
    return begin <= other.begin && other.end <= end;
  }
  friend bool operator==(const Span&, const Span&) = default;
};

struct SourceDocument {
  std::string doc_id;
  std::string title;
  std::vector<std::string> paragraphs;
};

struct Sentence {
  std::string text;
  std::size_t paragraph_index = 0;
  Span char_span;  // offsets into the paragraph
};

// Paragraphs of a chunk are joined by this separator in the flattened text.
inline constexpr char kParagraphSeparator = '\n';
inline constexpr std::size_t kDefaultMaxTokens = 500;

struct TextChunk {
  std::string chunk_id;
  std::string doc_id;
  std::vector<std::string> paragraphs;
  // Index of the source-document paragraph each chunk paragraph came from.
  // Consecutive entries repeat when an oversized paragraph was split.
  std::vector<std::size_t> source_paragraphs;
  std::vector<Sentence> sentences;
  std::size_t token_count = 0;
  bool oversized_sentence = false;

  std::string full_text() const;
  std::size_t paragraph_offset(std::size_t paragraph) const;
  // Sentence span in flattened-text coordinates.
  Span sentence_span(std::size_t sentence) const;
  Span paragraph_span(std::size_t paragraph) const;
  // Sentence indices belonging to one paragraph, as [first, last).
  std::pair<std::size_t, std::size_t> sentence_range(std::size_t paragraph) const;
};

SourceDocument load_document(std::string_view raw_text, std::string doc_id);

// Loads every *.txt file of a directory in file-name order; the stem is the doc_id.
std::vector<SourceDocument> load_corpus(const std::filesystem::path& dir);

// Number of maximal non-whitespace runs.
std::size_t count_tokens(std::string_view text);

// Byte spans of the whitespace-delimited tokens of `text`.
std::vector<Span> token_spans(std::string_view text);

std::vector<Sentence> segment_sentences(std::string_view paragraph,
                                        std::size_t paragraph_index);

// Builds a chunk from ready paragraphs: segments sentences and counts tokens.
TextChunk make_chunk(std::string chunk_id, std::string doc_id,
                     std::vector<std::string> paragraphs,
                     std::vector<std::size_t> source_paragraphs = {});

// Inverse of TextChunk::full_text for chunks produced by this module.
TextChunk chunk_from_text(std::string chunk_id, std::string doc_id, std::string_view full_text);

std::vector<TextChunk> chunk_document(const SourceDocument& doc,
                                      std::size_t max_tokens = kDefaultMaxTokens);

// Joins chunks back into document paragraphs (fragments of one source
// paragraph are rejoined with a single space).
std::vector<std::string> reassemble_paragraphs(const std::vector<TextChunk>& chunks);

}  // namespace haur
