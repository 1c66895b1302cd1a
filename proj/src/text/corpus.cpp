#include "haur/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "haur/error.hpp"
#include "haur/utf8.hpp"

namespace haur {

namespace {

using utf8::is_space;

// Collapses every whitespace run to one space and trims both ends.
std::string squeeze_spaces(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char c) { return is_space(c); });
}

// Length in bytes of a closing quote/bracket at `pos`, 0 if none.
std::size_t closer_length(std::string_view text, std::size_t pos) {
  switch (text[pos]) {
    case '"':
    case '\'':
    case ')':
    case ']':
    case '}':
      return 1;
    default:
      break;
  }
  // U+2019 RIGHT SINGLE QUOTATION MARK, U+201D RIGHT DOUBLE QUOTATION MARK
  if (text.substr(pos, 3) == "\xE2\x80\x99" || text.substr(pos, 3) == "\xE2\x80\x9D") return 3;
  return 0;
}

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

std::size_t max_tokens_in_sentences(const std::vector<Sentence>& sentences) {
  std::size_t best = 0;
  for (const auto& s : sentences) best = std::max(best, count_tokens(s.text));
  return best;
}

struct PackUnit {
  std::string text;
  std::size_t source_paragraph;
  std::size_t tokens;
  bool oversized;
};

// Splits one paragraph into units no longer than `max_tokens`, cutting only at
// sentence boundaries.
std::vector<PackUnit> split_paragraph(const std::string& paragraph, std::size_t index,
                                      std::size_t max_tokens) {
  const auto tokens = count_tokens(paragraph);
  if (tokens <= max_tokens) return {{paragraph, index, tokens, false}};

  std::vector<PackUnit> units;
  const auto sentences = segment_sentences(paragraph, index);
  std::size_t first = 0;
  while (first < sentences.size()) {
    std::size_t last = first;
    std::size_t total = count_tokens(sentences[first].text);
    while (last + 1 < sentences.size()) {
      const auto next = count_tokens(sentences[last + 1].text);
      if (total + next > max_tokens) break;
      total += next;
      ++last;
    }
    const auto begin = sentences[first].char_span.begin;
    const auto end = sentences[last].char_span.end;
    units.push_back({paragraph.substr(begin, end - begin), index, total, total > max_tokens});
    first = last + 1;
  }
  return units;
}

}  // namespace

std::string TextChunk::full_text() const {
  std::string out;
  for (std::size_t p = 0; p < paragraphs.size(); ++p) {
    if (p > 0) out.push_back(kParagraphSeparator);
    out += paragraphs[p];
  }
  return out;
}

std::size_t TextChunk::paragraph_offset(std::size_t paragraph) const {
  std::size_t offset = 0;
  for (std::size_t p = 0; p < paragraph; ++p) offset += paragraphs[p].size() + 1;
  return offset;
}

Span TextChunk::sentence_span(std::size_t sentence) const {
  const auto& s = sentences.at(sentence);
  const auto base = paragraph_offset(s.paragraph_index);
  return {base + s.char_span.begin, base + s.char_span.end};
}

Span TextChunk::paragraph_span(std::size_t paragraph) const {
  const auto base = paragraph_offset(paragraph);
  return {base, base + paragraphs.at(paragraph).size()};
}

std::pair<std::size_t, std::size_t> TextChunk::sentence_range(std::size_t paragraph) const {
  std::size_t first = sentences.size();
  std::size_t last = 0;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (sentences[i].paragraph_index != paragraph) continue;
    first = std::min(first, i);
    last = i + 1;
  }
  if (first == sentences.size()) return {0, 0};
  return {first, last};
}

SourceDocument load_document(std::string_view raw_text, std::string doc_id) {
  SourceDocument doc;
  doc.doc_id = std::move(doc_id);

  std::string current;
  auto flush = [&] {
    auto paragraph = squeeze_spaces(current);
    if (!paragraph.empty()) doc.paragraphs.push_back(std::move(paragraph));
    current.clear();
  };

  std::size_t pos = 0;
  while (pos <= raw_text.size()) {
    auto eol = raw_text.find('\n', pos);
    if (eol == std::string_view::npos) eol = raw_text.size();
    const auto line = raw_text.substr(pos, eol - pos);
    if (is_blank(line)) {
      flush();
    } else {
      current.append(line);
      current.push_back(' ');
    }
    pos = eol + 1;
  }
  flush();

  if (doc.paragraphs.empty()) {
    throw Error(ErrorCode::EmptyDocument, "document '" + doc.doc_id + "' has no text");
  }
  // A short leading paragraph is treated as the heading.
  doc.title = count_tokens(doc.paragraphs.front()) <= 12 ? doc.paragraphs.front() : doc.doc_id;
  return doc;
}

std::vector<SourceDocument> load_corpus(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::Io, "corpus directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  std::vector<SourceDocument> docs;
  for (const auto& path : files) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    docs.push_back(load_document(buf.str(), path.stem().string()));
  }
  if (docs.empty()) throw Error(ErrorCode::EmptyDocument, "no .txt files in " + dir.string());
  return docs;
}

std::size_t count_tokens(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  for (char c : text) {
    const bool space = is_space(c);
    if (!space && !in_token) ++count;
    in_token = !space;
  }
  return count;
}

std::vector<Span> token_spans(std::string_view text) {
  std::vector<Span> spans;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    if (i == text.size()) break;
    const auto begin = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    spans.push_back({begin, i});
  }
  return spans;
}

std::vector<Sentence> segment_sentences(std::string_view paragraph, std::size_t paragraph_index) {
  std::vector<Sentence> out;
  const auto n = paragraph.size();
  std::size_t start = 0;
  while (start < n && is_space(paragraph[start])) ++start;

  auto emit = [&](std::size_t end) {
    out.push_back({std::string(paragraph.substr(start, end - start)), paragraph_index,
                   {start, end}});
    start = end;
    while (start < n && is_space(paragraph[start])) ++start;
  };

  std::size_t i = start;
  while (i < n) {
    if (!is_terminator(paragraph[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < n) {
      const auto len = closer_length(paragraph, j);
      if (len == 0) break;
      j += len;
    }
    if (j == n || is_space(paragraph[j])) {
      emit(j);
      i = start;
    } else {
      i = j;
    }
  }
  if (start < n) {
    auto end = n;
    while (end > start && is_space(paragraph[end - 1])) --end;
    emit(end);
  }
  return out;
}

TextChunk make_chunk(std::string chunk_id, std::string doc_id, std::vector<std::string> paragraphs,
                     std::vector<std::size_t> source_paragraphs) {
  TextChunk chunk;
  chunk.chunk_id = std::move(chunk_id);
  chunk.doc_id = std::move(doc_id);
  if (source_paragraphs.empty()) {
    for (std::size_t p = 0; p < paragraphs.size(); ++p) source_paragraphs.push_back(p);
  }
  chunk.paragraphs = std::move(paragraphs);
  chunk.source_paragraphs = std::move(source_paragraphs);
  for (std::size_t p = 0; p < chunk.paragraphs.size(); ++p) {
    auto sentences = segment_sentences(chunk.paragraphs[p], p);
    chunk.sentences.insert(chunk.sentences.end(), sentences.begin(), sentences.end());
    chunk.token_count += count_tokens(chunk.paragraphs[p]);
  }
  return chunk;
}

TextChunk chunk_from_text(std::string chunk_id, std::string doc_id, std::string_view full_text) {
  std::vector<std::string> paragraphs;
  std::size_t pos = 0;
  while (true) {
    const auto sep = full_text.find(kParagraphSeparator, pos);
    paragraphs.emplace_back(full_text.substr(pos, sep == std::string_view::npos ? sep : sep - pos));
    if (sep == std::string_view::npos) break;
    pos = sep + 1;
  }
  return make_chunk(std::move(chunk_id), std::move(doc_id), std::move(paragraphs));
}

std::vector<TextChunk> chunk_document(const SourceDocument& doc, std::size_t max_tokens) {
  if (max_tokens < 1) throw Error(ErrorCode::InvalidArgument, "max_tokens must be >= 1");

  std::vector<PackUnit> units;
  for (std::size_t p = 0; p < doc.paragraphs.size(); ++p) {
    auto split = split_paragraph(doc.paragraphs[p], p, max_tokens);
    units.insert(units.end(), std::make_move_iterator(split.begin()),
                 std::make_move_iterator(split.end()));
  }

  std::vector<TextChunk> chunks;
  std::vector<std::string> paragraphs;
  std::vector<std::size_t> sources;
  std::size_t tokens = 0;
  bool oversized = false;

  auto flush = [&] {
    if (paragraphs.empty()) return;
    char suffix[16];
    std::snprintf(suffix, sizeof suffix, "_c%04zu", chunks.size());
    auto chunk = make_chunk(doc.doc_id + suffix, doc.doc_id, std::move(paragraphs),
                            std::move(sources));
    chunk.oversized_sentence = oversized;
    chunks.push_back(std::move(chunk));
    paragraphs.clear();
    sources.clear();
    tokens = 0;
    oversized = false;
  };

  for (auto& unit : units) {
    if (!paragraphs.empty() && tokens + unit.tokens > max_tokens) flush();
    tokens += unit.tokens;
    oversized = oversized || unit.oversized;
    paragraphs.push_back(std::move(unit.text));
    sources.push_back(unit.source_paragraph);
  }
  flush();

  for (auto& chunk : chunks) {
    if (!chunk.oversized_sentence && max_tokens_in_sentences(chunk.sentences) > max_tokens) {
      chunk.oversized_sentence = true;
    }
  }
  return chunks;
}

std::vector<std::string> reassemble_paragraphs(const std::vector<TextChunk>& chunks) {
  std::vector<std::string> out;
  bool have_last = false;
  std::size_t last_source = 0;
  for (const auto& chunk : chunks) {
    for (std::size_t p = 0; p < chunk.paragraphs.size(); ++p) {
      const auto source = chunk.source_paragraphs.at(p);
      if (have_last && source == last_source) {
        out.back() += ' ';
        out.back() += chunk.paragraphs[p];
      } else {
        out.push_back(chunk.paragraphs[p]);
      }
      have_last = true;
      last_source = source;
    }
  }
  return out;
}

}  // namespace haur
