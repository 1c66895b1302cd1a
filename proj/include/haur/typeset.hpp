#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "haur/corpus.hpp"
#include "haur/image.hpp"

namespace haur {

struct RenderConfig {
  int page_width_px = 960;
  int margin_px = 48;
  int font_size_px = 20;
  int line_height_px = 28;
  int paragraph_gap_px = 14;
  int paragraph_indent_px = 24;
  Rgb foreground{0, 0, 0};
  Rgb background{255, 255, 255};

  // Throws InvalidConfig when a dimension is non-positive or the text column
  // cannot hold the widest glyph.
  void validate() const;

  // Stable hex digest of every field; recorded in manifests.
  std::string digest() const;

  int column_width_px() const { return page_width_px - 2 * margin_px; }

  friend bool operator==(const RenderConfig&, const RenderConfig&) = default;
};

struct WordBox {
  std::string text;
  Rect bbox;
  std::size_t line_index = 0;
  std::size_t paragraph_index = 0;
  std::size_t sentence_index = 0;
  Span char_span;  // offsets into the chunk's flattened text
};

struct PageLayout {
  std::string chunk_id;
  RenderConfig config;
  std::vector<WordBox> words;
  std::optional<Rect> pm_placeholder;
  std::optional<std::size_t> pm_paragraph;
  int page_height_px = 0;
  bool word_too_wide = false;

  std::vector<int> line_tops;  // y of each text line; boxes sit centered in it

  int baseline_y(const Rect& box) const;
};

// Greedy first-fit layout. A word wider than the column is placed on its own
// line and flags word_too_wide rather than throwing.
PageLayout layout_chunk(const TextChunk& chunk, const RenderConfig& config,
                        std::optional<std::size_t> reserve_pm = std::nullopt);

Image rasterize(const PageLayout& layout);

// Indices of words whose char_span intersects `span`, in reading order.
std::vector<std::size_t> words_in_span(const PageLayout& layout, Span span);

// One rectangle per touched line: the union of the intersecting word boxes.
// Throws EmptySpan when no word intersects.
std::vector<Rect> sentence_runs(const PageLayout& layout, Span span);

}  // namespace haur
