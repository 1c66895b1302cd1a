#include "haur/typeset.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>

#include "haur/error.hpp"
#include "haur/font.hpp"
#include "haur/rng.hpp"

namespace haur {

namespace {

const GlyphAtlas& atlas_for(int font_size) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GlyphAtlas>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[font_size];
  if (!slot) slot = std::make_unique<GlyphAtlas>(Font::bundled(), font_size);
  return *slot;
}

std::string rgb_string(Rgb c) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%d,%d,%d", c.r, c.g, c.b);
  return buf;
}

}  // namespace

void RenderConfig::validate() const {
  if (page_width_px <= 0 || margin_px <= 0 || font_size_px <= 0 || line_height_px <= 0 ||
      paragraph_gap_px <= 0 || paragraph_indent_px <= 0) {
    throw Error(ErrorCode::InvalidConfig, "render dimensions must be positive");
  }
  if (line_height_px < font_size_px) {
    throw Error(ErrorCode::InvalidConfig, "line height smaller than font size");
  }
  if (foreground == background) {
    throw Error(ErrorCode::InvalidConfig, "foreground equals background");
  }
  const int widest = Font::bundled().widest_advance_px(font_size_px);
  if (page_width_px <= 2 * margin_px + widest) {
    throw Error(ErrorCode::InvalidConfig, "page too narrow for margins and glyphs");
  }
  if (paragraph_indent_px + widest > column_width_px()) {
    throw Error(ErrorCode::InvalidConfig, "paragraph indent leaves no room for text");
  }
}

std::string RenderConfig::digest() const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "w=%d;m=%d;fs=%d;lh=%d;pg=%d;pi=%d;fg=%s;bg=%s", page_width_px,
                margin_px, font_size_px, line_height_px, paragraph_gap_px, paragraph_indent_px,
                rgb_string(foreground).c_str(), rgb_string(background).c_str());
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash_string(buf)));
  return hex;
}

int PageLayout::baseline_y(const Rect& box) const {
  return box.y + Font::baseline_px(config.font_size_px);
}

PageLayout layout_chunk(const TextChunk& chunk, const RenderConfig& config,
                        std::optional<std::size_t> reserve_pm) {
  config.validate();
  if (reserve_pm && *reserve_pm >= chunk.paragraphs.size()) {
    throw Error(ErrorCode::InvalidArgument, "reserved paragraph out of range");
  }
  const Font& font = Font::bundled();
  const int fs = config.font_size_px;
  const int space = font.advance_px(U' ', fs);
  const int left = config.margin_px;
  const int right = config.page_width_px - config.margin_px;
  const int box_dy = (config.line_height_px - fs) / 2;

  PageLayout layout;
  layout.chunk_id = chunk.chunk_id;
  layout.config = config;

  int top = config.margin_px;
  for (std::size_t p = 0; p < chunk.paragraphs.size(); ++p) {
    if (p > 0) top += config.line_height_px + config.paragraph_gap_px;
    layout.line_tops.push_back(top);
    const std::string& para = chunk.paragraphs[p];
    const std::size_t base = chunk.paragraph_offset(p);
    const auto [first_sentence, last_sentence] = chunk.sentence_range(p);
    std::size_t sentence = first_sentence;

    int pen = left + config.paragraph_indent_px;
    bool line_empty = true;
    if (reserve_pm && *reserve_pm == p) {
      layout.pm_placeholder = Rect{pen, top + box_dy, 2 * space, fs};
      layout.pm_paragraph = p;
      pen += 2 * space;
    }

    for (const Span tok : token_spans(para)) {
      std::string text = para.substr(tok.begin, tok.size());
      const int width = font.text_width_px(text, fs);
      if (!line_empty && pen + width > right) {
        top += config.line_height_px;
        layout.line_tops.push_back(top);
        pen = left;
        line_empty = true;
      }
      if (width > right - left) layout.word_too_wide = true;
      while (sentence + 1 < last_sentence &&
             chunk.sentences[sentence].char_span.end <= tok.begin) {
        ++sentence;
      }
      WordBox box;
      box.text = std::move(text);
      box.bbox = Rect{pen, top + box_dy, width, fs};
      box.line_index = layout.line_tops.size() - 1;
      box.paragraph_index = p;
      box.sentence_index = sentence;
      box.char_span = Span{base + tok.begin, base + tok.end};
      layout.words.push_back(std::move(box));
      pen += width + space;
      line_empty = false;
    }
  }
  layout.page_height_px = top + config.line_height_px + config.margin_px;
  return layout;
}

Image rasterize(const PageLayout& layout) {
  const auto& cfg = layout.config;
  Image img(cfg.page_width_px, layout.page_height_px, cfg.background);
  const GlyphAtlas& atlas = atlas_for(cfg.font_size_px);
  for (const auto& w : layout.words) {
    atlas.draw_text(img, w.text, w.bbox.x, w.bbox.y, cfg.foreground);
  }
  return img;
}

std::vector<std::size_t> words_in_span(const PageLayout& layout, Span span) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < layout.words.size(); ++i) {
    if (layout.words[i].char_span.intersects(span)) out.push_back(i);
  }
  return out;
}

std::vector<Rect> sentence_runs(const PageLayout& layout, Span span) {
  std::vector<Rect> runs;
  std::size_t current_line = 0;
  for (const auto i : words_in_span(layout, span)) {
    const auto& w = layout.words[i];
    if (runs.empty() || w.line_index != current_line) {
      runs.push_back(w.bbox);
      current_line = w.line_index;
    } else {
      runs.back() = runs.back().united(w.bbox);
    }
  }
  if (runs.empty()) throw Error(ErrorCode::EmptySpan, "span touches no word");
  return runs;
}

}  // namespace haur
