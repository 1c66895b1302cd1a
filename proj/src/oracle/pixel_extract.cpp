#include <algorithm>
#include <array>
#include <climits>

#include "haur/error.hpp"
#include "haur/oracle.hpp"

namespace haur {

namespace {

enum class PixelClass { Other, Background, Text, Highlight, Underline, Squiggly, Rect, Star };

constexpr int kStrokeHitMin = 3;
constexpr double kHighlightCoverMin = 0.5;

struct Palette {
  Rgb background, foreground, hl_bg, hl_fg, underline, squiggly, rect, star;

  explicit Palette(const RenderConfig& cfg)
      : background(cfg.background),
        foreground(cfg.foreground),
        hl_bg(blend(cfg.background, default_style(AnnotationKind::Highlight).color,
                    default_style(AnnotationKind::Highlight).alpha)),
        hl_fg(blend(cfg.foreground, default_style(AnnotationKind::Highlight).color,
                    default_style(AnnotationKind::Highlight).alpha)),
        underline(default_style(AnnotationKind::Underline).color),
        squiggly(default_style(AnnotationKind::Squiggly).color),
        rect(default_style(AnnotationKind::Rect).color),
        star(default_style(AnnotationKind::ParagraphMark).color) {}

  PixelClass classify(Rgb c) const {
    if (c == background) return PixelClass::Background;
    if (c == foreground || c == hl_fg) return PixelClass::Text;
    if (c == hl_bg) return PixelClass::Highlight;
    if (c == underline) return PixelClass::Underline;
    if (c == squiggly) return PixelClass::Squiggly;
    if (c == rect) return PixelClass::Rect;
    if (c == star) return PixelClass::Star;
    return PixelClass::Other;
  }
};

struct Classified {
  int width = 0, height = 0;
  std::vector<PixelClass> cls;
  PixelClass at(int x, int y) const { return cls[static_cast<std::size_t>(y) * width + x]; }
};

bool is_highlight(PixelClass c, Rgb raw, const Palette& pal) {
  return c == PixelClass::Highlight || (c == PixelClass::Text && raw == pal.hl_fg);
}

// Top-left corner of the text ink.
std::pair<int, int> ink_origin(const Image& img, const Palette& pal, bool from_page) {
  int x0 = INT_MAX, y0 = INT_MAX;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const auto c = img.at(x, y);
      const bool ink = from_page ? c == pal.foreground : pal.classify(c) == PixelClass::Text;
      if (!ink) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
    }
  }
  return {x0, y0};
}

std::string covered_text(std::string_view full_text, const PageLayout& layout,
                         const std::vector<std::size_t>& words) {
  if (words.empty()) return {};
  const auto begin = layout.words[words.front()].char_span.begin;
  const auto end = layout.words[words.back()].char_span.end;
  std::string out(full_text.substr(begin, end - begin));
  std::replace(out.begin(), out.end(), kParagraphSeparator, ' ');
  return out;
}

}  // namespace

PixelPrediction pixel_extract(const Image& image, std::string_view full_text,
                              const RenderConfig& config) {
  const Palette pal(config);
  Classified cls{image.width(), image.height(), {}};
  cls.cls.reserve(static_cast<std::size_t>(image.width()) * image.height());
  std::array<std::size_t, 8> votes{};
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const auto raw = image.at(x, y);
      const auto c = pal.classify(raw);
      cls.cls.push_back(c);
      if (is_highlight(c, raw, pal)) {
        ++votes[static_cast<std::size_t>(PixelClass::Highlight)];
      } else {
        ++votes[static_cast<std::size_t>(c)];
      }
    }
  }

  constexpr std::array<std::pair<PixelClass, AnnotationKind>, 5> kinds = {{
      {PixelClass::Highlight, AnnotationKind::Highlight},
      {PixelClass::Underline, AnnotationKind::Underline},
      {PixelClass::Squiggly, AnnotationKind::Squiggly},
      {PixelClass::Rect, AnnotationKind::Rect},
      {PixelClass::Star, AnnotationKind::ParagraphMark},
  }};
  PixelClass mark = PixelClass::Other;
  PixelPrediction pred;
  std::size_t best = 0;
  for (const auto& [c, k] : kinds) {
    if (votes[static_cast<std::size_t>(c)] > best) {
      best = votes[static_cast<std::size_t>(c)];
      mark = c;
      pred.kind = k;
    }
  }
  if (best == 0) throw Error(ErrorCode::NoAnnotationFound, "no annotation-colored pixels");

  std::vector<std::pair<int, int>> marks;
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      if (cls.at(x, y) == mark) marks.emplace_back(x, y);
    }
  }

  const auto chunk = chunk_from_text("extract", "extract", full_text);
  const auto [img_x, img_y] = ink_origin(image, pal, false);
  if (img_x == INT_MAX) return pred;

  std::vector<std::optional<std::size_t>> candidates;
  if (pred.kind == AnnotationKind::ParagraphMark) {
    for (std::size_t p = 0; p < chunk.paragraphs.size(); ++p) candidates.emplace_back(p);
  } else {
    candidates.emplace_back(std::nullopt);
  }

  for (const auto& reserve : candidates) {
    const auto layout = layout_chunk(chunk, config, reserve);
    const auto [page_x, page_y] = ink_origin(rasterize(layout), pal, true);
    const int dx = page_x - img_x;
    const int dy = page_y - img_y;

    std::vector<std::size_t> covered;
    switch (pred.kind) {
      case AnnotationKind::Highlight:
        for (std::size_t i = 0; i < layout.words.size(); ++i) {
          const auto& b = layout.words[i].bbox;
          std::size_t hits = 0;
          for (int y = b.y; y < b.bottom(); ++y) {
            for (int x = b.x; x < b.right(); ++x) {
              const int ix = x - dx, iy = y - dy;
              if (image.in_bounds(ix, iy) && is_highlight(cls.at(ix, iy), image.at(ix, iy), pal)) ++hits;
            }
          }
          if (static_cast<double>(hits) >= kHighlightCoverMin * b.w * b.h) covered.push_back(i);
        }
        break;
      case AnnotationKind::Underline:
      case AnnotationKind::Squiggly:
        for (std::size_t i = 0; i < layout.words.size(); ++i) {
          const auto& b = layout.words[i].bbox;
          const Rect band{b.x, b.y, b.w, config.line_height_px};
          int hits = 0;
          for (const auto& [x, y] : marks) hits += band.contains(x + dx, y + dy) ? 1 : 0;
          if (hits >= kStrokeHitMin) covered.push_back(i);
        }
        break;
      case AnnotationKind::Rect: {
        int x0 = INT_MAX, y0 = INT_MAX, x1 = INT_MIN, y1 = INT_MIN;
        for (const auto& [x, y] : marks) {
          x0 = std::min(x0, x + dx);
          y0 = std::min(y0, y + dy);
          x1 = std::max(x1, x + dx);
          y1 = std::max(y1, y + dy);
        }
        const Rect box{x0, y0, x1 - x0 + 1, y1 - y0 + 1};
        for (std::size_t i = 0; i < layout.words.size(); ++i) {
          if (box.contains(layout.words[i].bbox)) covered.push_back(i);
        }
        break;
      }
      case AnnotationKind::ParagraphMark: {
        long sx = 0, sy = 0;
        for (const auto& [x, y] : marks) {
          sx += x + dx;
          sy += y + dy;
        }
        const auto n = static_cast<long>(marks.size());
        const int cx = static_cast<int>(sx / n), cy = static_cast<int>(sy / n);
        if (layout.pm_placeholder && layout.pm_placeholder->contains(cx, cy)) {
          pred.text = chunk.paragraphs[*reserve];
          return pred;
        }
        continue;
      }
    }
    pred.text = covered_text(full_text, layout, covered);
    return pred;
  }
  return pred;
}

}  // namespace haur
