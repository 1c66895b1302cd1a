#pragma once

#include <cstdint>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "haur/image.hpp"

namespace haur {

// Built-in stroke font. Glyph geometry lives in a 10-unit em square with y
// growing downward; the baseline sits at 7 units and descenders reach 9.5.
// Every stroke stays inside [0, advance) x [0, 10) so ink never leaves a
// glyph's advance box.
class Font {
 public:
  struct Glyph {
    double advance = 0;  // em units
    std::vector<std::vector<PointF>> strokes;
  };

  static const Font& bundled();

  static constexpr double kEmUnits = 10.0;
  static constexpr double kBaselineUnits = 7.0;

  const Glyph& glyph(char32_t cp) const;
  bool has_glyph(char32_t cp) const { return glyphs_.count(cp) != 0; }

  int advance_px(char32_t cp, int font_size) const;
  int text_width_px(std::string_view utf8_text, int font_size) const;
  int widest_advance_px(int font_size) const;

  static int baseline_px(int font_size);
  static int stroke_px(int font_size);

  std::vector<char32_t> codepoints() const;

 private:
  Font();

  std::unordered_map<char32_t, Glyph> glyphs_;
  Glyph fallback_;
};

// Binary ink mask of one glyph at a pixel size: advance_px wide, font_size tall.
struct GlyphMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> ink;

  bool at(int x, int y) const { return ink[static_cast<std::size_t>(y) * width + x] != 0; }
};

// Pre-rasterized masks of every glyph for one font size.
class GlyphAtlas {
 public:
  GlyphAtlas(const Font& font, int font_size);

  const GlyphMask& mask(char32_t cp) const;
  int font_size() const { return font_size_; }

  // Draws UTF-8 text with its em box's top-left corner at (x, y).
  void draw_text(Image& img, std::string_view utf8_text, int x, int y, Rgb color) const;

 private:
  int font_size_;
  std::unordered_map<char32_t, GlyphMask> masks_;
  GlyphMask fallback_;
};

}  // namespace haur
