#include "haur/font.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "haur/error.hpp"
#include "haur/utf8.hpp"

namespace haur {

namespace {

struct GlyphSource {
  char32_t cp;
  double advance;
  const char* path;
};

// Path language: "P x y x y ..." is a polyline, "A cx cy rx ry a0 a1" an
// elliptical arc swept from a0 to a1 degrees (0 = +x, 90 = +y, i.e. down).
constexpr GlyphSource kGlyphs[] = {
    {U' ', 3.5, ""},
    {U'!', 2.8, "P 1.4 1 1.4 5.2 P 1.4 6.6 1.4 7"},
    {U'"', 3.6, "P 1.1 1 1.1 2.6 P 2.5 1 2.5 2.6"},
    {U'#', 5.0, "P 1.8 1.5 1.4 6.5 P 3.6 1.5 3.2 6.5 P 1 3 4 3 P 0.9 5 3.9 5"},
    {U'$', 4.8, "A 2.4 3 1.3 1.1 330 90 A 2.4 5.2 1.3 1.1 270 510 P 2.4 1 2.4 7.4"},
    {U'%', 5.4, "A 1.7 2.2 0.7 0.9 0 360 A 3.7 5.8 0.7 0.9 0 360 P 4 1.2 1.3 7"},
    {U'&', 5.4, "A 2.2 2.3 0.9 1.1 0 360 P 2.9 3.1 1.2 5.6 2.2 7 3.2 6.6 4.4 4.6 P 2.4 4 4.4 7"},
    {U'\'', 2.4, "P 1.2 1 1.2 2.6"},
    {U'(', 3.2, "A 2.6 4 1.4 3.2 120 240"},
    {U')', 3.2, "A 0.6 4 1.4 3.2 -60 60"},
    {U'*', 4.8, "P 2.4 1.2 2.4 3.8 P 1.2 1.8 3.6 3.2 P 3.6 1.8 1.2 3.2"},
    {U'+', 4.8, "P 1 4.6 3.8 4.6 P 2.4 3.2 2.4 6"},
    {U',', 2.6, "P 1.4 6.6 1.4 7.3 0.9 8.3"},
    {U'-', 4.0, "P 1 4.6 3 4.6"},
    {U'.', 2.6, "P 1.3 6.6 1.3 7"},
    {U'/', 4.2, "P 1 7.5 3.2 1"},
    {U'0', 4.8, "A 2.4 4 1.4 3 0 360 P 3.2 2.2 1.6 5.8"},
    {U'1', 4.8, "P 1.4 2.2 2.6 1 2.6 7 P 1.4 7 3.8 7"},
    {U'2', 4.8, "A 2.4 2.6 1.4 1.6 200 400 P 3.47 3.63 1 7 3.8 7"},
    {U'3', 4.8, "A 2.4 2.5 1.3 1.5 200 450 A 2.4 5.5 1.4 1.5 270 520"},
    {U'4', 4.8, "P 3 7 3 1 1 5 3.9 5"},
    {U'5', 4.8, "P 3.8 1 1.2 1 1.1 3.9 A 2.4 5.2 1.4 1.8 230 520"},
    {U'6', 4.8, "A 2.4 5.2 1.4 1.8 0 360 P 1 5.2 1.6 2.4 2.8 1 3.6 1.2"},
    {U'7', 4.8, "P 1 1 3.8 1 1.8 7"},
    {U'8', 4.8, "A 2.4 2.5 1.2 1.5 0 360 A 2.4 5.5 1.4 1.5 0 360"},
    {U'9', 4.8, "A 2.4 2.8 1.4 1.8 0 360 P 3.8 2.8 3.4 5.6 2.2 7 1.2 6.8"},
    {U':', 2.6, "P 1.3 3.6 1.3 4 P 1.3 6.6 1.3 7"},
    {U';', 2.6, "P 1.4 3.6 1.4 4 P 1.4 6.6 1.4 7.3 0.9 8.3"},
    {U'<', 4.6, "P 3.6 2.4 1 4.6 3.6 6.8"},
    {U'=', 4.8, "P 1 3.8 3.8 3.8 P 1 5.4 3.8 5.4"},
    {U'>', 4.6, "P 1 2.4 3.6 4.6 1 6.8"},
    {U'?', 4.8, "A 2.4 2.5 1.4 1.5 190 450 P 2.4 4 2.4 5.2 P 2.4 6.6 2.4 7"},
    {U'@', 6.0, "A 3 4.2 2 2.6 20 340 A 3 4.2 0.9 1.1 0 360 P 3.9 3.1 3.9 5.3 4.8 5.3"},
    {U'A', 5.4, "P 1 7 2.7 1 4.4 7 P 1.6 5 3.8 5"},
    {U'B', 5.4, "P 1 7 1 1 3 1 A 3 2.5 1.2 1.5 270 450 P 3 4 1 4 P 1 7 3.2 7 A 3.2 5.5 1.3 1.5 90 -90"},
    {U'C', 5.4, "A 2.9 4 1.9 3 45 315"},
    {U'D', 5.4, "P 2.4 1 1 1 1 7 2.4 7 A 2.4 4 2 3 270 450"},
    {U'E', 5.0, "P 4 1 1 1 1 7 4 7 P 1 4 3.4 4"},
    {U'F', 5.0, "P 4 1 1 1 1 7 P 1 4 3.4 4"},
    {U'G', 5.8, "A 2.9 4 1.9 3 315 0 P 4.8 4 3.2 4"},
    {U'H', 5.2, "P 1 1 1 7 P 4.2 1 4.2 7 P 1 4 4.2 4"},
    {U'I', 3.0, "P 1.5 1 1.5 7"},
    {U'J', 4.5, "P 3.5 1 3.5 5.5 A 2.25 5.5 1.25 1.5 0 180"},
    {U'K', 5.4, "P 1 1 1 7 P 4.2 1 1 4.6 P 2.2 3.5 4.4 7"},
    {U'L', 4.6, "P 1 1 1 7 3.8 7"},
    {U'M', 6.0, "P 1 7 1 1 3 5 5 1 5 7"},
    {U'N', 5.2, "P 1 7 1 1 4.2 7 4.2 1"},
    {U'O', 6.0, "A 3 4 2 3 0 360"},
    {U'P', 5.0, "P 1 7 1 1 3 1 A 3 2.6 1.2 1.6 270 450 P 3 4.2 1 4.2"},
    {U'Q', 6.0, "A 3 4 2 3 0 360 P 3.4 5.6 4.9 7.3"},
    {U'R', 5.2, "P 1 7 1 1 3 1 A 3 2.6 1.2 1.6 270 450 P 3 4.2 1 4.2 P 2.6 4.2 4.3 7"},
    {U'S', 5.0, "A 2.6 2.5 1.6 1.5 330 90 A 2.6 5.5 1.6 1.5 270 510"},
    {U'T', 5.6, "P 1 1 4.6 1 P 2.8 1 2.8 7"},
    {U'U', 5.2, "P 1 1 1 5 A 2.6 5 1.6 2 180 0 P 4.2 5 4.2 1"},
    {U'V', 5.4, "P 1 1 2.7 7 4.4 1"},
    {U'W', 7.0, "P 1 1 2 7 3.5 2.5 5 7 6 1"},
    {U'X', 5.2, "P 1 1 4.2 7 P 4.2 1 1 7"},
    {U'Y', 5.4, "P 1 1 2.7 4 4.4 1 P 2.7 4 2.7 7"},
    {U'Z', 5.2, "P 1 1 4.2 1 1 7 4.2 7"},
    {U'[', 3.2, "P 2.4 1 1.2 1 1.2 7.6 2.4 7.6"},
    {U'\\', 4.2, "P 1 1 3.2 7.5"},
    {U']', 3.2, "P 0.8 1 2 1 2 7.6 0.8 7.6"},
    {U'^', 4.4, "P 1 3 2.2 1 3.4 3"},
    {U'_', 4.8, "P 0.8 8.4 4 8.4"},
    {U'`', 2.8, "P 1 1 1.8 2"},
    {U'a', 4.8, "A 2.4 5 1.4 2 0 360 P 3.8 3 3.8 7"},
    {U'b', 4.8, "P 1 1 1 7 A 2.4 5 1.4 2 0 360"},
    {U'c', 4.6, "A 2.5 5 1.5 2 45 315"},
    {U'd', 4.8, "A 2.4 5 1.4 2 0 360 P 3.8 1 3.8 7"},
    {U'e', 4.8, "P 1 5 4 5 A 2.5 5 1.5 2 360 45"},
    {U'f', 4.0, "P 2 7 2 2.2 A 2.7 2.2 0.7 1 180 315 P 1 3.2 3.2 3.2"},
    {U'g', 4.8, "A 2.4 4.8 1.4 1.8 0 360 P 3.8 3 3.8 8 A 2.4 8 1.4 1 0 150"},
    {U'h', 4.8, "P 1 1 1 7 A 2.4 4.5 1.4 1.5 180 360 P 3.8 4.5 3.8 7"},
    {U'i', 2.8, "P 1.4 3 1.4 7 P 1.4 1.4 1.4 1.9"},
    {U'j', 3.0, "P 2 3 2 8.3 A 1.3 8.3 0.7 0.8 0 120 P 2 1.4 2 1.9"},
    {U'k', 4.6, "P 1 1 1 7 P 3.6 3 1 5.4 P 1.9 4.6 3.8 7"},
    {U'l', 2.8, "P 1.4 1 1.4 7"},
    {U'm', 6.8, "P 1 3 1 7 A 2.2 4.3 1.2 1.3 180 360 P 3.4 4.3 3.4 7 A 4.6 4.3 1.2 1.3 180 360 P 5.8 4.3 5.8 7"},
    {U'n', 4.8, "P 1 3 1 7 A 2.4 4.5 1.4 1.5 180 360 P 3.8 4.5 3.8 7"},
    {U'o', 4.8, "A 2.4 5 1.4 2 0 360"},
    {U'p', 4.8, "P 1 3 1 9.4 A 2.4 5 1.4 2 0 360"},
    {U'q', 4.8, "A 2.4 5 1.4 2 0 360 P 3.8 3 3.8 9.4"},
    {U'r', 3.8, "P 1 3 1 7 A 2.2 4.4 1.2 1.4 180 300"},
    {U's', 4.4, "A 2.2 4 1.2 1 330 90 A 2.2 6 1.2 1 270 510"},
    {U't', 3.8, "P 1.8 1.8 1.8 6.3 A 2.5 6.3 0.7 0.7 180 90 P 1 3 3 3"},
    {U'u', 4.8, "P 1 3 1 5.5 A 2.4 5.5 1.4 1.5 180 0 P 3.8 3 3.8 7"},
    {U'v', 4.8, "P 1 3 2.4 7 3.8 3"},
    {U'w', 6.4, "P 1 3 2 7 3.2 4 4.4 7 5.4 3"},
    {U'x', 4.8, "P 1 3 3.8 7 P 3.8 3 1 7"},
    {U'y', 4.8, "P 1 3 2.4 7 P 3.8 3 1.6 9.3"},
    {U'z', 4.6, "P 1 3 3.6 3 1 7 3.6 7"},
    {U'{', 3.4, "P 2.6 1 2 1.3 2 3.6 1.2 4.2 2 4.8 2 7.3 2.6 7.6"},
    {U'|', 2.8, "P 1.4 0.8 1.4 9"},
    {U'}', 3.4, "P 0.8 1 1.4 1.3 1.4 3.6 2.2 4.2 1.4 4.8 1.4 7.3 0.8 7.6"},
    {U'~', 4.6, "P 1 4.8 1.8 4.2 2.8 4.8 3.6 4.2"},
    {U'–', 5.0, "P 0.8 4.6 4.2 4.6"},
    {U'—', 8.0, "P 0.8 4.6 7.2 4.6"},
    {U'‘', 2.4, "P 1.1 2.6 1.3 1"},
    {U'’', 2.4, "P 1.3 1 1.1 2.6"},
    {U'“', 3.6, "P 1 2.6 1.2 1 P 2.4 2.6 2.6 1"},
    {U'”', 3.6, "P 1.2 1 1 2.6 P 2.6 1 2.4 2.6"},
    {U'…', 6.0, "P 1.2 6.6 1.2 7 P 3 6.6 3 7 P 4.8 6.6 4.8 7"},
};

constexpr GlyphSource kFallback{0, 4.6, "P 1 2 3.6 2 3.6 7 1 7 1 2"};

std::vector<std::vector<PointF>> parse_path(std::string_view path) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < path.size()) {
    while (pos < path.size() && path[pos] == ' ') ++pos;
    const auto start = pos;
    while (pos < path.size() && path[pos] != ' ') ++pos;
    if (pos > start) tokens.push_back(path.substr(start, pos - start));
  }

  auto number = [](std::string_view tok) {
    double v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{}) throw Error(ErrorCode::Parse, "bad glyph number");
    return v;
  };

  std::vector<std::vector<PointF>> strokes;
  std::size_t i = 0;
  while (i < tokens.size()) {
    const auto cmd = tokens[i++];
    if (cmd == "P") {
      std::vector<PointF> pts;
      while (i + 1 < tokens.size() && tokens[i] != "P" && tokens[i] != "A") {
        pts.push_back({number(tokens[i]), number(tokens[i + 1])});
        i += 2;
      }
      strokes.push_back(std::move(pts));
    } else if (cmd == "A") {
      if (i + 6 > tokens.size()) throw Error(ErrorCode::Parse, "short arc");
      const double cx = number(tokens[i]), cy = number(tokens[i + 1]);
      const double rx = number(tokens[i + 2]), ry = number(tokens[i + 3]);
      const double a0 = number(tokens[i + 4]), a1 = number(tokens[i + 5]);
      i += 6;
      const int steps = std::max(2, static_cast<int>(std::ceil(std::abs(a1 - a0) / 15.0)));
      std::vector<PointF> pts;
      for (int k = 0; k <= steps; ++k) {
        const double deg = a0 + (a1 - a0) * k / steps;
        const double rad = deg * std::numbers::pi / 180.0;
        pts.push_back({cx + rx * std::cos(rad), cy + ry * std::sin(rad)});
      }
      strokes.push_back(std::move(pts));
    } else {
      throw Error(ErrorCode::Parse, "unknown glyph command");
    }
  }
  return strokes;
}

GlyphMask rasterize_glyph(const Font::Glyph& glyph, int advance_px, int font_size) {
  const double scale = font_size / Font::kEmUnits;
  Image canvas(advance_px, font_size, Rgb{0, 0, 0});
  const Rgb on{255, 255, 255};
  for (const auto& stroke : glyph.strokes) {
    std::vector<PointF> scaled;
    scaled.reserve(stroke.size());
    for (const auto& p : stroke) scaled.push_back({p.x * scale, p.y * scale});
    if (scaled.size() == 1) scaled.push_back(scaled.front());
    draw_polyline(canvas, scaled, Font::stroke_px(font_size), on);
  }
  GlyphMask mask{advance_px, font_size, {}};
  mask.ink.resize(static_cast<std::size_t>(advance_px) * font_size);
  for (int y = 0; y < font_size; ++y) {
    for (int x = 0; x < advance_px; ++x) {
      mask.ink[static_cast<std::size_t>(y) * advance_px + x] = canvas.at(x, y).r != 0 ? 1 : 0;
    }
  }
  return mask;
}

}  // namespace

Font::Font() {
  for (const auto& src : kGlyphs) glyphs_[src.cp] = Glyph{src.advance, parse_path(src.path)};
  fallback_ = Glyph{kFallback.advance, parse_path(kFallback.path)};
}

const Font& Font::bundled() {
  static const Font font;
  return font;
}

const Font::Glyph& Font::glyph(char32_t cp) const {
  const auto it = glyphs_.find(cp);
  return it == glyphs_.end() ? fallback_ : it->second;
}

int Font::advance_px(char32_t cp, int font_size) const {
  return static_cast<int>(std::lround(glyph(cp).advance * font_size / kEmUnits));
}

int Font::text_width_px(std::string_view utf8_text, int font_size) const {
  int width = 0;
  std::size_t pos = 0;
  while (pos < utf8_text.size()) width += advance_px(utf8::next(utf8_text, pos), font_size);
  return width;
}

int Font::widest_advance_px(int font_size) const {
  int widest = advance_px(0xFFFF, font_size);
  for (const auto& [cp, g] : glyphs_) widest = std::max(widest, advance_px(cp, font_size));
  return widest;
}

int Font::baseline_px(int font_size) {
  return static_cast<int>(std::lround(kBaselineUnits * font_size / kEmUnits));
}

int Font::stroke_px(int font_size) {
  return std::max(1, static_cast<int>(std::lround(font_size / kEmUnits)));
}

std::vector<char32_t> Font::codepoints() const {
  std::vector<char32_t> out;
  for (const auto& [cp, g] : glyphs_) out.push_back(cp);
  std::sort(out.begin(), out.end());
  return out;
}

GlyphAtlas::GlyphAtlas(const Font& font, int font_size) : font_size_(font_size) {
  for (const auto cp : font.codepoints()) {
    masks_[cp] = rasterize_glyph(font.glyph(cp), font.advance_px(cp, font_size), font_size);
  }
  fallback_ = rasterize_glyph(font.glyph(0xFFFF), font.advance_px(0xFFFF, font_size), font_size);
}

const GlyphMask& GlyphAtlas::mask(char32_t cp) const {
  const auto it = masks_.find(cp);
  return it == masks_.end() ? fallback_ : it->second;
}

void GlyphAtlas::draw_text(Image& img, std::string_view utf8_text, int x, int y, Rgb color) const {
  std::size_t pos = 0;
  int pen = x;
  while (pos < utf8_text.size()) {
    const auto& m = mask(utf8::next(utf8_text, pos));
    for (int gy = 0; gy < m.height; ++gy) {
      for (int gx = 0; gx < m.width; ++gx) {
        if (m.at(gx, gy) && img.in_bounds(pen + gx, y + gy)) img.set(pen + gx, y + gy, color);
      }
    }
    pen += m.width;
  }
}

}  // namespace haur
