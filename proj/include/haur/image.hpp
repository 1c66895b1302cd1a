#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace haur {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  int right() const { return x + w; }
  int bottom() const { return y + h; }
  bool empty() const { return w <= 0 || h <= 0; }
  bool contains(int px, int py) const { return px >= x && px < right() && py >= y && py < bottom(); }
  bool contains(const Rect& o) const {
    return o.x >= x && o.y >= y && o.right() <= right() && o.bottom() <= bottom();
  }
  bool intersects(const Rect& o) const {
    return x < o.right() && o.x < right() && y < o.bottom() && o.y < bottom();
  }
  Rect inflated(int dx, int dy) const { return {x - dx, y - dy, w + 2 * dx, h + 2 * dy}; }
  Rect united(const Rect& o) const;
  friend bool operator==(const Rect&, const Rect&) = default;
};

struct PointF {
  double x = 0;
  double y = 0;
};

// 8-bit RGB raster, row-major, no padding.
class Image {
 public:
  Image() = default;
  Image(int width, int height, Rgb fill);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return width_ == 0 || height_ == 0; }

  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);
  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  std::span<const std::uint8_t> bytes() const { return data_; }
  std::span<std::uint8_t> bytes() { return data_; }

  Image crop(const Rect& r) const;

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

// Sets every pixel whose center lies within thickness/2 of the segment.
void draw_segment(Image& img, PointF a, PointF b, double thickness, Rgb color);
void draw_polyline(Image& img, std::span<const PointF> points, double thickness, Rgb color,
                   bool closed = false);
void fill_rect(Image& img, const Rect& r, Rgb color);
// Per-pixel alpha blend; alpha in (0, 1].
void blend_rect(Image& img, const Rect& r, Rgb color, double alpha);
Rgb blend(Rgb under, Rgb over, double alpha);

// Bounding box of pixels that differ from `background`; empty Rect if none.
Rect ink_bounds(const Image& img, Rgb background);

struct CropResult {
  Image image;
  int offset_x = 0;  // crop origin in source coordinates
  int offset_y = 0;
};

// Tight ink box inflated by margin_px, clipped to the image. Throws BlankImage.
CropResult crop_to_content(const Image& img, Rgb background, int margin_px = 16);

std::vector<std::uint8_t> encode_png(const Image& img);
Image decode_png(std::span<const std::uint8_t> bytes);
void write_png(const std::filesystem::path& path, const Image& img);
Image read_png(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace haur
