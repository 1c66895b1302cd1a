#include "haur/image.hpp"

#include <algorithm>
#include <cmath>

#include "haur/error.hpp"

namespace haur {

Rect Rect::united(const Rect& o) const {
  if (empty()) return o;
  if (o.empty()) return *this;
  const int x0 = std::min(x, o.x);
  const int y0 = std::min(y, o.y);
  const int x1 = std::max(right(), o.right());
  const int y1 = std::max(bottom(), o.bottom());
  return {x0, y0, x1 - x0, y1 - y0};
}

Image::Image(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw Error(ErrorCode::InvalidArgument, "negative image size");
  data_.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = fill.r;
    data_[i + 1] = fill.g;
    data_[i + 2] = fill.b;
  }
}

Rgb Image::at(int x, int y) const {
  const auto i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  return {data_[i], data_[i + 1], data_[i + 2]};
}

void Image::set(int x, int y, Rgb c) {
  const auto i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  data_[i] = c.r;
  data_[i + 1] = c.g;
  data_[i + 2] = c.b;
}

Image Image::crop(const Rect& r) const {
  Image out(r.w, r.h, Rgb{});
  for (int y = 0; y < r.h; ++y) {
    const auto* src = data_.data() + (static_cast<std::size_t>(r.y + y) * width_ + r.x) * 3;
    std::copy(src, src + static_cast<std::size_t>(r.w) * 3,
              out.data_.begin() + static_cast<std::ptrdiff_t>(y) * r.w * 3);
  }
  return out;
}

void draw_segment(Image& img, PointF a, PointF b, double thickness, Rgb color) {
  const double radius = thickness / 2.0;
  const double r2 = radius * radius;
  const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - radius)) - 1);
  const int x1 = std::min(img.width() - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + radius)) + 1);
  const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - radius)) - 1);
  const int y1 = std::min(img.height() - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + radius)) + 1);
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double px = x + 0.5 - a.x;
      const double py = y + 0.5 - a.y;
      double t = len2 > 0 ? (px * dx + py * dy) / len2 : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      const double ex = px - t * dx;
      const double ey = py - t * dy;
      if (ex * ex + ey * ey <= r2) img.set(x, y, color);
    }
  }
}

void draw_polyline(Image& img, std::span<const PointF> points, double thickness, Rgb color,
                   bool closed) {
  for (std::size_t i = 1; i < points.size(); ++i) {
    draw_segment(img, points[i - 1], points[i], thickness, color);
  }
  if (closed && points.size() > 2) draw_segment(img, points.back(), points.front(), thickness, color);
}

void fill_rect(Image& img, const Rect& r, Rgb color) {
  for (int y = std::max(0, r.y); y < std::min(img.height(), r.bottom()); ++y) {
    for (int x = std::max(0, r.x); x < std::min(img.width(), r.right()); ++x) img.set(x, y, color);
  }
}

Rgb blend(Rgb under, Rgb over, double alpha) {
  // Fixed-point so the result never depends on floating-point rounding mode.
  const int a = static_cast<int>(std::lround(alpha * 256.0));
  auto mix = [a](int u, int o) {
    return static_cast<std::uint8_t>((u * (256 - a) + o * a + 128) >> 8);
  };
  return {mix(under.r, over.r), mix(under.g, over.g), mix(under.b, over.b)};
}

void blend_rect(Image& img, const Rect& r, Rgb color, double alpha) {
  for (int y = std::max(0, r.y); y < std::min(img.height(), r.bottom()); ++y) {
    for (int x = std::max(0, r.x); x < std::min(img.width(), r.right()); ++x) {
      img.set(x, y, blend(img.at(x, y), color, alpha));
    }
  }
}

Rect ink_bounds(const Image& img, Rgb background) {
  int x0 = img.width(), y0 = img.height(), x1 = -1, y1 = -1;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (img.at(x, y) == background) continue;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) return {};
  return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

CropResult crop_to_content(const Image& img, Rgb background, int margin_px) {
  const auto ink = ink_bounds(img, background);
  if (ink.empty()) throw Error(ErrorCode::BlankImage, "image has no ink");
  const int x0 = std::max(0, ink.x - margin_px);
  const int y0 = std::max(0, ink.y - margin_px);
  const int x1 = std::min(img.width(), ink.right() + margin_px);
  const int y1 = std::min(img.height(), ink.bottom() + margin_px);
  const Rect box{x0, y0, x1 - x0, y1 - y0};
  return {img.crop(box), x0, y0};
}

}  // namespace haur
