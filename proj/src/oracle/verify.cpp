#include <algorithm>
#include <climits>

#include "haur/error.hpp"
#include "haur/oracle.hpp"

namespace haur {

namespace {

std::vector<std::size_t> sorted_words(const PageLayout& layout, Span span) {
  return words_in_span(layout, span);
}

bool subset(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::string join_words(const PageLayout& layout, const std::vector<std::size_t>& words) {
  std::string out;
  for (const auto i : words) {
    if (!out.empty()) out += ' ';
    out += layout.words[i].text;
  }
  return out;
}

// Pixels that differ between the stored (cropped) image and the plain page at
// the recorded crop offset, in page coordinates.
struct Diff {
  std::vector<std::pair<int, int>> pixels;
  Rect bounds;
};

Diff pixel_diff(const Image& annotated, const Image& page, int dx, int dy) {
  Diff d;
  int x0 = INT_MAX, y0 = INT_MAX, x1 = -1, y1 = -1;
  for (int y = 0; y < annotated.height(); ++y) {
    for (int x = 0; x < annotated.width(); ++x) {
      const int px = x + dx, py = y + dy;
      const bool same = page.in_bounds(px, py) && page.at(px, py) == annotated.at(x, y);
      if (same) continue;
      d.pixels.emplace_back(px, py);
      x0 = std::min(x0, px);
      y0 = std::min(y0, py);
      x1 = std::max(x1, px);
      y1 = std::max(y1, py);
    }
  }
  if (x1 >= 0) d.bounds = Rect{x0, y0, x1 - x0 + 1, y1 - y0 + 1};
  return d;
}

std::vector<std::size_t> touched_words(const PageLayout& layout, const Diff& diff) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < layout.words.size(); ++i) {
    const auto& box = layout.words[i].bbox;
    if (!box.intersects(diff.bounds)) continue;
    const bool hit = std::any_of(diff.pixels.begin(), diff.pixels.end(),
                                 [&](const auto& p) { return box.contains(p.first, p.second); });
    if (hit) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> enclosed_words(const PageLayout& layout, const Diff& diff) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < layout.words.size(); ++i) {
    if (diff.bounds.contains(layout.words[i].bbox)) out.push_back(i);
  }
  return out;
}

// The paragraph whose first word sits right after the marked blob on its line.
std::optional<std::size_t> marked_paragraph(const PageLayout& layout, const Diff& diff) {
  if (diff.bounds.empty()) return std::nullopt;
  const WordBox* best = nullptr;
  for (const auto& w : layout.words) {
    const bool same_row = w.bbox.y < diff.bounds.bottom() && diff.bounds.y < w.bbox.bottom();
    if (!same_row || w.bbox.x < diff.bounds.right()) continue;
    if (best == nullptr || w.bbox.x < best->bbox.x) best = &w;
  }
  if (best == nullptr) return std::nullopt;
  return best->paragraph_index;
}

VerifyResult fail(VerifyResult r, std::string reason) {
  r.passed = false;
  r.reason = std::move(reason);
  return r;
}

}  // namespace

VerifyResult round_trip_verify(const SampleManifest& sample, const SampleParams& params,
                               const std::vector<std::uint8_t>* png) {
  VerifyResult result;
  result.recovered.sample_id = sample.sample_id;
  result.recovered.kind = sample.kind;

  if (sample.render_config_digest != params.render.digest()) {
    throw Error(ErrorCode::RegenerationMismatch, sample.sample_id + ": render config digest differs");
  }
  const auto chunk = chunk_from_text(sample.chunk_id, sample.doc_id, sample.full_text);
  const auto render = render_sample(chunk, sample.kind, sample.seed, params);
  const auto regenerated = encode_png(render.crop.image);
  Image stored = render.crop.image;
  if (png != nullptr) {
    if (*png != regenerated) {
      throw Error(ErrorCode::RegenerationMismatch, sample.sample_id + ": image bytes differ");
    }
    stored = decode_png(*png);
  }

  const auto& layout = render.layout;
  const auto diff = pixel_diff(stored, render.page, sample.crop_offset_x, sample.crop_offset_y);
  auto& rec = result.recovered;
  switch (sample.kind) {
    case AnnotationKind::Highlight:
    case AnnotationKind::Underline:
    case AnnotationKind::Squiggly:
      rec.word_indices = touched_words(layout, diff);
      break;
    case AnnotationKind::Rect:
      rec.word_indices = enclosed_words(layout, diff);
      break;
    case AnnotationKind::ParagraphMark:
      rec.paragraph = marked_paragraph(layout, diff);
      if (rec.paragraph) {
        for (std::size_t i = 0; i < layout.words.size(); ++i) {
          if (layout.words[i].paragraph_index == *rec.paragraph) rec.word_indices.push_back(i);
        }
      }
      break;
  }
  rec.recovered_text = join_words(layout, rec.word_indices);

  if (render.ground_truth != sample.ground_truth) return fail(result, "ground truth differs from regeneration");
  if (!(render.spec.clean_span == sample.clean_span) || !(render.spec.noised_span == sample.noised_span)) {
    return fail(result, "recorded spans differ from regeneration");
  }
  if (!(render.spec.noise == sample.noise)) return fail(result, "noise record differs from regeneration");
  if (render.crop.offset_x != sample.crop_offset_x || render.crop.offset_y != sample.crop_offset_y) {
    return fail(result, "crop offset differs from regeneration");
  }

  const auto clean = sorted_words(layout, sample.clean_span);
  const auto noised = sorted_words(layout, sample.noised_span);
  if (rec.word_indices.empty()) return fail(result, "no annotated words recovered");
  if (sample.kind == AnnotationKind::ParagraphMark) {
    const auto* t = std::get_if<ParagraphTarget>(&sample.target);
    if (t == nullptr || rec.paragraph != t->paragraph) return fail(result, "marked paragraph differs");
  } else if (!subset(clean, rec.word_indices) || !subset(rec.word_indices, noised)) {
    return fail(result, "recovered words outside [clean, noised]");
  }
  if (!sample.noise.applied && rec.word_indices != clean) {
    return fail(result, "recovered words differ from the clean span");
  }
  if (!sample.noise.applied && rec.recovered_text != sample.ground_truth) {
    return fail(result, "recovered text differs from ground truth");
  }
  result.passed = true;
  return result;
}

VerifyResult round_trip_verify(const SampleManifest& sample, const SampleParams& params,
                               const std::filesystem::path& dataset_root) {
  const auto bytes = read_file_bytes(dataset_root / sample.image_path);
  return round_trip_verify(sample, params, &bytes);
}

}  // namespace haur
