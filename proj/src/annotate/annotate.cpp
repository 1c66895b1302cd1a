#include "haur/annotate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "haur/error.hpp"
#include "haur/rng.hpp"
#include "haur/utf8.hpp"

namespace haur {

namespace {

constexpr int kRectAttempts = 32;
constexpr int kRectInflatePx = 4;
constexpr int kHighlightInflatePx = 2;
constexpr double kUnderlineOffsetPx = 3.0;
constexpr double kSquiggleOffsetPx = 3.5;
constexpr double kUnderlineSegmentPx = 24.0;
constexpr double kStarInnerRatio = 0.38;

std::size_t paragraph_of(const TextChunk& chunk, std::size_t sentence) {
  return chunk.sentences.at(sentence).paragraph_index;
}

std::vector<Rect> runs_or_mismatch(const PageLayout& layout, Span span) {
  try {
    return sentence_runs(layout, span);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptySpan) throw;
    throw Error(ErrorCode::GeometryMismatch, "annotation span has no words in the layout");
  }
}

bool single_line(const PageLayout& layout, Span span) {
  const auto words = words_in_span(layout, span);
  if (words.empty()) return false;
  return layout.words[words.front()].line_index == layout.words[words.back()].line_index;
}

void draw_underline(Image& img, const PageLayout& layout, const Rect& run,
                    const StrokeStyle& style, Rng& rng) {
  const double half = style.thickness_px / 2.0;
  const double baseline = layout.baseline_y(run);
  const double floor_y = baseline + half + 0.5;
  const double x0 = run.x + half;
  const double x1 = std::max(x0, run.right() - half);
  const int segments = std::max(1, static_cast<int>(std::ceil((x1 - x0) / kUnderlineSegmentPx)));
  std::vector<PointF> pts;
  for (int k = 0; k <= segments; ++k) {
    const double x = x0 + (x1 - x0) * k / segments;
    const double jitter = rng.uniform(-style.jitter_amp_px, style.jitter_amp_px);
    pts.push_back({x, std::max(floor_y, baseline + kUnderlineOffsetPx + jitter)});
  }
  draw_polyline(img, pts, style.thickness_px, style.color);
}

void draw_squiggle(Image& img, const PageLayout& layout, const Rect& run, const StrokeStyle& style,
                   Rng& rng) {
  const double half = style.thickness_px / 2.0;
  const double baseline = layout.baseline_y(run);
  const double floor_y = baseline + half + 0.5;
  const double center = baseline + kSquiggleOffsetPx;
  const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double x0 = run.x + half;
  const double x1 = std::max(x0, run.right() - half);
  std::vector<PointF> pts;
  for (double x = x0;; x += 1.0) {
    const double xc = std::min(x, x1);
    const double wave = std::sin(2.0 * std::numbers::pi * (xc - x0) / style.squiggle_period_px + phase);
    pts.push_back({xc, std::max(floor_y, center + style.squiggle_amplitude_px * wave)});
    if (xc >= x1) break;
  }
  draw_polyline(img, pts, style.thickness_px, style.color);
}

void draw_box(Image& img, const std::vector<Rect>& runs, const StrokeStyle& style, Rng& rng) {
  Rect box;
  for (const auto& r : runs) box = box.united(r);
  box = box.inflated(kRectInflatePx, kRectInflatePx);
  const double j = style.jitter_amp_px;
  auto corner = [&](double x, double y) {
    const double dx = rng.uniform(-j, j);
    const double dy = rng.uniform(-j, j);
    return PointF{x + dx, y + dy};
  };
  const std::vector<PointF> pts = {corner(box.x, box.y), corner(box.right(), box.y),
                                   corner(box.right(), box.bottom()), corner(box.x, box.bottom())};
  draw_polyline(img, pts, style.thickness_px, style.color, true);
}

void draw_star(Image& img, const Rect& slot, const StrokeStyle& style) {
  const double cx = slot.x + slot.w / 2.0;
  const double cy = slot.y + slot.h / 2.0;
  const double outer = std::min(slot.w, slot.h) / 2.0 - style.thickness_px;
  std::vector<PointF> pts;
  for (int k = 0; k < 10; ++k) {
    const double angle = (-90.0 + 36.0 * k) * std::numbers::pi / 180.0;
    const double r = k % 2 == 0 ? outer : outer * kStarInnerRatio;
    pts.push_back({cx + r * std::cos(angle), cy + r * std::sin(angle)});
  }
  draw_polyline(img, pts, style.thickness_px, style.color, true);
}

}  // namespace

std::string_view to_string(AnnotationKind kind) {
  switch (kind) {
    case AnnotationKind::Highlight: return "highlight";
    case AnnotationKind::Underline: return "underline";
    case AnnotationKind::Squiggly: return "squiggly";
    case AnnotationKind::Rect: return "rect";
    case AnnotationKind::ParagraphMark: return "pm";
  }
  return "unknown";
}

AnnotationKind parse_kind(std::string_view name) {
  for (const auto k : kAllKinds) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::Parse, "unknown annotation kind: " + std::string(name));
}

std::size_t kind_index(AnnotationKind kind) { return static_cast<std::size_t>(kind); }

bool is_noisy_kind(AnnotationKind kind) {
  return kind == AnnotationKind::Highlight || kind == AnnotationKind::Underline ||
         kind == AnnotationKind::Squiggly;
}

StrokeStyle default_style(AnnotationKind kind) {
  StrokeStyle s;
  switch (kind) {
    case AnnotationKind::Highlight:
      s.color = {255, 214, 0};
      s.jitter_amp_px = 0;
      break;
    case AnnotationKind::Underline:
      s.color = {220, 30, 30};
      break;
    case AnnotationKind::Squiggly:
      s.color = {0, 110, 230};
      s.jitter_amp_px = 0;
      break;
    case AnnotationKind::Rect:
      s.color = {0, 160, 60};
      break;
    case AnnotationKind::ParagraphMark:
      s.color = {200, 0, 200};
      s.thickness_px = 1;
      s.jitter_amp_px = 0;
      break;
  }
  return s;
}

std::uint64_t target_seed(std::uint64_t sample_seed) { return mix_seed(sample_seed, 1); }
std::uint64_t noise_seed(std::uint64_t sample_seed) { return mix_seed(sample_seed, 2); }
std::uint64_t stroke_seed(std::uint64_t sample_seed) { return mix_seed(sample_seed, 3); }

AnnotationSpec select_target(const TextChunk& chunk, AnnotationKind kind, std::uint64_t seed) {
  if (chunk.sentences.empty()) throw Error(ErrorCode::InvalidArgument, "chunk has no sentences");
  Rng rng(seed);
  AnnotationSpec spec;
  spec.kind = kind;
  spec.seed = seed;
  spec.style = default_style(kind);
  switch (kind) {
    case AnnotationKind::Highlight:
    case AnnotationKind::Underline:
    case AnnotationKind::Squiggly: {
      const auto s = static_cast<std::size_t>(rng.below(chunk.sentences.size()));
      spec.target = SentenceTarget{s};
      spec.clean_span = chunk.sentence_span(s);
      break;
    }
    case AnnotationKind::ParagraphMark: {
      if (chunk.paragraphs.size() < 2) {
        throw Error(ErrorCode::SingleParagraphChunk, "chunk " + chunk.chunk_id + " has one paragraph");
      }
      const auto p = static_cast<std::size_t>(rng.below(chunk.paragraphs.size()));
      spec.target = ParagraphTarget{p};
      spec.clean_span = chunk.paragraph_span(p);
      break;
    }
    case AnnotationKind::Rect: {
      const auto s = static_cast<std::size_t>(rng.below(chunk.sentences.size()));
      const Span sentence = chunk.sentence_span(s);
      const auto text = chunk.full_text();
      auto tokens = token_spans(std::string_view(text).substr(sentence.begin, sentence.size()));
      const auto max_len = std::min<std::size_t>(5, tokens.size());
      const auto len = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(max_len)));
      const auto start = static_cast<std::size_t>(rng.below(tokens.size() - len + 1));
      const Span span{sentence.begin + tokens[start].begin,
                      sentence.begin + tokens[start + len - 1].end};
      spec.target = TokenSpanTarget{span};
      spec.clean_span = span;
      break;
    }
  }
  spec.noised_span = spec.clean_span;
  return spec;
}

AnnotationSpec select_single_line_rect(const TextChunk& chunk, const PageLayout& layout,
                                       std::uint64_t seed) {
  AnnotationSpec first;
  for (int attempt = 0; attempt < kRectAttempts; ++attempt) {
    auto spec = select_target(chunk, AnnotationKind::Rect,
                              attempt == 0 ? seed : mix_seed(seed, static_cast<std::uint64_t>(attempt)));
    if (single_line(layout, spec.clean_span)) {
      spec.seed = seed;
      return spec;
    }
    if (attempt == 0) first = spec;
  }
  const auto words = words_in_span(layout, first.clean_span);
  if (words.empty()) throw Error(ErrorCode::GeometryMismatch, "rect target missing from layout");
  first.seed = seed;
  first.clean_span = first.noised_span = layout.words[words.front()].char_span;
  first.target = TokenSpanTarget{first.clean_span};
  return first;
}

AnnotationSpec apply_noise(AnnotationSpec spec, const TextChunk& chunk, const NoiseParams& params,
                           std::uint64_t seed) {
  spec.noise = NoiseRecord{};
  spec.noised_span = spec.clean_span;
  if (!is_noisy_kind(spec.kind)) return spec;
  const auto* target = std::get_if<SentenceTarget>(&spec.target);
  if (target == nullptr) throw Error(ErrorCode::InvalidArgument, "noise needs a sentence target");

  // Every draw happens unconditionally so the stream layout never depends on
  // the chunk's shape.
  Rng rng(seed);
  const bool fire = rng.bernoulli(params.probability);
  const auto side = rng.below(3);  // 0 lead, 1 trail, 2 both
  const auto cap = static_cast<std::int64_t>(std::max<std::size_t>(1, params.max_chars));
  auto lead = static_cast<std::size_t>(rng.uniform_int(1, cap));
  auto trail = static_cast<std::size_t>(rng.uniform_int(1, cap));
  if (!fire || params.max_chars == 0) return spec;

  const std::size_t s = target->sentence;
  const auto [first, last] = chunk.sentence_range(paragraph_of(chunk, s));
  const bool has_prev = s > first;
  const bool has_next = s + 1 < last;
  bool want_lead = side != 1;
  bool want_trail = side != 0;
  if (want_lead && !has_prev) {
    want_lead = false;
    want_trail = has_next;
  }
  if (want_trail && !has_next) {
    want_trail = false;
    want_lead = has_prev;
  }
  if (!want_lead && !want_trail) return spec;

  const std::string text = chunk.full_text();
  if (want_lead) {
    const Span prev = chunk.sentence_span(s - 1);
    lead = std::min(lead, utf8::length(chunk.sentences[s - 1].text));
    spec.noised_span.begin = utf8::retreat(text, prev.end, lead, prev.begin);
    spec.noise.lead_chars = lead;
  }
  if (want_trail) {
    const Span next = chunk.sentence_span(s + 1);
    trail = std::min(trail, utf8::length(chunk.sentences[s + 1].text));
    spec.noised_span.end = utf8::advance(text, next.begin, trail, next.end);
    spec.noise.trail_chars = trail;
  }
  spec.noise.applied = true;
  return spec;
}

Image render_annotation(const Image& image, const PageLayout& layout, const AnnotationSpec& spec) {
  const auto& cfg = layout.config;
  if (spec.style.color == cfg.foreground || spec.style.color == cfg.background) {
    throw Error(ErrorCode::InvalidConfig, "annotation color collides with page colors");
  }
  Image out = image;
  Rng rng(stroke_seed(spec.seed));
  switch (spec.kind) {
    case AnnotationKind::Highlight:
      for (const auto& run : runs_or_mismatch(layout, spec.noised_span)) {
        blend_rect(out, run.inflated(0, kHighlightInflatePx), spec.style.color, spec.style.alpha);
      }
      break;
    case AnnotationKind::Underline:
      for (const auto& run : runs_or_mismatch(layout, spec.noised_span)) {
        draw_underline(out, layout, run, spec.style, rng);
      }
      break;
    case AnnotationKind::Squiggly:
      for (const auto& run : runs_or_mismatch(layout, spec.noised_span)) {
        draw_squiggle(out, layout, run, spec.style, rng);
      }
      break;
    case AnnotationKind::Rect:
      draw_box(out, runs_or_mismatch(layout, spec.clean_span), spec.style, rng);
      break;
    case AnnotationKind::ParagraphMark: {
      const auto* target = std::get_if<ParagraphTarget>(&spec.target);
      if (target == nullptr || !layout.pm_placeholder || layout.pm_paragraph != target->paragraph) {
        throw Error(ErrorCode::GeometryMismatch, "no placeholder reserved for the marked paragraph");
      }
      fill_rect(out, *layout.pm_placeholder, cfg.background);
      draw_star(out, *layout.pm_placeholder, spec.style);
      break;
    }
  }
  return out;
}

std::string ground_truth(const TextChunk& chunk, const AnnotationSpec& spec) {
  if (const auto* t = std::get_if<SentenceTarget>(&spec.target)) {
    return chunk.sentences.at(t->sentence).text;
  }
  if (const auto* t = std::get_if<ParagraphTarget>(&spec.target)) {
    return chunk.paragraphs.at(t->paragraph);
  }
  const auto& span = std::get<TokenSpanTarget>(spec.target).span;
  return chunk.full_text().substr(span.begin, span.size());
}

}  // namespace haur
