#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "haur/corpus.hpp"
#include "haur/image.hpp"
#include "haur/typeset.hpp"

namespace haur {

enum class AnnotationKind { Highlight, Underline, Squiggly, Rect, ParagraphMark };

inline constexpr std::array<AnnotationKind, 5> kAllKinds = {
    AnnotationKind::Highlight, AnnotationKind::Underline, AnnotationKind::Squiggly,
    AnnotationKind::Rect, AnnotationKind::ParagraphMark};

// "highlight", "underline", "squiggly", "rect", "pm".
std::string_view to_string(AnnotationKind kind);
AnnotationKind parse_kind(std::string_view name);
std::size_t kind_index(AnnotationKind kind);
bool is_noisy_kind(AnnotationKind kind);

struct NoiseRecord {
  bool applied = false;
  std::size_t lead_chars = 0;   // code points taken from the end of the previous sentence
  std::size_t trail_chars = 0;  // code points taken from the start of the next sentence
  friend bool operator==(const NoiseRecord&, const NoiseRecord&) = default;
};

struct NoiseParams {
  double probability = 0.5;
  std::size_t max_chars = 12;
};

struct StrokeStyle {
  Rgb color;
  int thickness_px = 2;
  double jitter_amp_px = 1.5;
  double squiggle_amplitude_px = 2.5;
  double squiggle_period_px = 14.0;
  double alpha = 0.4;
};

StrokeStyle default_style(AnnotationKind kind);

struct SentenceTarget {
  std::size_t sentence = 0;
};
struct ParagraphTarget {
  std::size_t paragraph = 0;
};
struct TokenSpanTarget {
  Span span;  // flattened-text offsets covering 1-5 whole tokens of one sentence
};
using Target = std::variant<SentenceTarget, ParagraphTarget, TokenSpanTarget>;

struct AnnotationSpec {
  AnnotationKind kind = AnnotationKind::Highlight;
  Target target;
  NoiseRecord noise;
  std::uint64_t seed = 0;
  StrokeStyle style;
  Span clean_span;   // target in flattened-text offsets
  Span noised_span;  // clean_span widened by the noise extension
};

// Seeds derived from a sample seed for each random stage.
std::uint64_t target_seed(std::uint64_t sample_seed);
std::uint64_t noise_seed(std::uint64_t sample_seed);
std::uint64_t stroke_seed(std::uint64_t sample_seed);

// Uniform target choice. Throws SingleParagraphChunk for ParagraphMark on a
// one-paragraph chunk.
AnnotationSpec select_target(const TextChunk& chunk, AnnotationKind kind, std::uint64_t seed);

// Rect target whose tokens share one laid-out line. Redraws up to 32 times,
// then falls back to a single token.
AnnotationSpec select_single_line_rect(const TextChunk& chunk, const PageLayout& layout,
                                       std::uint64_t seed);

// Extends Highlight/Underline/Squiggly targets into neighbouring sentences of
// the same paragraph. Other kinds are returned unchanged.
AnnotationSpec apply_noise(AnnotationSpec spec, const TextChunk& chunk, const NoiseParams& params,
                           std::uint64_t seed);

// Draws the annotation onto a copy of `image`. Throws GeometryMismatch when the
// spec does not fit the layout.
Image render_annotation(const Image& image, const PageLayout& layout, const AnnotationSpec& spec);

std::string ground_truth(const TextChunk& chunk, const AnnotationSpec& spec);

}  // namespace haur
