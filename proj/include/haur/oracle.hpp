#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "haur/annotate.hpp"
#include "haur/dataset.hpp"
#include "haur/image.hpp"
#include "haur/typeset.hpp"

namespace haur {

// Exhaustive recursion over edit scripts. Inputs are limited to 8 code points
// (InputTooLong otherwise); meant for tests only.
std::size_t brute_force_levenshtein(std::string_view a, std::string_view b);

struct RecoveredSpan {
  std::string sample_id;
  AnnotationKind kind = AnnotationKind::Highlight;
  std::string recovered_text;
  std::vector<std::size_t> word_indices;
  std::optional<std::size_t> paragraph;  // ParagraphMark only
};

struct VerifyResult {
  RecoveredSpan recovered;
  bool passed = false;
  std::string reason;  // empty when passed
};

// Regenerates the sample from its row, compares the bytes with `png` when
// given (RegenerationMismatch on any difference), then recovers the annotated
// words from the pixel difference between the annotated image and the plain
// page and checks them against the clean and noised spans.
VerifyResult round_trip_verify(const SampleManifest& sample, const SampleParams& params,
                               const std::vector<std::uint8_t>* png = nullptr);

// Reads the image at dataset_root / sample.image_path.
VerifyResult round_trip_verify(const SampleManifest& sample, const SampleParams& params,
                               const std::filesystem::path& dataset_root);

struct PixelPrediction {
  AnnotationKind kind = AnnotationKind::Highlight;
  std::string text;
};

// Model-free baseline: classifies annotation pixels by palette, re-derives the
// layout from full_text, registers it against the text ink and reads off the
// covered words. Throws NoAnnotationFound when no annotation ink is present.
PixelPrediction pixel_extract(const Image& image, std::string_view full_text,
                              const RenderConfig& config = RenderConfig{});

}  // namespace haur
