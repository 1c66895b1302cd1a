#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "haur/annotate.hpp"
#include "haur/corpus.hpp"
#include "haur/image.hpp"
#include "haur/typeset.hpp"

namespace haur {

inline constexpr int kManifestSchema = 1;
inline constexpr int kDefaultCropMargin = 16;
inline constexpr std::size_t kDefaultQuota = 200;

// Everything that shapes a sample's pixels besides the chunk, kind and seed.
struct SampleParams {
  RenderConfig render;
  NoiseParams noise;
  int crop_margin_px = kDefaultCropMargin;
};

struct SampleManifest {
  std::string sample_id;
  std::string doc_id;
  std::string chunk_id;
  AnnotationKind kind = AnnotationKind::Highlight;
  Target target;
  std::string ground_truth;
  std::string full_text;
  NoiseRecord noise;
  Span clean_span;
  Span noised_span;
  std::uint64_t seed = 0;
  std::string render_config_digest;
  std::string image_path;  // relative to the dataset root
  int crop_offset_x = 0;
  int crop_offset_y = 0;
};

struct DatasetManifest {
  std::string dataset_id;
  std::uint64_t creation_seed = 0;
  SampleParams params;
  std::size_t max_tokens = kDefaultMaxTokens;
  std::size_t quota = kDefaultQuota;
  std::map<std::string, std::size_t> counts;  // kind name -> samples
  std::vector<std::string> warnings;
  std::vector<SampleManifest> samples;
  std::map<std::string, std::string> split;  // sample_id -> train|val|test
  std::optional<std::uint64_t> split_seed;
  std::array<double, 3> split_ratios{0.8, 0.1, 0.1};

  const SampleManifest* find(std::string_view sample_id) const;
};

// One fully rendered sample with its intermediate stages.
struct SampleRender {
  PageLayout layout;
  AnnotationSpec spec;
  Image page;       // text only, uncropped
  Image annotated;  // text + annotation, uncropped
  CropResult crop;
  std::string ground_truth;
};

std::uint64_t sample_seed(std::uint64_t dataset_seed, std::string_view chunk_id,
                          AnnotationKind kind);
std::string sample_id(AnnotationKind kind, std::string_view chunk_id);

// Layout -> target -> noise -> rasterize -> annotate -> crop.
SampleRender render_sample(const TextChunk& chunk, AnnotationKind kind, std::uint64_t seed,
                           const SampleParams& params);

// Chunks of all documents interleaved: chunk 0 of every document (doc_id
// order), then chunk 1, and so on.
std::vector<TextChunk> round_robin_pool(const std::vector<SourceDocument>& docs,
                                        std::size_t max_tokens);

struct SynthOptions {
  std::filesystem::path corpus_dir;
  std::filesystem::path out_dir;
  SampleParams params;
  std::size_t quota = kDefaultQuota;
  std::uint64_t seed = 0;
  std::size_t max_tokens = kDefaultMaxTokens;
  unsigned jobs = 1;
};

// Writes images/, texts/, manifest.json and stats.csv under out_dir. Kinds
// that run out of eligible chunks get an InsufficientChunks warning in the
// manifest instead of an exception.
DatasetManifest synthesize_dataset(const SynthOptions& options);

// As above over an already loaded corpus; corpus_dir is ignored.
DatasetManifest synthesize_dataset(const std::vector<SourceDocument>& docs,
                                   const SynthOptions& options);

std::string manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(std::string_view json);
void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);
DatasetManifest load_manifest(const std::filesystem::path& path);

// Stratified, chunk-atomic split. Throws BadRatios.
void split_dataset(DatasetManifest& manifest, std::array<double, 3> ratios, std::uint64_t seed);

inline constexpr std::array<const char*, 3> kSplitNames = {"train", "val", "test"};

struct Histogram {
  std::vector<std::size_t> counts;  // bin i covers token lengths (50i, 50(i+1)]
  std::size_t total() const;
};

struct DistributionReport {
  static constexpr std::size_t kBinWidth = 50;
  std::map<AnnotationKind, Histogram> full_text;
  std::map<AnnotationKind, Histogram> ground_truth;

  static std::size_t bin_of(std::size_t tokens);
  std::string table() const;
  std::string csv() const;
};

DistributionReport compute_stats(const DatasetManifest& manifest);

}  // namespace haur
