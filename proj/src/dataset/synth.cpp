#include <algorithm>
#include <cstdio>

#include "haur/dataset.hpp"
#include "haur/error.hpp"
#include "haur/parallel.hpp"
#include "haur/rng.hpp"

namespace haur {

namespace {

struct Job {
  const TextChunk* chunk;
  AnnotationKind kind;
};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

SampleManifest make_row(const TextChunk& chunk, AnnotationKind kind, std::uint64_t seed,
                        const SampleRender& render, const RenderConfig& config) {
  SampleManifest row;
  row.sample_id = sample_id(kind, chunk.chunk_id);
  row.doc_id = chunk.doc_id;
  row.chunk_id = chunk.chunk_id;
  row.kind = kind;
  row.target = render.spec.target;
  row.ground_truth = render.ground_truth;
  row.full_text = chunk.full_text();
  row.noise = render.spec.noise;
  row.clean_span = render.spec.clean_span;
  row.noised_span = render.spec.noised_span;
  row.seed = seed;
  row.render_config_digest = config.digest();
  row.image_path = "images/" + std::string(to_string(kind)) + "/" + row.sample_id + ".png";
  row.crop_offset_x = render.crop.offset_x;
  row.crop_offset_y = render.crop.offset_y;
  return row;
}

}  // namespace

const SampleManifest* DatasetManifest::find(std::string_view id) const {
  for (const auto& s : samples) {
    if (s.sample_id == id) return &s;
  }
  return nullptr;
}

std::uint64_t sample_seed(std::uint64_t dataset_seed, std::string_view chunk_id,
                          AnnotationKind kind) {
  return mix_seed(mix_seed(dataset_seed, hash_string(chunk_id)), kind_index(kind));
}

std::string sample_id(AnnotationKind kind, std::string_view chunk_id) {
  return std::string(to_string(kind)) + "-" + std::string(chunk_id);
}

SampleRender render_sample(const TextChunk& chunk, AnnotationKind kind, std::uint64_t seed,
                           const SampleParams& params) {
  SampleRender r;
  std::optional<std::size_t> reserve;
  if (kind != AnnotationKind::Rect) {
    r.spec = select_target(chunk, kind, target_seed(seed));
    if (const auto* t = std::get_if<ParagraphTarget>(&r.spec.target)) reserve = t->paragraph;
  }
  r.layout = layout_chunk(chunk, params.render, reserve);
  if (kind == AnnotationKind::Rect) r.spec = select_single_line_rect(chunk, r.layout, target_seed(seed));
  r.spec.seed = seed;
  r.spec = apply_noise(r.spec, chunk, params.noise, noise_seed(seed));
  r.page = rasterize(r.layout);
  r.annotated = render_annotation(r.page, r.layout, r.spec);
  r.crop = crop_to_content(r.annotated, params.render.background, params.crop_margin_px);
  r.ground_truth = ground_truth(chunk, r.spec);
  return r;
}

std::vector<TextChunk> round_robin_pool(const std::vector<SourceDocument>& docs,
                                        std::size_t max_tokens) {
  std::vector<const SourceDocument*> ordered;
  for (const auto& d : docs) ordered.push_back(&d);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto* a, const auto* b) { return a->doc_id < b->doc_id; });
  std::vector<std::vector<TextChunk>> per_doc;
  std::size_t longest = 0;
  for (const auto* d : ordered) {
    per_doc.push_back(chunk_document(*d, max_tokens));
    longest = std::max(longest, per_doc.back().size());
  }
  std::vector<TextChunk> pool;
  for (std::size_t r = 0; r < longest; ++r) {
    for (auto& chunks : per_doc) {
      if (r < chunks.size()) pool.push_back(std::move(chunks[r]));
    }
  }
  return pool;
}

DatasetManifest synthesize_dataset(const SynthOptions& options) {
  return synthesize_dataset(load_corpus(options.corpus_dir), options);
}

DatasetManifest synthesize_dataset(const std::vector<SourceDocument>& docs,
                                   const SynthOptions& options) {
  options.params.render.validate();
  if (docs.empty()) throw Error(ErrorCode::InvalidArgument, "corpus has no documents");
  if (options.quota == 0) throw Error(ErrorCode::InvalidArgument, "quota must be at least 1");
  if (options.params.noise.probability < 0 || options.params.noise.probability > 1) {
    throw Error(ErrorCode::InvalidConfig, "noise probability outside [0, 1]");
  }

  const auto pool = round_robin_pool(docs, options.max_tokens);

  DatasetManifest manifest;
  std::uint64_t corpus_hash = 0;
  for (const auto& c : pool) corpus_hash = mix_seed(corpus_hash, hash_string(c.chunk_id));
  manifest.dataset_id = "haur5-" + hex64(mix_seed(options.seed, corpus_hash)).substr(0, 12);
  manifest.creation_seed = options.seed;
  manifest.params = options.params;
  manifest.max_tokens = options.max_tokens;
  manifest.quota = options.quota;

  std::vector<Job> jobs;
  for (const auto kind : kAllKinds) {
    std::size_t taken = 0;
    for (const auto& chunk : pool) {
      if (taken == options.quota) break;
      if (kind == AnnotationKind::ParagraphMark && chunk.paragraphs.size() < 2) continue;
      jobs.push_back({&chunk, kind});
      ++taken;
    }
    manifest.counts[std::string(to_string(kind))] = taken;
    if (taken < options.quota) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "InsufficientChunks: %s achieved %zu of %zu",
                    std::string(to_string(kind)).c_str(), taken, options.quota);
      manifest.warnings.emplace_back(buf);
    }
  }

  const auto& out = options.out_dir;
  for (const char* sub : {"images", "texts"}) std::filesystem::remove_all(out / sub);
  std::filesystem::create_directories(out / "texts");
  for (const auto kind : kAllKinds) std::filesystem::create_directories(out / "images" / to_string(kind));

  manifest.samples.resize(jobs.size());
  parallel_for(jobs.size(), options.jobs, [&](std::size_t i) {
    const auto& job = jobs[i];
    const auto seed = sample_seed(options.seed, job.chunk->chunk_id, job.kind);
    const auto render = render_sample(*job.chunk, job.kind, seed, options.params);
    auto row = make_row(*job.chunk, job.kind, seed, render, options.params.render);
    write_png(out / row.image_path, render.crop.image);
    const auto& text = row.full_text;
    write_file_bytes(out / "texts" / (row.sample_id + ".txt"),
                     {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
    manifest.samples[i] = std::move(row);
  });

  save_manifest(out / "manifest.json", manifest);
  const auto csv = compute_stats(manifest).csv();
  write_file_bytes(out / "stats.csv", {reinterpret_cast<const std::uint8_t*>(csv.data()), csv.size()});
  return manifest;
}

}  // namespace haur
