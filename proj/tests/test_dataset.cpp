#include <gtest/gtest.h>

#include <set>

#include "haur/dataset.hpp"
#include "haur/error.hpp"
#include "haur/rng.hpp"
#include "support.hpp"

namespace haur {
namespace {

namespace fs = std::filesystem;

SynthOptions tiny_options(const fs::path& out, std::size_t quota = 4) {
  SynthOptions o;
  o.out_dir = out;
  o.quota = quota;
  o.seed = 21;
  o.max_tokens = 40;
  return o;
}

std::vector<std::uint8_t> bytes_of(const fs::path& p) { return read_file_bytes(p); }

TEST(Dataset, SampleSeedDependsOnEveryInput) {
  const auto base = sample_seed(1, "doc_c0000", AnnotationKind::Highlight);
  EXPECT_EQ(base, sample_seed(1, "doc_c0000", AnnotationKind::Highlight));
  EXPECT_NE(base, sample_seed(2, "doc_c0000", AnnotationKind::Highlight));
  EXPECT_NE(base, sample_seed(1, "doc_c0001", AnnotationKind::Highlight));
  EXPECT_NE(base, sample_seed(1, "doc_c0000", AnnotationKind::Underline));
  EXPECT_EQ(sample_id(AnnotationKind::Rect, "doc_c0003"), "rect-doc_c0003");
}

TEST(Dataset, RoundRobinInterleavesDocuments) {
  const auto pool = round_robin_pool(test::tiny_corpus(), 40);
  ASSERT_GE(pool.size(), 4u);
  EXPECT_EQ(pool[0].doc_id, "alpha");
  EXPECT_EQ(pool[1].doc_id, "beta");
  EXPECT_EQ(pool[2].doc_id, "alpha");
  std::set<std::string> ids;
  for (const auto& c : pool) ids.insert(c.chunk_id);
  EXPECT_EQ(ids.size(), pool.size());
}

TEST(Dataset, RenderSampleIsConsistent) {
  const auto pool = round_robin_pool(test::tiny_corpus(), 500);
  SampleParams params;
  for (const auto kind : kAllKinds) {
    const auto r = render_sample(pool[0], kind, 99, params);
    EXPECT_EQ(r.spec.kind, kind);
    EXPECT_EQ(r.spec.seed, 99u);
    EXPECT_EQ(r.crop.image, r.annotated.crop({r.crop.offset_x, r.crop.offset_y, r.crop.image.width(),
                                              r.crop.image.height()}));
    EXPECT_FALSE(r.page == r.annotated);
    const auto again = render_sample(pool[0], kind, 99, params);
    EXPECT_EQ(again.crop.image, r.crop.image);
    EXPECT_EQ(again.ground_truth, r.ground_truth);
  }
}

TEST(Dataset, ManifestJsonRoundTrip) {
  test::TempDir dir("manifest");
  auto m = synthesize_dataset(test::tiny_corpus(), tiny_options(dir.path()));
  split_dataset(m, {0.5, 0.25, 0.25}, 4);
  const auto json = manifest_to_json(m);
  const auto back = manifest_from_json(json);
  EXPECT_EQ(manifest_to_json(back), json);
  EXPECT_EQ(back.samples.size(), m.samples.size());
  EXPECT_EQ(back.split, m.split);
  EXPECT_EQ(back.split_seed, std::optional<std::uint64_t>(4));
  EXPECT_EQ(back.params.render, m.params.render);
  const auto loaded = load_manifest(dir.path() / "manifest.json");
  EXPECT_TRUE(loaded.split.empty());
  EXPECT_EQ(loaded.dataset_id, m.dataset_id);
}

TEST(Dataset, MalformedManifestIsParseError) {
  try {
    manifest_from_json("{\"schema\": 1, \"samples\": 3");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Parse);
  }
}

TEST(Dataset, SynthesisWritesEverySample) {
  test::TempDir dir("synth");
  const auto m = synthesize_dataset(test::tiny_corpus(), tiny_options(dir.path()));
  for (const auto& s : m.samples) {
    ASSERT_TRUE(fs::exists(dir.path() / s.image_path)) << s.image_path;
    const auto img = read_png(dir.path() / s.image_path);
    EXPECT_GT(img.width(), 0);
    EXPECT_EQ(read_file_bytes(dir.path() / "texts" / (s.sample_id + ".txt")).size(), s.full_text.size());
    EXPECT_EQ(s.full_text.substr(s.clean_span.begin, s.clean_span.size()), s.ground_truth);
    EXPECT_TRUE(s.noised_span.contains(s.clean_span));
    EXPECT_EQ(s.render_config_digest, m.params.render.digest());
  }
  EXPECT_TRUE(fs::exists(dir.path() / "stats.csv"));
  for (const auto kind : kAllKinds) {
    EXPECT_LE(m.counts.at(std::string(to_string(kind))), 4u);
  }
}

TEST(Dataset, ShortfallBecomesWarning) {
  test::TempDir dir("short");
  const auto m = synthesize_dataset(test::tiny_corpus(), tiny_options(dir.path(), 50));
  bool warned = false;
  for (const auto& w : m.warnings) warned = warned || w.rfind("InsufficientChunks: pm", 0) == 0;
  EXPECT_TRUE(warned);
  EXPECT_LE(m.counts.at("pm"), m.counts.at("highlight"));
}

TEST(Dataset, WorkerCountDoesNotChangeBytes) {
  test::TempDir a("jobs1"), b("jobs3");
  auto oa = tiny_options(a.path(), 6);
  auto ob = tiny_options(b.path(), 6);
  ob.jobs = 3;
  const auto ma = synthesize_dataset(test::tiny_corpus(), oa);
  const auto mb = synthesize_dataset(test::tiny_corpus(), ob);
  EXPECT_EQ(bytes_of(a.path() / "manifest.json"), bytes_of(b.path() / "manifest.json"));
  for (const auto& s : ma.samples) {
    EXPECT_EQ(bytes_of(a.path() / s.image_path), bytes_of(b.path() / s.image_path));
  }
}

TEST(Dataset, InvalidOptionsAreRejected) {
  test::TempDir dir("invalid");
  auto o = tiny_options(dir.path());
  o.quota = 0;
  EXPECT_THROW(synthesize_dataset(test::tiny_corpus(), o), Error);
  o = tiny_options(dir.path());
  o.params.noise.probability = 1.5;
  EXPECT_THROW(synthesize_dataset(test::tiny_corpus(), o), Error);
}

DatasetManifest fake_manifest(std::size_t chunks) {
  DatasetManifest m;
  Rng rng(3);
  for (std::size_t c = 0; c < chunks; ++c) {
    const auto chunk_id = "doc_c" + std::to_string(c);
    for (const auto kind : kAllKinds) {
      if (kind == AnnotationKind::ParagraphMark && rng.below(3) == 0) continue;
      SampleManifest s;
      s.kind = kind;
      s.chunk_id = chunk_id;
      s.sample_id = sample_id(kind, chunk_id);
      m.samples.push_back(s);
    }
  }
  return m;
}

TEST(Split, ChunkAtomicAndBalanced) {
  for (const std::size_t chunks : {10u, 57u, 200u}) {
    auto m = fake_manifest(chunks);
    split_dataset(m, {0.8, 0.1, 0.1}, 5);
    std::map<std::string, std::string> chunk_bucket;
    std::map<AnnotationKind, std::array<double, 3>> counts;
    std::map<AnnotationKind, double> totals;
    for (const auto& s : m.samples) {
      const auto& b = m.split.at(s.sample_id);
      auto [it, fresh] = chunk_bucket.emplace(s.chunk_id, b);
      EXPECT_EQ(it->second, b) << s.chunk_id;
      for (std::size_t i = 0; i < 3; ++i) counts[s.kind][i] += b == kSplitNames[i];
      totals[s.kind] += 1;
    }
    const std::array<double, 3> ratios{0.8, 0.1, 0.1};
    for (const auto& [kind, c] : counts) {
      for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_LE(std::abs(c[i] - ratios[i] * totals[kind]), 1.0)
            << chunks << " " << to_string(kind) << " " << kSplitNames[i];
      }
    }
  }
}

TEST(Split, DeterministicInSeed) {
  auto a = fake_manifest(40), b = fake_manifest(40), c = fake_manifest(40);
  split_dataset(a, {0.8, 0.1, 0.1}, 1);
  split_dataset(b, {0.8, 0.1, 0.1}, 1);
  split_dataset(c, {0.8, 0.1, 0.1}, 2);
  EXPECT_EQ(a.split, b.split);
  EXPECT_NE(a.split, c.split);
}

TEST(Split, BadRatios) {
  auto m = fake_manifest(5);
  for (const std::array<double, 3> r : {std::array<double, 3>{0.5, 0.5, 0.5},
                                        std::array<double, 3>{-0.1, 0.6, 0.5},
                                        std::array<double, 3>{0.9, 0.1, 0.05}}) {
    try {
      split_dataset(m, r, 1);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::BadRatios);
    }
  }
}

TEST(Stats, BinsAndTotals) {
  EXPECT_EQ(DistributionReport::bin_of(1), 0u);
  EXPECT_EQ(DistributionReport::bin_of(50), 0u);
  EXPECT_EQ(DistributionReport::bin_of(51), 1u);
  EXPECT_EQ(DistributionReport::bin_of(500), 9u);
  test::TempDir dir("stats");
  const auto m = synthesize_dataset(test::tiny_corpus(), tiny_options(dir.path()));
  const auto report = compute_stats(m);
  for (const auto kind : kAllKinds) {
    const auto n = m.counts.at(std::string(to_string(kind)));
    if (n == 0) continue;
    EXPECT_EQ(report.full_text.at(kind).total(), n);
    EXPECT_EQ(report.ground_truth.at(kind).total(), n);
  }
  EXPECT_EQ(report.full_text.at(AnnotationKind::Highlight).counts,
            report.full_text.at(AnnotationKind::Rect).counts);
  EXPECT_NE(report.table().find("1-50"), std::string::npos);
  EXPECT_NE(report.csv().find("highlight"), std::string::npos);
}

}  // namespace
}  // namespace haur
