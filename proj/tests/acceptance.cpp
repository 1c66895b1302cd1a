#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "haur/annotate.hpp"
#include "haur/corpus.hpp"
#include "haur/dataset.hpp"
#include "haur/error.hpp"
#include "haur/fusion.hpp"
#include "haur/metrics.hpp"
#include "haur/oracle.hpp"
#include "haur/rng.hpp"

namespace {

using namespace haur;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kSeed = 2024;
constexpr double kMetricSeconds = 10.0;
constexpr double kSynthSeconds = 120.0;
constexpr double kTrainSeconds = 30.0;
constexpr double kKittenTolerance = 1e-9;
constexpr double kGradTolerance = 1e-4;
constexpr double kSoftmaxTolerance = 1e-12;
constexpr double kHullSlack = 1e-12;
constexpr double kPixelAcc = 95.0;
constexpr double kPixelAnls = 0.98;
constexpr std::size_t kLevAlphabetMax = 6;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

void fail(Outcome& o, const std::string& why) {
  o.pass = false;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += why;
}

void note(Outcome& o, const std::string& what) {
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += what;
}

// Every string over {a,b,c} of length at most kLevAlphabetMax, indexed.
struct EditGraph {
  std::vector<std::string> nodes;
  std::map<std::string, std::size_t> index;

  EditGraph() {
    std::vector<std::string> frontier{""};
    for (std::size_t len = 0; len <= kLevAlphabetMax; ++len) {
      std::vector<std::string> next;
      for (const auto& s : frontier) {
        index[s] = nodes.size();
        nodes.push_back(s);
        for (const char c : std::string("abc")) next.push_back(s + c);
      }
      frontier = std::move(next);
    }
  }

  std::vector<std::size_t> neighbours(const std::string& s) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < s.size(); ++i) {
      out.push_back(index.at(s.substr(0, i) + s.substr(i + 1)));
      for (const char c : std::string("abc")) {
        if (c == s[i]) continue;
        auto t = s;
        t[i] = c;
        out.push_back(index.at(t));
      }
    }
    if (s.size() < kLevAlphabetMax) {
      for (std::size_t i = 0; i <= s.size(); ++i) {
        for (const char c : std::string("abc")) out.push_back(index.at(s.substr(0, i) + c + s.substr(i)));
      }
    }
    return out;
  }
};

// Shortest unit-cost edit path by breadth-first search. Deletions, then
// substitutions, then insertions realize any optimal script without exceeding
// the longer string's length, so the bounded graph gives exact distances.
std::size_t check_dp_against_bfs(std::size_t& pairs) {
  const EditGraph g;
  std::vector<std::vector<std::size_t>> adj(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) adj[i] = g.neighbours(g.nodes[i]);
  std::size_t mismatches = 0;
  std::vector<std::size_t> dist(g.nodes.size());
  for (std::size_t src = 0; src < g.nodes.size(); ++src) {
    std::fill(dist.begin(), dist.end(), SIZE_MAX);
    std::deque<std::size_t> queue{src};
    dist[src] = 0;
    while (!queue.empty()) {
      const auto u = queue.front();
      queue.pop_front();
      for (const auto v : adj[u]) {
        if (dist[v] == SIZE_MAX) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
      }
    }
    for (std::size_t dst = 0; dst < g.nodes.size(); ++dst) {
      ++pairs;
      if (levenshtein(g.nodes[src], g.nodes[dst]) != dist[dst]) ++mismatches;
    }
  }
  return mismatches;
}

DatasetManifest text_manifest(const std::vector<std::string>& truths) {
  DatasetManifest m;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    SampleManifest s;
    s.sample_id = "s" + std::to_string(i);
    s.kind = kAllKinds[i % kAllKinds.size()];
    s.ground_truth = truths[i];
    m.samples.push_back(s);
  }
  return m;
}

Outcome metric_fidelity() {
  Outcome o;
  const auto start = Clock::now();

  const std::vector<std::string> suite{"", "a", "Call me Ishmael.", "naïve café", "日本語のテキスト",
                                       "  spaced   out  ", "The Union, 1862."};
  const auto m = text_manifest(suite);
  std::vector<Prediction> same;
  for (const auto& s : m.samples) same.push_back({s.sample_id, s.ground_truth});
  const auto rep = score_report(same, m);
  if (rep.average.acc != 100.0 || rep.average.anls != 1.0) fail(o, "identical strings do not score 100/1.0");

  const double kitten = anls_score("kitten", "sitting");
  const double oracle = 1.0 - static_cast<double>(brute_force_levenshtein("kitten", "sitting")) / 7.0;
  if (std::abs(kitten - oracle) > kKittenTolerance) fail(o, fmt("kitten/sitting %.12f vs %.12f", kitten, oracle));
  note(o, fmt("kitten/sitting %.10f", kitten));

  std::size_t pairs = 0;
  const auto mismatches = check_dp_against_bfs(pairs);
  if (mismatches) fail(o, fmt("%.0f of %.0f pairs disagree with BFS", mismatches, pairs));
  note(o, fmt("%.0f pairs match BFS", pairs));

  Rng rng(kSeed);
  std::size_t violations = 0;
  const std::string letters = "abcde ";
  for (int set = 0; set < 100; ++set) {
    std::vector<std::string> truths;
    for (int i = 0; i < 30; ++i) {
      std::string t;
      const auto len = 1 + rng.below(14);
      for (std::size_t k = 0; k < len; ++k) t += letters[rng.below(letters.size())];
      truths.push_back(t);
    }
    const auto tm = text_manifest(truths);
    std::vector<Prediction> preds;
    for (const auto& s : tm.samples) {
      auto p = s.ground_truth;
      const auto edits = rng.below(p.size() + 2);
      for (std::size_t e = 0; e < edits && !p.empty(); ++e) p[rng.below(p.size())] = letters[rng.below(5)];
      preds.push_back({s.sample_id, p});
    }
    double prev = -1;
    for (int k = 1; k <= 20; ++k) {
      const double now = anls(preds, tm, k / 20.0);
      if (now + 1e-15 < prev) ++violations;
      prev = now;
    }
  }
  if (violations) fail(o, fmt("%.0f tau monotonicity violations", violations));

  const double elapsed = seconds_since(start);
  if (elapsed >= kMetricSeconds) fail(o, fmt("took %.1f s", elapsed));
  note(o, fmt("%.2f s", elapsed));
  return o;
}

struct Synthesis {
  fs::path root;
  DatasetManifest manifest;
  double seconds = 0;
};

Synthesis synthesize(const fs::path& out) {
  SynthOptions opts;
  opts.corpus_dir = HAUR_CORPUS_DIR;
  opts.out_dir = out;
  opts.seed = kSeed;
  opts.jobs = 1;
  const auto start = Clock::now();
  Synthesis s{out, synthesize_dataset(opts), 0};
  s.seconds = seconds_since(start);
  return s;
}

Outcome generator_soundness(const Synthesis& syn) {
  Outcome o;
  const auto& m = syn.manifest;
  if (syn.seconds >= kSynthSeconds) fail(o, fmt("synthesis took %.1f s", syn.seconds));
  note(o, fmt("synthesis %.1f s", syn.seconds));

  std::size_t clean_ok = 0, clean_total = 0, noised_ok = 0, noised_total = 0;
  for (const auto& s : m.samples) {
    bool ok = false;
    try {
      const auto r = round_trip_verify(s, m.params, syn.root);
      ok = r.passed;
      if (ok && s.noise.applied) {
        const auto rec = normalize_answer(r.recovered.recovered_text);
        ok = rec.find(normalize_answer(s.ground_truth)) != std::string::npos &&
             s.noised_span.begin <= s.clean_span.begin && s.clean_span.end <= s.noised_span.end;
      }
    } catch (const Error&) {
      ok = false;
    }
    (s.noise.applied ? noised_total : clean_total)++;
    (s.noise.applied ? noised_ok : clean_ok) += ok;
  }
  if (clean_ok != clean_total) fail(o, fmt("noise-free %.0f/%.0f verified", clean_ok, clean_total));
  if (noised_ok != noised_total) fail(o, fmt("noised %.0f/%.0f contained", noised_ok, noised_total));
  note(o, fmt("noise-free %.0f/%.0f", clean_ok, clean_total));
  note(o, fmt("noised %.0f/%.0f", noised_ok, noised_total));

  const auto pool = round_robin_pool(load_corpus(HAUR_CORPUS_DIR), m.max_tokens);
  const bool single_exists = std::any_of(pool.begin(), pool.end(),
                                         [](const TextChunk& c) { return c.paragraphs.size() < 2; });
  const auto pm = m.counts.at(std::string(to_string(AnnotationKind::ParagraphMark)));
  for (const auto kind : kAllKinds) {
    if (kind == AnnotationKind::ParagraphMark) continue;
    if (single_exists && pm > m.counts.at(std::string(to_string(kind)))) fail(o, "PM exceeds another kind");
  }
  note(o, fmt("PM %.0f of quota %.0f", pm, m.quota));
  return o;
}

std::map<std::string, std::vector<std::uint8_t>> tree_bytes(const fs::path& root) {
  std::map<std::string, std::vector<std::uint8_t>> out;
  for (const auto& e : fs::recursive_directory_iterator(root / "images")) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = read_file_bytes(e.path());
  }
  out["manifest.json"] = read_file_bytes(root / "manifest.json");
  return out;
}

Outcome determinism(const Synthesis& first, const fs::path& second_root) {
  Outcome o;
  const auto second = synthesize(second_root);
  const auto a = tree_bytes(first.root);
  const auto b = tree_bytes(second.root);
  std::size_t differing = 0;
  for (const auto& [path, bytes] : a) {
    const auto it = b.find(path);
    if (it == b.end() || it->second != bytes) ++differing;
  }
  differing += b.size() > a.size() ? b.size() - a.size() : 0;
  if (differing) fail(o, fmt("%.0f files differ", differing));
  const auto ha = hash_string(manifest_to_json(first.manifest));
  const auto hb = hash_string(manifest_to_json(second.manifest));
  if (ha != hb) fail(o, "manifest hashes differ");
  note(o, fmt("%.0f files identical", a.size()));
  return o;
}

Outcome distribution(const DatasetManifest& m) {
  Outcome o;
  const auto stats = compute_stats(m);
  const std::size_t max_bin = DistributionReport::bin_of(m.max_tokens);
  for (const auto& [kind, h] : stats.full_text) {
    for (std::size_t b = max_bin + 1; b < h.counts.size(); ++b) {
      if (h.counts[b]) fail(o, std::string(to_string(kind)) + " has chunks above the budget");
    }
  }
  std::size_t over = 0;
  for (const auto& s : m.samples) over += count_tokens(s.full_text) > m.max_tokens;
  if (over) fail(o, fmt("%.0f samples exceed the budget", over));
  const auto& ref = stats.full_text.at(AnnotationKind::Highlight).counts;
  for (const auto kind : {AnnotationKind::Underline, AnnotationKind::Squiggly, AnnotationKind::Rect}) {
    if (stats.full_text.at(kind).counts != ref) fail(o, std::string(to_string(kind)) + " histogram differs");
  }
  note(o, fmt("budget %.0f, %.0f bins", m.max_tokens, ref.size()));
  return o;
}

Outcome baseline_sanity(const DatasetManifest& synth) {
  Outcome o;
  std::vector<Prediction> gt;
  for (const auto& s : synth.samples) gt.push_back({s.sample_id, s.ground_truth});
  const auto gt_report = score_report(gt, synth);
  for (const auto& [kind, k] : gt_report.per_kind) {
    if (k.count && (k.acc != 100.0 || k.anls != 1.0)) fail(o, std::string(to_string(kind)) + " GT not exact");
  }

  SampleParams params;
  params.noise = NoiseParams{0.0, params.noise.max_chars};
  const auto pool = round_robin_pool(load_corpus(HAUR_CORPUS_DIR), kDefaultMaxTokens);
  for (const auto kind : {AnnotationKind::Highlight, AnnotationKind::Rect}) {
    DatasetManifest m;
    std::vector<Prediction> preds;
    for (std::size_t i = 0; i < pool.size() && i < kDefaultQuota; ++i) {
      const auto seed = sample_seed(kSeed, pool[i].chunk_id, kind);
      const auto r = render_sample(pool[i], kind, seed, params);
      SampleManifest row;
      row.sample_id = sample_id(kind, pool[i].chunk_id);
      row.kind = kind;
      row.ground_truth = r.ground_truth;
      m.samples.push_back(row);
      try {
        preds.push_back({row.sample_id, pixel_extract(r.crop.image, pool[i].full_text(), params.render).text});
      } catch (const Error&) {
      }
    }
    const auto rep = score_report(preds, m);
    const auto& k = rep.per_kind.at(kind);
    if (k.acc < kPixelAcc || k.anls < kPixelAnls) fail(o, std::string(to_string(kind)) + " below threshold");
    note(o, std::string(to_string(kind)) + fmt(" ACC %.2f ANLS %.4f", k.acc, k.anls));
  }
  return o;
}

Outcome fusion_numerics() {
  Outcome o;
  double worst = 0;
  for (const auto dir : {Direction::TextImageImage, Direction::ImageTextText}) {
    FusionConfig cfg;
    cfg.direction = dir;
    worst = std::max(worst, gradcheck(gradcheck_config(cfg), {kSeed, kSeed + 1, kSeed + 2}).max_rel_error);
  }
  if (worst > kGradTolerance) fail(o, fmt("gradcheck %.3e", worst));
  note(o, fmt("gradcheck %.2e", worst));

  Rng rng(kSeed);
  double sum_err = 0;
  for (int t = 0; t < 100; ++t) {
    const auto p = softmax_rows(Matrix::uniform(4, 9, 50.0, rng));
    for (std::size_t r = 0; r < p.rows(); ++r) {
      long double sum = 0;
      for (std::size_t c = 0; c < p.cols(); ++c) sum += p(r, c);
      sum_err = std::max(sum_err, static_cast<double>(std::abs(sum - 1.0L)));
    }
  }
  if (sum_err > kSoftmaxTolerance) fail(o, fmt("softmax row sum off by %.2e", sum_err));

  std::size_t outside = 0;
  for (int probe = 0; probe < 100; ++probe) {
    FusionConfig cfg;
    cfg.direction = probe % 2 ? Direction::ImageTextText : Direction::TextImageImage;
    cfg.seed = kSeed + probe;
    const auto model = init_model(cfg);
    const auto text = Matrix::uniform(1 + rng.below(12), cfg.d, 3.0, rng);
    const auto img = Matrix::uniform(cfg.grid * cfg.grid, cfg.d, 3.0, rng);
    const auto& layer = model.stack.layers[0];
    const auto out = cross_attention(text, img, layer, cfg.direction);
    const auto& kv = cfg.direction == Direction::TextImageImage ? img : text;
    Matrix v(kv.rows(), layer.w_v.cols());
    for (std::size_t r = 0; r < kv.rows(); ++r) {
      for (std::size_t c = 0; c < v.cols(); ++c) {
        for (std::size_t k = 0; k < kv.cols(); ++k) v(r, c) += kv(r, k) * layer.w_v(k, c);
      }
    }
    for (std::size_t c = 0; c < v.cols(); ++c) {
      double lo = INFINITY, hi = -INFINITY;
      for (std::size_t r = 0; r < v.rows(); ++r) {
        lo = std::min(lo, v(r, c));
        hi = std::max(hi, v(r, c));
      }
      const double slack = kHullSlack * std::max(1.0, hi - lo);
      for (std::size_t r = 0; r < out.rows(); ++r) outside += out(r, c) < lo - slack || out(r, c) > hi + slack;
    }
  }
  if (outside) fail(o, fmt("%.0f attention outputs outside the value envelope", outside));

  const auto start = Clock::now();
  auto model = init_model(FusionConfig{});
  const auto trace = micro_train(model, demo_fixture(model), kDefaultTrainSteps, kDefaultLearningRate);
  const double elapsed = seconds_since(start);
  const std::vector<double> head(trace.loss.begin(), trace.loss.begin() + 20);
  const std::vector<double> tail(trace.loss.end() - 21, trace.loss.end());
  const double ratio = median(tail) / median(head);
  if (ratio >= 0.5) fail(o, fmt("loss ratio %.3f", ratio));
  if (elapsed >= kTrainSeconds) fail(o, fmt("training took %.1f s", elapsed));
  note(o, fmt("loss ratio %.3f in %.1f s", ratio, elapsed));
  return o;
}

Outcome split_integrity(DatasetManifest m) {
  Outcome o;
  const std::array<double, 3> ratios{0.8, 0.1, 0.1};
  split_dataset(m, ratios, kSeed);
  const std::array<const char*, 3> buckets{"train", "val", "test"};
  double worst = 0;
  for (const auto kind : kAllKinds) {
    std::map<std::string, std::size_t> got;
    std::size_t n = 0;
    for (const auto& s : m.samples) {
      if (s.kind != kind) continue;
      ++n;
      ++got[m.split.at(s.sample_id)];
    }
    for (std::size_t b = 0; b < 3; ++b) {
      worst = std::max(worst, std::abs(static_cast<double>(got[buckets[b]]) - ratios[b] * static_cast<double>(n)));
    }
  }
  if (worst > 1.0) fail(o, fmt("deviation %.2f samples", worst));
  std::map<std::string, std::set<std::string>> per_chunk;
  for (const auto& s : m.samples) per_chunk[s.chunk_id].insert(m.split.at(s.sample_id));
  const auto straddling = std::count_if(per_chunk.begin(), per_chunk.end(),
                                        [](const auto& kv) { return kv.second.size() > 1; });
  if (straddling) fail(o, fmt("%.0f chunks span two splits", static_cast<double>(straddling)));
  note(o, fmt("max deviation %.2f, %.0f chunks", worst, per_chunk.size()));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "haur_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  int failures = 0;
  auto report = [&](const char* name, const std::function<Outcome()>& run) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = e.what();
    }
    failures += !o.pass;
    std::printf("%s %-20s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  };

  report("metric-fidelity", metric_fidelity);
  Synthesis syn;
  report("generator-soundness", [&] {
    syn = synthesize(work / "run1");
    return generator_soundness(syn);
  });
  report("determinism", [&] { return determinism(syn, work / "run2"); });
  report("distribution-shape", [&] { return distribution(syn.manifest); });
  report("baseline-sanity", [&] { return baseline_sanity(syn.manifest); });
  report("fusion-numerics", fusion_numerics);
  report("split-integrity", [&] { return split_integrity(syn.manifest); });
  return failures == 0 ? 0 : 1;
}
