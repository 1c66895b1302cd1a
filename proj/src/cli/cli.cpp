#include "haur/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "haur/dataset.hpp"
#include "haur/error.hpp"
#include "haur/fusion.hpp"
#include "haur/metrics.hpp"
#include "haur/oracle.hpp"
#include "haur/parallel.hpp"
#include "haur/rng.hpp"

namespace haur {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr double kGradcheckTolerance = 1e-4;

void write_text(const fs::path& path, const std::string& text) {
  write_file_bytes(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

std::string read_text(const fs::path& path) {
  const auto bytes = read_file_bytes(path);
  return {reinterpret_cast<const char*>(bytes.data()), bytes.size()};
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Rgb parse_rgb(const std::string& text) {
  int r = 0, g = 0, b = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%d,%d,%d%c", &r, &g, &b, &tail) != 3 || r < 0 || r > 255 ||
      g < 0 || g > 255 || b < 0 || b > 255) {
    throw Error(ErrorCode::InvalidConfig, "color must be r,g,b with components in [0, 255]");
  }
  return {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)};
}

std::array<double, 3> parse_ratios(const std::string& text) {
  std::array<double, 3> out{};
  std::stringstream in(text);
  std::string part;
  std::size_t n = 0;
  while (std::getline(in, part, ',')) {
    if (n == 3) throw Error(ErrorCode::BadRatios, "expected three ratios");
    try {
      std::size_t used = 0;
      out[n] = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw Error(ErrorCode::BadRatios, "not a number: " + part);
    }
    ++n;
  }
  if (n != 3) throw Error(ErrorCode::BadRatios, "expected three ratios");
  return out;
}

// Flag values as typed on the command line; a config file fills the gaps.
struct SynthFlags {
  std::string config, corpus, out;
  std::size_t quota = kDefaultQuota;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::size_t max_tokens = kDefaultMaxTokens;
  double noise_p = NoiseParams{}.probability;
  std::size_t noise_max_chars = NoiseParams{}.max_chars;
  int crop_margin = kDefaultCropMargin;
  RenderConfig render;
  std::string foreground = "0,0,0";
  std::string background = "255,255,255";
};

template <typename T>
void merge(const CLI::App& app, const Json& file, const char* key, T& value) {
  if (app.count(std::string("--") + key) > 0 || !file.contains(key)) return;
  try {
    value = file.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::InvalidConfig, std::string("bad value for config key ") + key);
  }
}

const std::set<std::string>& synth_keys() {
  static const std::set<std::string> keys = {
      "corpus",      "out",          "quota",         "seed",          "jobs",
      "max-tokens",  "noise-p",      "noise-max-chars", "crop-margin", "page-width",
      "margin",      "font-size",    "line-height",   "paragraph-gap", "paragraph-indent",
      "foreground",  "background"};
  return keys;
}

SynthOptions resolve_synth(const CLI::App& app, SynthFlags f) {
  Json file = Json::object();
  if (!f.config.empty()) {
    try {
      file = Json::parse(read_text(f.config));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::InvalidConfig, std::string("config: ") + e.what());
    }
    if (!file.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
    for (const auto& [key, value] : file.items()) {
      if (!synth_keys().count(key)) throw Error(ErrorCode::InvalidConfig, "unknown config key: " + key);
    }
  }
  merge(app, file, "corpus", f.corpus);
  merge(app, file, "out", f.out);
  merge(app, file, "quota", f.quota);
  merge(app, file, "seed", f.seed);
  merge(app, file, "jobs", f.jobs);
  merge(app, file, "max-tokens", f.max_tokens);
  merge(app, file, "noise-p", f.noise_p);
  merge(app, file, "noise-max-chars", f.noise_max_chars);
  merge(app, file, "crop-margin", f.crop_margin);
  merge(app, file, "page-width", f.render.page_width_px);
  merge(app, file, "margin", f.render.margin_px);
  merge(app, file, "font-size", f.render.font_size_px);
  merge(app, file, "line-height", f.render.line_height_px);
  merge(app, file, "paragraph-gap", f.render.paragraph_gap_px);
  merge(app, file, "paragraph-indent", f.render.paragraph_indent_px);
  merge(app, file, "foreground", f.foreground);
  merge(app, file, "background", f.background);

  if (f.corpus.empty()) throw Error(ErrorCode::InvalidConfig, "--corpus is required");
  if (f.out.empty()) throw Error(ErrorCode::InvalidConfig, "--out is required");
  if (f.quota == 0) throw Error(ErrorCode::InvalidConfig, "--quota must be at least 1");
  if (f.max_tokens == 0) throw Error(ErrorCode::InvalidConfig, "--max-tokens must be at least 1");
  if (f.jobs == 0) throw Error(ErrorCode::InvalidConfig, "--jobs must be at least 1");
  if (f.noise_p < 0 || f.noise_p > 1) throw Error(ErrorCode::InvalidConfig, "--noise-p outside [0, 1]");
  if (f.crop_margin < 0) throw Error(ErrorCode::InvalidConfig, "--crop-margin must be non-negative");
  f.render.foreground = parse_rgb(f.foreground);
  f.render.background = parse_rgb(f.background);
  f.render.validate();

  SynthOptions o;
  o.corpus_dir = f.corpus;
  o.out_dir = f.out;
  o.quota = f.quota;
  o.seed = f.seed;
  o.jobs = f.jobs;
  o.max_tokens = f.max_tokens;
  o.params.render = f.render;
  o.params.noise = {f.noise_p, f.noise_max_chars};
  o.params.crop_margin_px = f.crop_margin;
  return o;
}

int cmd_synth(const CLI::App& app, const SynthFlags& flags, std::ostream& out, std::ostream& err) {
  const auto options = resolve_synth(app, flags);
  const auto manifest = synthesize_dataset(options);
  for (const auto& w : manifest.warnings) err << "warning: " << w << "\n";
  out << "dataset " << manifest.dataset_id << ": " << manifest.samples.size() << " samples\n";
  for (const auto kind : kAllKinds) {
    const auto name = std::string(to_string(kind));
    out << "  " << name << ": " << manifest.counts.at(name) << "\n";
  }
  out << "manifest digest " << hex64(hash_string(manifest_to_json(manifest))) << "\n";
  return 0;
}

int cmd_split(const std::string& path, const std::string& ratios, std::uint64_t seed,
              std::ostream& out) {
  const auto r = parse_ratios(ratios);
  auto manifest = load_manifest(path);
  split_dataset(manifest, r, seed);
  save_manifest(path, manifest);
  std::map<std::string, std::array<std::size_t, 3>> table;
  for (const auto& s : manifest.samples) {
    const auto& bucket = manifest.split.at(s.sample_id);
    for (std::size_t b = 0; b < 3; ++b) {
      if (bucket == kSplitNames[b]) ++table[std::string(to_string(s.kind))][b];
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%-10s %7s %7s %7s\n", "kind", "train", "val", "test");
  out << buf;
  for (const auto& [kind, c] : table) {
    std::snprintf(buf, sizeof buf, "%-10s %7zu %7zu %7zu\n", kind.c_str(), c[0], c[1], c[2]);
    out << buf;
  }
  return 0;
}

int cmd_stats(const std::string& path, const std::string& csv_path, std::ostream& out) {
  const auto manifest = load_manifest(path);
  if (manifest.samples.empty()) throw Error(ErrorCode::InvalidArgument, "manifest has no samples");
  const auto report = compute_stats(manifest);
  out << report.table();
  const fs::path csv = csv_path.empty() ? fs::path(path).parent_path() / "stats.csv" : fs::path(csv_path);
  write_text(csv, report.csv());
  return 0;
}

int cmd_score(const std::string& manifest_path, const std::string& preds_path, double tau, bool raw,
              const std::string& report_path, std::ostream& out) {
  if (!(tau > 0 && tau <= 1)) throw Error(ErrorCode::InvalidArgument, "--tau must be in (0, 1]");
  const auto manifest = load_manifest(manifest_path);
  const auto preds = read_predictions(preds_path);
  const auto report = score_report(preds, manifest, tau, !raw);
  out << report.table();
  write_text(report_path, report.to_json());
  return 0;
}

int cmd_verify(const std::string& manifest_path, bool pixel_baseline, unsigned jobs,
               const std::string& report_path, std::ostream& out) {
  if (jobs == 0) throw Error(ErrorCode::InvalidArgument, "--jobs must be at least 1");
  const auto manifest = load_manifest(manifest_path);
  const fs::path root = fs::path(manifest_path).parent_path();
  const auto n = manifest.samples.size();
  std::vector<VerifyResult> results(n);
  std::vector<Prediction> preds(pixel_baseline ? n : 0);
  parallel_for(n, jobs, [&](std::size_t i) {
    const auto& s = manifest.samples[i];
    try {
      results[i] = round_trip_verify(s, manifest.params, root);
    } catch (const Error& e) {
      results[i].recovered.sample_id = s.sample_id;
      results[i].recovered.kind = s.kind;
      results[i].passed = false;
      results[i].reason = e.what();
    }
    if (pixel_baseline) {
      preds[i].sample_id = s.sample_id;
      try {
        const auto img = read_png(root / s.image_path);
        preds[i].text = pixel_extract(img, s.full_text, manifest.params.render).text;
      } catch (const Error&) {
        preds[i].text.clear();
      }
    }
  });

  Json rows = Json::array();
  std::map<std::string, std::array<std::size_t, 4>> tally;  // clean pass/total, noised pass/total
  std::size_t failed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = manifest.samples[i];
    const auto& r = results[i];
    auto& t = tally[std::string(to_string(s.kind))];
    const std::size_t base = s.noise.applied ? 2 : 0;
    ++t[base + 1];
    if (r.passed) ++t[base];
    else ++failed;
    rows.push_back(Json{{"id", s.sample_id},
                        {"kind", to_string(s.kind)},
                        {"noise_applied", s.noise.applied},
                        {"passed", r.passed},
                        {"reason", r.reason},
                        {"recovered_text", r.recovered.recovered_text}});
  }
  Json summary = Json::object();
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-10s %14s %14s\n", "kind", "noise-free", "noised");
  out << buf;
  for (const auto& [kind, t] : tally) {
    summary[kind] = {{"noise_free_passed", t[0]}, {"noise_free_total", t[1]},
                     {"noised_passed", t[2]}, {"noised_total", t[3]}};
    const auto clean = std::to_string(t[0]) + "/" + std::to_string(t[1]);
    const auto noised = std::to_string(t[2]) + "/" + std::to_string(t[3]);
    std::snprintf(buf, sizeof buf, "%-10s %14s %14s\n", kind.c_str(), clean.c_str(), noised.c_str());
    out << buf;
  }
  Json doc{{"manifest", manifest.dataset_id}, {"failed", failed}, {"summary", summary}, {"samples", rows}};
  const fs::path report = report_path.empty() ? root / "verify.json" : fs::path(report_path);
  write_text(report, doc.dump(1) + "\n");

  if (pixel_baseline) {
    const auto preds_path = root / "pixel_predictions.jsonl";
    write_text(preds_path, predictions_to_jsonl(preds));
    out << "\npixel baseline (" << preds_path.string() << ")\n";
    out << score_report(preds, manifest).table();
  }
  out << (failed == 0 ? "all samples verified\n" : std::to_string(failed) + " samples failed\n");
  return failed == 0 ? 0 : 1;
}

struct FusionFlags {
  std::string mode;
  std::size_t n = 4;
  std::string direction = "tii";
  std::uint64_t seed = 0;
  std::size_t steps = kDefaultTrainSteps;
  double lr = kDefaultLearningRate;
  std::string trace;
};

int cmd_fusion(const FusionFlags& f, std::ostream& out) {
  FusionConfig cfg;
  cfg.layers = f.n;
  cfg.direction = parse_direction(f.direction);
  cfg.seed = f.seed;
  if (f.mode == "gradcheck") {
    const auto report = gradcheck(gradcheck_config(cfg), {f.seed, f.seed + 1, f.seed + 2});
    char buf[96];
    for (const auto& [name, e] : report.per_class) {
      std::snprintf(buf, sizeof buf, "%-10s %.3e\n", name.c_str(), e);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "max relative error %.3e over %zu entries (N=%zu, %s)\n",
                  report.max_rel_error, report.checked, f.n, f.direction.c_str());
    out << buf;
    return report.max_rel_error <= kGradcheckTolerance ? 0 : 1;
  }
  if (f.mode != "demo") throw Error(ErrorCode::InvalidArgument, "fusion mode must be gradcheck or demo");
  auto model = init_model(cfg);
  const auto data = demo_fixture(model);
  const auto trace = micro_train(model, data, f.steps, f.lr);
  std::ostringstream csv;
  csv << "step,loss\n";
  char buf[64];
  for (std::size_t i = 0; i < trace.loss.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.10f\n", i + 1, trace.loss[i]);
    csv << buf;
  }
  if (f.trace.empty()) {
    out << csv.str();
  } else {
    write_text(f.trace, csv.str());
    std::snprintf(buf, sizeof buf, "loss %.4f -> %.4f over %zu steps\n", trace.loss.front(),
                  trace.loss.back(), trace.loss.size());
    out << buf;
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"HAUR-5 synthesis, verification and scoring toolkit", "haur"};
  app.require_subcommand(1);

  SynthFlags sf;
  auto* synth = app.add_subcommand("synth", "synthesize an annotated image dataset");
  synth->add_option("--config", sf.config, "JSON file with the same keys as the flags");
  synth->add_option("--corpus", sf.corpus, "directory of .txt documents");
  synth->add_option("--out", sf.out, "output directory");
  synth->add_option("--quota", sf.quota, "samples per annotation kind");
  synth->add_option("--seed", sf.seed, "dataset seed");
  synth->add_option("--jobs", sf.jobs, "worker threads");
  synth->add_option("--max-tokens", sf.max_tokens, "chunk token budget");
  synth->add_option("--noise-p", sf.noise_p, "noise probability");
  synth->add_option("--noise-max-chars", sf.noise_max_chars, "noise extension cap per side");
  synth->add_option("--crop-margin", sf.crop_margin, "blank margin kept around ink");
  synth->add_option("--page-width", sf.render.page_width_px, "page width in pixels");
  synth->add_option("--margin", sf.render.margin_px, "page margin in pixels");
  synth->add_option("--font-size", sf.render.font_size_px, "glyph cell height in pixels");
  synth->add_option("--line-height", sf.render.line_height_px, "baseline-to-baseline distance in pixels");
  synth->add_option("--paragraph-gap", sf.render.paragraph_gap_px, "extra space between paragraphs in pixels");
  synth->add_option("--paragraph-indent", sf.render.paragraph_indent_px, "first-line indent in pixels");
  synth->add_option("--foreground", sf.foreground, "r,g,b");
  synth->add_option("--background", sf.background, "r,g,b");

  std::string manifest_path, ratios = "0.8,0.1,0.1", preds_path, report_path, csv_path;
  std::uint64_t split_seed = 0;
  auto* split = app.add_subcommand("split", "assign train/val/test splits in place");
  split->add_option("--manifest", manifest_path)->required();
  split->add_option("--ratios", ratios);
  split->add_option("--seed", split_seed);

  auto* stats = app.add_subcommand("stats", "token length histograms");
  stats->add_option("--manifest", manifest_path)->required();
  stats->add_option("--csv", csv_path, "defaults to stats.csv next to the manifest");

  double tau = kDefaultTau;
  bool raw = false;
  std::string score_report_path = "report.json";
  auto* score = app.add_subcommand("score", "ACC/ANLS of a prediction file");
  score->add_option("--manifest", manifest_path)->required();
  score->add_option("--preds", preds_path)->required();
  score->add_option("--tau", tau);
  score->add_flag("--raw", raw, "compare without normalization");
  score->add_option("--report", score_report_path);

  bool pixel_baseline = false;
  unsigned jobs = 1;
  auto* verify = app.add_subcommand("verify", "round-trip verification of every sample");
  verify->add_option("--manifest", manifest_path)->required();
  verify->add_flag("--pixel-baseline", pixel_baseline, "also run the pixel extractor");
  verify->add_option("--jobs", jobs);
  verify->add_option("--report", report_path, "defaults to verify.json next to the manifest");

  FusionFlags ff;
  auto* fusion = app.add_subcommand("fusion", "toy fusion stack numerics");
  fusion->add_option("mode", ff.mode, "gradcheck | demo")->required();
  fusion->add_option("--n", ff.n, "fusion depth");
  fusion->add_option("--direction", ff.direction, "tii | itt");
  fusion->add_option("--seed", ff.seed);
  fusion->add_option("--steps", ff.steps);
  fusion->add_option("--lr", ff.lr);
  fusion->add_option("--trace", ff.trace, "CSV output path; stdout when omitted");

  std::vector<std::string> argv_store = {"haur"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "usage error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (synth->parsed()) return cmd_synth(*synth, sf, out, err);
    if (split->parsed()) return cmd_split(manifest_path, ratios, split_seed, out);
    if (stats->parsed()) return cmd_stats(manifest_path, csv_path, out);
    if (score->parsed()) return cmd_score(manifest_path, preds_path, tau, raw, score_report_path, out);
    if (verify->parsed()) return cmd_verify(manifest_path, pixel_baseline, jobs, report_path, out);
    if (fusion->parsed()) return cmd_fusion(ff, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace haur
