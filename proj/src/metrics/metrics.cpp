#include "haur/metrics.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "haur/error.hpp"
#include "haur/utf8.hpp"

namespace haur {

namespace {

using Json = nlohmann::ordered_json;

constexpr AnnotationKind kTableOrder[] = {AnnotationKind::Highlight, AnnotationKind::Underline,
                                          AnnotationKind::Squiggly, AnnotationKind::ParagraphMark,
                                          AnnotationKind::Rect};

const char* column_name(AnnotationKind kind) {
  switch (kind) {
    case AnnotationKind::Highlight: return "Highlight";
    case AnnotationKind::Underline: return "Underline";
    case AnnotationKind::Squiggly: return "Squiggly";
    case AnnotationKind::Rect: return "Rect";
    case AnnotationKind::ParagraphMark: return "PM";
  }
  return "?";
}

struct SampleScore {
  AnnotationKind kind;
  bool exact;
  double similarity;
};

std::vector<SampleScore> score_samples(const std::vector<Prediction>& preds,
                                       const DatasetManifest& manifest, double tau,
                                       bool normalize) {
  std::unordered_map<std::string, const SampleManifest*> by_id;
  for (const auto& s : manifest.samples) by_id.emplace(s.sample_id, &s);
  std::unordered_map<std::string, const std::string*> answers;
  for (const auto& p : preds) {
    if (!by_id.count(p.sample_id)) throw Error(ErrorCode::UnknownSampleId, p.sample_id);
    if (!answers.emplace(p.sample_id, &p.text).second) {
      throw Error(ErrorCode::DuplicatePrediction, p.sample_id);
    }
  }
  std::vector<SampleScore> scores;
  scores.reserve(manifest.samples.size());
  for (const auto& s : manifest.samples) {
    const auto it = answers.find(s.sample_id);
    if (it == answers.end()) {
      scores.push_back({s.kind, false, 0.0});
      continue;
    }
    const auto truth = normalize ? normalize_answer(s.ground_truth) : s.ground_truth;
    const auto answer = normalize ? normalize_answer(*it->second) : *it->second;
    scores.push_back({s.kind, truth == answer, anls_score(truth, answer, tau)});
  }
  return scores;
}

KindScore summarize(const std::vector<SampleScore>& scores, const AnnotationKind* only) {
  KindScore k;
  double exact = 0, sim = 0;
  for (const auto& s : scores) {
    if (only != nullptr && s.kind != *only) continue;
    ++k.count;
    exact += s.exact ? 1.0 : 0.0;
    sim += s.similarity;
  }
  if (k.count > 0) {
    k.acc = 100.0 * exact / static_cast<double>(k.count);
    k.anls = sim / static_cast<double>(k.count);
  }
  return k;
}

Json kind_json(const KindScore& k) {
  return Json{{"count", k.count}, {"acc", k.acc}, {"anls", k.anls}};
}

}  // namespace

std::size_t levenshtein(std::string_view a, std::string_view b) {
  const auto x = utf8::decode(a);
  const auto y = utf8::decode(b);
  std::vector<std::size_t> prev(y.size() + 1), cur(y.size() + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (std::size_t i = 1; i <= x.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= y.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (x[i - 1] == y[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[y.size()];
}

double normalized_lev(std::string_view a, std::string_view b) {
  const auto longest = std::max(utf8::length(a), utf8::length(b));
  if (longest == 0) return 0.0;
  return static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

std::string normalize_answer(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending = false;
  for (const char c : text) {
    if (utf8::is_space(c)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
  }
  return out;
}

double anls_score(std::string_view truth, std::string_view answer, double tau) {
  const double nl = normalized_lev(truth, answer);
  return nl < tau ? 1.0 - nl : 0.0;
}

double anls(const std::vector<Prediction>& preds, const DatasetManifest& manifest, double tau,
            bool normalize) {
  return summarize(score_samples(preds, manifest, tau, normalize), nullptr).anls;
}

double acc(const std::vector<Prediction>& preds, const DatasetManifest& manifest, bool normalize) {
  return summarize(score_samples(preds, manifest, kDefaultTau, normalize), nullptr).acc;
}

ScoreReport score_report(const std::vector<Prediction>& preds, const DatasetManifest& manifest,
                         double tau, bool normalize) {
  const auto scores = score_samples(preds, manifest, tau, normalize);
  ScoreReport report;
  report.tau = tau;
  report.normalized = normalize;
  for (const auto kind : kTableOrder) report.per_kind[kind] = summarize(scores, &kind);
  report.average = summarize(scores, nullptr);
  return report;
}

std::string ScoreReport::table() const {
  std::ostringstream out;
  char buf[64];
  auto cell = [&](const char* text) {
    std::snprintf(buf, sizeof buf, "%12s", text);
    out << buf;
  };
  std::snprintf(buf, sizeof buf, "%-6s", "");
  out << buf;
  cell("Average");
  for (const auto kind : kTableOrder) cell(column_name(kind));
  out << "\n";

  auto row = [&](const char* label, auto value) {
    std::snprintf(buf, sizeof buf, "%-6s", label);
    out << buf;
    char num[32];
    value(average, num);
    cell(num);
    for (const auto kind : kTableOrder) {
      value(per_kind.at(kind), num);
      cell(num);
    }
    out << "\n";
  };
  row("ACC", [](const KindScore& k, char* s) { std::snprintf(s, 32, "%.2f", k.acc); });
  row("ANLS", [](const KindScore& k, char* s) { std::snprintf(s, 32, "%.4f", k.anls); });
  row("N", [](const KindScore& k, char* s) { std::snprintf(s, 32, "%zu", k.count); });
  return out.str();
}

std::string ScoreReport::to_json() const {
  Json j;
  j["tau"] = tau;
  j["normalized"] = normalized;
  j["average"] = kind_json(average);
  Json kinds;
  for (const auto kind : kTableOrder) kinds[std::string(to_string(kind))] = kind_json(per_kind.at(kind));
  j["kinds"] = kinds;
  return j.dump(2) + "\n";
}

std::vector<Prediction> parse_predictions(std::string_view jsonl) {
  std::vector<Prediction> preds;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= jsonl.size()) {
    auto end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    const auto line = jsonl.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (std::all_of(line.begin(), line.end(), [](char c) { return utf8::is_space(c); })) continue;
    try {
      const auto j = Json::parse(line);
      preds.push_back({j.at("id").get<std::string>(), j.at("text").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::Parse, "predictions line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return preds;
}

std::vector<Prediction> read_predictions(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return parse_predictions({reinterpret_cast<const char*>(bytes.data()), bytes.size()});
}

std::string predictions_to_jsonl(const std::vector<Prediction>& preds) {
  std::string out;
  for (const auto& p : preds) {
    out += Json{{"id", p.sample_id}, {"text", p.text}}.dump();
    out += "\n";
  }
  return out;
}

}  // namespace haur
