#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "haur/annotate.hpp"
#include "haur/dataset.hpp"

namespace haur {

inline constexpr double kDefaultTau = 0.5;

struct Prediction {
  std::string sample_id;
  std::string text;
};

// Edit distance over Unicode scalar values.
std::size_t levenshtein(std::string_view a, std::string_view b);

// levenshtein / max length; 0 when both are empty.
double normalized_lev(std::string_view a, std::string_view b);

// Trim, collapse whitespace runs to one space, lowercase ASCII letters.
std::string normalize_answer(std::string_view text);

// Per-sample similarity: 1 - NL when NL < tau, else 0.
double anls_score(std::string_view truth, std::string_view answer, double tau = kDefaultTau);

double anls(const std::vector<Prediction>& preds, const DatasetManifest& manifest,
            double tau = kDefaultTau, bool normalize = true);
double acc(const std::vector<Prediction>& preds, const DatasetManifest& manifest,
           bool normalize = true);

struct KindScore {
  std::size_t count = 0;
  double acc = 0;   // percent
  double anls = 0;  // [0, 1]
};

struct ScoreReport {
  double tau = kDefaultTau;
  bool normalized = true;
  std::map<AnnotationKind, KindScore> per_kind;
  KindScore average;  // sample-weighted over kinds

  std::string table() const;
  std::string to_json() const;
};

// Throws UnknownSampleId for ids outside the manifest and DuplicatePrediction
// for repeated ids. Samples without a prediction score zero.
ScoreReport score_report(const std::vector<Prediction>& preds, const DatasetManifest& manifest,
                         double tau = kDefaultTau, bool normalize = true);

std::vector<Prediction> parse_predictions(std::string_view jsonl);
std::vector<Prediction> read_predictions(const std::filesystem::path& path);
std::string predictions_to_jsonl(const std::vector<Prediction>& preds);

}  // namespace haur
