#include <algorithm>
#include <cstdio>
#include <sstream>

#include "haur/dataset.hpp"

namespace haur {

namespace {

void add(Histogram& h, std::size_t tokens) {
  const auto bin = DistributionReport::bin_of(tokens);
  if (h.counts.size() <= bin) h.counts.resize(bin + 1, 0);
  ++h.counts[bin];
}

std::string bin_label(std::size_t bin) {
  const auto w = DistributionReport::kBinWidth;
  return std::to_string(bin * w + 1) + "-" + std::to_string((bin + 1) * w);
}

void append_table(std::ostringstream& out, const char* title,
                  const std::map<AnnotationKind, Histogram>& series) {
  std::size_t bins = 0;
  for (const auto& [k, h] : series) bins = std::max(bins, h.counts.size());
  out << title << "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-10s", "tokens");
  out << buf;
  for (const auto& [k, h] : series) {
    std::snprintf(buf, sizeof buf, "%11s", std::string(to_string(k)).c_str());
    out << buf;
  }
  out << "\n";
  for (std::size_t b = 0; b < bins; ++b) {
    std::snprintf(buf, sizeof buf, "%-10s", bin_label(b).c_str());
    out << buf;
    for (const auto& [k, h] : series) {
      std::snprintf(buf, sizeof buf, "%11zu", b < h.counts.size() ? h.counts[b] : 0);
      out << buf;
    }
    out << "\n";
  }
}

}  // namespace

std::size_t Histogram::total() const {
  std::size_t n = 0;
  for (const auto c : counts) n += c;
  return n;
}

std::size_t DistributionReport::bin_of(std::size_t tokens) {
  return tokens == 0 ? 0 : (tokens - 1) / kBinWidth;
}

std::string DistributionReport::table() const {
  std::ostringstream out;
  append_table(out, "Full text length (tokens)", full_text);
  out << "\n";
  append_table(out, "Ground truth length (tokens)", ground_truth);
  return out.str();
}

std::string DistributionReport::csv() const {
  std::ostringstream out;
  out << "kind,series,bin_lo,bin_hi,count\n";
  auto rows = [&](const char* series, const std::map<AnnotationKind, Histogram>& hists) {
    for (const auto& [kind, h] : hists) {
      for (std::size_t b = 0; b < h.counts.size(); ++b) {
        out << to_string(kind) << ',' << series << ',' << b * kBinWidth + 1 << ','
            << (b + 1) * kBinWidth << ',' << h.counts[b] << "\n";
      }
    }
  };
  rows("full_text", full_text);
  rows("ground_truth", ground_truth);
  return out.str();
}

DistributionReport compute_stats(const DatasetManifest& manifest) {
  DistributionReport report;
  for (const auto& s : manifest.samples) {
    add(report.full_text[s.kind], count_tokens(s.full_text));
    add(report.ground_truth[s.kind], count_tokens(s.ground_truth));
  }
  return report;
}

}  // namespace haur
