#include <cmath>
#include <map>

#include "haur/dataset.hpp"
#include "haur/error.hpp"
#include "haur/rng.hpp"

namespace haur {

namespace {

constexpr std::size_t kKinds = kAllKinds.size();
constexpr std::size_t kBuckets = 3;

using KindCounts = std::array<double, kKinds>;
using Table = std::array<KindCounts, kBuckets>;

double imbalance(const Table& cur, const Table& target) {
  double total = 0;
  for (std::size_t b = 0; b < kBuckets; ++b) {
    for (std::size_t k = 0; k < kKinds; ++k) {
      const double d = cur[b][k] - target[b][k];
      total += d * d;
    }
  }
  return total;
}

void shift(Table& cur, const KindCounts& c, std::size_t from, std::size_t to) {
  for (std::size_t k = 0; k < kKinds; ++k) {
    cur[from][k] -= c[k];
    cur[to][k] += c[k];
  }
}

// Single moves and pairwise swaps of whole chunks until no step lowers the
// squared deviation from the per-kind targets.
void repair(std::vector<std::size_t>& bucket, const std::vector<KindCounts>& groups, Table& cur,
            const Table& target) {
  constexpr double kEps = 1e-9;
  bool improved = true;
  for (int round = 0; improved && round < 64; ++round) {
    improved = false;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      for (std::size_t b = 0; b < kBuckets; ++b) {
        if (b == bucket[g]) continue;
        const double before = imbalance(cur, target);
        shift(cur, groups[g], bucket[g], b);
        if (imbalance(cur, target) < before - kEps) {
          bucket[g] = b;
          improved = true;
        } else {
          shift(cur, groups[g], b, bucket[g]);
        }
      }
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
      for (std::size_t h = g + 1; h < groups.size(); ++h) {
        const auto bg = bucket[g], bh = bucket[h];
        if (bg == bh) continue;
        const double before = imbalance(cur, target);
        shift(cur, groups[g], bg, bh);
        shift(cur, groups[h], bh, bg);
        if (imbalance(cur, target) < before - kEps) {
          std::swap(bucket[g], bucket[h]);
          improved = true;
        } else {
          shift(cur, groups[g], bh, bg);
          shift(cur, groups[h], bg, bh);
        }
      }
    }
  }
}

}  // namespace

void split_dataset(DatasetManifest& manifest, std::array<double, 3> ratios, std::uint64_t seed) {
  double sum = 0;
  for (const double r : ratios) {
    if (!std::isfinite(r) || r < 0) throw Error(ErrorCode::BadRatios, "ratios must be non-negative");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error(ErrorCode::BadRatios, "ratios must sum to 1");

  std::vector<std::string> chunk_order;
  std::map<std::string, std::size_t> chunk_index;
  std::vector<KindCounts> groups;
  KindCounts totals{};
  for (const auto& s : manifest.samples) {
    auto [it, inserted] = chunk_index.emplace(s.chunk_id, chunk_order.size());
    if (inserted) {
      chunk_order.push_back(s.chunk_id);
      groups.push_back(KindCounts{});
    }
    groups[it->second][kind_index(s.kind)] += 1;
    totals[kind_index(s.kind)] += 1;
  }

  Table target{};
  for (std::size_t b = 0; b < kBuckets; ++b) {
    for (std::size_t k = 0; k < kKinds; ++k) target[b][k] = totals[k] * ratios[b];
  }

  std::vector<std::size_t> order(groups.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  Table cur{};
  std::vector<std::size_t> bucket(groups.size(), 0);
  for (const auto g : order) {
    std::size_t best = 0;
    double best_gain = -1e300;
    for (std::size_t b = 0; b < kBuckets; ++b) {
      double gain = 0;
      for (std::size_t k = 0; k < kKinds; ++k) gain += groups[g][k] * (target[b][k] - cur[b][k]);
      if (gain > best_gain + 1e-12) {
        best_gain = gain;
        best = b;
      }
    }
    bucket[g] = best;
    for (std::size_t k = 0; k < kKinds; ++k) cur[best][k] += groups[g][k];
  }
  repair(bucket, groups, cur, target);

  manifest.split.clear();
  for (const auto& s : manifest.samples) {
    manifest.split[s.sample_id] = kSplitNames[bucket[chunk_index.at(s.chunk_id)]];
  }
  manifest.split_seed = seed;
  manifest.split_ratios = ratios;
}

}  // namespace haur
