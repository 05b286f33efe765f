#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "fxnet/common.hpp"
#include "fxnet/potts.hpp"

namespace fxnet {

// |c^k ∩ c^k'| for two partitions of the same nodes.
struct ConfusionTable {
  std::vector<std::vector<std::size_t>> counts;  // K x K'
  std::vector<std::size_t> row_sizes;
  std::vector<std::size_t> col_sizes;
  std::size_t n = 0;

  static ConfusionTable build(const Partition& a, const Partition& b) {
    if (a.n() != b.n()) throw Error(ErrorKind::SizeMismatch, "partitions cover different node counts");
    ConfusionTable t;
    t.n = a.n();
    t.counts.assign(static_cast<std::size_t>(a.K), std::vector<std::size_t>(static_cast<std::size_t>(b.K), 0));
    t.row_sizes.assign(static_cast<std::size_t>(a.K), 0);
    t.col_sizes.assign(static_cast<std::size_t>(b.K), 0);
    for (std::size_t i = 0; i < t.n; ++i) {
      const auto r = static_cast<std::size_t>(a.assignment[i]);
      const auto c = static_cast<std::size_t>(b.assignment[i]);
      ++t.counts[r][c];
      ++t.row_sizes[r];
      ++t.col_sizes[c];
    }
    return t;
  }
};

namespace detail {
inline double plogp(std::size_t count, std::size_t n) {
  if (count == 0) return 0.0;
  const double p = static_cast<double>(count) / static_cast<double>(n);
  return p * std::log(p);
}
}  // namespace detail

inline double entropy(const Partition& part) {
  double s = 0.0;
  for (auto size : part.sizes()) s -= detail::plogp(size, part.n());
  return s;
}

inline double mutual_information(const Partition& a, const Partition& b) {
  const auto t = ConfusionTable::build(a, b);
  const double n = static_cast<double>(t.n);
  double mi = 0.0;
  for (std::size_t r = 0; r < t.counts.size(); ++r) {
    for (std::size_t c = 0; c < t.counts[r].size(); ++c) {
      const std::size_t k = t.counts[r][c];
      if (k == 0) continue;
      const double pj = static_cast<double>(k) / n;
      mi += pj * std::log(static_cast<double>(k) * n /
                          (static_cast<double>(t.row_sizes[r]) * static_cast<double>(t.col_sizes[c])));
    }
  }
  return mi;
}

// Unnormalized variation of information S(a) + S(b) - 2 I(a,b), computed from the
// joint table so that identical partitions give exactly 0. Cell terms are summed
// in sorted order, which makes the result bit-identical under swapping a and b.
inline double variation_of_information(const Partition& a, const Partition& b) {
  const auto t = ConfusionTable::build(a, b);
  std::vector<double> terms;
  for (std::size_t r = 0; r < t.counts.size(); ++r) {
    for (std::size_t c = 0; c < t.counts[r].size(); ++c) {
      const std::size_t k = t.counts[r][c];
      if (k == 0) continue;
      const double pj = static_cast<double>(k) / static_cast<double>(t.n);
      terms.push_back(-pj * (std::log(static_cast<double>(k) / static_cast<double>(t.row_sizes[r])) +
                             std::log(static_cast<double>(k) / static_cast<double>(t.col_sizes[c]))));
    }
  }
  std::sort(terms.begin(), terms.end());
  double vi = 0.0;
  for (double term : terms) vi += term;
  return std::max(0.0, vi);
}

inline double norm_vi(const Partition& a, const Partition& b) {
  if (a.n() < 2) throw Error(ErrorKind::InvalidInput, "normalized VI needs at least two nodes");
  return std::clamp(variation_of_information(a, b) / std::log(static_cast<double>(a.n())), 0.0, 1.0);
}

// Jaccard overlap of two member sets, given as sorted node lists.
inline double community_autocorrelation(std::span<const std::size_t> before, std::span<const std::size_t> after) {
  std::size_t i = 0, j = 0, common = 0;
  while (i < before.size() && j < after.size()) {
    if (before[i] < after[j]) {
      ++i;
    } else if (after[j] < before[i]) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  const std::size_t uni = before.size() + after.size() - common;
  return uni == 0 ? 1.0 : static_cast<double>(common) / static_cast<double>(uni);
}

// a_i^t(tau) for node i between two partitions of the same nodes.
inline double node_autocorrelation(const Partition& at_t, const Partition& at_t_tau, std::size_t node) {
  if (at_t.n() != at_t_tau.n()) throw Error(ErrorKind::SizeMismatch, "partitions cover different node counts");
  std::vector<std::size_t> before, after;
  for (std::size_t j = 0; j < at_t.n(); ++j) {
    if (at_t.assignment[j] == at_t.assignment[node]) before.push_back(j);
    if (at_t_tau.assignment[j] == at_t_tau.assignment[node]) after.push_back(j);
  }
  return community_autocorrelation(before, after);
}

inline std::vector<double> node_autocorrelations(const Partition& at_t, const Partition& at_t_tau) {
  std::vector<double> out(at_t.n());
  for (std::size_t i = 0; i < at_t.n(); ++i) out[i] = node_autocorrelation(at_t, at_t_tau, i);
  return out;
}

inline constexpr int kEventLevels = 6;

struct EventSeries {
  std::vector<std::size_t> windows;  // vhat[k] compares window windows[k]-1 with windows[k]
  std::vector<double> vhat;
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> thresholds;                 // mean + j sigma, j = 1..6
  std::vector<std::vector<std::size_t>> flagged;  // per level: windows above its threshold

  // Highest level j whose threshold vhat[k] exceeds (0 if none).
  int level(std::size_t k) const {
    int lvl = 0;
    for (int j = 0; j < kEventLevels; ++j) {
      if (stddev > 0.0 && vhat[k] > thresholds[static_cast<std::size_t>(j)]) lvl = j + 1;
    }
    return lvl;
  }
};

// Consecutive-window V-hat with global mean/sigma thresholds (population sigma).
inline EventSeries detect_events(const std::vector<Partition>& sequence) {
  if (sequence.size() < 3) throw Error(ErrorKind::InvalidInput, "event detection needs at least three windows");
  EventSeries ev;
  for (std::size_t w = 1; w < sequence.size(); ++w) {
    ev.windows.push_back(w);
    ev.vhat.push_back(norm_vi(sequence[w - 1], sequence[w]));
  }
  const double m = static_cast<double>(ev.vhat.size());
  for (double v : ev.vhat) ev.mean += v;
  ev.mean /= m;
  double ss = 0.0;
  for (double v : ev.vhat) ss += (v - ev.mean) * (v - ev.mean);
  ev.stddev = std::sqrt(ss / m);
  ev.flagged.resize(kEventLevels);
  for (int j = 1; j <= kEventLevels; ++j) {
    const double threshold = ev.mean + j * ev.stddev;
    ev.thresholds.push_back(threshold);
    if (ev.stddev == 0.0) continue;
    for (std::size_t k = 0; k < ev.vhat.size(); ++k) {
      if (ev.vhat[k] > threshold) ev.flagged[static_cast<std::size_t>(j - 1)].push_back(ev.windows[k]);
    }
  }
  return ev;
}

// Moves `moved` distinct random nodes to a uniformly chosen other community (a new
// one when only a single community exists).
inline Partition random_reassignment(const Partition& part, std::size_t moved, Rng& rng) {
  if (moved >= part.n() && part.n() > 0) throw Error(ErrorKind::InvalidInput, "cannot reassign every node");
  std::vector<std::size_t> nodes(part.n());
  std::iota(nodes.begin(), nodes.end(), 0);
  for (std::size_t k = 0; k < moved; ++k) {
    std::swap(nodes[k], nodes[k + uniform_index(rng, nodes.size() - k)]);
  }
  std::vector<int> out = part.assignment;
  for (std::size_t k = 0; k < moved; ++k) {
    const std::size_t i = nodes[k];
    if (part.K <= 1) {
      out[i] = part.K;
      continue;
    }
    int target = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(part.K - 1)));
    if (target >= part.assignment[i]) ++target;
    out[i] = target;
  }
  return Partition::from_assignment(out);
}

inline double random_reassignment_baseline(const Partition& part, std::size_t moved, std::size_t trials,
                                           std::uint64_t seed) {
  if (trials == 0) return 0.0;
  Rng rng(seed);
  double sum = 0.0;
  for (std::size_t t = 0; t < trials; ++t) sum += norm_vi(part, random_reassignment(part, moved, rng));
  return sum / static_cast<double>(trials);
}

}  // namespace fxnet
