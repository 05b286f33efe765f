#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "fxnet/common.hpp"
#include "fxnet/corrnet.hpp"
#include "fxnet/panel.hpp"
#include "fxnet/parallel.hpp"
#include "fxnet/potts.hpp"

namespace fxnet {

struct ShuffleSpec {
  std::vector<std::string> base_instruments;
  std::vector<DerivationRule> rules;
  std::size_t realizations = 100;
  std::uint64_t seed = 0;
};

using Permutations = std::map<std::string, std::vector<std::size_t>>;

namespace detail {

// Row of `name`, or the negated row of its inverse.
inline std::optional<Vector> lookup_row(const std::map<std::string, Vector>& rows, const std::string& name) {
  if (auto it = rows.find(name); it != rows.end()) return it->second;
  if (name.find('/') != std::string::npos) {
    if (auto it = rows.find(inverse_label(name)); it != rows.end()) return Vector(-it->second);
  }
  return std::nullopt;
}

inline std::optional<Vector> lookup_row(const ReturnPanel& panel, const std::string& name) {
  if (auto row = panel.find(name)) return Vector(panel.returns.row(static_cast<Eigen::Index>(*row)).transpose());
  if (name.find('/') != std::string::npos) {
    if (auto row = panel.find(inverse_label(name))) {
      return Vector(-panel.returns.row(static_cast<Eigen::Index>(*row)).transpose());
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Applies the given permutation to every base series (permuted[t] = r[perm[t]]),
// rebuilds derived series as r_num - r_den and every other row as the negation of
// its inverse.
inline ReturnPanel shuffle_panel(const ReturnPanel& panel, const ShuffleSpec& spec, const Permutations& perms) {
  const std::set<std::string> base(spec.base_instruments.begin(), spec.base_instruments.end());
  const auto ordered = order_rules(base, spec.rules);
  const auto T = static_cast<Eigen::Index>(panel.length());
  std::map<std::string, Vector> rows;
  for (const auto& name : spec.base_instruments) {
    auto original = detail::lookup_row(panel, name);
    if (!original) throw Error(ErrorKind::Spec, "base instrument " + name + " is not in the panel");
    const auto it = perms.find(name);
    if (it == perms.end()) throw Error(ErrorKind::Spec, "no permutation for " + name);
    const auto& perm = it->second;
    if (static_cast<Eigen::Index>(perm.size()) != T) throw Error(ErrorKind::SizeMismatch, "permutation length for " + name);
    Vector shuffled(T);
    for (Eigen::Index t = 0; t < T; ++t) shuffled(t) = (*original)(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(t)]));
    rows[name] = std::move(shuffled);
  }
  for (const auto& rule : ordered) {
    auto num = detail::lookup_row(rows, rule.numerator);
    auto den = detail::lookup_row(rows, rule.denominator);
    if (!num || !den) throw Error(ErrorKind::Spec, "rule for " + rule.target + " references an unknown instrument");
    rows[rule.target] = *num - *den;
  }
  ReturnPanel out;
  out.instruments = panel.instruments;
  out.times = panel.times;
  out.dropped = panel.dropped;
  out.returns.resize(static_cast<Eigen::Index>(panel.size()), T);
  for (std::size_t i = 0; i < panel.size(); ++i) {
    auto row = detail::lookup_row(rows, panel.instruments[i]);
    if (!row) throw Error(ErrorKind::Spec, panel.instruments[i] + " is neither a base series nor derivable from one");
    out.returns.row(static_cast<Eigen::Index>(i)) = row->transpose();
  }
  return out;
}

// Independent uniform permutation per base series, drawn in base-list order.
inline Permutations draw_permutations(const ShuffleSpec& spec, std::size_t length, std::uint64_t seed) {
  Rng rng(seed);
  Permutations perms;
  for (const auto& name : spec.base_instruments) {
    std::vector<std::size_t> perm(length);
    std::iota(perm.begin(), perm.end(), 0);
    shuffle_in_place(perm, rng);
    perms[name] = std::move(perm);
  }
  return perms;
}

inline ReturnPanel shuffle_panel(const ReturnPanel& panel, const ShuffleSpec& spec) {
  return shuffle_panel(panel, spec, draw_permutations(spec, panel.length(), spec.seed));
}

struct PermutationOptions {
  std::size_t T = 200;
  std::size_t step = 20;
  Heuristic heuristic = Heuristic::Greedy;
  NullModel null = NullModel::NewmanGirvan;
  AnnealSchedule schedule{};
  bool self_edges = false;
  unsigned threads = 1;
};

struct SignificanceReport {
  double gamma = 0.0;
  std::size_t windows = 0;
  std::size_t realizations = 0;
  std::uint64_t seed = 0;
  double observed_mean = 0.0;
  double observed_stddev = 0.0;
  double shuffled_mean = 0.0;    // over every window of every realization
  double shuffled_stddev = 0.0;
  double p_value = 1.0;
  std::vector<double> observed;          // Q_s per window
  std::vector<double> realization_means;  // mean Q_s per realization
  std::vector<std::size_t> largest_shuffled_community;  // per shuffled window, all realizations
};

namespace detail {

inline std::pair<double, double> mean_sd(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / static_cast<double>(v.size()))};
}

struct WindowScores {
  std::vector<double> qs;
  std::vector<std::size_t> largest;
};

inline WindowScores score_windows(const ReturnPanel& panel, double gamma, const PermutationOptions& opt,
                                  std::uint64_t seed, unsigned threads) {
  const auto seq = build_sequence(panel, opt.T, opt.step, opt.self_edges, threads);
  WindowScores out;
  out.qs.resize(seq.networks.size());
  out.largest.resize(seq.networks.size());
  parallel_for(seq.networks.size(), threads, [&](std::size_t w) {
    const auto model = EnergyModel::from_network(seq.networks[w], gamma, opt.null);
    const auto part = minimize(model, opt.heuristic, mix_seed(seed, w), opt.schedule);
    out.qs[w] = scaled_energy(model, part);
    const auto sizes = part.sizes();
    out.largest[w] = *std::max_element(sizes.begin(), sizes.end());
  });
  return out;
}

}  // namespace detail

// One-sided test of mean observed Q_s against shuffled panels. Realization r uses
// permutations seeded by mix_seed(seed, r); p = (1 + #{r : mean_r >= observed}) / (1 + R).
inline SignificanceReport permutation_test(const ReturnPanel& panel, const ShuffleSpec& spec, double gamma,
                                           const PermutationOptions& opt = {}) {
  if (spec.realizations < 10) throw Error(ErrorKind::Configuration, "permutation test needs at least 10 realizations");
  SignificanceReport rep;
  rep.gamma = gamma;
  rep.realizations = spec.realizations;
  rep.seed = spec.seed;
  const std::uint64_t heuristic_seed = mix_seed(spec.seed, 0xA11CE);
  const auto observed = detail::score_windows(panel, gamma, opt, heuristic_seed, opt.threads);
  rep.observed = observed.qs;
  rep.windows = observed.qs.size();
  std::tie(rep.observed_mean, rep.observed_stddev) = detail::mean_sd(rep.observed);

  std::vector<detail::WindowScores> shuffled(spec.realizations);
  parallel_for(spec.realizations, opt.threads, [&](std::size_t r) {
    const auto perms = draw_permutations(spec, panel.length(), mix_seed(spec.seed, r));
    shuffled[r] = detail::score_windows(shuffle_panel(panel, spec, perms), gamma, opt, heuristic_seed, 1);
  });
  std::vector<double> pooled;
  std::size_t exceed = 0;
  for (const auto& s : shuffled) {
    const double m = detail::mean_sd(s.qs).first;
    rep.realization_means.push_back(m);
    if (m >= rep.observed_mean) ++exceed;
    pooled.insert(pooled.end(), s.qs.begin(), s.qs.end());
    rep.largest_shuffled_community.insert(rep.largest_shuffled_community.end(), s.largest.begin(), s.largest.end());
  }
  std::tie(rep.shuffled_mean, rep.shuffled_stddev) = detail::mean_sd(pooled);
  rep.p_value = static_cast<double>(1 + exceed) / static_cast<double>(1 + spec.realizations);
  return rep;
}

}  // namespace fxnet
