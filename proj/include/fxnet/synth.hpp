#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fxnet/common.hpp"
#include "fxnet/corrnet.hpp"
#include "fxnet/panel.hpp"

namespace fxnet {

struct FactorGroup {
  std::size_t members = 1;
  double loading = 0.0;
  std::vector<double> member_loadings;  // overrides `loading` per member when non-empty
  std::vector<std::size_t> subgroups;   // sizes summing to `members`; empty = single level
  double sub_loading = 0.0;
};

// r = s (lambda F_g + mu G_sub + sqrt(1 - lambda^2 - mu^2) eps), all draws i.i.d.
// standard normal, s = scale. Within-group correlation is lambda^2 (+ mu^2 inside
// a subgroup).
struct FactorModelSpec {
  std::vector<FactorGroup> groups;
  double scale = 1.0;
  std::size_t T = 1000;
  std::uint64_t seed = 0;
  std::int64_t start_hour = 0;
  std::vector<std::string> labels;  // default g<group>_<member>

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& g : groups) n += g.members;
    return n;
  }

  void validate() const {
    if (groups.empty()) throw Error(ErrorKind::Configuration, "factor model needs at least one group");
    if (T < 2) throw Error(ErrorKind::Configuration, "factor model needs T >= 2");
    if (!(scale > 0.0)) throw Error(ErrorKind::Configuration, "factor model scale must be positive");
    for (const auto& g : groups) {
      if (g.members == 0) throw Error(ErrorKind::Configuration, "group with no members");
      if (!g.member_loadings.empty() && g.member_loadings.size() != g.members) {
        throw Error(ErrorKind::Configuration, "per-member loadings must match member count");
      }
      std::size_t covered = 0;
      for (auto s : g.subgroups) covered += s;
      if (!g.subgroups.empty() && covered != g.members) throw Error(ErrorKind::Configuration, "subgroup sizes must sum to group size");
      const double mu = g.subgroups.empty() ? 0.0 : g.sub_loading;
      for (std::size_t m = 0; m < g.members; ++m) {
        const double lambda = g.member_loadings.empty() ? g.loading : g.member_loadings[m];
        if (lambda < 0.0 || lambda > 1.0 || mu < 0.0 || mu > 1.0) throw Error(ErrorKind::Configuration, "loadings must lie in [0, 1]");
        if (lambda * lambda + mu * mu > 1.0 + 1e-12) throw Error(ErrorKind::Configuration, "loadings exceed unit variance");
      }
    }
    if (!labels.empty() && labels.size() != size()) throw Error(ErrorKind::Configuration, "label count differs from members");
  }
};

// Series-major factor-model draws (rows = members).
inline Matrix factor_model_matrix(const FactorModelSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto T = static_cast<Eigen::Index>(spec.T);
  Matrix out(static_cast<Eigen::Index>(spec.size()), T);
  Eigen::Index row = 0;
  for (const auto& g : spec.groups) {
    Vector common(T);
    for (Eigen::Index t = 0; t < T; ++t) common(t) = normal(rng);
    std::vector<Vector> sub;
    for (std::size_t s = 0; s < g.subgroups.size(); ++s) {
      Vector v(T);
      for (Eigen::Index t = 0; t < T; ++t) v(t) = normal(rng);
      sub.push_back(std::move(v));
    }
    std::size_t sub_index = 0, sub_left = g.subgroups.empty() ? 0 : g.subgroups[0];
    for (std::size_t m = 0; m < g.members; ++m, ++row) {
      const double lambda = g.member_loadings.empty() ? g.loading : g.member_loadings[m];
      const double mu = g.subgroups.empty() ? 0.0 : g.sub_loading;
      const double idio = std::sqrt(std::max(0.0, 1.0 - lambda * lambda - mu * mu));
      for (Eigen::Index t = 0; t < T; ++t) {
        double v = lambda * common(t) + idio * normal(rng);
        if (!sub.empty()) v += mu * sub[sub_index](t);
        out(row, t) = spec.scale * v;
      }
      if (!sub.empty() && --sub_left == 0 && sub_index + 1 < sub.size()) sub_left = g.subgroups[++sub_index];
    }
  }
  return out;
}

inline ReturnPanel generate_panel(const FactorModelSpec& spec) {
  ReturnPanel panel;
  panel.returns = factor_model_matrix(spec);
  if (spec.labels.empty()) {
    for (std::size_t g = 0; g < spec.groups.size(); ++g) {
      for (std::size_t m = 0; m < spec.groups[g].members; ++m) {
        panel.instruments.push_back("g" + std::to_string(g) + "_" + std::to_string(m));
      }
    }
  } else {
    panel.instruments = spec.labels;
  }
  for (std::size_t t = 0; t < spec.T; ++t) panel.times.push_back(spec.start_hour + static_cast<std::int64_t>(t));
  return panel;
}

// Currency values u_c follow the factor model (one series per currency, in group
// order); the rate X/Y has return u_X - u_Y.
struct CurrencyModelSpec {
  std::vector<std::string> currencies;
  FactorModelSpec factors;  // size() must equal currencies.size()
  std::string numeraire = "USD";
};

struct CurrencyPanel {
  ReturnPanel panel;  // every ordered pair X/Y, X != Y
  std::vector<std::string> base;  // rates against the numeraire, as labelled in the panel
  std::vector<DerivationRule> rules;  // crosses X/Y (X < Y) from numeraire rates
  std::vector<std::size_t> group_of;  // factor group per currency
};

inline CurrencyPanel generate_currency_panel(const CurrencyModelSpec& spec) {
  const auto& ccy = spec.currencies;
  if (ccy.size() < 3) throw Error(ErrorKind::Configuration, "currency panel needs at least three currencies");
  if (spec.factors.size() != ccy.size()) throw Error(ErrorKind::Configuration, "one factor-model member per currency");
  if (std::find(ccy.begin(), ccy.end(), spec.numeraire) == ccy.end()) {
    throw Error(ErrorKind::Configuration, "numeraire " + spec.numeraire + " is not among the currencies");
  }
  const Matrix u = factor_model_matrix(spec.factors);
  CurrencyPanel out;
  for (std::size_t g = 0; g < spec.factors.groups.size(); ++g) {
    out.group_of.insert(out.group_of.end(), spec.factors.groups[g].members, g);
  }
  NamedReturns forward;
  for (std::size_t x = 0; x < ccy.size(); ++x) {
    for (std::size_t y = 0; y < ccy.size(); ++y) {
      if (ccy[x] >= ccy[y]) continue;
      const std::string label = ccy[x] + "/" + ccy[y];
      std::vector<std::optional<double>> r(spec.factors.T);
      for (std::size_t t = 0; t < spec.factors.T; ++t) {
        r[t] = u(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(t)) - u(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(t));
      }
      forward.emplace_back(label, std::move(r));
      if (ccy[x] == spec.numeraire || ccy[y] == spec.numeraire) {
        out.base.push_back(label);
      } else {
        out.rules.push_back({label, ccy[x] + "/" + spec.numeraire, ccy[y] + "/" + spec.numeraire});
      }
    }
  }
  std::vector<std::int64_t> times;
  for (std::size_t t = 0; t < spec.factors.T; ++t) times.push_back(spec.factors.start_hour + static_cast<std::int64_t>(t));
  out.panel = expand_inverses(align_panel(times, forward));
  return out;
}

// Block network: weight p_in inside a group, p_out across, plus uniform jitter in
// [-jitter, jitter] clamped to [0, 1]. Zero diagonal.
inline CorrNetwork generate_planted_network(const std::vector<std::size_t>& groups, double p_in, double p_out,
                                            double jitter = 0.0, std::uint64_t seed = 0) {
  if (!(p_out >= 0.0 && p_out <= p_in && p_in <= 1.0)) throw Error(ErrorKind::Configuration, "need 0 <= p_out <= p_in <= 1");
  if (jitter < 0.0) throw Error(ErrorKind::Configuration, "jitter must be non-negative");
  std::vector<std::size_t> group_of;
  for (std::size_t g = 0; g < groups.size(); ++g) group_of.insert(group_of.end(), groups[g], g);
  const auto n = static_cast<Eigen::Index>(group_of.size());
  if (n < 2) throw Error(ErrorKind::Configuration, "planted network needs at least two nodes");
  Rng rng(seed);
  Matrix A = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double w = group_of[static_cast<std::size_t>(i)] == group_of[static_cast<std::size_t>(j)] ? p_in : p_out;
      if (jitter > 0.0) w = std::clamp(w + jitter * (2.0 * uniform_real(rng) - 1.0), 0.0, 1.0);
      A(i, j) = A(j, i) = w;
    }
  }
  return network_from_adjacency(std::move(A));
}

// Nested blocks: `coarse` groups of `fine` subgroups of `leaf` nodes with weights
// w_fine inside a subgroup, w_coarse inside a group and w_out elsewhere.
inline CorrNetwork generate_hierarchical_network(std::size_t coarse, std::size_t fine, std::size_t leaf, double w_fine,
                                                 double w_coarse, double w_out) {
  if (coarse == 0 || fine == 0 || leaf == 0) throw Error(ErrorKind::Configuration, "hierarchy sizes must be positive");
  if (!(w_out <= w_coarse && w_coarse <= w_fine)) throw Error(ErrorKind::Configuration, "need w_out <= w_coarse <= w_fine");
  const auto n = static_cast<Eigen::Index>(coarse * fine * leaf);
  Matrix A = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto a = static_cast<std::size_t>(i), b = static_cast<std::size_t>(j);
      double w = w_out;
      if (a / (fine * leaf) == b / (fine * leaf)) w = w_coarse;
      if (a / leaf == b / leaf) w = w_fine;
      A(i, j) = A(j, i) = w;
    }
  }
  return network_from_adjacency(std::move(A));
}

}  // namespace fxnet
