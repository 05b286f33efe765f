#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Eigenvalues>

#include "fxnet/common.hpp"
#include "fxnet/corrnet.hpp"

namespace fxnet {

// Relabels so ids are contiguous from 0 in order of first appearance.
inline std::vector<int> canonical_labels(std::span<const int> assignment) {
  std::vector<int> out(assignment.size());
  std::vector<std::pair<int, int>> seen;  // (old, new)
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    auto it = std::find_if(seen.begin(), seen.end(), [&](const auto& p) { return p.first == assignment[i]; });
    if (it == seen.end()) {
      seen.emplace_back(assignment[i], static_cast<int>(seen.size()));
      out[i] = static_cast<int>(seen.size()) - 1;
    } else {
      out[i] = it->second;
    }
  }
  return out;
}

struct Partition {
  std::vector<int> assignment;
  int K = 0;
  double energy = 0.0;
  double gamma = 0.0;
  std::string method;

  static Partition from_assignment(std::span<const int> labels, std::string method = {}) {
    Partition p;
    p.assignment = canonical_labels(labels);
    p.K = p.assignment.empty() ? 0 : *std::max_element(p.assignment.begin(), p.assignment.end()) + 1;
    p.method = std::move(method);
    return p;
  }
  static Partition from_assignment(const std::vector<int>& labels, std::string method = {}) {
    return from_assignment(std::span<const int>(labels), std::move(method));
  }

  static Partition singletons(std::size_t n) {
    std::vector<int> a(n);
    std::iota(a.begin(), a.end(), 0);
    return from_assignment(a);
  }
  static Partition single_block(std::size_t n) { return from_assignment(std::vector<int>(n, 0)); }

  std::size_t n() const { return assignment.size(); }

  std::vector<std::vector<std::size_t>> communities() const {
    std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(K));
    for (std::size_t i = 0; i < n(); ++i) out[static_cast<std::size_t>(assignment[i])].push_back(i);
    return out;
  }

  std::vector<std::size_t> sizes() const {
    std::vector<std::size_t> out(static_cast<std::size_t>(K), 0);
    for (int c : assignment) ++out[static_cast<std::size_t>(c)];
    return out;
  }

  // Same grouping of nodes, ignoring ids.
  bool same_grouping(const Partition& other) const {
    return canonical_labels(assignment) == canonical_labels(other.assignment);
  }
};

// Maps node i's community onto node involution[i] (e.g. rate -> inverse rate).
inline Partition mirror_image(const Partition& part, std::span<const std::size_t> involution) {
  std::vector<int> image(part.n());
  for (std::size_t i = 0; i < part.n(); ++i) image[i] = part.assignment[involution[i]];
  return Partition::from_assignment(image, part.method);
}

// Couplings J = A - gamma P. The diagonal of J is stored in full; the energy only
// counts it when self-edges are part of the network.
struct EnergyModel {
  Matrix J;
  Matrix P;
  double gamma = 1.0;
  double two_m = 0.0;
  bool self_edges = false;

  std::size_t n() const { return static_cast<std::size_t>(J.rows()); }

  static EnergyModel from_matrices(const Matrix& A, const Matrix& P, double gamma, double two_m,
                                   bool self_edges = false) {
    if (A.rows() != A.cols() || P.rows() != A.rows() || P.cols() != A.cols()) {
      throw Error(ErrorKind::SizeMismatch, "coupling inputs must be square and of equal size");
    }
    EnergyModel m;
    m.J = A - gamma * P;
    m.P = P;
    m.gamma = gamma;
    m.two_m = two_m;
    m.self_edges = self_edges;
    return m;
  }

  static EnergyModel from_network(const CorrNetwork& net, double gamma,
                                  NullModel null = NullModel::NewmanGirvan) {
    return from_matrices(net.A, null_expectation(net, null), gamma, net.two_m, net.include_self_edges);
  }

  // J with the diagonal zeroed unless self-edges contribute.
  Matrix pair_couplings() const {
    Matrix W = J;
    if (!self_edges) W.diagonal().setZero();
    return W;
  }
};

inline double hamiltonian(const EnergyModel& model, std::span<const int> assignment) {
  if (assignment.size() != model.n()) throw Error(ErrorKind::SizeMismatch, "partition size differs from model");
  const auto n = static_cast<Eigen::Index>(model.n());
  double within = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (assignment[static_cast<std::size_t>(i)] == assignment[static_cast<std::size_t>(j)]) {
        within += model.J(i, j) + model.J(j, i);
      }
    }
    if (model.self_edges) within += model.J(i, i);
  }
  return -within;
}

inline double hamiltonian(const EnergyModel& model, const Partition& part) {
  return hamiltonian(model, std::span<const int>(part.assignment));
}

inline double scaled_energy(const EnergyModel& model, const Partition& part) {
  if (model.two_m == 0.0) throw Error(ErrorKind::InvalidInput, "scaled energy needs nonzero total weight");
  return -hamiltonian(model, part) / model.two_m;
}

inline double modularity(const CorrNetwork& net, const Partition& part, NullModel null = NullModel::NewmanGirvan) {
  if (part.n() != net.n()) throw Error(ErrorKind::SizeMismatch, "partition size differs from network");
  if (!(net.two_m > 0.0)) throw Error(ErrorKind::InvalidInput, "modularity needs positive total weight");
  const Matrix P = null_expectation(net, null);
  const auto n = static_cast<Eigen::Index>(net.n());
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j && !net.include_self_edges) continue;
      if (part.assignment[static_cast<std::size_t>(i)] == part.assignment[static_cast<std::size_t>(j)]) {
        sum += net.A(i, j) - P(i, j);
      }
    }
  }
  return sum / net.two_m;
}

// Resolution that reproduces the no-self-edge communities once self-edges are added.
inline double rescale_gamma_self_edges(double gamma, std::size_t n) {
  if (n <= 2) throw Error(ErrorKind::InvalidInput, "self-edge rescaling needs n > 2");
  const double nn = static_cast<double>(n);
  return gamma * (nn + 2.0) * (nn - 2.0) / (nn * nn);
}

namespace detail {

inline constexpr double kTieTolerance = 1e-12;

// One Louvain local-moving phase on coupling matrix W (diagonal = internal weight
// of each super-node). Returns whether any node changed community.
inline bool local_moving(const Matrix& W, std::vector<int>& comm, Rng& rng) {
  const std::size_t n = comm.size();
  std::vector<std::size_t> size(n, 0);
  for (int c : comm) ++size[static_cast<std::size_t>(c)];
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> S(n);
  bool any = false;
  for (;;) {
    shuffle_in_place(order, rng);
    bool moved = false;
    for (std::size_t u : order) {
      std::fill(S.begin(), S.end(), 0.0);
      const auto ui = static_cast<Eigen::Index>(u);
      for (std::size_t v = 0; v < n; ++v) S[static_cast<std::size_t>(comm[v])] += W(ui, static_cast<Eigen::Index>(v));
      const auto a = static_cast<std::size_t>(comm[u]);
      const double stay = S[a] - W(ui, ui);
      double best_delta = 0.0;
      std::size_t best = a;
      bool empty_checked = false;
      for (std::size_t c = 0; c < n; ++c) {
        if (c == a) continue;
        if (size[c] == 0) {
          if (empty_checked || size[a] == 1) continue;
          empty_checked = true;
        }
        const double delta = -2.0 * (S[c] - stay);
        if (delta < best_delta - kTieTolerance) {
          best_delta = delta;
          best = c;
        }
      }
      if (best != a && best_delta < -kTieTolerance) {
        --size[a];
        ++size[best];
        comm[u] = static_cast<int>(best);
        moved = true;
        any = true;
      }
    }
    if (!moved) return any;
  }
}

inline std::vector<int> renumber(std::vector<int> comm, std::size_t& k) {
  std::vector<int> map(comm.size(), -1);
  int next = 0;
  for (int& c : comm) {
    auto& m = map[static_cast<std::size_t>(c)];
    if (m < 0) m = next++;
    c = m;
  }
  k = static_cast<std::size_t>(next);
  return comm;
}

}  // namespace detail

// Multilevel greedy minimization of H (local moving + aggregation, couplings summed
// through aggregation). Restarts from node level until neither a single-node move
// nor a community merge lowers H.
inline Partition greedy_minimize(const EnergyModel& model, std::uint64_t seed = 0) {
  const std::size_t n = model.n();
  Rng rng(seed);
  const Matrix W0 = model.pair_couplings();
  std::vector<int> assignment(n);
  std::iota(assignment.begin(), assignment.end(), 0);
  bool improved = n > 1;
  while (improved) {
    improved = false;
    Matrix W = W0;
    std::vector<std::size_t> super(n);
    std::iota(super.begin(), super.end(), 0);
    std::size_t k = 0;
    std::vector<int> comm = detail::renumber(assignment, k);
    for (int level = 0;; ++level) {
      const bool moved = detail::local_moving(W, comm, rng);
      comm = detail::renumber(comm, k);
      for (std::size_t i = 0; i < n; ++i) assignment[i] = comm[super[i]];
      improved = improved || moved;
      if (!moved && level > 0) break;
      Matrix membership = Matrix::Zero(W.rows(), static_cast<Eigen::Index>(k));
      for (std::size_t u = 0; u < comm.size(); ++u) {
        membership(static_cast<Eigen::Index>(u), comm[u]) = 1.0;
      }
      W = membership.transpose() * W * membership;
      for (std::size_t i = 0; i < n; ++i) super[i] = static_cast<std::size_t>(assignment[i]);
      comm.resize(k);
      std::iota(comm.begin(), comm.end(), 0);
    }
  }
  Partition p = Partition::from_assignment(assignment, "greedy");
  p.gamma = model.gamma;
  p.energy = hamiltonian(model, p);
  return p;
}

struct AnnealSchedule {
  std::optional<double> t0;        // default: max |J_ij| over i != j
  double cooling = 0.995;
  std::size_t moves_per_temperature = 0;  // default: 50 n
  double tmin_ratio = 1e-4;
  bool zero_temperature = false;   // pure descent for zero_temperature_levels levels
  std::size_t zero_temperature_levels = 100;
  bool record_trace = false;

  static AnnealSchedule quench(std::size_t levels) {
    AnnealSchedule s;
    s.zero_temperature = true;
    s.zero_temperature_levels = levels;
    return s;
  }

  void validate() const {
    if (zero_temperature) return;
    if (t0 && !(*t0 > 0.0)) throw Error(ErrorKind::Configuration, "anneal: T0 must be positive");
    if (!(tmin_ratio > 0.0 && tmin_ratio < 1.0)) throw Error(ErrorKind::Configuration, "anneal: need 0 < Tmin < T0");
    if (!(cooling > 0.0 && cooling < 1.0)) throw Error(ErrorKind::Configuration, "anneal: cooling must lie in (0,1)");
  }
};

struct AnnealResult {
  Partition partition;
  std::size_t proposed = 0;
  std::size_t accepted = 0;
  std::vector<double> trace;  // energy after each accepted move, when recorded
};

// Metropolis single-node moves (to another existing community or a fresh singleton)
// from the all-singletons state under geometric cooling. Returns the best state seen.
inline AnnealResult anneal_minimize_traced(const EnergyModel& model, const AnnealSchedule& schedule,
                                           std::uint64_t seed = 0) {
  schedule.validate();
  const std::size_t n = model.n();
  const auto ni = static_cast<Eigen::Index>(n);
  const Matrix W = model.pair_couplings();
  Rng rng(seed);

  double max_abs = 0.0;
  for (Eigen::Index i = 0; i < ni; ++i) {
    for (Eigen::Index j = 0; j < ni; ++j) {
      if (i != j) max_abs = std::max(max_abs, std::abs(model.J(i, j)));
    }
  }
  const double t0 = schedule.t0.value_or(max_abs > 0.0 ? max_abs : 1.0);
  const double tmin = schedule.tmin_ratio * t0;
  const std::size_t per_level = schedule.moves_per_temperature ? schedule.moves_per_temperature : 50 * n;

  std::vector<int> comm(n);
  std::iota(comm.begin(), comm.end(), 0);
  std::vector<std::size_t> size(n, 1);
  std::vector<int> nonempty(n);  // list of used labels
  std::vector<std::size_t> slot(n);  // label -> position in nonempty
  std::iota(nonempty.begin(), nonempty.end(), 0);
  std::iota(slot.begin(), slot.end(), 0);
  std::vector<int> free_labels;
  Matrix S = W;  // S(j, c) = sum of W(j, v) over v in community c

  double energy = hamiltonian(model, std::span<const int>(comm));
  double best_energy = energy;
  std::vector<int> best = comm;
  AnnealResult result;

  auto propose = [&](double temperature) {
    if (n < 2) return;
    ++result.proposed;
    const std::size_t i = uniform_index(rng, n);
    const auto a = static_cast<std::size_t>(comm[i]);
    const std::size_t others = nonempty.size() - 1;
    const bool can_split = size[a] > 1;
    const std::size_t options = others + (can_split ? 1 : 0);
    if (options == 0) return;
    const std::size_t pick = uniform_index(rng, options);
    std::size_t b;
    if (pick < others) {
      const std::size_t pos = pick < slot[a] ? pick : pick + 1;
      b = static_cast<std::size_t>(nonempty[pos]);
    } else {
      b = static_cast<std::size_t>(free_labels.back());
    }
    const auto ii = static_cast<Eigen::Index>(i);
    const double delta = -2.0 * (S(ii, static_cast<Eigen::Index>(b)) - (S(ii, static_cast<Eigen::Index>(a)) - W(ii, ii)));
    bool accept = delta <= 0.0;
    if (!accept && temperature > 0.0) accept = uniform_real(rng) < std::exp(-delta / temperature);
    if (!accept) return;
    ++result.accepted;
    if (size[b] == 0) {
      free_labels.pop_back();
      slot[b] = nonempty.size();
      nonempty.push_back(static_cast<int>(b));
    }
    S.col(static_cast<Eigen::Index>(a)) -= W.col(ii);
    S.col(static_cast<Eigen::Index>(b)) += W.col(ii);
    comm[i] = static_cast<int>(b);
    ++size[b];
    if (--size[a] == 0) {
      const std::size_t pos = slot[a];
      nonempty[pos] = nonempty.back();
      slot[static_cast<std::size_t>(nonempty[pos])] = pos;
      nonempty.pop_back();
      free_labels.push_back(static_cast<int>(a));
    }
    energy += delta;
    if (schedule.record_trace) result.trace.push_back(energy);
    if (energy < best_energy - detail::kTieTolerance) {
      best_energy = energy;
      best = comm;
    }
  };

  // Free labels: every label starts occupied, so the pool is empty until a
  // community vacates. A fresh singleton needs one, which always exists when the
  // moving node shares its community (pigeonhole over n labels).
  if (schedule.zero_temperature) {
    for (std::size_t level = 0; level < schedule.zero_temperature_levels; ++level) {
      for (std::size_t k = 0; k < per_level; ++k) propose(0.0);
    }
  } else {
    for (double temperature = t0; temperature >= tmin; temperature *= schedule.cooling) {
      for (std::size_t k = 0; k < per_level; ++k) propose(temperature);
    }
  }

  result.partition = Partition::from_assignment(best, "anneal");
  result.partition.gamma = model.gamma;
  result.partition.energy = hamiltonian(model, result.partition);
  return result;
}

inline Partition anneal_minimize(const EnergyModel& model, const AnnealSchedule& schedule = {},
                                 std::uint64_t seed = 0) {
  return anneal_minimize_traced(model, schedule, seed).partition;
}

namespace detail {

// Splits `group` in two with the leading eigenvector of the restricted coupling
// matrix, then flips single nodes while that lowers H. Empty result = keep whole.
inline std::optional<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> spectral_split(
    const Matrix& W, const std::vector<std::size_t>& group) {
  const auto g = static_cast<Eigen::Index>(group.size());
  if (g < 2) return std::nullopt;
  Matrix B(g, g);
  for (Eigen::Index a = 0; a < g; ++a) {
    for (Eigen::Index b = 0; b < g; ++b) {
      B(a, b) = a == b ? 0.0 : W(static_cast<Eigen::Index>(group[static_cast<std::size_t>(a)]),
                                 static_cast<Eigen::Index>(group[static_cast<std::size_t>(b)]));
    }
  }
  const Vector row_sum = B.rowwise().sum();
  B.diagonal() -= row_sum;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(B);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::Numeric, "spectral split: eigensolver failed");
  const Vector& values = solver.eigenvalues();
  const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
  if (values(g - 1) <= 1e-10 * scale) return std::nullopt;
  const Vector lead = solver.eigenvectors().col(g - 1);
  std::vector<double> s(static_cast<std::size_t>(g));
  for (Eigen::Index a = 0; a < g; ++a) s[static_cast<std::size_t>(a)] = lead(a) >= 0.0 ? 1.0 : -1.0;

  // Energy change of flipping node a: 2 (sum_same - sum_opposite) over off-diagonal couplings.
  for (;;) {
    double best = -kTieTolerance;
    Eigen::Index arg = -1;
    for (Eigen::Index a = 0; a < g; ++a) {
      double same = 0.0, opposite = 0.0;
      for (Eigen::Index b = 0; b < g; ++b) {
        if (a == b) continue;
        const double c = B(a, b);
        (s[static_cast<std::size_t>(a)] == s[static_cast<std::size_t>(b)] ? same : opposite) += c;
      }
      const double delta = 2.0 * (same - opposite);
      if (delta < best) {
        best = delta;
        arg = a;
      }
    }
    if (arg < 0) break;
    s[static_cast<std::size_t>(arg)] = -s[static_cast<std::size_t>(arg)];
  }
  // Energy change of the split relative to the intact group.
  double split_delta = 0.0;
  std::vector<std::size_t> left, right;
  for (Eigen::Index a = 0; a < g; ++a) {
    for (Eigen::Index b = 0; b < g; ++b) {
      if (a != b && s[static_cast<std::size_t>(a)] != s[static_cast<std::size_t>(b)]) split_delta += B(a, b);
    }
    (s[static_cast<std::size_t>(a)] > 0 ? left : right).push_back(group[static_cast<std::size_t>(a)]);
  }
  if (left.empty() || right.empty() || split_delta >= -kTieTolerance) return std::nullopt;
  return std::make_pair(std::move(left), std::move(right));
}

}  // namespace detail

// Recursive bisection; each community is split in two while that lowers H.
inline Partition spectral_minimize(const EnergyModel& model) {
  const std::size_t n = model.n();
  if (n < 1) throw Error(ErrorKind::InvalidInput, "spectral: empty model");
  const Matrix W = model.pair_couplings();
  std::vector<std::vector<std::size_t>> pending{std::vector<std::size_t>(n)};
  std::iota(pending.front().begin(), pending.front().end(), 0);
  std::vector<int> assignment(n, 0);
  int next = 0;
  while (!pending.empty()) {
    auto group = std::move(pending.back());
    pending.pop_back();
    if (auto split = detail::spectral_split(W, group)) {
      pending.push_back(std::move(split->second));
      pending.push_back(std::move(split->first));
    } else {
      for (auto i : group) assignment[i] = next;
      ++next;
    }
  }
  Partition p = Partition::from_assignment(assignment, "spectral");
  p.gamma = model.gamma;
  p.energy = hamiltonian(model, p);
  return p;
}

inline constexpr std::size_t kBruteForceMaxNodes = 12;

// Visits every set partition of n nodes as a restricted-growth string.
inline void enumerate_partitions(std::size_t n, const std::function<void(std::span<const int>)>& visit) {
  if (n == 0) {
    visit({});
    return;
  }
  std::vector<int> a(n, 0);
  std::vector<int> max_prefix(n, 0);  // max label in a[0..i]
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == n) {
      visit(a);
      return;
    }
    const int limit = max_prefix[i - 1] + 1;
    for (int c = 0; c <= limit; ++c) {
      a[i] = c;
      max_prefix[i] = std::max(max_prefix[i - 1], c);
      self(self, i + 1);
    }
  };
  rec(rec, 1);
}

// Exact ground state by enumeration (n <= 12).
inline Partition brute_force(const EnergyModel& model) {
  const std::size_t n = model.n();
  if (n > kBruteForceMaxNodes) throw Error(ErrorKind::TooLarge, "brute force limited to 12 nodes");
  if (n == 0) return Partition{};
  const Matrix W = model.pair_couplings();
  std::vector<int> a(n, 0), best(n, 0);
  double best_energy = std::numeric_limits<double>::infinity();
  auto rec = [&](auto&& self, std::size_t i, int max_label, double energy) -> void {
    if (i == n) {
      if (energy < best_energy - detail::kTieTolerance) {
        best_energy = energy;
        best = a;
      }
      return;
    }
    const auto ii = static_cast<Eigen::Index>(i);
    for (int c = 0; c <= max_label + 1; ++c) {
      double gain = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        if (a[j] == c) gain += W(ii, static_cast<Eigen::Index>(j)) + W(static_cast<Eigen::Index>(j), ii);
      }
      a[i] = c;
      self(self, i + 1, std::max(max_label, c), energy - gain);
    }
  };
  a[0] = 0;
  rec(rec, 1, 0, 0.0);
  Partition p = Partition::from_assignment(best, "brute");
  p.gamma = model.gamma;
  p.energy = hamiltonian(model, p);
  return p;
}

enum class Heuristic { Greedy, Anneal, Spectral, Brute };

inline std::string_view to_string(Heuristic h) {
  switch (h) {
    case Heuristic::Greedy: return "greedy";
    case Heuristic::Anneal: return "anneal";
    case Heuristic::Spectral: return "spectral";
    case Heuristic::Brute: return "brute";
  }
  return "greedy";
}

inline Heuristic parse_heuristic(std::string_view name) {
  if (name == "greedy") return Heuristic::Greedy;
  if (name == "anneal") return Heuristic::Anneal;
  if (name == "spectral") return Heuristic::Spectral;
  if (name == "brute") return Heuristic::Brute;
  throw Error(ErrorKind::Configuration, "unknown heuristic: " + std::string(name));
}

inline Partition minimize(const EnergyModel& model, Heuristic heuristic, std::uint64_t seed = 0,
                          const AnnealSchedule& schedule = {}) {
  switch (heuristic) {
    case Heuristic::Greedy: return greedy_minimize(model, seed);
    case Heuristic::Anneal: return anneal_minimize(model, schedule, seed);
    case Heuristic::Spectral: return spectral_minimize(model);
    case Heuristic::Brute: return brute_force(model);
  }
  return greedy_minimize(model, seed);
}

}  // namespace fxnet
