#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "fxnet/common.hpp"
#include "fxnet/potts.hpp"

namespace fxnet {

// d_ij = sqrt(2 (1 - rho_ij)).
inline Matrix ultrametric_distance(const Matrix& rho) {
  if (rho.rows() != rho.cols()) throw Error(ErrorKind::SizeMismatch, "correlation matrix must be square");
  Matrix d(rho.rows(), rho.cols());
  for (Eigen::Index i = 0; i < rho.rows(); ++i) {
    for (Eigen::Index j = 0; j < rho.cols(); ++j) {
      const double r = rho(i, j);
      if (!(r >= -1.0 - 1e-12 && r <= 1.0 + 1e-12)) throw Error(ErrorKind::InvalidInput, "correlation outside [-1, 1]");
      d(i, j) = i == j ? 0.0 : std::sqrt(2.0 * (1.0 - std::clamp(r, -1.0, 1.0)));
    }
  }
  return d;
}

namespace detail {
inline void check_distances(const Matrix& d) {
  if (d.rows() != d.cols()) throw Error(ErrorKind::SizeMismatch, "distance matrix must be square");
  if (d.rows() == 0) throw Error(ErrorKind::InvalidInput, "distance matrix is empty");
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      if (!std::isfinite(d(i, j)) || d(i, j) < 0.0) throw Error(ErrorKind::InvalidInput, "distances must be finite and >= 0");
      if (d(i, j) != d(j, i)) throw Error(ErrorKind::InvalidInput, "distance matrix must be symmetric");
    }
  }
}

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};
}  // namespace detail

struct TreeEdge {
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
};

struct SpanningTree {
  std::vector<TreeEdge> edges;
  double total_weight = 0.0;
};

// Kruskal over (d, i, j) in lexicographic order.
inline SpanningTree mst(const Matrix& d) {
  detail::check_distances(d);
  const auto n = static_cast<std::size_t>(d.rows());
  std::vector<std::tuple<double, std::size_t, std::size_t>> candidates;
  candidates.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      candidates.emplace_back(d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), i, j);
    }
  }
  std::sort(candidates.begin(), candidates.end());
  detail::DisjointSets sets(n);
  SpanningTree tree;
  for (const auto& [w, i, j] : candidates) {
    if (!sets.unite(i, j)) continue;
    tree.edges.push_back({i, j, w});
    tree.total_weight += w;
    if (tree.edges.size() + 1 == n) break;
  }
  return tree;
}

enum class LinkageMode { Single, Average };

// Cluster ids: leaves are 0..n-1, merge k creates cluster n+k.
struct Merge {
  std::size_t a = 0;
  std::size_t b = 0;
  double distance = 0.0;
  std::size_t size = 0;
};

struct Dendrogram {
  std::vector<Merge> merges;
  std::vector<std::string> leaves;

  std::size_t n() const { return leaves.size(); }
};

// Agglomerative clustering. Average linkage uses the Lance-Williams update for
// the mean of raw pairwise distances. Ties go to the lexicographically first
// (a, b) pair of cluster ids.
inline Dendrogram linkage(const Matrix& d, LinkageMode mode, std::vector<std::string> labels = {}) {
  detail::check_distances(d);
  const auto n = static_cast<std::size_t>(d.rows());
  if (labels.empty()) {
    for (std::size_t i = 0; i < n; ++i) labels.push_back("n" + std::to_string(i));
  }
  if (labels.size() != n) throw Error(ErrorKind::SizeMismatch, "label count differs from distance matrix");
  Dendrogram out;
  out.leaves = std::move(labels);
  const std::size_t total = 2 * n - 1;
  Matrix D = Matrix::Zero(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(total));
  D.topLeftCorner(d.rows(), d.cols()) = d;
  std::vector<std::size_t> active(n), size(total, 1);
  std::iota(active.begin(), active.end(), 0);
  double floor = 0.0;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t ba = 0, bb = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < active.size(); ++x) {
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        const double v = D(static_cast<Eigen::Index>(active[x]), static_cast<Eigen::Index>(active[y]));
        if (v < best) {
          best = v;
          ba = x;
          bb = y;
        }
      }
    }
    const std::size_t a = active[ba], b = active[bb], c = n + step;
    size[c] = size[a] + size[b];
    // Rounding in the update can dip an ulp below the previous merge.
    floor = std::max(floor, best);
    out.merges.push_back({a, b, floor, size[c]});
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bb));
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(ba));
    for (auto o : active) {
      const auto ea = static_cast<Eigen::Index>(a), eb = static_cast<Eigen::Index>(b), eo = static_cast<Eigen::Index>(o);
      double v;
      if (mode == LinkageMode::Single) {
        v = std::min(D(ea, eo), D(eb, eo));
      } else {
        v = (static_cast<double>(size[a]) * D(ea, eo) + static_cast<double>(size[b]) * D(eb, eo)) /
            static_cast<double>(size[c]);
      }
      D(static_cast<Eigen::Index>(c), eo) = v;
      D(eo, static_cast<Eigen::Index>(c)) = v;
    }
    active.push_back(c);
  }
  return out;
}

// Clusters joined by merges with distance strictly below `height`.
inline Partition cut(const Dendrogram& dendrogram, double height) {
  if (height < 0.0) throw Error(ErrorKind::InvalidInput, "cut height must be non-negative");
  const std::size_t n = dendrogram.n();
  detail::DisjointSets sets(2 * n);
  std::vector<std::size_t> rep(2 * n);
  std::iota(rep.begin(), rep.end(), 0);
  for (std::size_t k = 0; k < dendrogram.merges.size(); ++k) {
    const auto& m = dendrogram.merges[k];
    rep[n + k] = rep[m.a];
    if (m.distance < height) sets.unite(rep[m.a], rep[m.b]);
  }
  std::vector<int> assignment(n);
  for (std::size_t i = 0; i < n; ++i) assignment[i] = static_cast<int>(sets.find(i));
  return Partition::from_assignment(assignment, "cut");
}

// Height interval (lo, hi) over which cut() reproduces `reference`: cuts are
// constant on (u_j, u_{j+1}] between consecutive distinct merge distances.
inline std::optional<std::pair<double, double>> robust_interval(const Dendrogram& dendrogram,
                                                                const Partition& reference) {
  if (reference.n() != dendrogram.n()) throw Error(ErrorKind::SizeMismatch, "reference covers a different node set");
  std::vector<double> levels{0.0};
  for (const auto& m : dendrogram.merges) {
    if (m.distance > levels.back()) levels.push_back(m.distance);
  }
  for (std::size_t j = 0; j < levels.size(); ++j) {
    const double lo = levels[j];
    const double hi = j + 1 < levels.size() ? levels[j + 1] : std::numeric_limits<double>::infinity();
    const double probe = std::isfinite(hi) ? hi : lo + 1.0;
    if (cut(dendrogram, probe).assignment == reference.assignment) return std::make_pair(lo, hi);
  }
  return std::nullopt;
}

inline SpanningTree mst_of_correlations(const Matrix& rho) { return mst(ultrametric_distance(rho)); }

}  // namespace fxnet
