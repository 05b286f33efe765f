#pragma once

// Slow reference computations used to check the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;

// Energy straight from the definition: -sum over ordered pairs in the same community.
inline double energy(const Matrix& A, const Matrix& P, double gamma, const std::vector<int>& c, bool self_edges) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (i == j && !self_edges) continue;
      if (c[static_cast<std::size_t>(i)] == c[static_cast<std::size_t>(j)]) h -= A(i, j) - gamma * P(i, j);
    }
  }
  return h;
}

// Every assignment in {0..n-1}^n, i.e. each partition visited many times over.
inline double minimum_energy_all_labelings(const Matrix& A, const Matrix& P, double gamma, bool self_edges) {
  const auto n = static_cast<std::size_t>(A.rows());
  std::vector<int> c(n, 0);
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    best = std::min(best, energy(A, P, gamma, c, self_edges));
    std::size_t k = 0;
    while (k < n && ++c[k] == static_cast<int>(n)) c[k++] = 0;
    if (k == n) break;
  }
  return best;
}

// Walk every set partition (restricted growth strings) of a coupling matrix J with zero
// diagonal. Returns the minimum of -sum J_ij over same-block pairs, overall and among
// partitions that the involution maps onto themselves.
inline std::pair<double, double> best_and_best_mirror_closed(const Matrix& J, const std::vector<std::size_t>& sigma) {
  const auto n = static_cast<std::size_t>(J.rows());
  std::vector<int> a(n, 0), top(n, 0);
  double best = std::numeric_limits<double>::infinity(), closed = best;
  for (;;) {
    double h = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j && a[i] == a[j]) h -= J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
    bool mirrored = true;
    for (std::size_t i = 0; i < n && mirrored; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if ((a[i] == a[j]) != (a[sigma[i]] == a[sigma[j]])) {
          mirrored = false;
          break;
        }
      }
    }
    best = std::min(best, h);
    if (mirrored) closed = std::min(closed, h);
    std::size_t k = n - 1;
    while (k > 0 && a[k] == top[k - 1] + 1) --k;
    if (k == 0) break;
    ++a[k];
    top[k] = std::max(top[k - 1], a[k]);
    for (std::size_t t = k + 1; t < n; ++t) {
      a[t] = 0;
      top[t] = top[k];
    }
  }
  return {best, closed};
}

inline double bell_number(std::size_t n) {
  std::vector<std::vector<double>> tri{{1.0}};
  for (std::size_t i = 1; i <= n; ++i) {
    std::vector<double> row{tri.back().back()};
    for (double v : tri.back()) row.push_back(row.back() + v);
    tri.push_back(row);
  }
  return tri[n][0];
}

// Entropy and mutual information from probabilities, in nats.
inline double vi(const std::vector<int>& a, const std::vector<int>& b) {
  const double n = static_cast<double>(a.size());
  const int ka = *std::max_element(a.begin(), a.end()) + 1;
  const int kb = *std::max_element(b.begin(), b.end()) + 1;
  std::vector<double> pa(ka, 0.0), pb(kb, 0.0);
  std::vector<std::vector<double>> pab(ka, std::vector<double>(kb, 0.0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    pa[a[i]] += 1.0 / n;
    pb[b[i]] += 1.0 / n;
    pab[a[i]][b[i]] += 1.0 / n;
  }
  double sa = 0.0, sb = 0.0, mi = 0.0;
  for (double p : pa) sa -= p > 0 ? p * std::log(p) : 0.0;
  for (double p : pb) sb -= p > 0 ? p * std::log(p) : 0.0;
  for (int x = 0; x < ka; ++x) {
    for (int y = 0; y < kb; ++y) {
      if (pab[x][y] > 0) mi += pab[x][y] * std::log(pab[x][y] / (pa[x] * pb[y]));
    }
  }
  return sa + sb - 2.0 * mi;
}

// Betweenness by listing every simple path between every ordered pair.
inline std::vector<double> betweenness_by_paths(const Matrix& dist, double rel_tol = 1e-9) {
  const auto n = static_cast<std::size_t>(dist.rows());
  std::vector<double> b(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      if (s == t) continue;
      std::vector<std::pair<double, std::vector<std::size_t>>> paths;
      std::vector<std::size_t> path{s};
      std::vector<char> used(n, 0);
      used[s] = 1;
      std::function<void(std::size_t, double)> walk = [&](std::size_t v, double len) {
        if (v == t) {
          paths.emplace_back(len, path);
          return;
        }
        for (std::size_t w = 0; w < n; ++w) {
          const double d = dist(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(w));
          if (used[w] || !std::isfinite(d)) continue;
          used[w] = 1;
          path.push_back(w);
          walk(w, len + d);
          path.pop_back();
          used[w] = 0;
        }
      };
      walk(s, 0.0);
      if (paths.empty()) continue;
      double shortest = std::numeric_limits<double>::infinity();
      for (const auto& p : paths) shortest = std::min(shortest, p.first);
      std::vector<double> through(n, 0.0);
      double count = 0.0;
      for (const auto& p : paths) {
        if (std::abs(p.first - shortest) > rel_tol * std::max(std::abs(p.first), std::abs(shortest))) continue;
        count += 1.0;
        for (std::size_t k = 1; k + 1 < p.second.size(); ++k) through[p.second[k]] += 1.0;
      }
      for (std::size_t i = 0; i < n; ++i) b[i] += through[i] / count;
    }
  }
  return b;
}

// Tree with n-1 edges from a Pruefer sequence of length n-2.
inline std::vector<std::pair<std::size_t, std::size_t>> pruefer_decode(const std::vector<std::size_t>& seq, std::size_t n) {
  std::vector<std::size_t> degree(n, 1);
  for (auto v : seq) ++degree[v];
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (auto v : seq) {
    for (std::size_t leaf = 0; leaf < n; ++leaf) {
      if (degree[leaf] == 1) {
        edges.emplace_back(leaf, v);
        --degree[leaf];
        --degree[v];
        break;
      }
    }
  }
  std::size_t u = n, w = n;
  for (std::size_t k = 0; k < n; ++k) {
    if (degree[k] == 1) (u == n ? u : w) = k;
  }
  edges.emplace_back(u, w);
  return edges;
}

inline double tree_weight(const Matrix& d, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  double w = 0.0;
  for (auto [i, j] : edges) w += d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return w;
}

// Minimum over all n^(n-2) labelled trees.
inline double minimum_spanning_weight(const Matrix& d) {
  const auto n = static_cast<std::size_t>(d.rows());
  if (n < 2) return 0.0;
  if (n == 2) return d(0, 1);
  std::vector<std::size_t> seq(n - 2, 0);
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    best = std::min(best, tree_weight(d, pruefer_decode(seq, n)));
    std::size_t k = 0;
    while (k < seq.size() && ++seq[k] == n) seq[k++] = 0;
    if (k == seq.size()) break;
  }
  return best;
}

// Average linkage recomputing every cluster distance from raw pairs.
struct DirectMerge {
  std::vector<std::size_t> left, right;
  double distance;
};

inline std::vector<DirectMerge> average_linkage_direct(const Matrix& d) {
  const auto n = static_cast<std::size_t>(d.rows());
  std::vector<std::vector<std::size_t>> clusters(n);
  for (std::size_t i = 0; i < n; ++i) clusters[i] = {i};
  std::vector<DirectMerge> merges;
  while (clusters.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t ba = 0, bb = 1;
    for (std::size_t x = 0; x < clusters.size(); ++x) {
      for (std::size_t y = x + 1; y < clusters.size(); ++y) {
        double s = 0.0;
        for (auto i : clusters[x]) {
          for (auto j : clusters[y]) s += d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
        s /= static_cast<double>(clusters[x].size() * clusters[y].size());
        if (s < best) {
          best = s;
          ba = x;
          bb = y;
        }
      }
    }
    merges.push_back({clusters[ba], clusters[bb], best});
    auto merged = clusters[ba];
    merged.insert(merged.end(), clusters[bb].begin(), clusters[bb].end());
    std::sort(merged.begin(), merged.end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bb));
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(ba));
    clusters.push_back(merged);
  }
  return merges;
}

// Positive part of a symmetric matrix through the Newton iteration for the matrix
// sign function: J_+ = (J + J sign(J)) / 2. Requires J nonsingular.
inline Matrix positive_part_newton(const Matrix& J, int iterations = 100) {
  Matrix X = J;
  for (int k = 0; k < iterations; ++k) {
    const Matrix next = 0.5 * (X + X.inverse());
    if ((next - X).norm() < 1e-15 * X.norm()) {
      X = next;
      break;
    }
    X = next;
  }
  return 0.5 * (J + J * X);
}

inline Matrix random_symmetric(std::size_t n, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix A = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < A.cols(); ++j) A(i, j) = A(j, i) = u(rng);
  }
  return A;
}

}  // namespace oracle
