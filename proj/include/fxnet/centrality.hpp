#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "fxnet/calendar.hpp"
#include "fxnet/common.hpp"
#include "fxnet/corrnet.hpp"
#include "fxnet/potts.hpp"

namespace fxnet {

inline constexpr double kPathTieTolerance = 1e-9;

// d_ij = 0 if i == j or A_ij = 1, 1/A_ij otherwise; A_ij = 0 means no edge.
inline Matrix betweenness_distances(const Matrix& A) {
  const auto n = A.rows();
  Matrix d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j || A(i, j) >= 1.0) {
        d(i, j) = 0.0;
      } else if (A(i, j) <= 0.0) {
        d(i, j) = std::numeric_limits<double>::infinity();
      } else {
        d(i, j) = 1.0 / A(i, j);
      }
    }
  }
  return d;
}

namespace detail {
inline bool same_length(double a, double b) {
  return std::abs(a - b) <= kPathTieTolerance * std::max(std::abs(a), std::abs(b));
}
}  // namespace detail

// Shortest-path betweenness over ordered pairs (s, t), s != t, both != i, by
// Dijkstra with path counting. Path lengths within a relative 1e-9 count as equal.
// Infinite entries mark absent edges. Zero-length edges are only relaxed towards
// unsettled nodes, so zero-length cycles do not create extra paths.
inline std::vector<double> betweenness(const Matrix& dist) {
  const auto n = static_cast<std::size_t>(dist.rows());
  std::vector<double> b(n, 0.0);
  std::vector<double> d(n), sigma(n), delta(n);
  std::vector<char> settled(n);
  std::vector<std::vector<std::size_t>> preds(n);
  std::vector<std::size_t> order;
  order.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(d.begin(), d.end(), std::numeric_limits<double>::infinity());
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(settled.begin(), settled.end(), 0);
    for (auto& p : preds) p.clear();
    order.clear();
    d[s] = 0.0;
    sigma[s] = 1.0;
    for (;;) {
      std::size_t v = n;
      for (std::size_t u = 0; u < n; ++u) {
        if (!settled[u] && std::isfinite(d[u]) && (v == n || d[u] < d[v])) v = u;
      }
      if (v == n) break;
      settled[v] = 1;
      order.push_back(v);
      for (std::size_t w = 0; w < n; ++w) {
        if (settled[w] || w == v) continue;
        const double edge = dist(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(w));
        if (!std::isfinite(edge)) continue;
        const double candidate = d[v] + edge;
        if (std::isfinite(d[w]) && detail::same_length(candidate, d[w])) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        } else if (candidate < d[w]) {
          d[w] = candidate;
          sigma[w] = sigma[v];
          preds[w].assign(1, v);
        }
      }
    }
    std::fill(delta.begin(), delta.end(), 0.0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const std::size_t w = *it;
      for (std::size_t v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) b[w] += delta[w];
    }
  }
  return b;
}

inline std::vector<double> betweenness(const CorrNetwork& net) { return betweenness(betweenness_distances(net.A)); }

// Node vectors from the positive part of the spectrum of J,
// [x_i]_j = sqrt(beta_j) U_ij, eigenvalues in decreasing order.
struct NodeVectors {
  Matrix vectors;  // n x q
  Vector eigenvalues;

  std::size_t q() const { return static_cast<std::size_t>(eigenvalues.size()); }
  std::size_t n() const { return static_cast<std::size_t>(vectors.rows()); }
  std::vector<double> norms() const {
    std::vector<double> out(n());
    for (std::size_t i = 0; i < n(); ++i) out[i] = vectors.row(static_cast<Eigen::Index>(i)).norm();
    return out;
  }
};

inline NodeVectors node_vectors(const Matrix& J) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(J);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::Numeric, "node vectors: eigensolver failed");
  const Vector& beta = solver.eigenvalues();
  const double cutoff = 1e-10 * (beta.size() ? beta.cwiseAbs().maxCoeff() : 0.0);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = beta.size() - 1; j >= 0; --j) {
    if (beta(j) > cutoff) keep.push_back(j);
  }
  NodeVectors out;
  out.vectors.resize(J.rows(), static_cast<Eigen::Index>(keep.size()));
  out.eigenvalues.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    const auto col = static_cast<Eigen::Index>(c);
    out.eigenvalues(col) = beta(keep[c]);
    out.vectors.col(col) = std::sqrt(beta(keep[c])) * solver.eigenvectors().col(keep[c]);
  }
  return out;
}

inline NodeVectors node_vectors(const EnergyModel& model) { return node_vectors(model.J); }

struct Projection {
  double y = 0.0;
  double cos_theta = 0.0;
  bool undefined = false;  // community vector vanishes relative to its members
};

// y_i = x_i . w_k / |w_k| with w_k the sum of member vectors; cos theta = y_i / |x_i|.
inline std::vector<Projection> projected_centrality(const NodeVectors& nv, const Partition& part) {
  if (part.n() != nv.n()) throw Error(ErrorKind::SizeMismatch, "partition size differs from node vectors");
  const auto q = static_cast<Eigen::Index>(nv.q());
  Matrix w = Matrix::Zero(part.K, q);
  std::vector<double> scale(static_cast<std::size_t>(part.K), 0.0);
  for (std::size_t i = 0; i < part.n(); ++i) {
    w.row(part.assignment[i]) += nv.vectors.row(static_cast<Eigen::Index>(i));
    scale[static_cast<std::size_t>(part.assignment[i])] += nv.vectors.row(static_cast<Eigen::Index>(i)).norm();
  }
  std::vector<Projection> out(part.n());
  for (std::size_t i = 0; i < part.n(); ++i) {
    const auto row = nv.vectors.row(static_cast<Eigen::Index>(i));
    const auto wk = w.row(part.assignment[i]);
    const double wn = wk.norm();
    // Members that cancel (a rate with its inverse) leave only rounding noise in w.
    if (wn <= 1e-9 * scale[static_cast<std::size_t>(part.assignment[i])]) {
      out[i].undefined = true;
      continue;
    }
    out[i].y = row.dot(wk) / wn;
    const double xn = row.norm();
    out[i].cos_theta = xn > 0.0 ? std::clamp(out[i].y / xn, -1.0, 1.0) : 0.0;
  }
  return out;
}

inline std::vector<double> normalize_per_window(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::InvalidInput, "normalize: empty input");
  const double top = *std::max_element(values.begin(), values.end());
  std::vector<double> out(values.begin(), values.end());
  if (top > 0.0) {
    for (double& v : out) v /= top;
  }
  return out;
}

struct ZScore {
  std::optional<double> value;  // empty for singleton communities
  bool degenerate = false;      // community sigma was zero
};

// Within-community standardization with the population sigma.
inline std::vector<ZScore> zscores(std::span<const double> values, const Partition& part) {
  if (values.size() != part.n()) throw Error(ErrorKind::SizeMismatch, "zscores: value count differs from partition");
  const auto members = part.communities();
  std::vector<ZScore> out(part.n());
  for (const auto& c : members) {
    if (c.size() < 2) continue;
    double mean = 0.0;
    for (auto i : c) mean += values[i];
    mean /= static_cast<double>(c.size());
    double ss = 0.0;
    for (auto i : c) ss += (values[i] - mean) * (values[i] - mean);
    const double sd = std::sqrt(ss / static_cast<double>(c.size()));
    for (auto i : c) {
      if (sd == 0.0) {
        out[i] = {0.0, true};
      } else {
        out[i] = {(values[i] - mean) / sd, false};
      }
    }
  }
  return out;
}

struct RoleRecord {
  std::size_t node = 0;
  std::size_t window = 0;
  std::int64_t time = 0;  // epoch hours at the window start
  double b = 0.0;
  double x_norm = 0.0;
  double y = 0.0;
  double cos_theta = 0.0;
  std::optional<double> zb;
  std::optional<double> zy;
  int community = 0;
  std::size_t community_size = 0;
};

// b from the network, |x| and y from J at the model's resolution; |x| and y are
// normalized by their per-window maxima, z-scores use the raw values.
inline std::vector<RoleRecord> compute_roles(const CorrNetwork& net, const EnergyModel& model, const Partition& part,
                                             std::size_t window) {
  const auto b = betweenness(net);
  const auto nv = node_vectors(model);
  const auto proj = projected_centrality(nv, part);
  std::vector<double> y(part.n());
  for (std::size_t i = 0; i < part.n(); ++i) y[i] = proj[i].y;
  const auto x_norm = normalize_per_window(nv.norms());
  const auto y_norm = normalize_per_window(y);
  const auto zb = zscores(b, part);
  const auto zy = zscores(y, part);
  const auto sizes = part.sizes();
  std::vector<RoleRecord> out(part.n());
  for (std::size_t i = 0; i < part.n(); ++i) {
    auto& r = out[i];
    r.node = i;
    r.window = window;
    r.time = net.start_time;
    r.b = b[i];
    r.x_norm = x_norm[i];
    r.y = y_norm[i];
    r.cos_theta = proj[i].cos_theta;
    r.zb = zb[i].value;
    r.zy = zy[i].value;
    r.community = part.assignment[i];
    r.community_size = sizes[static_cast<std::size_t>(part.assignment[i])];
  }
  return out;
}

enum class BucketKind { Year, Quarter, WindowBins };

struct Bucketing {
  BucketKind kind = BucketKind::Year;
  std::size_t windows_per_bin = 1;  // WindowBins only

  std::string key(const RoleRecord& r) const {
    const auto date = calendar::date_of_hour(r.time);
    switch (kind) {
      case BucketKind::Year: return std::to_string(date.year);
      case BucketKind::Quarter: return std::to_string(date.year) + "Q" + std::to_string(calendar::quarter_of(date.month));
      case BucketKind::WindowBins: return "bin" + std::to_string(r.window / std::max<std::size_t>(1, windows_per_bin));
    }
    return {};
  }
};

struct MomentSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population
};

struct RoleAggregate {
  std::size_t node = 0;
  std::string bucket;
  MomentSummary zb;
  MomentSummary zy;
};

namespace detail {
inline MomentSummary summarize(const std::vector<double>& v) {
  MomentSummary s;
  s.count = v.size();
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(ss / static_cast<double>(v.size()));
  return s;
}
}  // namespace detail

// Mean and spread of (z^b, z^y) per node per bucket; undefined z's are skipped.
inline std::vector<RoleAggregate> aggregate_roles(const std::vector<RoleRecord>& records, const Bucketing& bucketing) {
  std::map<std::pair<std::size_t, std::string>, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& r : records) {
    auto& g = groups[{r.node, bucketing.key(r)}];
    if (r.zb) g.first.push_back(*r.zb);
    if (r.zy) g.second.push_back(*r.zy);
  }
  std::vector<RoleAggregate> out;
  for (const auto& [key, values] : groups) {
    out.push_back({key.first, key.second, detail::summarize(values.first), detail::summarize(values.second)});
  }
  return out;
}

struct RelationBin {
  std::size_t count = 0;
  double mean_x = 0.0;
  double mean_y = 0.0;
  double stderr_y = 0.0;
};

// Equal-count bins over x: bin b holds sorted ranks [b N / bins, (b+1) N / bins).
inline std::vector<RelationBin> binned_relation(std::span<const double> x, std::span<const double> y, std::size_t bins) {
  if (x.size() != y.size()) throw Error(ErrorKind::SizeMismatch, "binned relation: lengths differ");
  if (bins == 0) throw Error(ErrorKind::Configuration, "binned relation: need at least one bin");
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<RelationBin> out;
  const std::size_t n = x.size();
  for (std::size_t b = 0; b < bins; ++b) {
    const std::size_t lo = b * n / bins, hi = (b + 1) * n / bins;
    RelationBin bin;
    bin.count = hi - lo;
    if (bin.count == 0) {
      out.push_back(bin);
      continue;
    }
    for (std::size_t k = lo; k < hi; ++k) {
      bin.mean_x += x[order[k]];
      bin.mean_y += y[order[k]];
    }
    bin.mean_x /= static_cast<double>(bin.count);
    bin.mean_y /= static_cast<double>(bin.count);
    if (bin.count > 1) {
      double ss = 0.0;
      for (std::size_t k = lo; k < hi; ++k) ss += (y[order[k]] - bin.mean_y) * (y[order[k]] - bin.mean_y);
      bin.stderr_y = std::sqrt(ss / static_cast<double>(bin.count - 1)) / std::sqrt(static_cast<double>(bin.count));
    }
    out.push_back(bin);
  }
  return out;
}

}  // namespace fxnet
