#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fxnet/common.hpp"
#include "fxnet/panel.hpp"
#include "fxnet/parallel.hpp"

namespace fxnet {

// Two-pass Pearson coefficient, clamped to [-1, 1].
inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::SizeMismatch, "pearson: series lengths differ");
  if (x.size() < 2) throw Error(ErrorKind::InvalidInput, "pearson: need at least two observations");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    mx += x[t];
    my += y[t];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    const double dx = x[t] - mx;
    const double dy = y[t] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorKind::DegenerateSeries, "pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// Correlation of every instrument pair over returns [start, start+T).
inline Matrix correlation_matrix(const ReturnPanel& panel, std::size_t start, std::size_t T) {
  if (T < 2) throw Error(ErrorKind::Configuration, "window length must be at least 2");
  if (start + T > panel.length()) throw Error(ErrorKind::Configuration, "window exceeds panel length");
  const auto n = static_cast<Eigen::Index>(panel.size());
  Matrix centered = panel.returns.middleCols(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(T));
  Vector scale(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto row = centered.row(i);
    row.array() -= row.sum() / static_cast<double>(T);
    const double ss = row.squaredNorm();
    if (ss == 0.0) {
      throw Error(ErrorKind::DegenerateSeries,
                  panel.instruments[static_cast<std::size_t>(i)] + " has zero variance in window starting at " +
                      std::to_string(start));
    }
    scale(i) = 1.0 / std::sqrt(ss);
  }
  Matrix rho(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    rho(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double r = std::clamp(centered.row(i).dot(centered.row(j)) * scale(i) * scale(j), -1.0, 1.0);
      rho(i, j) = r;
      rho(j, i) = r;
    }
  }
  return rho;
}

enum class NullModel { NewmanGirvan, Uniform };

struct CorrNetwork {
  std::vector<std::string> labels;
  Matrix A;    // weights in [0,1]
  Matrix rho;  // correlations (identity diagonal); empty for networks not built from returns
  Vector strength;
  double two_m = 0.0;
  std::size_t window_start = 0;
  std::int64_t start_time = 0;
  std::size_t T = 0;
  bool include_self_edges = false;

  std::size_t n() const { return labels.size(); }
};

// Fills strengths and total weight. With self-edges k_i includes A_ii once and the
// total weight counts each self-loop twice.
inline void finalize_network(CorrNetwork& net) {
  net.strength = net.A.rowwise().sum();
  net.two_m = net.strength.sum();
  if (net.include_self_edges) net.two_m += net.A.diagonal().sum();
}

inline CorrNetwork network_from_adjacency(Matrix A, std::vector<std::string> labels = {},
                                          bool include_self_edges = false) {
  if (A.rows() != A.cols()) throw Error(ErrorKind::SizeMismatch, "adjacency must be square");
  if (labels.empty()) {
    for (Eigen::Index i = 0; i < A.rows(); ++i) labels.push_back("n" + std::to_string(i));
  }
  if (static_cast<Eigen::Index>(labels.size()) != A.rows()) {
    throw Error(ErrorKind::SizeMismatch, "label count differs from adjacency size");
  }
  CorrNetwork net;
  net.labels = std::move(labels);
  net.A = std::move(A);
  net.include_self_edges = include_self_edges;
  finalize_network(net);
  return net;
}

inline CorrNetwork build_network(const ReturnPanel& panel, std::size_t start, std::size_t T,
                                 bool include_self_edges = false) {
  CorrNetwork net;
  net.labels = panel.instruments;
  net.rho = correlation_matrix(panel, start, T);
  net.A = 0.5 * (net.rho.array() + 1.0);
  net.A.diagonal().setConstant(include_self_edges ? 1.0 : 0.0);
  net.window_start = start;
  net.start_time = panel.times[start];
  net.T = T;
  net.include_self_edges = include_self_edges;
  finalize_network(net);
  return net;
}

// NG: k_i k_j / 2m.  Uniform: kbar^2 / 2m everywhere (kbar = mean strength), which
// coincides with NG whenever all strengths are equal.
inline Matrix null_expectation(const CorrNetwork& net, NullModel model = NullModel::NewmanGirvan) {
  if (!(net.two_m > 0.0)) throw Error(ErrorKind::InvalidInput, "null model needs positive total weight");
  const auto n = static_cast<Eigen::Index>(net.n());
  if (model == NullModel::NewmanGirvan) return net.strength * net.strength.transpose() / net.two_m;
  const double kbar = net.strength.sum() / static_cast<double>(n);
  return Matrix::Constant(n, n, kbar * kbar / net.two_m);
}

struct NetworkSequence {
  std::vector<CorrNetwork> networks;
  std::size_t step = 0;
  std::size_t T = 0;
};

inline std::size_t window_count(std::size_t length, std::size_t T, std::size_t step) {
  if (step == 0) throw Error(ErrorKind::Configuration, "window step must be positive");
  return length < T ? 0 : (length - T) / step + 1;
}

inline NetworkSequence build_sequence(const ReturnPanel& panel, std::size_t T, std::size_t step,
                                      bool include_self_edges = false, unsigned threads = 1) {
  const std::size_t count = window_count(panel.length(), T, step);
  if (count == 0) throw Error(ErrorKind::Configuration, "panel shorter than one window");
  NetworkSequence seq;
  seq.step = step;
  seq.T = T;
  seq.networks.resize(count);
  parallel_for(count, threads, [&](std::size_t w) {
    seq.networks[w] = build_network(panel, w * step, T, include_self_edges);
  });
  return seq;
}

struct EdgeWeightStats {
  double mean = 0.0;
  double stddev = 0.0;
};

// Population statistics over the off-diagonal upper triangle.
inline EdgeWeightStats edge_weight_stats(const CorrNetwork& net) {
  const auto n = static_cast<Eigen::Index>(net.n());
  double sum = 0.0;
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      sum += net.A(i, j);
      ++count;
    }
  }
  if (count == 0) return {};
  const double mean = sum / static_cast<double>(count);
  double ss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) ss += (net.A(i, j) - mean) * (net.A(i, j) - mean);
  }
  return {mean, std::sqrt(ss / static_cast<double>(count))};
}

inline std::vector<double> edge_weight_std(const NetworkSequence& seq) {
  std::vector<double> out;
  out.reserve(seq.networks.size());
  for (const auto& net : seq.networks) out.push_back(edge_weight_stats(net).stddev);
  return out;
}

}  // namespace fxnet
