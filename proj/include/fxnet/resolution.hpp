#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fxnet/common.hpp"
#include "fxnet/corrnet.hpp"
#include "fxnet/parallel.hpp"
#include "fxnet/partcmp.hpp"
#include "fxnet/potts.hpp"

namespace fxnet {

// lo, lo+step, ... for `count` points.
inline std::vector<double> make_grid(double lo, double step, std::size_t count) {
  if (!(step > 0.0) || count == 0) throw Error(ErrorKind::Configuration, "grid needs positive step and points");
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k) grid[k] = lo + step * static_cast<double>(k);
  return grid;
}

// All points lo + k*step not exceeding hi (within rounding).
inline std::vector<double> make_grid_range(double lo, double step, double hi) {
  if (!(step > 0.0) || hi < lo) throw Error(ErrorKind::Configuration, "grid range must satisfy lo <= hi, step > 0");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  return make_grid(lo, step, count);
}

// 100 resolutions from 0.6 in steps of 0.015.
inline std::vector<double> default_grid() { return make_grid(0.6, 0.015, 100); }

struct SweepPoint {
  double gamma = 0.0;
  std::size_t n_communities = 0;
  double entropy = 0.0;
  double modularity = 0.0;
  double energy = 0.0;
  double dH_dgamma = 0.0;
  double vhat_prev = 0.0;  // V-hat to the previous grid point (0 at the first)
};

struct ResolutionSweep {
  std::vector<double> gammas;
  std::vector<Partition> partitions;
  std::vector<SweepPoint> stats;
};

struct SweepOptions {
  Heuristic heuristic = Heuristic::Greedy;
  std::uint64_t seed = 0;
  NullModel null = NullModel::NewmanGirvan;
  AnnealSchedule schedule{};
  unsigned threads = 1;
};

inline ResolutionSweep sweep(const CorrNetwork& net, const std::vector<double>& grid, const SweepOptions& opt = {}) {
  if (grid.empty()) throw Error(ErrorKind::Configuration, "empty resolution grid");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) throw Error(ErrorKind::Configuration, "resolution grid must be strictly increasing");
  }
  const Matrix P = null_expectation(net, opt.null);
  ResolutionSweep out;
  out.gammas = grid;
  out.partitions.resize(grid.size());
  parallel_for(grid.size(), opt.threads, [&](std::size_t k) {
    const auto model = EnergyModel::from_matrices(net.A, P, grid[k], net.two_m, net.include_self_edges);
    out.partitions[k] = minimize(model, opt.heuristic, opt.seed, opt.schedule);
  });
  out.stats.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    auto& s = out.stats[k];
    const auto& p = out.partitions[k];
    s.gamma = grid[k];
    s.n_communities = static_cast<std::size_t>(p.K);
    s.entropy = entropy(p);
    s.modularity = modularity(net, p, opt.null);
    s.energy = p.energy;
    s.vhat_prev = k == 0 ? 0.0 : norm_vi(out.partitions[k - 1], p);
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid.size() == 1) break;
    const std::size_t a = k + 1 < grid.size() ? k : k - 1;
    out.stats[k].dH_dgamma = (out.stats[a + 1].energy - out.stats[a].energy) / (grid[a + 1] - grid[a]);
  }
  return out;
}

struct Plateau {
  double gamma_lo = 0.0;
  double gamma_hi = 0.0;
  std::size_t first = 0;  // grid indices, inclusive
  std::size_t last = 0;
  std::size_t n_communities = 0;
  Partition representative;

  double width() const { return gamma_hi - gamma_lo; }
  bool contains(double gamma) const { return gamma >= gamma_lo - 1e-12 && gamma <= gamma_hi + 1e-12; }
};

// Maximal runs of grid points with identical partitions (V-hat exactly 0 between
// neighbours) spanning at least min_width. Default width is three grid steps.
inline std::vector<Plateau> find_plateaus(const ResolutionSweep& sw, std::optional<double> min_width = std::nullopt) {
  if (sw.partitions.empty()) throw Error(ErrorKind::InvalidInput, "empty sweep");
  const double step = sw.gammas.size() > 1 ? sw.gammas[1] - sw.gammas[0] : 0.0;
  const double width = min_width.value_or(3.0 * step);
  std::vector<Plateau> out;
  std::size_t start = 0;
  for (std::size_t k = 1; k <= sw.partitions.size(); ++k) {
    if (k < sw.partitions.size() && sw.partitions[k].assignment == sw.partitions[start].assignment) continue;
    const double lo = sw.gammas[start];
    const double hi = sw.gammas[k - 1];
    if (hi - lo >= width - 1e-9) {
      out.push_back({lo, hi, start, k - 1, static_cast<std::size_t>(sw.partitions[start].K), sw.partitions[start]});
    }
    start = k;
  }
  return out;
}

// Widest plateau with a non-trivial community count; ties go to the lower gamma.
// N_c = 2 (the two mirror halves of an inverse-paired network) is excluded by default.
inline std::optional<Plateau> main_plateau(const std::vector<Plateau>& plateaus, std::size_t n,
                                           bool exclude_two = true) {
  std::optional<Plateau> best;
  for (const auto& p : plateaus) {
    if (p.n_communities <= 1 || p.n_communities >= n) continue;
    if (exclude_two && p.n_communities == 2) continue;
    if (!best || p.width() > best->width() + 1e-12 ||
        (std::abs(p.width() - best->width()) <= 1e-12 && p.gamma_lo < best->gamma_lo)) {
      best = p;
    }
  }
  return best;
}

// Grid value contained in the most main plateaus; ties resolved to the median of
// the tied grid points.
inline double fixed_resolution(const std::vector<std::optional<Plateau>>& mains, const std::vector<double>& grid) {
  std::vector<std::size_t> hits(grid.size(), 0);
  bool any = false;
  for (const auto& p : mains) {
    if (!p) continue;
    any = true;
    for (std::size_t k = 0; k < grid.size(); ++k) hits[k] += p->contains(grid[k]) ? 1 : 0;
  }
  if (!any) throw Error(ErrorKind::InvalidInput, "no main plateau in any sweep");
  const std::size_t top = *std::max_element(hits.begin(), hits.end());
  std::vector<std::size_t> tied;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (hits[k] == top) tied.push_back(k);
  }
  return grid[tied[(tied.size() - 1) / 2]];
}

inline double plateau_distance(const Plateau& p, double gamma) {
  if (p.contains(gamma)) return 0.0;
  return std::min(std::abs(gamma - p.gamma_lo), std::abs(gamma - p.gamma_hi));
}

}  // namespace fxnet
