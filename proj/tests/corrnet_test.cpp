#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fxnet/corrnet.hpp"
#include "fxnet/synth.hpp"

using namespace fxnet;

namespace {

ReturnPanel random_panel(std::size_t n, std::size_t T, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  ReturnPanel p;
  for (std::size_t i = 0; i < n; ++i) p.instruments.push_back("S" + std::to_string(i));
  for (std::size_t t = 0; t < T; ++t) p.times.push_back(static_cast<std::int64_t>(t));
  p.returns.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(T));
  for (Eigen::Index i = 0; i < p.returns.rows(); ++i) {
    for (Eigen::Index t = 0; t < p.returns.cols(); ++t) p.returns(i, t) = z(rng);
  }
  return p;
}

CurrencyPanel currencies(std::size_t count, std::size_t T, std::uint64_t seed) {
  const std::vector<std::string> all{"AUD", "CAD", "CHF", "EUR", "GBP", "JPY", "NOK", "NZD", "SEK", "USD", "XAU"};
  CurrencyModelSpec spec;
  spec.currencies.assign(all.end() - static_cast<std::ptrdiff_t>(count), all.end());
  if (std::find(spec.currencies.begin(), spec.currencies.end(), "USD") == spec.currencies.end()) spec.currencies[0] = "USD";
  std::sort(spec.currencies.begin(), spec.currencies.end());
  spec.factors.groups = {{count / 2, 0.6}, {count - count / 2, 0.3}};
  spec.factors.T = T;
  spec.factors.seed = seed;
  return generate_currency_panel(spec);
}

}  // namespace

TEST(Pearson, Examples) {
  const std::vector<double> x{1, 2, 3}, y{1, 2, 4}, neg{-1, -2, -3};
  EXPECT_DOUBLE_EQ(pearson(x, x), 1.0);
  EXPECT_DOUBLE_EQ(pearson(x, neg), -1.0);
  // cov = 1.5, sx = 1, sy = sqrt(7/3) in sample units: 1.5 / sqrt(7/3).
  EXPECT_NEAR(pearson(x, y), 1.5 / std::sqrt(7.0 / 3.0), 1e-15);
  EXPECT_NEAR(pearson(x, y), 0.98198050606, 1e-10);
}

TEST(Pearson, Errors) {
  const std::vector<double> x{1, 2, 3}, c{2, 2, 2}, shortv{1};
  EXPECT_THROW(pearson(x, c), Error);
  EXPECT_THROW(pearson(shortv, shortv), Error);
  EXPECT_THROW(pearson(x, shortv), Error);
}

TEST(CorrelationMatrix, MatchesPairwisePearson) {
  const auto p = random_panel(6, 80, 1);
  const auto rho = correlation_matrix(p, 10, 50);
  for (Eigen::Index i = 0; i < 6; ++i) {
    for (Eigen::Index j = 0; j < 6; ++j) {
      std::vector<double> a(50), b(50);
      for (Eigen::Index t = 0; t < 50; ++t) {
        a[t] = p.returns(i, t + 10);
        b[t] = p.returns(j, t + 10);
      }
      EXPECT_NEAR(rho(i, j), pearson(a, b), 1e-12);
    }
  }
}

TEST(CorrelationMatrix, DegenerateNamesInstrument) {
  auto p = random_panel(3, 20, 2);
  p.returns.row(1).segment(0, 10).setConstant(0.5);
  try {
    build_network(p, 0, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateSeries);
    EXPECT_NE(std::string(e.what()).find("S1"), std::string::npos);
  }
  EXPECT_NO_THROW(build_network(p, 5, 10));
  EXPECT_THROW(build_network(p, 15, 10), Error);
}

TEST(BuildNetwork, WeightsAndDiagonal) {
  auto p = random_panel(3, 30, 3);
  p.returns.row(1) = 2.0 * p.returns.row(0);
  p.returns.row(2) = -p.returns.row(0);
  const auto net = build_network(p, 0, 30);
  EXPECT_NEAR(net.A(0, 1), 1.0, 1e-15);
  EXPECT_NEAR(net.A(0, 2), 0.0, 1e-15);
  EXPECT_EQ(net.A(1, 1), 0.0);
  const auto self = build_network(p, 0, 30, true);
  EXPECT_EQ(self.A(1, 1), 1.0);
  EXPECT_TRUE(net.A.isApprox(net.A.transpose(), 0.0));
}

TEST(BuildNetwork, InversePairedStrengthIdentity) {
  const auto cp = currencies(11, 400, 9);
  ASSERT_EQ(cp.panel.size(), 110u);
  const auto net = build_network(cp.panel, 0, 200);
  for (Eigen::Index i = 0; i < 110; ++i) EXPECT_NEAR(net.strength(i), 54.0, 1e-9);
  const Matrix P = null_expectation(net);
  EXPECT_NEAR(P(3, 17), 108.0 / 220.0, 1e-12);
  const Matrix U = null_expectation(net, NullModel::Uniform);
  EXPECT_NEAR((P - U).cwiseAbs().maxCoeff(), 0.0, 1e-12);
  EXPECT_NEAR(edge_weight_stats(net).mean, 108.0 / (2.0 * 109.0), 1e-12);
}

TEST(BuildNetwork, SelfEdgesShiftStrengthAndNull) {
  const auto cp = currencies(6, 300, 4);
  const auto n = static_cast<double>(cp.panel.size());
  const auto a = build_network(cp.panel, 0, 200);
  const auto b = build_network(cp.panel, 0, 200, true);
  for (Eigen::Index i = 0; i < a.strength.size(); ++i) EXPECT_NEAR(b.strength(i) - a.strength(i), 1.0, 1e-12);
  const Matrix pa = null_expectation(a, NullModel::Uniform), pb = null_expectation(b, NullModel::Uniform);
  EXPECT_NEAR(pb(0, 1) - pa(0, 1), 2.0 / (n * (n + 2.0)), 1e-12);
}

TEST(NullExpectation, NewmanGirvanSums) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u;
  for (int trial = 0; trial < 20; ++trial) {
    Matrix A = Matrix::Zero(7, 7);
    for (int i = 0; i < 7; ++i) {
      for (int j = i + 1; j < 7; ++j) A(i, j) = A(j, i) = u(rng);
    }
    const auto net = network_from_adjacency(A);
    const Matrix P = null_expectation(net);
    EXPECT_NEAR(P.sum(), net.two_m, 1e-9);
    EXPECT_NEAR(P.rowwise().sum().sum(), net.strength.sum(), 1e-9);
    for (int i = 0; i < 7; ++i) EXPECT_NEAR(P.row(i).sum(), net.strength(i), 1e-9);
  }
  Matrix star = Matrix::Zero(3, 3);
  star(0, 2) = star(2, 0) = star(1, 2) = star(2, 1) = 1.0;
  const Matrix P = null_expectation(network_from_adjacency(star));
  EXPECT_DOUBLE_EQ(P(0, 1), 1.0 / 4.0);
  EXPECT_DOUBLE_EQ(P(0, 2), 2.0 / 4.0);
  EXPECT_DOUBLE_EQ(P(2, 2), 4.0 / 4.0);
  EXPECT_THROW(null_expectation(network_from_adjacency(Matrix::Zero(2, 2))), Error);
}

TEST(Sequence, WindowArithmetic) {
  EXPECT_EQ(window_count(100, 20, 10), 9u);
  EXPECT_EQ(window_count(19, 20, 10), 0u);
  EXPECT_EQ(window_count(20, 20, 10), 1u);
  EXPECT_THROW(window_count(20, 20, 0), Error);
  const auto p = random_panel(4, 100, 6);
  const auto one = build_sequence(p, 20, 10, false, 1);
  const auto many = build_sequence(p, 20, 10, false, 4);
  ASSERT_EQ(one.networks.size(), 9u);
  for (std::size_t w = 0; w < 9; ++w) {
    EXPECT_EQ(one.networks[w].window_start, 10 * w);
    EXPECT_EQ(one.networks[w].A, many.networks[w].A);
  }
}

TEST(EdgeWeights, StandardDeviation) {
  EXPECT_EQ(edge_weight_stats(network_from_adjacency(Matrix::Constant(4, 4, 0.3))).stddev, 0.0);
  Matrix A = Matrix::Zero(3, 3);
  A(0, 1) = A(1, 0) = 1.0;
  Matrix B = Matrix::Zero(4, 4);
  B(0, 1) = B(1, 0) = B(0, 2) = B(2, 0) = B(0, 3) = B(3, 0) = 1.0;
  EXPECT_DOUBLE_EQ(edge_weight_stats(network_from_adjacency(B)).stddev, 0.5);

  const auto p = random_panel(8, 60, 11);
  const auto net = build_network(p, 0, 60);
  double s = 0.0, ss = 0.0;
  int c = 0;
  for (int i = 0; i < 8; ++i) {
    for (int j = i + 1; j < 8; ++j) {
      s += net.A(i, j);
      ++c;
    }
  }
  const double mean = s / c;
  for (int i = 0; i < 8; ++i) {
    for (int j = i + 1; j < 8; ++j) ss += (net.A(i, j) - mean) * (net.A(i, j) - mean);
  }
  EXPECT_NEAR(edge_weight_stats(net).stddev, std::sqrt(ss / c), 1e-12);
}

TEST(EdgeWeights, InversePairedMeanConstantAcrossWindows) {
  const auto cp = currencies(6, 600, 8);
  const auto seq = build_sequence(cp.panel, 200, 50);
  const double n = static_cast<double>(cp.panel.size());
  for (const auto& net : seq.networks) EXPECT_NEAR(edge_weight_stats(net).mean, (n - 2) / (2 * (n - 1)), 1e-12);
}
