#include <gtest/gtest.h>

#include <cmath>

#include "fxnet/corrnet.hpp"
#include "fxnet/potts.hpp"
#include "fxnet/synth.hpp"
#include "oracles.hpp"

using namespace fxnet;

namespace {

double rho(const ReturnPanel& p, std::size_t i, std::size_t j) {
  return correlation_matrix(p, 0, p.length())(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

}  // namespace

TEST(FactorModel, FullLoadingIsPerfectlyCorrelated) {
  FactorModelSpec spec;
  spec.groups = {{4, 1.0, {}, {}}};
  spec.T = 10000;
  spec.seed = 1;
  const auto p = generate_panel(spec);
  EXPECT_EQ(p.instruments[3], "g0_3");
  for (std::size_t i = 1; i < 4; ++i) EXPECT_GE(rho(p, 0, i), 0.99);
}

TEST(FactorModel, ZeroLoadingIsUncorrelated) {
  FactorModelSpec spec;
  spec.groups = {{30, 0.0, {}, {}}};
  spec.T = 2500;
  spec.seed = 2;
  const Matrix r = correlation_matrix(generate_panel(spec), 0, 2500);
  int inside = 0, total = 0;
  for (int i = 0; i < 30; ++i) {
    for (int j = i + 1; j < 30; ++j) {
      ++total;
      inside += std::abs(r(i, j)) < 4.0 / std::sqrt(2500.0);
    }
  }
  EXPECT_GE(inside, 0.95 * total);
}

TEST(FactorModel, WithinGroupCorrelationIsLoadingSquared) {
  FactorModelSpec spec;
  spec.groups = {{3, 0.8, {}, {}}, {3, 0.5, {}, {}}};
  spec.T = 20000;
  spec.seed = 3;
  spec.scale = 0.01;
  const auto p = generate_panel(spec);
  EXPECT_NEAR(rho(p, 0, 1), 0.64, 0.03);
  EXPECT_NEAR(rho(p, 3, 4), 0.25, 0.03);
  EXPECT_NEAR(rho(p, 0, 3), 0.0, 0.03);
}

TEST(FactorModel, TwoLevelsSitBetween) {
  FactorModelSpec spec;
  spec.groups = {{4, 0.5, {}, {2, 2}, 0.6}};
  spec.T = 20000;
  spec.seed = 4;
  const auto p = generate_panel(spec);
  const double within = rho(p, 0, 1), between = rho(p, 0, 2);
  EXPECT_NEAR(within, 0.25 + 0.36, 0.03);
  EXPECT_NEAR(between, 0.25, 0.03);
  EXPECT_GT(within, between);
  EXPECT_GT(between, 0.0);
}

TEST(FactorModel, Validation) {
  FactorModelSpec spec;
  EXPECT_THROW(generate_panel(spec), Error);
  spec.groups = {{2, 1.2, {}, {}}};
  EXPECT_THROW(generate_panel(spec), Error);
  spec.groups = {{2, 0.8, {}, {1, 1}, 0.8}};
  EXPECT_THROW(generate_panel(spec), Error);
  spec.groups = {{2, 0.5, {}, {}}};
  spec.T = 1;
  EXPECT_THROW(generate_panel(spec), Error);
  spec.T = 10;
  spec.labels = {"a"};
  EXPECT_THROW(generate_panel(spec), Error);
  spec.labels = {"a", "b"};
  EXPECT_EQ(generate_panel(spec).instruments, (std::vector<std::string>{"a", "b"}));
  spec.seed = 5;
  EXPECT_EQ(generate_panel(spec).returns, generate_panel(spec).returns);
}

TEST(CurrencyPanel, ExpandedAndPaired) {
  CurrencyModelSpec spec;
  spec.currencies = {"AUD", "EUR", "JPY", "USD"};
  spec.factors.groups = {{2, 0.6, {}, {}}, {2, 0.2, {}, {}}};
  spec.factors.T = 50;
  const auto cp = generate_currency_panel(spec);
  EXPECT_EQ(cp.panel.size(), 12u);
  EXPECT_EQ(cp.base, (std::vector<std::string>{"AUD/USD", "EUR/USD", "JPY/USD"}));
  EXPECT_EQ(cp.rules.size(), 3u);
  EXPECT_EQ(cp.group_of, (std::vector<std::size_t>{0, 0, 1, 1}));
  const auto net = build_network(cp.panel, 0, 50);
  for (Eigen::Index i = 0; i < 12; ++i) EXPECT_NEAR(net.strength(i), 5.0, 1e-9);
  spec.numeraire = "GBP";
  EXPECT_THROW(generate_currency_panel(spec), Error);
}

TEST(Planted, DisconnectedBlocksRecovered) {
  const auto net = generate_planted_network({3, 3}, 0.7, 0.0);
  const auto model = EnergyModel::from_network(net, 1.0);
  const auto best = minimize(model, Heuristic::Brute, 0);
  EXPECT_EQ(best.assignment, (std::vector<int>{0, 0, 0, 1, 1, 1}));
  // Hand sum: each block has six ordered pairs of weight 0.7, k = 1.4, 2m = 8.4.
  const double p = 1.4 * 1.4 / 8.4;
  EXPECT_NEAR(hamiltonian(model, best), -2 * 6 * (0.7 - p), 1e-12);
}

TEST(Planted, UniformWeightsHaveNoStructureAtOne) {
  const auto net = generate_planted_network({3, 3}, 0.4, 0.4);
  const auto model = EnergyModel::from_network(net, 1.0);
  const auto best = minimize(model, Heuristic::Brute, 0);
  // k = 2, 2m = 12: J = 0.4 - 1/3 > 0 everywhere, so nothing splits.
  EXPECT_EQ(best.K, 1);
  EXPECT_NEAR(hamiltonian(model, best), -30 * (0.4 - 1.0 / 3.0), 1e-12);
}

TEST(Planted, JitterAndValidation) {
  const auto a = generate_planted_network({4, 4}, 0.8, 0.2, 0.1, 7);
  EXPECT_EQ(a.A, generate_planted_network({4, 4}, 0.8, 0.2, 0.1, 7).A);
  EXPECT_TRUE(a.A.isApprox(a.A.transpose(), 0.0));
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = i + 1; j < 4; ++j) EXPECT_LE(std::abs(a.A(i, j) - 0.8), 0.1);
  }
  EXPECT_THROW(generate_planted_network({2, 2}, 0.2, 0.5), Error);
  EXPECT_THROW(generate_planted_network({1}, 0.5, 0.2), Error);
}

TEST(Hierarchical, Weights) {
  const auto net = generate_hierarchical_network(2, 2, 2, 0.85, 0.55, 0.5125);
  EXPECT_EQ(net.A(0, 1), 0.85);
  EXPECT_EQ(net.A(0, 2), 0.55);
  EXPECT_EQ(net.A(0, 4), 0.5125);
  for (Eigen::Index i = 0; i < 8; ++i) EXPECT_NEAR(net.strength(i), 4.0, 1e-12);
}
