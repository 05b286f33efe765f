#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "fxnet/corrnet.hpp"
#include "fxnet/sigtest.hpp"
#include "fxnet/synth.hpp"

using namespace fxnet;

namespace {

CurrencyPanel sample(std::size_t T, std::uint64_t seed, double loading = 0.7) {
  CurrencyModelSpec spec;
  spec.currencies = {"AUD", "CHF", "EUR", "GBP", "JPY", "NZD", "USD"};
  spec.factors.groups = {{3, loading, {}, {}}, {2, loading, {}, {}}, {2, 0.0, {}, {}}};
  spec.factors.T = T;
  spec.factors.seed = seed;
  return generate_currency_panel(spec);
}

ShuffleSpec shuffle_spec(const CurrencyPanel& cp, std::size_t realizations = 10, std::uint64_t seed = 1) {
  return {cp.base, cp.rules, realizations, seed};
}

Vector row(const ReturnPanel& p, const std::string& name) {
  return p.returns.row(static_cast<Eigen::Index>(*p.find(name))).transpose();
}

}  // namespace

TEST(Shuffle, IdentityPermutationIsNoOp) {
  const auto cp = sample(120, 1);
  const auto spec = shuffle_spec(cp);
  Permutations perms;
  for (const auto& b : spec.base_instruments) {
    perms[b].resize(cp.panel.length());
    std::iota(perms[b].begin(), perms[b].end(), 0);
  }
  const auto out = shuffle_panel(cp.panel, spec, perms);
  EXPECT_LT((out.returns - cp.panel.returns).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(out.instruments, cp.panel.instruments);
  EXPECT_EQ(out.times, cp.panel.times);
}

TEST(Shuffle, PreservesBaseMultisetsAndTriangles) {
  const auto cp = sample(150, 2);
  const auto spec = shuffle_spec(cp, 10, 3);
  const auto out = shuffle_panel(cp.panel, spec);
  for (const auto& b : spec.base_instruments) {
    Vector a = row(cp.panel, b), s = row(out, b);
    EXPECT_NE(a, s);
    EXPECT_NEAR(a.mean(), s.mean(), 1e-15);
    std::sort(a.begin(), a.end());
    std::sort(s.begin(), s.end());
    EXPECT_EQ(a, s);
  }
  for (const auto& r : spec.rules) {
    const Vector lhs = row(out, r.target), rhs = row(out, r.numerator) - row(out, r.denominator);
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-10);
  }
  for (const auto& name : out.instruments) {
    EXPECT_LT((row(out, name) + row(out, inverse_label(name))).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Shuffle, SeedsAreReproducibleAndIndependent) {
  const auto cp = sample(100, 4);
  const auto spec = shuffle_spec(cp, 10, 9);
  EXPECT_EQ(shuffle_panel(cp.panel, spec).returns, shuffle_panel(cp.panel, spec).returns);
  const auto perms = draw_permutations(spec, 100, 9);
  EXPECT_NE(perms.at(spec.base_instruments[0]), perms.at(spec.base_instruments[1]));
  auto other = spec;
  other.seed = 10;
  EXPECT_NE(shuffle_panel(cp.panel, spec).returns, shuffle_panel(cp.panel, other).returns);
}

TEST(Shuffle, UncoveredInstrumentIsSpecError) {
  const auto cp = sample(60, 5);
  auto spec = shuffle_spec(cp);
  spec.rules.pop_back();
  try {
    shuffle_panel(cp.panel, spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Spec);
  }
  auto missing = shuffle_spec(cp);
  missing.base_instruments.push_back("XAU/USD");
  EXPECT_THROW(shuffle_panel(cp.panel, missing), Error);
}

TEST(Shuffle, StrengthIdentitySurvives) {
  const auto cp = sample(300, 6);
  const auto out = shuffle_panel(cp.panel, shuffle_spec(cp, 10, 7));
  const auto net = build_network(out, 0, 200);
  const double n = static_cast<double>(out.size());
  for (Eigen::Index i = 0; i < net.strength.size(); ++i) EXPECT_NEAR(net.strength(i), (n - 2) / 2, 1e-9);
}

TEST(PermutationTest, StructuredPanelBeatsEveryShuffle) {
  const auto cp = sample(400, 8);
  PermutationOptions opt;
  opt.T = 200;
  opt.step = 100;
  const auto rep = permutation_test(cp.panel, shuffle_spec(cp, 10, 11), 1.2, opt);
  EXPECT_EQ(rep.windows, 3u);
  EXPECT_EQ(rep.observed.size(), 3u);
  EXPECT_EQ(rep.realization_means.size(), 10u);
  EXPECT_EQ(rep.largest_shuffled_community.size(), 30u);
  EXPECT_GT(rep.observed_mean, rep.shuffled_mean);
  EXPECT_DOUBLE_EQ(rep.p_value, 1.0 / 11.0);
  EXPECT_GT(rep.shuffled_stddev, 0.0);

  const auto again = permutation_test(cp.panel, shuffle_spec(cp, 10, 11), 1.2, opt);
  EXPECT_EQ(again.realization_means, rep.realization_means);
  opt.threads = 3;
  EXPECT_EQ(permutation_test(cp.panel, shuffle_spec(cp, 10, 11), 1.2, opt).realization_means, rep.realization_means);
}

TEST(PermutationTest, NeedsTenRealizations) {
  const auto cp = sample(250, 9);
  EXPECT_THROW(permutation_test(cp.panel, shuffle_spec(cp, 9), 1.0), Error);
}
