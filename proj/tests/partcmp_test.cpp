#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fxnet/partcmp.hpp"
#include "oracles.hpp"

using namespace fxnet;

namespace {

Partition P(std::vector<int> a) { return Partition::from_assignment(a); }

Partition random_partition(std::size_t n, int k, std::mt19937_64& rng) {
  std::vector<int> a(n);
  for (auto& x : a) x = static_cast<int>(rng() % static_cast<std::uint64_t>(k));
  return P(a);
}

}  // namespace

TEST(Entropy, Examples) {
  EXPECT_EQ(entropy(P({0, 0, 0, 0})), 0.0);
  EXPECT_NEAR(entropy(P({0, 0, 1, 1})), std::log(2.0), 1e-15);
  EXPECT_NEAR(entropy(P({0, 0, 0, 1})), 0.5623351446188083, 1e-15);
}

TEST(MutualInformation, Examples) {
  const auto a = P({0, 0, 1, 1}), b = P({0, 1, 0, 1});
  EXPECT_NEAR(mutual_information(a, a), entropy(a), 1e-15);
  EXPECT_NEAR(mutual_information(a, b), 0.0, 1e-15);
  EXPECT_NEAR(norm_vi(a, b), 1.0, 1e-15);
  EXPECT_THROW(mutual_information(a, P({0, 1, 0})), Error);
}

TEST(ConfusionTable, Margins) {
  const auto t = ConfusionTable::build(P({0, 0, 1, 2, 2, 2}), P({0, 1, 1, 1, 0, 2}));
  std::size_t total = 0;
  for (std::size_t r = 0; r < t.counts.size(); ++r) {
    std::size_t row = 0;
    for (auto c : t.counts[r]) row += c;
    EXPECT_EQ(row, t.row_sizes[r]);
    total += row;
  }
  EXPECT_EQ(total, 6u);
  EXPECT_EQ(t.row_sizes, (std::vector<std::size_t>{2, 1, 3}));
  EXPECT_EQ(t.col_sizes, (std::vector<std::size_t>{2, 3, 1}));
}

TEST(NormVi, Endpoints) {
  for (std::size_t n : {2u, 5u, 50u}) {
    EXPECT_EQ(norm_vi(Partition::singletons(n), Partition::singletons(n)), 0.0);
    EXPECT_NEAR(norm_vi(Partition::singletons(n), Partition::single_block(n)), 1.0, 1e-15);
  }
  EXPECT_THROW(norm_vi(Partition::singletons(1), Partition::singletons(1)), Error);
}

TEST(Vi, MetricProperties) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = random_partition(50, 1 + trial % 7, rng), b = random_partition(50, 1 + trial % 5, rng),
               c = random_partition(50, 2 + trial % 9, rng);
    EXPECT_EQ(variation_of_information(a, b), variation_of_information(b, a));
    EXPECT_EQ(variation_of_information(a, a), 0.0);
    EXPECT_LE(variation_of_information(a, c), variation_of_information(a, b) + variation_of_information(b, c) + 1e-9);
    EXPECT_NEAR(variation_of_information(a, b), oracle::vi(a.assignment, b.assignment), 1e-12);
    const double i = mutual_information(a, b);
    EXPECT_GE(i, -1e-12);
    EXPECT_LE(i, std::min(entropy(a), entropy(b)) + 1e-12);
    const double v = norm_vi(a, b);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Vi, LocalityOfBlocks) {
  // Rearranging nodes 0..3 changes VI by the same amount whatever nodes 4.. do.
  const std::vector<int> left_a{0, 0, 1, 1}, left_b{0, 1, 0, 1};
  std::mt19937_64 rng(2);
  double first = -1.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> rest(10);
    for (auto& x : rest) x = 2 + static_cast<int>(rng() % 4);
    std::vector<int> a(left_a), b(left_b);
    a.insert(a.end(), rest.begin(), rest.end());
    b.insert(b.end(), rest.begin(), rest.end());
    const double d = variation_of_information(P(a), P(b));
    if (first < 0) first = d;
    EXPECT_NEAR(d, first, 1e-12);
  }
  EXPECT_NEAR(first, 4.0 / 14.0 * 2.0 * std::log(2.0), 1e-12);
}

TEST(Autocorrelation, Jaccard) {
  const std::vector<std::size_t> a{0, 1, 2}, b{0, 3, 4}, c{0, 1}, d{0, 1, 2};
  EXPECT_EQ(community_autocorrelation(a, a), 1.0);
  EXPECT_DOUBLE_EQ(community_autocorrelation(a, b), 1.0 / 5.0);
  EXPECT_DOUBLE_EQ(community_autocorrelation(c, d), 2.0 / 3.0);
  const auto p = P({0, 0, 1, 1, 2}), q = P({0, 0, 0, 1, 1});
  EXPECT_EQ(node_autocorrelation(p, p, 3), 1.0);
  EXPECT_DOUBLE_EQ(node_autocorrelation(p, q, 0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(node_autocorrelation(p, q, 4), 1.0 / 2.0);
  EXPECT_EQ(node_autocorrelations(p, q).size(), 5u);
}

TEST(Events, ConstantAndPlanted) {
  std::vector<Partition> same(10, P({0, 0, 1, 1, 2, 2}));
  const auto ev = detect_events(same);
  EXPECT_EQ(ev.vhat.size(), 9u);
  EXPECT_EQ(ev.stddev, 0.0);
  for (const auto& f : ev.flagged) EXPECT_TRUE(f.empty());
  ASSERT_EQ(ev.thresholds.size(), 6u);

  std::vector<Partition> seq;
  for (int w = 0; w < 30; ++w) seq.push_back(w < 17 ? P({0, 0, 0, 1, 1, 1, 2, 2}) : P({0, 1, 2, 0, 1, 2, 0, 1}));
  const auto planted = detect_events(seq);
  for (int j = 0; j < 5; ++j) EXPECT_EQ(planted.flagged[static_cast<std::size_t>(j)], (std::vector<std::size_t>{17}));
  EXPECT_EQ(planted.level(16), 5);
  EXPECT_TRUE(planted.flagged[5].empty());
  for (std::size_t j = 1; j < planted.thresholds.size(); ++j) {
    EXPECT_NEAR(planted.thresholds[j] - planted.thresholds[j - 1], planted.stddev, 1e-12);
  }
  EXPECT_THROW(detect_events({P({0, 1}), P({0, 1})}), Error);
}

TEST(Reassignment, Baseline) {
  std::vector<int> a(110);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = static_cast<int>(i % 20);
  const auto part = P(a);
  EXPECT_EQ(random_reassignment_baseline(part, 0, 20, 1), 0.0);
  double last = 0.0;
  for (std::size_t moved : {1u, 2u, 5u, 10u, 20u, 50u}) {
    const double v = random_reassignment_baseline(part, moved, 100, 3);
    EXPECT_GT(v, last);
    last = v;
  }
  Rng rng(4);
  const auto moved = random_reassignment(part, 1, rng);
  EXPECT_GT(norm_vi(part, moved), 0.0);
  EXPECT_NEAR(norm_vi(part, moved), oracle::vi(part.assignment, moved.assignment) / std::log(110.0), 1e-12);
  Rng rng2(5);
  const auto split = random_reassignment(Partition::single_block(5), 2, rng2);
  EXPECT_EQ(split.K, 2);
  EXPECT_THROW(random_reassignment(part, 110, rng2), Error);
}
