#include "subkern/isotonic.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "subkern/errors.hpp"
#include "test_support.hpp"

namespace subkern {
namespace {

SetFunction triangle() { return SetFunction::cut(testing::complete_graph(3)); }

SetFunction path3() {
  return SetFunction::cut(testing::graph_from_edges(3, {{0, 1, 1.0}, {1, 2, 1.0}}));
}

SetFunction modular(int n, double c) {
  return SetFunction::custom(n, [c](SubsetMask s) {
    return c * static_cast<double>(std::count(s.begin(), s.end(), 1));
  });
}

BlockTargets random_targets(int l, Rng& rng) {
  BlockTargets t;
  for (int i = 0; i < l; ++i) {
    t.a.push_back(20.0 * rng.uniform() - 10.0);
    t.beta.push_back(1.0 + static_cast<double>(rng.uniform_index(5)));
  }
  return t;
}

double weighted_sq(const std::vector<double>& x, const std::vector<double>& y,
                   const std::vector<double>& beta) {
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += beta[i] * (x[i] - y[i]) * (x[i] - y[i]);
  return s;
}

TEST(BlockTargets, Examples) {
  const auto t = block_targets(triangle(), parse_ranking("0 < 1 < 2", 3));
  EXPECT_EQ(t.a, (std::vector<double>{-2.0, 0.0, 2.0}));
  EXPECT_EQ(t.beta, (std::vector<double>{1.0, 1.0, 1.0}));

  const auto tied = block_targets(triangle(), parse_ranking("0,1 < 2", 3));
  EXPECT_EQ(tied.a, (std::vector<double>{-1.0, 2.0}));
  EXPECT_EQ(tied.beta, (std::vector<double>{2.0, 1.0}));

  const auto mod = block_targets(modular(4, 1.0), parse_ranking("3 < 1 < 0 < 2", 4));
  EXPECT_EQ(mod.a, std::vector<double>(4, -1.0));

  EXPECT_THROW(block_targets(triangle(), parse_ranking("0 < 1", 3)), std::invalid_argument);
}

TEST(BlockTargets, Validate) {
  EXPECT_THROW((BlockTargets{{1.0}, {1.0, 2.0}}).validate(), std::invalid_argument);
  EXPECT_THROW((BlockTargets{{}, {}}).validate(), std::invalid_argument);
  EXPECT_THROW((BlockTargets{{1.0}, {0.0}}).validate(), std::invalid_argument);
}

TEST(Pava, Examples) {
  EXPECT_EQ(pava({{-2.0, 0.0, 2.0}, {1, 1, 1}}), (std::vector<double>{-2.0, 0.0, 2.0}));
  EXPECT_EQ(pava({{2.0, 1.0}, {1, 1}}), (std::vector<double>{1.5, 1.5}));
  EXPECT_EQ(pava({{3.0, 0.0}, {1, 3}}), (std::vector<double>{0.75, 0.75}));
  EXPECT_EQ(pava({{7.0}, {3}}), (std::vector<double>{7.0}));
  const auto fit = pava_fit({{2.0, 1.0, 5.0}, {1, 1, 1}});
  EXPECT_EQ(fit.run_starts, (std::vector<int>{0, 2}));
}

TEST(Pava, BruteForceExamples) {
  EXPECT_EQ(isotonic_bruteforce({{2.0, 1.0}, {1, 1}}), (std::vector<double>{1.5, 1.5}));
  EXPECT_EQ(isotonic_bruteforce({{-1.0, 0.5, 4.0}, {2, 1, 1}}),
            (std::vector<double>{-1.0, 0.5, 4.0}));
  BlockTargets big{std::vector<double>(21, 0.0), std::vector<double>(21, 1.0)};
  EXPECT_THROW(isotonic_bruteforce(big), std::invalid_argument);
}

TEST(Pava, MatchesBruteForce) {
  Rng rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    const int l = 1 + static_cast<int>(rng.uniform_index(10));
    const auto t = random_targets(l, rng);
    const auto fast = pava(t);
    const auto slow = isotonic_bruteforce(t);
    ASSERT_EQ(fast.size(), slow.size());
    for (int i = 0; i < l; ++i) EXPECT_NEAR(fast[i], slow[i], 1e-10) << "trial " << trial;
  }
}

TEST(Pava, ConservesWeightedMass) {
  Rng rng(22);
  for (int trial = 0; trial < 500; ++trial) {
    const auto t = random_targets(1 + static_cast<int>(rng.uniform_index(15)), rng);
    const auto v = pava(t);
    double lhs = 0, rhs = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      lhs += t.beta[i] * v[i];
      rhs += t.beta[i] * t.a[i];
    }
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs)) * 10);
  }
}

TEST(Pava, OutputIsNonDecreasingAndContracts) {
  Rng rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    const int l = 1 + static_cast<int>(rng.uniform_index(12));
    auto t = random_targets(l, rng);
    auto u = t;
    for (double& x : u.a) x = 20.0 * rng.uniform() - 10.0;
    const auto pt = pava(t), pu = pava(u);
    EXPECT_TRUE(std::is_sorted(pt.begin(), pt.end()));
    EXPECT_LE(weighted_sq(pt, pu, t.beta), weighted_sq(t.a, u.a, t.beta) + 1e-9);
  }
}

TEST(FeatureMap, Examples) {
  EXPECT_EQ(feature_map(triangle(), parse_ranking("0 < 1 < 2", 3)).values,
            (std::vector<double>{-2.0, 0.0, 2.0}));
  EXPECT_EQ(feature_map(modular(5, 2.5), parse_ranking("4 < 0,1 < 3 < 2", 5)).values,
            std::vector<double>(5, -2.5));
  EXPECT_THROW(feature_map(triangle(), parse_ranking("0 < 1", 3)), std::invalid_argument);
}

TEST(FeatureMap, CompleteGraphIsAntisymmetric) {
  const auto f = SetFunction::cut(testing::complete_graph(5));
  const auto phi = feature_map(f, parse_ranking("3 < 0 < 4 < 1 < 2", 5));
  // Least preferred first: 3, 0, 4, 1, 2.
  EXPECT_EQ(phi.values, (std::vector<double>{-2.0, 2.0, 4.0, -4.0, 0.0}));
}

TEST(FeatureMap, ClosedFormWhenTargetsMonotone) {
  Rng rng(24);
  int checked = 0;
  for (int trial = 0; trial < 2000 && checked < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_index(6));
    const auto f = SetFunction::cut(testing::random_graph(n, rng));
    const auto a = testing::random_exhaustive(n, rng);
    const auto t = block_targets(f, a);
    if (!std::is_sorted(t.a.begin(), t.a.end())) continue;
    ++checked;
    const auto phi = feature_map(f, a);
    for (int i = 0; i < a.num_blocks(); ++i) {
      for (ObjectId id : a.block(i)) EXPECT_EQ(phi.values[id], t.a[i]);
    }
  }
  EXPECT_GE(checked, 50);
}

TEST(FeatureMap, PrefixSumBound) {
  Rng rng(25);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_index(7));
    const auto f = SetFunction::cut(testing::random_graph(n, rng));
    const auto a = testing::random_exhaustive(n, rng);
    const auto phi = feature_map(f, a);
    const auto basic = basic_partition(f, a);

    std::vector<ObjectId> prefix;
    double sum = 0;
    for (int i = 0; i < a.num_blocks(); ++i) {
      for (ObjectId id : a.block(i)) {
        prefix.push_back(id);
        sum += phi.values[id];
      }
      EXPECT_LE(sum, -f(prefix) + 1e-9);
    }
    EXPECT_NEAR(sum, 0.0, 1e-9);  // cut of V is zero

    prefix.clear();
    sum = 0;
    for (int i = 0; i < basic.num_blocks(); ++i) {
      for (ObjectId id : basic.block(i)) {
        prefix.push_back(id);
        sum += phi.values[id];
      }
      EXPECT_NEAR(sum, -f(prefix), 1e-9);
    }
  }
}

TEST(BasicPartition, Examples) {
  const auto tri = parse_ranking("0 < 1 < 2", 3);
  EXPECT_EQ(basic_partition(triangle(), tri), tri);
  EXPECT_EQ(basic_partition(path3(), parse_ranking("1 < 0 < 2", 3)),
            parse_ranking("1 < 0,2", 3));
  // Targets (2, -2): pooled.
  EXPECT_EQ(basic_partition(triangle(), parse_ranking("0,1 < 2", 3)).num_blocks(), 2);
  const auto f2 = SetFunction::cut(testing::complete_graph(2));
  EXPECT_EQ(basic_partition(f2, parse_ranking("1 < 0", 2)), parse_ranking("1 < 0", 2));
}

TEST(BasicPartition, IdempotentAndStrictlyIncreasing) {
  Rng rng(26);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_index(7));
    const auto f = SetFunction::cut(testing::random_graph(n, rng));
    const auto a = testing::random_exhaustive(n, rng);
    const auto basic = basic_partition(f, a);
    const auto phi = feature_map(f, a);
    EXPECT_EQ(feature_map(f, basic), phi);
    for (int i = 1; i < basic.num_blocks(); ++i) {
      EXPECT_LT(phi.values[basic.block(i - 1)[0]], phi.values[basic.block(i)[0]]);
    }
  }
}

TEST(FeatureMap, RelabelingEquivariance) {
  Rng rng(27);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_index(7));
    const auto g = testing::random_graph(n, rng);
    const auto perm = testing::random_permutation(n, rng);
    std::vector<double> w(static_cast<std::size_t>(n) * n);
    for (int u = 0; u < n; ++u) {
      for (int v = 0; v < n; ++v) w[perm[u] * n + perm[v]] = g.weight(u, v);
    }
    const auto f = SetFunction::cut(g);
    const auto fp = SetFunction::cut(InformationGraph(n, std::move(w), 1.0));
    const auto a = testing::random_exhaustive(n, rng);
    const auto phi = feature_map(f, a);
    const auto phip = feature_map(fp, relabel(a, perm));
    for (int j = 0; j < n; ++j) EXPECT_NEAR(phip.values[perm[j]], phi.values[j], 1e-12);
  }
}

TEST(MeanFeatureMap, ExhaustiveInputIsFeatureMap) {
  const auto a = parse_ranking("0 < 2 < 1", 3);
  const auto phi = feature_map(triangle(), a);
  EXPECT_EQ(mean_feature_map(triangle(), a, ExactMode{}), phi);
  EXPECT_EQ(mean_feature_map(triangle(), a, SampledMode{10, 1}), phi);
}

TEST(MeanFeatureMap, ExactIsAverageOfExtensions) {
  const auto f = path3();
  const auto a = parse_ranking("0 < 1", 3);
  std::vector<double> expect(3, 0.0);
  const auto exts = coherent_extensions(a);
  ASSERT_EQ(exts.size(), 3u);
  for (const auto& e : exts) {
    const auto phi = feature_map(f, e);
    for (int j = 0; j < 3; ++j) expect[j] += phi.values[j] / 3.0;
  }
  const auto mean = mean_feature_map(f, a, ExactMode{});
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(mean.values[j], expect[j], 1e-15);
}

TEST(MeanFeatureMap, SampledWithinThreeStandardErrors) {
  Rng rng(28);
  const int n = 6;
  const auto f = SetFunction::cut(testing::random_graph(n, rng, 0.9));
  const auto a = parse_ranking("4 < 1", n);
  const auto exts = coherent_extensions(a);
  std::vector<double> mean(n, 0.0), sq(n, 0.0);
  for (const auto& e : exts) {
    const auto phi = feature_map(f, e);
    for (int j = 0; j < n; ++j) {
      mean[j] += phi.values[j] / exts.size();
      sq[j] += phi.values[j] * phi.values[j] / exts.size();
    }
  }
  const std::size_t s = 5000;
  const auto sampled = mean_feature_map(f, a, SampledMode{s, 99});
  for (int j = 0; j < n; ++j) {
    const double se = std::sqrt(std::max(sq[j] - mean[j] * mean[j], 0.0) / s);
    EXPECT_LE(std::abs(sampled.values[j] - mean[j]), 3.0 * se + 1e-12) << "object " << j;
  }
  EXPECT_EQ(sampled, mean_feature_map(f, a, SampledMode{s, 99}));
}

TEST(MeanFeatureMap, BudgetExceeded) {
  const auto f = SetFunction::cut(testing::complete_graph(12));
  EXPECT_THROW(mean_feature_map(f, parse_ranking("0", 12), ExactMode{100}), BudgetExceeded);
}

}  // namespace
}  // namespace subkern
