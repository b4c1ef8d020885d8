#include "subkern/datasets.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "subkern/kernels.hpp"

namespace subkern {
namespace {

using food::UserType;

TEST(Food, FeatureValues) {
  EXPECT_EQ(food::kFeatures[0], (std::array<double, 3>{0.9, 0.0, 0.3}));
  EXPECT_EQ(food::kImportance, (std::array<double, 3>{1.0, 0.17, 0.09}));
  const auto m = food::feature_matrix();
  EXPECT_EQ(m.rows, 8u);
  EXPECT_EQ(m.cols, 3u);
  EXPECT_EQ(m.at(5, 1), 1.0);
}

TEST(Food, ScoresMatchRoundedValues) {
  const std::array<double, 8> one = {0.93, 0.72, 1.06, 0.21, 0.42, 0.36, 0.58, 0.61};
  const std::array<double, 8> two = {0.38, 0.08, 0.79, 0.94, 1.05, 1.18, 0.86, 0.79};
  const auto s1 = food::scores(UserType::kOne), s2 = food::scores(UserType::kTwo);
  // Pasta for type two is 0.855, a half-way case; allow for its binary form.
  for (int d = 0; d < 8; ++d) {
    EXPECT_NEAR(s1[d], one[d], 0.005 + 1e-12) << food::kDishNames[d];
    EXPECT_NEAR(s2[d], two[d], 0.005 + 1e-12) << food::kDishNames[d];
  }
  EXPECT_EQ(food::table_scores(UserType::kOne), one);
  EXPECT_EQ(food::table_scores(UserType::kTwo), two);
  EXPECT_NEAR(s1[0], 0.927, 1e-12);
  EXPECT_NEAR(s2[5], 1.179, 1e-12);
  EXPECT_NEAR(s1[3], 0.208, 1e-12);
}

TEST(Food, NoiseFreePreferences) {
  EXPECT_EQ(food::noise_free_preferences(UserType::kOne),
            (std::array<int, 8>{6, 5, 7, 0, 2, 1, 3, 4}));
  EXPECT_EQ(food::noise_free_preferences(UserType::kTwo),
            (std::array<int, 8>{1, 0, 2, 5, 6, 7, 4, 3}));
}

std::array<int, 8> ranks_of(const OrderedPartition& a) {
  std::array<int, 8> r{};
  for (int i = 0; i < a.num_blocks(); ++i) r[a.block(i)[0]] = i;
  return r;
}

OrderedPartition noise_free_ranking(UserType type) {
  const auto r = food::noise_free_preferences(type);
  std::vector<ObjectId> perm(8);
  for (int d = 0; d < 8; ++d) perm[r[d]] = d;
  return from_permutation(perm);
}

TEST(Food, ZeroNoiseReproducesPreferences) {
  Rng rng(1);
  for (auto type : {UserType::kOne, UserType::kTwo}) {
    for (int i = 0; i < 5; ++i) {
      EXPECT_EQ(ranks_of(food::sample_ranking(type, 0.0, rng)),
                food::noise_free_preferences(type));
    }
  }
  EXPECT_THROW(food::sample_ranking(UserType::kOne, -1.0, rng), std::invalid_argument);
}

TEST(Food, LowNoiseKeepsStructure) {
  Rng rng(2024);
  const auto ref = noise_free_ranking(UserType::kOne);
  int close = 0;
  double mean = 0;
  for (int i = 0; i < 10000; ++i) {
    if (kendall_tau(food::sample_ranking(UserType::kOne, 0.1, rng), ref) >= 0.5) ++close;
    mean += kendall_tau(food::sample_ranking(UserType::kOne, 0.5, rng), ref) / 10000;
  }
  EXPECT_GE(close, 9000);
  // Independent simulation of the same model puts this near 0.36.
  EXPECT_GT(mean, 0.3);

  // Sweet dishes stay on top for type one at sigma = 0.5.
  int sweet_top = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto r = ranks_of(food::sample_ranking(UserType::kOne, 0.5, rng));
    const double sweet = (r[0] + r[1] + r[2]) / 3.0;
    const double savoury = (r[3] + r[4] + r[5]) / 3.0;
    if (sweet > savoury) ++sweet_top;
  }
  EXPECT_GE(sweet_top, 9000);
}

TEST(Food, HighNoiseIsNearUniform) {
  Rng rng(2025);
  const auto ref = noise_free_ranking(UserType::kTwo);
  double sum = 0;
  for (int i = 0; i < 10000; ++i) {
    sum += std::abs(kendall_tau(food::sample_ranking(UserType::kTwo, 3.0, rng), ref));
  }
  EXPECT_LE(sum / 10000, 0.25);
}

TEST(CensorKind, Parse) {
  for (const std::string s : {"full", "topk:6", "exh-interleave:3", "interleave:4"}) {
    EXPECT_EQ(to_string(censor_kind_from_string(s)), s);
  }
  EXPECT_THROW(censor_kind_from_string("topk"), std::invalid_argument);
  EXPECT_THROW(censor_kind_from_string("topk:x"), std::invalid_argument);
  EXPECT_THROW(censor_kind_from_string("sample:3"), std::invalid_argument);
}

TEST(Censor, Examples) {
  Rng rng(3);
  const auto full = parse_ranking("1 < 0 < 2 < 3 < 4", 5);
  EXPECT_EQ(censor(full, TopKKind{5}, rng), full);
  EXPECT_EQ(censor(full, InterleaveKind{5}, rng), full);
  EXPECT_EQ(censor(full, ExhaustiveInterleaveKind{5}, rng), full);
  EXPECT_EQ(censor(full, FullKind{}, rng), full);
  EXPECT_EQ(censor(full, TopKKind{2}, rng), parse_ranking("0,1,2 < 3 < 4", 5));
  EXPECT_EQ(censor(full, ExhaustiveInterleaveKind{1}, rng), parse_ranking("0,1,2,3,4", 5));
  // The two-object top-k ranking 1 < 2, padded with the rest.
  const std::vector<ObjectId> top{1, 2};
  EXPECT_EQ(from_topk(top, 5), parse_ranking("3,4,0 < 1 < 2", 5));
  EXPECT_THROW(censor(full, TopKKind{0}, rng), std::invalid_argument);
  EXPECT_THROW(censor(full, InterleaveKind{6}, rng), std::invalid_argument);
  EXPECT_THROW(censor(parse_ranking("0,1 < 2", 3), TopKKind{1}, rng), std::invalid_argument);
}

TEST(Censor, ConsistentWithFullRanking) {
  Rng rng(4);
  const std::vector<CensorKind> kinds = {TopKKind{3}, TopKKind{6}, ExhaustiveInterleaveKind{2},
                                         ExhaustiveInterleaveKind{4}, InterleaveKind{3},
                                         InterleaveKind{5}};
  for (int trial = 0; trial < 300; ++trial) {
    const auto full = food::sample_ranking(UserType::kOne, 1.0, rng);
    const auto rank = ranks_of(full);
    for (const auto& kind : kinds) {
      const auto c = censor(full, kind, rng);
      for (int u = 0; u < 8; ++u) {
        for (int v = 0; v < 8; ++v) {
          const int bu = c.block_of(u), bv = c.block_of(v);
          if (bu >= 0 && bv >= 0 && bu < bv) EXPECT_LT(rank[u], rank[v]);
        }
      }
      if (const auto* e = std::get_if<ExhaustiveInterleaveKind>(&kind)) {
        EXPECT_EQ(c.num_blocks(), e->l);
        EXPECT_TRUE(c.is_exhaustive());
      }
      if (const auto* i = std::get_if<InterleaveKind>(&kind)) {
        EXPECT_EQ(c.num_ranked(), i->l);
        EXPECT_FALSE(c.is_exhaustive());
      }
    }
  }
}

TEST(Censor, ExhaustiveInterleaveCompositionsAreUniform) {
  // n = 4, l = 2: three compositions, each drawn about a third of the time.
  Rng rng(5);
  const auto full = parse_ranking("0 < 1 < 2 < 3", 4);
  std::array<int, 4> first_size{};
  const int draws = 30000;
  for (int i = 0; i < draws; ++i) {
    ++first_size[censor(full, ExhaustiveInterleaveKind{2}, rng).block(0).size()];
  }
  for (int s = 1; s <= 3; ++s) EXPECT_NEAR(first_size[s] / double(draws), 1.0 / 3.0, 0.015);
}

TEST(GenerateDataset, Examples) {
  const auto d = generate_dataset(2, 0.0, FullKind{}, 7);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.labels, (std::vector<int>{1, -1}));
  EXPECT_EQ(d.rankings[0], noise_free_ranking(UserType::kOne));
  EXPECT_EQ(d.rankings[1], noise_free_ranking(UserType::kTwo));

  const auto big = generate_dataset(250, 0.5, FullKind{}, 8);
  EXPECT_EQ(big.size(), 250u);
  EXPECT_EQ(std::count(big.labels.begin(), big.labels.end(), 1), 125);
  EXPECT_NO_THROW(big.validate());

  EXPECT_EQ(generate_dataset(11, 1.0, InterleaveKind{4}, 9).size(), 10u);
  EXPECT_THROW(generate_dataset(1, 1.0, FullKind{}, 9), std::invalid_argument);
}

TEST(GenerateDataset, Deterministic) {
  const auto a = generate_dataset(40, 1.0, TopKKind{6}, 10);
  const auto b = generate_dataset(40, 1.0, TopKKind{6}, 10);
  EXPECT_EQ(a.rankings, b.rankings);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_NE(generate_dataset(40, 1.0, TopKKind{6}, 11).rankings, a.rankings);
}

}  // namespace
}  // namespace subkern
