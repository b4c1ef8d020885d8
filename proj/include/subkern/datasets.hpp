#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "subkern/classify.hpp"
#include "subkern/random.hpp"
#include "subkern/ranking.hpp"

namespace subkern {

/// Synthetic food-preference model: eight dishes described by sweetness,
/// savouriness and juiciness, ranked by two opposite user types.
namespace food {

inline constexpr int kNumDishes = 8;
inline constexpr int kNumFeatures = 3;

inline constexpr std::array<const char*, kNumDishes> kDishNames = {
    "cake", "biscuit", "gelato", "steak", "burger", "sausage", "pasta", "pizza"};
inline constexpr std::array<const char*, kNumFeatures> kFeatureNames = {
    "sweet", "savouriness", "juicy"};

// clang-format off
inline constexpr std::array<std::array<double, kNumFeatures>, kNumDishes> kFeatures = {{
    {0.9, 0.0, 0.3},  // cake
    {0.7, 0.1, 0.0},  // biscuit
    {1.0, 0.0, 0.7},  // gelato
    {0.0, 0.8, 0.8},  // steak
    {0.2, 0.8, 0.9},  // burger
    {0.1, 1.0, 1.0},  // sausage
    {0.4, 0.7, 0.7},  // pasta
    {0.4, 0.9, 0.6},  // pizza
}};
// clang-format on

/// Importance of the most, second and least valued feature.
inline constexpr std::array<double, 3> kImportance = {1.0, 0.17, 0.09};

enum class UserType { kOne, kTwo };

/// Type one values sweet > savouriness > juicy; type two the reverse.
std::array<double, kNumFeatures> feature_weights(UserType type);

/// Importance-weighted feature sums, unrounded.
std::array<double, kNumDishes> scores(UserType type);

/// scores() rounded to two decimals. Rankings are drawn from these, so
/// dishes with equal rounded score tie and fall back to dish order.
std::array<double, kNumDishes> table_scores(UserType type);

/// Rank of each dish (0 = least preferred) under noise-free table scores.
std::array<int, kNumDishes> noise_free_preferences(UserType type);

/// Dish features as an 8 x 3 matrix.
FeatureMatrix feature_matrix();

/// ArgSort(table_scores + N(0, sigma^2 I)), least preferred first, as a
/// full ranking. A stable sort resolves exact ties by dish order.
OrderedPartition sample_ranking(UserType type, double sigma, Rng& rng);

}  // namespace food

struct FullKind {};
struct TopKKind {
  int k = 0;
};
struct ExhaustiveInterleaveKind {
  int l = 0;
};
struct InterleaveKind {
  int l = 0;
};

using CensorKind =
    std::variant<FullKind, TopKKind, ExhaustiveInterleaveKind, InterleaveKind>;

std::string to_string(const CensorKind& kind);

/// Parses "full", "topk:K", "exh-interleave:L" or "interleave:L".
CensorKind censor_kind_from_string(const std::string& text);

/// Turns a full ranking into a partial one.
///   top-k: the k most preferred objects stay singletons, the rest pool
///     into one least-preferred block.
///   exhaustive interleave: the ranking is cut into l contiguous blocks,
///     cut points drawn uniformly among the C(n-1, l-1) compositions.
///   interleave: a uniform size-l subset stays, as singletons in the
///     original order; the result is non-exhaustive when l < n.
OrderedPartition censor(const OrderedPartition& full, const CensorKind& kind, Rng& rng);

/// m/2 users of each type (labels +1 for type one, -1 for type two),
/// alternating rows. Odd m drops the last row.
LabeledRankingDataset generate_dataset(std::size_t m, double sigma,
                                       const CensorKind& kind, std::uint64_t seed);

}  // namespace subkern
