#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "subkern/ranking.hpp"
#include "subkern/submodular.hpp"

namespace subkern {

/// Per-block unconstrained optima `a` and block weights `beta` (block sizes)
/// of the weighted isotonic problem min sum beta_i (v_i - a_i)^2.
struct BlockTargets {
  std::vector<double> a;
  std::vector<double> beta;

  /// Throws std::invalid_argument unless sizes match, l >= 1, beta > 0.
  void validate() const;
};

/// Isotonic fit together with the pooled runs that produced it.
struct IsotonicFit {
  std::vector<double> values;   // one per block, non-decreasing
  std::vector<int> run_starts;  // first block index of each pooled run
};

/// One value per object; constant on blocks, non-decreasing with
/// preference, summing to -F(V).
struct FeatureMap {
  std::vector<double> values;

  int size() const { return static_cast<int>(values.size()); }
  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;
};

/// a_i = -(F(B_i) - F(B_{i-1})) / |A_i|, beta_i = |A_i|, where B_i is the
/// union of the i least-preferred blocks.
BlockTargets block_targets(const SetFunction& f, const OrderedPartition& a);

/// Weighted pool-adjacent-violators onto non-decreasing sequences.
///
/// Runs are pooled only on a strict violation, so a block that is never
/// pooled keeps its target bit for bit.
IsotonicFit pava_fit(const BlockTargets& t);
std::vector<double> pava(const BlockTargets& t);

/// Exhaustive search over the 2^(l-1) ways of cutting the blocks into
/// contiguous runs. Reference solver for tests; l <= 20.
std::vector<double> isotonic_bruteforce(const BlockTargets& t);

/// Block values of pava(block_targets(f, a)) spread over the objects.
FeatureMap feature_map(const SetFunction& f, const OrderedPartition& a);

/// Coarsening of `a` whose block values are strictly increasing: pooled
/// runs merged, and neighbouring runs with identical values merged too.
OrderedPartition basic_partition(const SetFunction& f, const OrderedPartition& a);

struct ExactMode {
  std::uint64_t budget = kDefaultEnumerationBudget;
};

struct SampledMode {
  std::size_t count = 0;
  std::uint64_t seed = 0;
};

/// How a non-exhaustive ranking is averaged over its coherent extensions.
using ExtensionMode = std::variant<ExactMode, SampledMode>;

/// Mean of feature_map over the coherent extensions of `a` (all of them, or
/// `count` uniform draws from Rng(seed)). Exhaustive input reduces to
/// feature_map in both modes.
FeatureMap mean_feature_map(const SetFunction& f, const OrderedPartition& a,
                            const ExtensionMode& mode);

}  // namespace subkern
