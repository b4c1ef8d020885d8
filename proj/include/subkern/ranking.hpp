#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "subkern/random.hpp"

namespace subkern {

using ObjectId = int;

/// Dense row-major real matrix, rows = objects.
struct FeatureMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
  std::span<const double> row(int r) const {
    return {values.data() + static_cast<std::size_t>(r) * cols,
            static_cast<std::size_t>(cols)};
  }
};

/// The set of objects being ranked.
struct Universe {
  int n = 0;
  std::vector<std::string> labels;       // empty or exactly n entries
  std::optional<FeatureMatrix> features;  // n rows when present

  /// Throws InputError when the invariants do not hold.
  void validate() const;
};

/// A ranking as ordered, disjoint, non-empty blocks of object ids.
///
/// Block 0 is the least preferred, the last block the most preferred. Ids
/// inside a block are stored ascending so equal partitions compare equal.
/// Objects absent from every block are "unranked" (non-exhaustive case).
class OrderedPartition {
 public:
  /// Validates: n >= 1, at least one block, no empty block, ids in [0, n),
  /// no id repeated. Throws InputError otherwise.
  OrderedPartition(int n, std::vector<std::vector<ObjectId>> blocks);

  int universe_size() const { return n_; }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  const std::vector<std::vector<ObjectId>>& blocks() const { return blocks_; }
  std::span<const ObjectId> block(int i) const { return blocks_[i]; }

  /// Number of objects appearing in some block.
  int num_ranked() const { return num_ranked_; }
  bool is_exhaustive() const { return num_ranked_ == n_; }

  /// Index of the block holding `id`, or -1 when unranked.
  int block_of(ObjectId id) const { return block_of_[id]; }

  /// Unranked objects, ascending.
  std::vector<ObjectId> unranked() const;

  friend bool operator==(const OrderedPartition&, const OrderedPartition&) = default;

 private:
  int n_;
  std::vector<std::vector<ObjectId>> blocks_;
  std::vector<int> block_of_;
  int num_ranked_ = 0;
};

/// Parses "a,b < c < d" (least preferred first). Whitespace around the
/// separators is optional. Throws ParseError carrying the byte offset.
OrderedPartition parse_ranking(std::string_view text, int n);

/// Inverse of parse_ranking: blocks joined by " < ", ids by ",".
std::string format_ranking(const OrderedPartition& a);

/// Full ranking from a permutation listed least to most preferred.
OrderedPartition from_permutation(std::span<const ObjectId> perm);

/// Top-k ranking: unranked objects pooled into one least-preferred block,
/// followed by the k ranked objects as singletons (least to most preferred).
OrderedPartition from_topk(std::span<const ObjectId> ranked, int n);

inline bool is_exhaustive(const OrderedPartition& a) { return a.is_exhaustive(); }

/// (l+1)^u for l blocks and u unranked objects; nullopt on 64-bit overflow.
std::optional<std::uint64_t> extension_count(const OrderedPartition& a);

inline constexpr std::uint64_t kDefaultEnumerationBudget = std::uint64_t{1} << 20;

/// All exhaustive partitions coherent with `a`.
///
/// Each unranked object goes to one of the l+1 gaps around the blocks;
/// objects sharing a gap form one tied block placed in that gap. The order
/// is lexicographic in the gap vector of the ascending unranked objects,
/// first object most significant. An exhaustive `a` yields {a}. Throws
/// BudgetExceeded when the count is above `budget`.
std::vector<OrderedPartition> coherent_extensions(
    const OrderedPartition& a,
    std::uint64_t budget = kDefaultEnumerationBudget);

/// Streams the same sequence as coherent_extensions without storing it.
void for_each_coherent_extension(
    const OrderedPartition& a, std::uint64_t budget,
    const std::function<void(const OrderedPartition&)>& visit);

/// Builds the extension for one gap vector (entries in [0, l]).
OrderedPartition extension_from_gaps(const OrderedPartition& a,
                                     std::span<const int> gaps);

/// Uniform draw from coherent_extensions(a); exhaustive input returns a.
OrderedPartition sample_extension(const OrderedPartition& a, Rng& rng);

/// Relabels objects: object `id` becomes `perm[id]`.
OrderedPartition relabel(const OrderedPartition& a, std::span<const ObjectId> perm);

}  // namespace subkern
