#include "subkern/ranking.hpp"

#include <algorithm>
#include <charconv>
#include <limits>

#include "subkern/errors.hpp"

namespace subkern {

void Universe::validate() const {
  if (n < 1) throw InputError("universe must contain at least one object");
  if (!labels.empty() && static_cast<int>(labels.size()) != n) {
    throw InputError("universe has " + std::to_string(n) + " objects but " +
                     std::to_string(labels.size()) + " labels");
  }
  if (features && features->rows != n) {
    throw InputError("universe has " + std::to_string(n) +
                     " objects but the feature matrix has " +
                     std::to_string(features->rows) + " rows");
  }
}

OrderedPartition::OrderedPartition(int n,
                                   std::vector<std::vector<ObjectId>> blocks)
    : n_(n), blocks_(std::move(blocks)) {
  if (n_ < 1) throw InputError("ordered partition over an empty universe");
  if (blocks_.empty()) throw InputError("ordered partition has no blocks");
  block_of_.assign(static_cast<std::size_t>(n_), -1);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    auto& blk = blocks_[i];
    if (blk.empty()) {
      throw InputError("block " + std::to_string(i) + " is empty");
    }
    for (ObjectId id : blk) {
      if (id < 0 || id >= n_) {
        throw InputError("object id " + std::to_string(id) +
                         " outside [0, " + std::to_string(n_) + ")");
      }
      if (block_of_[id] != -1) {
        throw InputError("object id " + std::to_string(id) + " repeated");
      }
      block_of_[id] = static_cast<int>(i);
      ++num_ranked_;
    }
    std::sort(blk.begin(), blk.end());
  }
}

std::vector<ObjectId> OrderedPartition::unranked() const {
  std::vector<ObjectId> out;
  out.reserve(static_cast<std::size_t>(n_ - num_ranked_));
  for (ObjectId id = 0; id < n_; ++id) {
    if (block_of_[id] == -1) out.push_back(id);
  }
  return out;
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

}  // namespace

OrderedPartition parse_ranking(std::string_view text, int n) {
  if (n < 1) throw InputError("universe size must be positive");
  std::vector<std::vector<ObjectId>> blocks(1);
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::size_t pos = 0;
  std::size_t block_start = 0;
  auto skip_space = [&] {
    while (pos < text.size() && is_space(text[pos])) ++pos;
  };

  for (;;) {
    skip_space();
    if (pos >= text.size() || text[pos] == '<' || text[pos] == ',') {
      if (blocks.back().empty()) throw ParseError("empty block", block_start);
      throw ParseError("expected an object id", pos);
    }
    const std::size_t token_start = pos;
    if (text[pos] < '0' || text[pos] > '9') {
      throw ParseError("malformed token", token_start);
    }
    long long value = 0;
    auto [end, ec] =
        std::from_chars(text.data() + pos, text.data() + text.size(), value);
    if (ec != std::errc()) throw ParseError("malformed token", token_start);
    pos = static_cast<std::size_t>(end - text.data());
    if (pos < text.size() && !is_space(text[pos]) && text[pos] != '<' &&
        text[pos] != ',') {
      throw ParseError("malformed token", token_start);
    }
    if (value >= n) {
      throw ParseError("object id " + std::to_string(value) + " >= n=" +
                           std::to_string(n),
                       token_start);
    }
    if (seen[value]) {
      throw ParseError("duplicate object id " + std::to_string(value),
                       token_start);
    }
    seen[value] = 1;
    blocks.back().push_back(static_cast<ObjectId>(value));

    skip_space();
    if (pos >= text.size()) break;
    if (text[pos] == ',') {
      ++pos;
    } else if (text[pos] == '<') {
      ++pos;
      block_start = pos;
      blocks.emplace_back();
    } else {
      throw ParseError("unexpected character", pos);
    }
  }
  return OrderedPartition(n, std::move(blocks));
}

std::string format_ranking(const OrderedPartition& a) {
  std::string out;
  for (int i = 0; i < a.num_blocks(); ++i) {
    if (i > 0) out += " < ";
    bool first = true;
    for (ObjectId id : a.block(i)) {
      if (!first) out += ',';
      out += std::to_string(id);
      first = false;
    }
  }
  return out;
}

OrderedPartition from_permutation(std::span<const ObjectId> perm) {
  const int n = static_cast<int>(perm.size());
  std::vector<std::vector<ObjectId>> blocks;
  blocks.reserve(perm.size());
  for (ObjectId id : perm) blocks.push_back({id});
  return OrderedPartition(n, std::move(blocks));
}

OrderedPartition from_topk(std::span<const ObjectId> ranked, int n) {
  const int k = static_cast<int>(ranked.size());
  if (k < 1 || k > n) {
    throw InputError("top-k requires 1 <= k <= n, got k=" + std::to_string(k));
  }
  std::vector<char> in_top(static_cast<std::size_t>(n), 0);
  for (ObjectId id : ranked) {
    if (id >= 0 && id < n) in_top[id] = 1;
  }
  std::vector<std::vector<ObjectId>> blocks;
  std::vector<ObjectId> rest;
  for (ObjectId id = 0; id < n; ++id) {
    if (!in_top[id]) rest.push_back(id);
  }
  if (!rest.empty()) blocks.push_back(std::move(rest));
  for (ObjectId id : ranked) blocks.push_back({id});
  // Duplicates and out-of-range ids are caught here.
  return OrderedPartition(n, std::move(blocks));
}

std::optional<std::uint64_t> extension_count(const OrderedPartition& a) {
  const std::uint64_t base = static_cast<std::uint64_t>(a.num_blocks()) + 1;
  const int u = a.universe_size() - a.num_ranked();
  std::uint64_t count = 1;
  for (int i = 0; i < u; ++i) {
    if (count > std::numeric_limits<std::uint64_t>::max() / base) {
      return std::nullopt;
    }
    count *= base;
  }
  return count;
}

OrderedPartition extension_from_gaps(const OrderedPartition& a,
                                     std::span<const int> gaps) {
  const auto free = a.unranked();
  const int l = a.num_blocks();
  std::vector<std::vector<ObjectId>> in_gap(static_cast<std::size_t>(l) + 1);
  for (std::size_t i = 0; i < free.size(); ++i) {
    in_gap[static_cast<std::size_t>(gaps[i])].push_back(free[i]);
  }
  std::vector<std::vector<ObjectId>> blocks;
  blocks.reserve(static_cast<std::size_t>(2 * l + 1));
  for (int g = 0; g <= l; ++g) {
    if (!in_gap[g].empty()) blocks.push_back(std::move(in_gap[g]));
    if (g < l) blocks.push_back(a.blocks()[g]);
  }
  return OrderedPartition(a.universe_size(), std::move(blocks));
}

void for_each_coherent_extension(
    const OrderedPartition& a, std::uint64_t budget,
    const std::function<void(const OrderedPartition&)>& visit) {
  if (a.is_exhaustive()) {
    visit(a);
    return;
  }
  const auto count = extension_count(a);
  if (!count || *count > budget) {
    throw BudgetExceeded("coherent extension count exceeds budget of " +
                         std::to_string(budget));
  }
  const int u = a.universe_size() - a.num_ranked();
  const int base = a.num_blocks() + 1;
  std::vector<int> gaps(static_cast<std::size_t>(u), 0);
  for (std::uint64_t k = 0; k < *count; ++k) {
    visit(extension_from_gaps(a, gaps));
    // Odometer increment, last object least significant.
    for (int i = u - 1; i >= 0; --i) {
      if (++gaps[i] < base) break;
      gaps[i] = 0;
    }
  }
}

std::vector<OrderedPartition> coherent_extensions(const OrderedPartition& a,
                                                  std::uint64_t budget) {
  std::vector<OrderedPartition> out;
  for_each_coherent_extension(
      a, budget, [&](const OrderedPartition& e) { out.push_back(e); });
  return out;
}

OrderedPartition sample_extension(const OrderedPartition& a, Rng& rng) {
  if (a.is_exhaustive()) return a;
  const int u = a.universe_size() - a.num_ranked();
  const auto base = static_cast<std::uint64_t>(a.num_blocks()) + 1;
  std::vector<int> gaps(static_cast<std::size_t>(u));
  for (int& g : gaps) g = static_cast<int>(rng.uniform_index(base));
  return extension_from_gaps(a, gaps);
}

OrderedPartition relabel(const OrderedPartition& a,
                         std::span<const ObjectId> perm) {
  std::vector<std::vector<ObjectId>> blocks = a.blocks();
  for (auto& blk : blocks) {
    for (ObjectId& id : blk) id = perm[id];
  }
  return OrderedPartition(a.universe_size(), std::move(blocks));
}

}  // namespace subkern
