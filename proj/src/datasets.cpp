#include "subkern/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>

#include "subkern/errors.hpp"

namespace subkern {
namespace food {

std::array<double, kNumFeatures> feature_weights(UserType type) {
  if (type == UserType::kOne) return {kImportance[0], kImportance[1], kImportance[2]};
  return {kImportance[2], kImportance[1], kImportance[0]};
}

std::array<double, kNumDishes> scores(UserType type) {
  const auto w = feature_weights(type);
  std::array<double, kNumDishes> out{};
  for (int d = 0; d < kNumDishes; ++d) {
    for (int c = 0; c < kNumFeatures; ++c) out[d] += kFeatures[d][c] * w[c];
  }
  return out;
}

std::array<double, kNumDishes> table_scores(UserType type) {
  auto out = scores(type);
  for (double& s : out) s = std::round(s * 100.0) / 100.0;
  return out;
}

namespace {

std::array<int, kNumDishes> argsort(const std::array<double, kNumDishes>& values) {
  std::array<int, kNumDishes> order{};
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return values[a] < values[b]; });
  return order;
}

}  // namespace

std::array<int, kNumDishes> noise_free_preferences(UserType type) {
  const auto order = argsort(table_scores(type));
  std::array<int, kNumDishes> rank{};
  for (int r = 0; r < kNumDishes; ++r) rank[order[r]] = r;
  return rank;
}

FeatureMatrix feature_matrix() {
  FeatureMatrix m;
  m.rows = kNumDishes;
  m.cols = kNumFeatures;
  for (const auto& row : kFeatures) m.values.insert(m.values.end(), row.begin(), row.end());
  return m;
}

OrderedPartition sample_ranking(UserType type, double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
  auto jittered = table_scores(type);
  for (double& s : jittered) s += sigma * rng.normal();
  const auto order = argsort(jittered);
  return from_permutation(order);
}

}  // namespace food

std::string to_string(const CensorKind& kind) {
  struct Visitor {
    std::string operator()(const FullKind&) const { return "full"; }
    std::string operator()(const TopKKind& k) const { return "topk:" + std::to_string(k.k); }
    std::string operator()(const ExhaustiveInterleaveKind& k) const {
      return "exh-interleave:" + std::to_string(k.l);
    }
    std::string operator()(const InterleaveKind& k) const {
      return "interleave:" + std::to_string(k.l);
    }
  };
  return std::visit(Visitor{}, kind);
}

CensorKind censor_kind_from_string(const std::string& text) {
  if (text == "full") return FullKind{};
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("ranking kind '" + text + "' needs a parameter");
  }
  const std::string name = text.substr(0, colon);
  int value = 0;
  try {
    std::size_t used = 0;
    value = std::stoi(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw std::invalid_argument("bad parameter in ranking kind '" + text + "'");
  }
  if (name == "topk") return TopKKind{value};
  if (name == "exh-interleave") return ExhaustiveInterleaveKind{value};
  if (name == "interleave") return InterleaveKind{value};
  throw std::invalid_argument("unknown ranking kind '" + text + "'");
}

namespace {

/// Uniform size-k subset of [0, n), ascending.
std::vector<int> sample_subset(int n, int k, Rng& rng) {
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    const auto j = i + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(k));
  std::sort(pool.begin(), pool.end());
  return pool;
}

void check_param(int value, int n, const char* what) {
  if (value < 1 || value > n) {
    throw std::invalid_argument(std::string(what) + " must lie in [1, " +
                                std::to_string(n) + "], got " + std::to_string(value));
  }
}

}  // namespace

OrderedPartition censor(const OrderedPartition& full, const CensorKind& kind, Rng& rng) {
  const int n = full.universe_size();
  if (full.num_blocks() != n) {
    throw std::invalid_argument("censor expects a full ranking");
  }
  std::vector<ObjectId> perm;
  perm.reserve(static_cast<std::size_t>(n));
  for (const auto& blk : full.blocks()) perm.push_back(blk[0]);

  if (std::holds_alternative<FullKind>(kind)) return full;

  if (const auto* top = std::get_if<TopKKind>(&kind)) {
    check_param(top->k, n, "k");
    return from_topk(std::span<const ObjectId>(perm).subspan(static_cast<std::size_t>(n - top->k)), n);
  }

  if (const auto* exh = std::get_if<ExhaustiveInterleaveKind>(&kind)) {
    check_param(exh->l, n, "l");
    // Cut positions are drawn from the n-1 gaps between neighbours.
    const auto cuts = sample_subset(n - 1, exh->l - 1, rng);
    std::vector<std::vector<ObjectId>> blocks(1);
    std::size_t next_cut = 0;
    for (int i = 0; i < n; ++i) {
      blocks.back().push_back(perm[i]);
      if (next_cut < cuts.size() && cuts[next_cut] == i) {
        blocks.emplace_back();
        ++next_cut;
      }
    }
    return OrderedPartition(n, std::move(blocks));
  }

  const auto& inter = std::get<InterleaveKind>(kind);
  check_param(inter.l, n, "l");
  const auto keep_positions = sample_subset(n, inter.l, rng);
  std::vector<std::vector<ObjectId>> blocks;
  for (int pos : keep_positions) blocks.push_back({perm[pos]});
  return OrderedPartition(n, std::move(blocks));
}

LabeledRankingDataset generate_dataset(std::size_t m, double sigma,
                                       const CensorKind& kind, std::uint64_t seed) {
  if (m < 2) throw std::invalid_argument("dataset needs at least two rows");
  if (m % 2 == 1) {
    std::cerr << "warning: odd dataset size " << m << " rounded down to " << m - 1
              << " for balanced classes\n";
  }
  const std::size_t per_class = m / 2;
  Rng rng(seed);
  LabeledRankingDataset data;
  data.n = food::kNumDishes;
  data.rankings.reserve(2 * per_class);
  data.labels.reserve(2 * per_class);
  for (std::size_t i = 0; i < per_class; ++i) {
    for (auto type : {food::UserType::kOne, food::UserType::kTwo}) {
      const auto full = food::sample_ranking(type, sigma, rng);
      data.rankings.push_back(censor(full, kind, rng));
      data.labels.push_back(type == food::UserType::kOne ? 1 : -1);
    }
  }
  return data;
}

}  // namespace subkern
