#include "subkern/isotonic.hpp"

#include <limits>
#include <stdexcept>

#include "subkern/errors.hpp"

namespace subkern {

void BlockTargets::validate() const {
  if (a.empty()) throw std::invalid_argument("block targets are empty");
  if (a.size() != beta.size()) {
    throw std::invalid_argument("targets and weights differ in length");
  }
  for (double b : beta) {
    if (!(b > 0.0)) throw std::invalid_argument("block weights must be positive");
  }
}

BlockTargets block_targets(const SetFunction& f, const OrderedPartition& a) {
  if (!a.is_exhaustive()) {
    throw std::invalid_argument("block_targets requires an exhaustive partition");
  }
  if (a.universe_size() != f.size()) {
    throw std::invalid_argument("partition and set function sizes differ");
  }
  const int l = a.num_blocks();
  BlockTargets t;
  t.a.resize(static_cast<std::size_t>(l));
  t.beta.resize(static_cast<std::size_t>(l));
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(f.size()), 0);
  double prev = 0.0;
  for (int i = 0; i < l; ++i) {
    for (ObjectId id : a.block(i)) mask[id] = 1;
    const double cur = f(SubsetMask(mask));
    const auto size = static_cast<double>(a.block(i).size());
    t.a[i] = -(cur - prev) / size;
    t.beta[i] = size;
    prev = cur;
  }
  return t;
}

IsotonicFit pava_fit(const BlockTargets& t) {
  t.validate();
  struct Run {
    int start;
    double weighted_sum;
    double weight;
    double value;
  };
  std::vector<Run> stack;
  stack.reserve(t.a.size());
  for (std::size_t i = 0; i < t.a.size(); ++i) {
    stack.push_back({static_cast<int>(i), t.beta[i] * t.a[i], t.beta[i], t.a[i]});
    while (stack.size() > 1 && stack[stack.size() - 2].value > stack.back().value) {
      Run top = stack.back();
      stack.pop_back();
      Run& below = stack.back();
      below.weighted_sum += top.weighted_sum;
      below.weight += top.weight;
      below.value = below.weighted_sum / below.weight;
    }
  }

  IsotonicFit fit;
  fit.values.resize(t.a.size());
  fit.run_starts.reserve(stack.size());
  for (std::size_t r = 0; r < stack.size(); ++r) {
    const auto end = r + 1 < stack.size() ? static_cast<std::size_t>(stack[r + 1].start)
                                          : t.a.size();
    for (auto i = static_cast<std::size_t>(stack[r].start); i < end; ++i) {
      fit.values[i] = stack[r].value;
    }
    fit.run_starts.push_back(stack[r].start);
  }
  return fit;
}

std::vector<double> pava(const BlockTargets& t) { return pava_fit(t).values; }

std::vector<double> isotonic_bruteforce(const BlockTargets& t) {
  t.validate();
  const std::size_t l = t.a.size();
  if (l > 20) throw std::invalid_argument("isotonic_bruteforce supports l <= 20");
  std::vector<double> best;
  double best_obj = std::numeric_limits<double>::infinity();
  std::vector<double> cand(l);
  // Bit k set: a run boundary between block k and block k+1.
  const std::uint32_t patterns = std::uint32_t{1} << (l - 1);
  for (std::uint32_t cuts = 0; cuts < patterns; ++cuts) {
    bool feasible = true;
    double prev_mean = -std::numeric_limits<double>::infinity();
    std::size_t start = 0;
    for (std::size_t k = 0; k < l && feasible; ++k) {
      const bool boundary = k + 1 == l || ((cuts >> k) & 1u);
      if (!boundary) continue;
      double ws = 0.0, w = 0.0;
      for (std::size_t i = start; i <= k; ++i) {
        ws += t.beta[i] * t.a[i];
        w += t.beta[i];
      }
      const double mean = ws / w;
      if (mean < prev_mean) feasible = false;
      for (std::size_t i = start; i <= k; ++i) cand[i] = mean;
      prev_mean = mean;
      start = k + 1;
    }
    if (!feasible) continue;
    double obj = 0.0;
    for (std::size_t i = 0; i < l; ++i) {
      obj += t.beta[i] * (cand[i] - t.a[i]) * (cand[i] - t.a[i]);
    }
    if (obj < best_obj) {
      best_obj = obj;
      best = cand;
    }
  }
  return best;
}

FeatureMap feature_map(const SetFunction& f, const OrderedPartition& a) {
  const auto values = pava(block_targets(f, a));
  FeatureMap phi;
  phi.values.resize(static_cast<std::size_t>(a.universe_size()));
  for (int i = 0; i < a.num_blocks(); ++i) {
    for (ObjectId id : a.block(i)) phi.values[id] = values[i];
  }
  return phi;
}

OrderedPartition basic_partition(const SetFunction& f, const OrderedPartition& a) {
  const auto fit = pava_fit(block_targets(f, a));
  std::vector<std::vector<ObjectId>> blocks;
  double last_value = 0.0;
  for (std::size_t r = 0; r < fit.run_starts.size(); ++r) {
    const int start = fit.run_starts[r];
    const int end = r + 1 < fit.run_starts.size() ? fit.run_starts[r + 1]
                                                  : a.num_blocks();
    const double value = fit.values[start];
    if (blocks.empty() || value != last_value) blocks.emplace_back();
    for (int i = start; i < end; ++i) {
      auto blk = a.block(i);
      blocks.back().insert(blocks.back().end(), blk.begin(), blk.end());
    }
    last_value = value;
  }
  return OrderedPartition(a.universe_size(), std::move(blocks));
}

namespace {

void accumulate(std::vector<double>& sum, const FeatureMap& phi) {
  for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += phi.values[j];
}

}  // namespace

FeatureMap mean_feature_map(const SetFunction& f, const OrderedPartition& a,
                            const ExtensionMode& mode) {
  if (a.is_exhaustive()) return feature_map(f, a);
  std::vector<double> sum(static_cast<std::size_t>(a.universe_size()), 0.0);
  std::uint64_t count = 0;
  if (const auto* exact = std::get_if<ExactMode>(&mode)) {
    for_each_coherent_extension(a, exact->budget, [&](const OrderedPartition& e) {
      accumulate(sum, feature_map(f, e));
      ++count;
    });
  } else {
    const auto& sampled = std::get<SampledMode>(mode);
    if (sampled.count == 0) {
      throw std::invalid_argument("sampled mode needs a positive sample count");
    }
    Rng rng(sampled.seed);
    for (std::size_t k = 0; k < sampled.count; ++k) {
      accumulate(sum, feature_map(f, sample_extension(a, rng)));
    }
    count = sampled.count;
  }
  FeatureMap mean;
  mean.values.resize(sum.size());
  for (std::size_t j = 0; j < sum.size(); ++j) {
    mean.values[j] = sum[j] / static_cast<double>(count);
  }
  return mean;
}

}  // namespace subkern
