#include "subkern/submodular.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "subkern/errors.hpp"

namespace subkern {

std::vector<std::uint8_t> mask_from_ids(int n, std::span<const ObjectId> ids) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n), 0);
  for (ObjectId id : ids) {
    if (id < 0 || id >= n) {
      throw std::out_of_range("object id " + std::to_string(id) +
                              " outside [0, " + std::to_string(n) + ")");
    }
    mask[id] = 1;
  }
  return mask;
}

InformationGraph::InformationGraph(int n, std::vector<double> weights,
                                   double lengthscale,
                                   bool lengthscale_from_median)
    : n_(n),
      weights_(std::move(weights)),
      lengthscale_(lengthscale),
      lengthscale_from_median_(lengthscale_from_median) {
  if (n_ < 1) throw InputError("graph needs at least one node");
  if (weights_.size() != static_cast<std::size_t>(n_) * n_) {
    throw InputError("weight matrix is not n x n");
  }
  for (int u = 0; u < n_; ++u) {
    if (weight(u, u) != 0.0) throw InputError("graph has a self loop");
    for (int v = u + 1; v < n_; ++v) {
      const double w = weight(u, v);
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw InputError("edge weights must be finite and nonnegative");
      }
      if (w != weight(v, u)) throw InputError("weight matrix is not symmetric");
      if (w > 0.0) edges_.push_back({u, v, w});
    }
  }
}

InformationGraph build_graph(const FeatureMatrix& features,
                             std::optional<double> lengthscale,
                             double keep_fraction) {
  const int n = features.rows;
  if (n < 2) throw InputError("information graph needs at least two objects");
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
    throw std::invalid_argument("keep_fraction must lie in (0, 1]");
  }
  for (double x : features.values) {
    if (!std::isfinite(x)) throw InputError("non-finite feature value");
  }
  if (lengthscale && !(*lengthscale > 0.0 && std::isfinite(*lengthscale))) {
    throw std::invalid_argument("lengthscale must be positive");
  }

  const std::size_t pairs = static_cast<std::size_t>(n) * (n - 1) / 2;
  std::vector<double> sq_dist;
  sq_dist.reserve(pairs);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      double d2 = 0.0;
      for (int c = 0; c < features.cols; ++c) {
        const double diff = features.at(u, c) - features.at(v, c);
        d2 += diff * diff;
      }
      sq_dist.push_back(d2);
    }
  }

  double ell = 0.0;
  const bool from_median = !lengthscale.has_value();
  if (lengthscale) {
    ell = *lengthscale;
  } else {
    std::vector<double> dist(sq_dist.size());
    std::transform(sq_dist.begin(), sq_dist.end(), dist.begin(),
                   [](double d2) { return std::sqrt(d2); });
    std::sort(dist.begin(), dist.end());
    const std::size_t mid = dist.size() / 2;
    ell = dist.size() % 2 == 1 ? dist[mid] : 0.5 * (dist[mid - 1] + dist[mid]);
    if (!(ell > 0.0)) {
      throw InputError("median pairwise distance is zero; pass a lengthscale");
    }
  }

  struct Candidate {
    int u, v;
    double w;
  };
  std::vector<Candidate> cand;
  cand.reserve(pairs);
  {
    std::size_t k = 0;
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v, ++k) {
        cand.push_back({u, v, std::exp(-0.5 * sq_dist[k] / (ell * ell))});
      }
    }
  }
  const auto keep = static_cast<std::size_t>(
      std::ceil(keep_fraction * static_cast<double>(pairs) - 1e-12));
  if (keep < cand.size()) {
    // Candidates are already in (u, v) order, so a stable sort on weight
    // breaks ties lexicographically.
    std::stable_sort(cand.begin(), cand.end(),
                     [](const Candidate& a, const Candidate& b) { return a.w > b.w; });
    cand.resize(keep);
  }

  std::vector<double> weights(static_cast<std::size_t>(n) * n, 0.0);
  for (const auto& c : cand) {
    weights[static_cast<std::size_t>(c.u) * n + c.v] = c.w;
    weights[static_cast<std::size_t>(c.v) * n + c.u] = c.w;
  }
  return InformationGraph(n, std::move(weights), ell, from_median);
}

double cut_eval(const InformationGraph& g, SubsetMask s) {
  if (static_cast<int>(s.size()) != g.size()) {
    throw std::invalid_argument("subset mask size does not match the graph");
  }
  double total = 0.0;
  for (const Edge& e : g.edges()) {
    if (s[e.u] != s[e.v]) total += e.weight;
  }
  return total;
}

double cut_eval(const InformationGraph& g, std::span<const ObjectId> ids) {
  const auto mask = mask_from_ids(g.size(), ids);
  return cut_eval(g, mask);
}

SetFunction SetFunction::custom(int n, Evaluator eval) {
  if (n < 1) throw std::invalid_argument("set function over an empty ground set");
  const std::vector<std::uint8_t> empty(static_cast<std::size_t>(n), 0);
  const double offset = eval(empty);
  return SetFunction(n, std::move(eval), offset);
}

SetFunction SetFunction::cut(std::shared_ptr<const InformationGraph> g) {
  const int n = g->size();
  return SetFunction(
      n, [g = std::move(g)](SubsetMask s) { return cut_eval(*g, s); }, 0.0);
}

SetFunction SetFunction::cut(InformationGraph g) {
  return cut(std::make_shared<const InformationGraph>(std::move(g)));
}

double SetFunction::operator()(std::span<const ObjectId> ids) const {
  const auto mask = mask_from_ids(n_, ids);
  return (*this)(SubsetMask(mask));
}

namespace {

void check_size(const SetFunction& f, std::size_t len, const char* what) {
  if (static_cast<int>(len) != f.size()) {
    throw std::invalid_argument(std::string(what) +
                                " length does not match the ground set");
  }
}

void require_exhaustive(const OrderedPartition& a, const SetFunction& f) {
  if (!a.is_exhaustive()) {
    throw std::invalid_argument("operation requires an exhaustive partition");
  }
  if (a.universe_size() != f.size()) {
    throw std::invalid_argument("partition and set function sizes differ");
  }
}

}  // namespace

double lovasz_extension(const SetFunction& f, std::span<const double> w) {
  check_size(f, w.size(), "w");
  for (double x : w) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite w");
  }
  const int n = f.size();
  std::vector<ObjectId> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](ObjectId a, ObjectId b) { return w[a] > w[b]; });

  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n), 0);
  double value = 0.0;
  for (int k = 0; k < n; ++k) {
    mask[order[k]] = 1;
    const double next = k + 1 < n ? w[order[k + 1]] : 0.0;
    const double step = w[order[k]] - next;
    if (step != 0.0) value += step * f(SubsetMask(mask));
  }
  return value;
}

std::vector<double> greedy_vertex(const SetFunction& f,
                                  std::span<const ObjectId> perm) {
  check_size(f, perm.size(), "permutation");
  const int n = f.size();
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n), 0);
  for (ObjectId id : perm) {
    if (id < 0 || id >= n || mask[id]) {
      throw std::invalid_argument("greedy_vertex needs a permutation");
    }
    mask[id] = 1;
  }
  std::fill(mask.begin(), mask.end(), 0);
  std::vector<double> s(static_cast<std::size_t>(n));
  double prev = 0.0;
  for (ObjectId id : perm) {
    mask[id] = 1;
    const double cur = f(SubsetMask(mask));
    s[id] = cur - prev;
    prev = cur;
  }
  return s;
}

bool in_tangent_cone(const SetFunction& f, const OrderedPartition& a,
                     std::span<const double> s, double tol) {
  require_exhaustive(a, f);
  check_size(f, s.size(), "s");
  std::vector<std::uint8_t> mask(s.size(), 0);
  double prefix = 0.0;
  for (int i = 0; i < a.num_blocks(); ++i) {
    for (ObjectId id : a.block(i)) {
      mask[id] = 1;
      prefix += s[id];
    }
    const double bound = f(SubsetMask(mask));
    if (i + 1 < a.num_blocks()) {
      if (prefix > bound + tol) return false;
    } else if (std::abs(prefix - bound) > tol) {
      return false;
    }
  }
  return true;
}

bool in_base_polytope(const SetFunction& f, std::span<const double> s,
                      double tol) {
  check_size(f, s.size(), "s");
  const int n = f.size();
  if (n > 20) throw std::invalid_argument("in_base_polytope supports n <= 20");
  const std::uint32_t full = (std::uint32_t{1} << n) - 1;
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n));
  for (std::uint32_t bits = 1; bits <= full; ++bits) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      mask[j] = (bits >> j) & 1u;
      if (mask[j]) sum += s[j];
    }
    const double bound = f(SubsetMask(mask));
    if (bits == full) {
      if (std::abs(sum - bound) > tol) return false;
    } else if (sum > bound + tol) {
      return false;
    }
  }
  return true;
}

bool is_submodular(const SetFunction& f, double slack) {
  const int n = f.size();
  if (n > 12) throw std::invalid_argument("is_submodular supports n <= 12");
  const std::uint32_t count = std::uint32_t{1} << n;
  std::vector<double> table(count);
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n));
  for (std::uint32_t bits = 0; bits < count; ++bits) {
    for (int j = 0; j < n; ++j) mask[j] = (bits >> j) & 1u;
    table[bits] = f(SubsetMask(mask));
  }
  for (std::uint32_t s = 0; s < count; ++s) {
    for (std::uint32_t t = s + 1; t < count; ++t) {
      if (table[s] + table[t] < table[s | t] + table[s & t] - slack) return false;
    }
  }
  return true;
}

bool is_compatible(std::span<const double> w, const OrderedPartition& a,
                   double tol) {
  if (!a.is_exhaustive()) {
    throw std::invalid_argument("is_compatible requires an exhaustive partition");
  }
  if (static_cast<int>(w.size()) != a.universe_size()) {
    throw std::invalid_argument("w length does not match the partition");
  }
  double prev_low = 0.0;
  for (int i = 0; i < a.num_blocks(); ++i) {
    auto blk = a.block(i);
    const auto [lo, hi] = std::minmax_element(blk.begin(), blk.end(),
        [&](ObjectId x, ObjectId y) { return w[x] < w[y]; });
    if (w[*hi] - w[*lo] > tol) return false;
    if (i > 0 && w[*hi] > prev_low + tol) return false;
    prev_low = w[*lo];
  }
  return true;
}

}  // namespace subkern
