#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "subkern/ranking.hpp"

namespace subkern {

/// Subset of [0, n) as a 0/1 membership vector.
using SubsetMask = std::span<const std::uint8_t>;

std::vector<std::uint8_t> mask_from_ids(int n, std::span<const ObjectId> ids);

struct Edge {
  int u = 0;
  int v = 0;
  double weight = 0.0;
};

/// Symmetric nonnegative similarity graph over the objects.
class InformationGraph {
 public:
  /// `weights` is n*n row-major; must be symmetric, nonnegative, zero
  /// diagonal. Throws InputError otherwise.
  InformationGraph(int n, std::vector<double> weights, double lengthscale,
                   bool lengthscale_from_median = false);

  int size() const { return n_; }
  double weight(int u, int v) const { return weights_[static_cast<std::size_t>(u) * n_ + v]; }
  const std::vector<double>& weights() const { return weights_; }

  /// Nonzero edges with u < v, sorted by (u, v).
  const std::vector<Edge>& edges() const { return edges_; }

  double lengthscale() const { return lengthscale_; }
  bool lengthscale_from_median() const { return lengthscale_from_median_; }

 private:
  int n_;
  std::vector<double> weights_;
  std::vector<Edge> edges_;
  double lengthscale_;
  bool lengthscale_from_median_;
};

/// Squared-exponential similarity graph:
///   weight(u, v) = exp(-0.5 * |x_u - x_v|^2 / lengthscale^2).
///
/// Without a lengthscale, the median of the n(n-1)/2 pairwise Euclidean
/// distances is used. Afterwards only the ceil(keep_fraction * n(n-1)/2)
/// heaviest edges survive; equal weights keep the lexicographically smaller
/// (u, v) first.
InformationGraph build_graph(const FeatureMatrix& features,
                             std::optional<double> lengthscale,
                             double keep_fraction = 1.0);

/// F(S): total weight of edges with exactly one endpoint in S.
double cut_eval(const InformationGraph& g, SubsetMask s);
double cut_eval(const InformationGraph& g, std::span<const ObjectId> ids);

/// A set function on subsets of [0, n), normalized so that F(empty) = 0.
class SetFunction {
 public:
  using Evaluator = std::function<double(SubsetMask)>;

  /// Wraps an arbitrary set function; F(empty) is subtracted from every
  /// evaluation.
  static SetFunction custom(int n, Evaluator eval);

  /// Cut function of `g`. The graph is shared, not copied.
  static SetFunction cut(std::shared_ptr<const InformationGraph> g);
  static SetFunction cut(InformationGraph g);

  int size() const { return n_; }

  double operator()(SubsetMask s) const { return eval_(s) - offset_; }
  double operator()(std::span<const ObjectId> ids) const;

 private:
  SetFunction(int n, Evaluator eval, double offset)
      : n_(n), eval_(std::move(eval)), offset_(offset) {}

  int n_;
  Evaluator eval_;
  double offset_;
};

/// Lovasz extension. Coordinates are visited by decreasing w, ties by
/// ascending object id.
double lovasz_extension(const SetFunction& f, std::span<const double> w);

/// Greedy (Edmonds) vertex: s[perm[k]] = F(perm[0..k]) - F(perm[0..k-1]).
std::vector<double> greedy_vertex(const SetFunction& f,
                                  std::span<const ObjectId> perm);

/// Prefix constraints s(B_i) <= F(B_i) for i < l plus s(V) = F(V).
bool in_tangent_cone(const SetFunction& f, const OrderedPartition& a,
                     std::span<const double> s, double tol);

/// Checks all 2^n - 1 constraints. n <= 20.
bool in_base_polytope(const SetFunction& f, std::span<const double> s,
                      double tol);

/// Exhaustive pairwise check F(S)+F(T) >= F(S|T)+F(S&T) - slack. n <= 12.
bool is_submodular(const SetFunction& f, double slack = 1e-9);

/// w constant on each block of `a` and non-increasing from the first
/// block to the last (within tol).
bool is_compatible(std::span<const double> w, const OrderedPartition& a,
                   double tol);

}  // namespace subkern
