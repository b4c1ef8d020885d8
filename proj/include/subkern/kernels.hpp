#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "subkern/isotonic.hpp"
#include "subkern/ranking.hpp"
#include "subkern/submodular.hpp"

namespace subkern {

enum class KernelKind { kSubmodular, kKendall, kMallows };

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& name);

/// Symmetric m x m kernel matrix, row-major.
struct GramMatrix {
  std::size_t m = 0;
  std::vector<double> values;
  std::vector<std::size_t> ranking_ids;
  KernelKind kind = KernelKind::kSubmodular;
  double lambda = 0.0;  // Mallows bandwidth, unused otherwise

  double at(std::size_t i, std::size_t j) const { return values[i * m + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * m + j]; }
};

/// Feature maps stacked row-wise: row i belongs to ranking i.
struct FeatureMapBatch {
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t i) const { return {values.data() + i * n, n}; }
};

/// Linear kernel on explicit feature maps.
double k_s(const FeatureMap& phi, const FeatureMap& phi_prime);

/// Convolution kernel: inner product of the mean feature maps. In sampled
/// mode the two rankings draw from streams derived from the mode's seed.
double k_c(const SetFunction& f, const OrderedPartition& a,
           const OrderedPartition& b, const ExtensionMode& mode);

/// Phase 1 of the submodular Gram: one (mean) feature map per ranking.
/// In sampled mode ranking i uses the stream derive_seed(seed, i).
/// `threads` <= 0 leaves the OpenMP default in place.
FeatureMapBatch compute_feature_maps(const SetFunction& f,
                                       const std::vector<OrderedPartition>& rankings,
                                       const ExtensionMode& mode, int threads = 0);

/// Phase 2: all pairwise inner products.
GramMatrix gram_from_feature_maps(const FeatureMapBatch& maps, int threads = 0);

/// Both phases, OpenMP-parallel. Output is bit-identical for every thread
/// count.
GramMatrix gram_submodular(const SetFunction& f,
                           const std::vector<OrderedPartition>& rankings,
                           const ExtensionMode& mode, int threads = 0);

/// Single-threaded reference of gram_submodular.
GramMatrix gram_submodular_serial(const SetFunction& f,
                                  const std::vector<OrderedPartition>& rankings,
                                  const ExtensionMode& mode);

/// Strictly discordant pairs between two exhaustive partitions.
/// O(n log n) merge-sort inversion count when both are full rankings.
std::uint64_t discordant_pairs(const OrderedPartition& a, const OrderedPartition& b);

/// Kendall tau. Full rankings: (C - D) / C(n,2) by inversion counting.
/// With ties: tau-b, (C - D) / sqrt((N0 - N1)(N0 - N2)), by pair enumeration;
/// 0 when either ranking is a single tied block.
double kendall_tau(const OrderedPartition& a, const OrderedPartition& b);

/// exp(-lambda * D / C(n,2)).
double mallows(const OrderedPartition& a, const OrderedPartition& b, double lambda);

/// Kendall or Mallows Gram. Non-exhaustive rankings are handled by the
/// convolution average over coherent extensions: exactly, or with `count`
/// paired draws per entry from the stream derive_seed(seed, i, j).
GramMatrix gram_baseline(KernelKind kind, double lambda,
                         const std::vector<OrderedPartition>& rankings,
                         const ExtensionMode& mode, int threads = 0);

/// True iff K + jitter * I admits a Cholesky factorization. Throws
/// std::invalid_argument when K is asymmetric beyond 1e-9.
bool psd_check(const GramMatrix& k, double jitter);

}  // namespace subkern
