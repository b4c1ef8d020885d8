#include "subkern/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <exception>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "subkern/errors.hpp"

namespace subkern {

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::kSubmodular: return "submodular";
    case KernelKind::kKendall: return "kendall";
    case KernelKind::kMallows: return "mallows";
  }
  return "unknown";
}

KernelKind kernel_kind_from_string(const std::string& name) {
  if (name == "submodular") return KernelKind::kSubmodular;
  if (name == "kendall") return KernelKind::kKendall;
  if (name == "mallows") return KernelKind::kMallows;
  throw std::invalid_argument("unknown kernel '" + name + "'");
}

double k_s(const FeatureMap& phi, const FeatureMap& phi_prime) {
  if (phi.size() != phi_prime.size()) {
    throw std::invalid_argument("feature maps differ in dimension");
  }
  double sum = 0.0;
  for (std::size_t d = 0; d < phi.values.size(); ++d) {
    sum += phi.values[d] * phi_prime.values[d];
  }
  return sum;
}

namespace {

ExtensionMode mode_for_stream(const ExtensionMode& mode, std::uint64_t stream) {
  if (const auto* s = std::get_if<SampledMode>(&mode)) {
    return SampledMode{s->count, derive_seed(s->seed, stream)};
  }
  return mode;
}

void check_universe(const std::vector<OrderedPartition>& rankings) {
  for (const auto& r : rankings) {
    if (r.universe_size() != rankings.front().universe_size()) {
      throw std::invalid_argument("rankings are over different universes");
    }
  }
}

int team_size(int threads) {
  return threads > 0 ? threads : omp_get_max_threads();
}

/// Holds the first exception raised inside an OpenMP region so it can be
/// rethrown on the calling thread.
class ErrorSlot {
 public:
  template <typename Fn>
  void run(Fn&& fn) {
    try {
      fn();
    } catch (...) {
#pragma omp critical(subkern_error_slot)
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::exception_ptr error_;
};

double dot(std::span<const double> x, std::span<const double> y) {
  double sum = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) sum += x[d] * y[d];
  return sum;
}

}  // namespace

double k_c(const SetFunction& f, const OrderedPartition& a,
           const OrderedPartition& b, const ExtensionMode& mode) {
  return k_s(mean_feature_map(f, a, mode_for_stream(mode, 0)),
             mean_feature_map(f, b, mode_for_stream(mode, 1)));
}

FeatureMapBatch compute_feature_maps(const SetFunction& f,
                                     const std::vector<OrderedPartition>& rankings,
                                     const ExtensionMode& mode, int threads) {
  FeatureMapBatch maps;
  maps.m = rankings.size();
  maps.n = static_cast<std::size_t>(f.size());
  maps.values.assign(maps.m * maps.n, 0.0);
  if (rankings.empty()) return maps;
  check_universe(rankings);
  if (rankings.front().universe_size() != f.size()) {
    throw std::invalid_argument("rankings and set function sizes differ");
  }
  const int team = team_size(threads);
  const auto m = static_cast<std::ptrdiff_t>(maps.m);
  ErrorSlot errors;
#pragma omp parallel for num_threads(team) schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    errors.run([&] {
      const auto phi = mean_feature_map(f, rankings[i], mode_for_stream(mode, i));
      std::copy(phi.values.begin(), phi.values.end(),
                maps.values.begin() + i * static_cast<std::ptrdiff_t>(maps.n));
    });
  }
  errors.rethrow();
  return maps;
}

GramMatrix gram_from_feature_maps(const FeatureMapBatch& maps, int threads) {
  GramMatrix k;
  k.m = maps.m;
  k.values.assign(k.m * k.m, 0.0);
  k.ranking_ids.resize(k.m);
  for (std::size_t i = 0; i < k.m; ++i) k.ranking_ids[i] = i;
  const int team = team_size(threads);
  const auto m = static_cast<std::ptrdiff_t>(k.m);
#pragma omp parallel for num_threads(team) schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    const auto xi = maps.row(i);
    for (std::ptrdiff_t j = i; j < m; ++j) {
      const double v = dot(xi, maps.row(j));
      k.at(i, j) = v;
      k.at(j, i) = v;
    }
  }
  return k;
}

GramMatrix gram_submodular(const SetFunction& f,
                           const std::vector<OrderedPartition>& rankings,
                           const ExtensionMode& mode, int threads) {
  return gram_from_feature_maps(compute_feature_maps(f, rankings, mode, threads),
                                threads);
}

GramMatrix gram_submodular_serial(const SetFunction& f,
                                  const std::vector<OrderedPartition>& rankings,
                                  const ExtensionMode& mode) {
  check_universe(rankings);
  std::vector<FeatureMap> maps;
  maps.reserve(rankings.size());
  for (std::size_t i = 0; i < rankings.size(); ++i) {
    maps.push_back(mean_feature_map(f, rankings[i], mode_for_stream(mode, i)));
  }
  GramMatrix k;
  k.m = rankings.size();
  k.values.assign(k.m * k.m, 0.0);
  k.ranking_ids.resize(k.m);
  for (std::size_t i = 0; i < k.m; ++i) {
    k.ranking_ids[i] = i;
    for (std::size_t j = i; j < k.m; ++j) {
      const double v = dot(maps[i].values, maps[j].values);
      k.at(i, j) = v;
      k.at(j, i) = v;
    }
  }
  return k;
}

namespace {

void require_comparable(const OrderedPartition& a, const OrderedPartition& b) {
  if (!a.is_exhaustive() || !b.is_exhaustive()) {
    throw std::invalid_argument(
        "Kendall/Mallows need exhaustive rankings; use gram_baseline for partial ones");
  }
  if (a.universe_size() != b.universe_size()) {
    throw std::invalid_argument("rankings are over different universes");
  }
}

bool is_full(const OrderedPartition& a) {
  return a.num_blocks() == a.universe_size();
}

std::uint64_t merge_count(std::vector<int>& seq, std::vector<int>& scratch,
                          std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t inv = merge_count(seq, scratch, lo, mid) +
                      merge_count(seq, scratch, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (seq[j] < seq[i]) {
      inv += mid - i;
      scratch[k++] = seq[j++];
    } else {
      scratch[k++] = seq[i++];
    }
  }
  while (i < mid) scratch[k++] = seq[i++];
  while (j < hi) scratch[k++] = seq[j++];
  std::copy(scratch.begin() + lo, scratch.begin() + hi, seq.begin() + lo);
  return inv;
}

struct PairCounts {
  std::uint64_t concordant = 0;
  std::uint64_t discordant = 0;
  std::uint64_t ties_a = 0;
  std::uint64_t ties_b = 0;
};

PairCounts enumerate_pairs(const OrderedPartition& a, const OrderedPartition& b) {
  PairCounts c;
  const int n = a.universe_size();
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const int da = a.block_of(u) - a.block_of(v);
      const int db = b.block_of(u) - b.block_of(v);
      if (da == 0) ++c.ties_a;
      if (db == 0) ++c.ties_b;
      if ((da > 0 && db > 0) || (da < 0 && db < 0)) ++c.concordant;
      if ((da > 0 && db < 0) || (da < 0 && db > 0)) ++c.discordant;
    }
  }
  return c;
}

double pair_total(int n) { return 0.5 * n * (n - 1.0); }

}  // namespace

std::uint64_t discordant_pairs(const OrderedPartition& a, const OrderedPartition& b) {
  require_comparable(a, b);
  if (!is_full(a) || !is_full(b)) return enumerate_pairs(a, b).discordant;
  std::vector<int> seq;
  seq.reserve(static_cast<std::size_t>(a.universe_size()));
  for (int i = 0; i < a.num_blocks(); ++i) seq.push_back(b.block_of(a.block(i)[0]));
  std::vector<int> scratch(seq.size());
  return merge_count(seq, scratch, 0, seq.size());
}

double kendall_tau(const OrderedPartition& a, const OrderedPartition& b) {
  require_comparable(a, b);
  const int n = a.universe_size();
  if (n < 2) return 1.0;
  if (is_full(a) && is_full(b)) {
    const double d = static_cast<double>(discordant_pairs(a, b));
    const double total = pair_total(n);
    return (total - 2.0 * d) / total;
  }
  const PairCounts c = enumerate_pairs(a, b);
  const double total = pair_total(n);
  const double denom = std::sqrt((total - static_cast<double>(c.ties_a)) *
                                 (total - static_cast<double>(c.ties_b)));
  if (denom == 0.0) return 0.0;
  return (static_cast<double>(c.concordant) - static_cast<double>(c.discordant)) / denom;
}

double mallows(const OrderedPartition& a, const OrderedPartition& b, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("Mallows lambda must be >= 0");
  require_comparable(a, b);
  const int n = a.universe_size();
  if (n < 2) return 1.0;
  const double d = static_cast<double>(discordant_pairs(a, b)) / pair_total(n);
  return std::exp(-lambda * d);
}

GramMatrix gram_baseline(KernelKind kind, double lambda,
                         const std::vector<OrderedPartition>& rankings,
                         const ExtensionMode& mode, int threads) {
  if (kind == KernelKind::kSubmodular) {
    throw std::invalid_argument("gram_baseline handles kendall and mallows only");
  }
  if (kind == KernelKind::kMallows && !(lambda >= 0.0)) {
    throw std::invalid_argument("Mallows lambda must be >= 0");
  }
  check_universe(rankings);
  auto base = [&](const OrderedPartition& x, const OrderedPartition& y) {
    return kind == KernelKind::kKendall ? kendall_tau(x, y) : mallows(x, y, lambda);
  };

  const auto* exact = std::get_if<ExactMode>(&mode);
  const auto* sampled = std::get_if<SampledMode>(&mode);
  if (sampled && sampled->count == 0) {
    throw std::invalid_argument("sampled mode needs a positive sample count");
  }
  std::vector<std::vector<OrderedPartition>> extensions;
  if (exact) {
    extensions.reserve(rankings.size());
    for (const auto& r : rankings) {
      extensions.push_back(coherent_extensions(r, exact->budget));
    }
  }

  auto baseline_entry = [&](std::size_t i, std::size_t j) {
    const auto& a = rankings[i];
    const auto& b = rankings[j];
    if (a.is_exhaustive() && b.is_exhaustive()) return base(a, b);
    if (exact) {
      double sum = 0.0;
      for (const auto& x : extensions[i]) {
        for (const auto& y : extensions[j]) sum += base(x, y);
      }
      return sum / (static_cast<double>(extensions[i].size()) *
                    static_cast<double>(extensions[j].size()));
    }
    Rng rng(derive_seed(sampled->seed, i, j));
    double sum = 0.0;
    for (std::size_t s = 0; s < sampled->count; ++s) {
      const auto x = sample_extension(a, rng);
      const auto y = sample_extension(b, rng);
      sum += base(x, y);
    }
    return sum / static_cast<double>(sampled->count);
  };

  GramMatrix k;
  k.m = rankings.size();
  k.kind = kind;
  k.lambda = lambda;
  k.values.assign(k.m * k.m, 0.0);
  k.ranking_ids.resize(k.m);
  for (std::size_t i = 0; i < k.m; ++i) k.ranking_ids[i] = i;

  const int team = team_size(threads);
  const auto m = static_cast<std::ptrdiff_t>(k.m);
  ErrorSlot errors;
#pragma omp parallel for num_threads(team) schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    errors.run([&] {
      for (std::ptrdiff_t j = i; j < m; ++j) {
        const double v = baseline_entry(i, j);
        k.at(i, j) = v;
        k.at(j, i) = v;
      }
    });
  }
  errors.rethrow();
  return k;
}

bool psd_check(const GramMatrix& k, double jitter) {
  const auto m = static_cast<Eigen::Index>(k.m);
  Eigen::MatrixXd mat(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (std::abs(k.at(i, j) - k.at(j, i)) > 1e-9) {
        throw std::invalid_argument("Gram matrix is not symmetric");
      }
      mat(i, j) = k.at(i, j);
    }
  }
  mat.diagonal().array() += jitter;
  Eigen::LLT<Eigen::MatrixXd> llt(mat);
  return llt.info() == Eigen::Success;
}

}  // namespace subkern
