#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "subkern/kernels.hpp"
#include "subkern/ranking.hpp"

namespace subkern {

/// Rankings over one universe paired with +1 / -1 labels.
struct LabeledRankingDataset {
  int n = 0;
  std::vector<OrderedPartition> rankings;
  std::vector<int> labels;

  std::size_t size() const { return rankings.size(); }
  /// Throws InputError on length mismatch, bad labels or mixed universes.
  void validate() const;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Shuffled split with round(test_fraction * m) test rows (both index lists
/// returned ascending). Throws InputError when the test or train side would
/// be empty or a class is missing from the training rows.
Split split(std::span<const int> labels, double test_fraction, std::uint64_t seed);

/// Row-major dense matrix.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

DenseMatrix submatrix(const GramMatrix& k, std::span<const std::size_t> rows,
                      std::span<const std::size_t> cols);

struct KrrModel {
  std::vector<double> dual_coefficients;
  double regularization = 0.0;
  double jitter = 0.0;    // extra ridge added when the plain solve failed
  double residual = 0.0;  // max-norm residual of the solved system
};

inline constexpr double kDefaultRegularization = 1e-3;

/// Solves (K + reg * m * I) c = y by Cholesky. Escalates a diagonal jitter
/// from 1e-12 up to 1e-6 if the factorization fails, then throws
/// NumericalError. The residual must stay below 1e-8.
KrrModel train_krr(const DenseMatrix& k_train, std::span<const int> y, double reg);

/// sign(K_cross * c), with a zero score mapped to +1.
std::vector<int> predict(const KrrModel& model, const DenseMatrix& k_cross);

/// Harmonic mean of precision and recall for `positive_class`; 0 when both
/// are undefined or zero.
double f1_score(std::span<const int> predicted, std::span<const int> actual,
                int positive_class = 1);

/// Uniform random +1 / -1 predictions, the reference floor.
std::vector<int> dummy_predict(std::size_t count, std::uint64_t seed);

/// Train on split.train, score split.test.
double evaluate_split(const GramMatrix& k, std::span<const int> labels,
                      const Split& s, double reg);

}  // namespace subkern
