#include "subkern/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "subkern/errors.hpp"
#include "subkern/random.hpp"

namespace subkern {

void LabeledRankingDataset::validate() const {
  if (rankings.size() != labels.size()) {
    throw InputError("dataset has " + std::to_string(rankings.size()) +
                     " rankings but " + std::to_string(labels.size()) + " labels");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 1 && labels[i] != -1) {
      throw InputError("label of row " + std::to_string(i) + " is not +1 or -1");
    }
    if (rankings[i].universe_size() != n) {
      throw InputError("ranking " + std::to_string(i) + " is over a universe of " +
                       std::to_string(rankings[i].universe_size()) +
                       " objects, expected " + std::to_string(n));
    }
  }
}

Split split(std::span<const int> labels, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("test fraction must lie in (0, 1)");
  }
  const std::size_t m = labels.size();
  const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * m));
  if (n_test == 0 || n_test >= m) {
    throw InputError("degenerate split: " + std::to_string(n_test) +
                     " test rows out of " + std::to_string(m));
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = m - 1; i > 0; --i) {
    std::swap(order[i], order[rng.uniform_index(i + 1)]);
  }
  Split s;
  s.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  s.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  std::sort(s.test.begin(), s.test.end());
  std::sort(s.train.begin(), s.train.end());
  bool has_pos = false, has_neg = false;
  for (std::size_t i : s.train) {
    has_pos |= labels[i] == 1;
    has_neg |= labels[i] == -1;
  }
  if (!has_pos || !has_neg) {
    throw InputError("degenerate split: a class is absent from the training rows");
  }
  return s;
}

DenseMatrix submatrix(const GramMatrix& k, std::span<const std::size_t> rows,
                      std::span<const std::size_t> cols) {
  DenseMatrix out;
  out.rows = rows.size();
  out.cols = cols.size();
  out.values.resize(out.rows * out.cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out.values[i * out.cols + j] = k.at(rows[i], cols[j]);
    }
  }
  return out;
}

KrrModel train_krr(const DenseMatrix& k_train, std::span<const int> y, double reg) {
  if (k_train.rows != k_train.cols || k_train.rows != y.size()) {
    throw std::invalid_argument("training kernel must be square with one row per label");
  }
  if (!(reg > 0.0)) throw std::invalid_argument("regularization must be positive");
  const auto m = static_cast<Eigen::Index>(k_train.rows);
  const Eigen::MatrixXd k = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
      Eigen::Dynamic, Eigen::RowMajor>>(k_train.values.data(), m, m);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index i = 0; i < m; ++i) rhs(i) = y[i];

  const double ridge = reg * static_cast<double>(m);
  double jitter = 0.0;
  for (;;) {
    Eigen::MatrixXd system = k;
    system.diagonal().array() += ridge + jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(system);
    if (llt.info() == Eigen::Success) {
      const Eigen::VectorXd c = llt.solve(rhs);
      const double residual = (system * c - rhs).lpNorm<Eigen::Infinity>();
      if (residual <= 1e-8) {
        KrrModel model;
        model.dual_coefficients.assign(c.data(), c.data() + m);
        model.regularization = reg;
        model.jitter = jitter;
        model.residual = residual;
        return model;
      }
    }
    jitter = jitter == 0.0 ? 1e-12 : jitter * 10.0;
    if (jitter > 1.0000001e-6) {
      throw NumericalError("kernel ridge system could not be solved to 1e-8");
    }
  }
}

std::vector<int> predict(const KrrModel& model, const DenseMatrix& k_cross) {
  if (k_cross.cols != model.dual_coefficients.size()) {
    throw std::invalid_argument("cross kernel has " + std::to_string(k_cross.cols) +
                                " columns, model has " +
                                std::to_string(model.dual_coefficients.size()));
  }
  std::vector<int> out(k_cross.rows);
  for (std::size_t i = 0; i < k_cross.rows; ++i) {
    double score = 0.0;
    for (std::size_t j = 0; j < k_cross.cols; ++j) {
      score += k_cross.at(i, j) * model.dual_coefficients[j];
    }
    out[i] = score < 0.0 ? -1 : 1;
  }
  return out;
}

double f1_score(std::span<const int> predicted, std::span<const int> actual,
                int positive_class) {
  if (predicted.size() != actual.size()) {
    throw std::invalid_argument("prediction and label counts differ");
  }
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool p = predicted[i] == positive_class;
    const bool a = actual[i] == positive_class;
    if (p && a) ++tp;
    if (p && !a) ++fp;
    if (!p && a) ++fn;
  }
  const double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  const double recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

std::vector<int> dummy_predict(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> out(count);
  for (int& v : out) v = rng.uniform_index(2) == 0 ? -1 : 1;
  return out;
}

double evaluate_split(const GramMatrix& k, std::span<const int> labels,
                      const Split& s, double reg) {
  std::vector<int> y_train, y_test;
  for (std::size_t i : s.train) y_train.push_back(labels[i]);
  for (std::size_t i : s.test) y_test.push_back(labels[i]);
  const auto model = train_krr(submatrix(k, s.train, s.train), y_train, reg);
  const auto pred = predict(model, submatrix(k, s.test, s.train));
  return f1_score(pred, y_test);
}

}  // namespace subkern
