#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "onboard/classifiers/params.hpp"
#include "onboard/sparse.hpp"

namespace onboard {

/// Linear soft-margin SVM minimizing 0.5 * |w|^2 + C * sum(hinge), trained
/// with Pegasos-style stochastic sub-gradient steps of size 1 / (lambda * t),
/// lambda = 1 / (C * n). Rows are visited in a seeded shuffled order each
/// epoch; the returned w averages every iterate of the second half of
/// training, and b is then the exact hinge minimizer for that w.
class LinearSvm {
 public:
  LinearSvm() = default;
  LinearSvm(std::vector<double> weights, double bias) : w_(std::move(weights)), b_(bias) {}

  /// Throws TrainingError on empty input, a missing class, or non-finite values.
  static LinearSvm fit(const SparseMatrix& x, std::span<const Label> y, const SvmParams& params,
                       std::uint64_t seed);

  double decision(RowView row) const { return row.dot(w_) + b_; }
  /// score = w.x + b; positive iff score >= 0.
  Prediction predict(RowView row) const;

  /// 0.5 * |w|^2 + C * sum(max(0, 1 - y_i (w.x_i + b))), y in {-1, +1}.
  static double objective(std::span<const double> w, double b, const SparseMatrix& x, std::span<const Label> y,
                          double c);

  const std::vector<double>& weights() const noexcept { return w_; }
  double bias() const noexcept { return b_; }

  friend bool operator==(const LinearSvm&, const LinearSvm&) = default;

 private:
  std::vector<double> w_;
  double b_ = 0;
};

}  // namespace onboard
