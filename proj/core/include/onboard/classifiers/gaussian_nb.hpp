#pragma once

#include <array>
#include <span>
#include <vector>

#include "onboard/classifiers/params.hpp"
#include "onboard/sparse.hpp"

namespace onboard {

/// Gaussian naive Bayes. Per-class variances are widened by
/// var_smoothing * (largest per-feature variance over all training rows).
class GaussianNB {
 public:
  struct ClassStats {
    double prior = 0;
    std::vector<double> mean;
    std::vector<double> variance;  // smoothed
  };

  GaussianNB() = default;
  GaussianNB(std::array<ClassStats, 2> classes, double epsilon);

  /// Throws TrainingError unless both classes are present.
  static GaussianNB fit(const SparseMatrix& x, std::span<const Label> y, const NbParams& params);

  /// Log of prior times likelihood, indexed by Label.
  std::array<double, 2> joint_log_likelihood(RowView row) const;
  /// score = positive posterior, clamped into the open interval (0, 1);
  /// positive iff score >= 0.5.
  Prediction predict(RowView row) const;

  const ClassStats& stats(Label l) const { return classes_[static_cast<std::size_t>(l)]; }
  double epsilon() const noexcept { return epsilon_; }

  friend bool operator==(const GaussianNB& a, const GaussianNB& b) {
    for (std::size_t c = 0; c < 2; ++c) {
      if (a.classes_[c].prior != b.classes_[c].prior || a.classes_[c].mean != b.classes_[c].mean ||
          a.classes_[c].variance != b.classes_[c].variance) {
        return false;
      }
    }
    return a.epsilon_ == b.epsilon_;
  }

 private:
  void precompute();

  std::array<ClassStats, 2> classes_;
  double epsilon_ = 0;
  // Per class: log prior - 0.5 * sum(log(2 pi var)) - 0.5 * sum(mean^2 / var),
  // i.e. the log-likelihood of the all-zero row.
  std::array<double, 2> zero_row_{};
};

}  // namespace onboard
