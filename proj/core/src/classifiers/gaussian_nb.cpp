#include "onboard/classifiers/gaussian_nb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "onboard/errors.hpp"

namespace onboard {

GaussianNB::GaussianNB(std::array<ClassStats, 2> classes, double epsilon)
    : classes_(std::move(classes)), epsilon_(epsilon) {
  precompute();
}

void GaussianNB::precompute() {
  for (std::size_t c = 0; c < 2; ++c) {
    const ClassStats& s = classes_[c];
    double acc = std::log(s.prior);
    for (std::size_t j = 0; j < s.mean.size(); ++j) {
      acc -= 0.5 * std::log(2.0 * std::numbers::pi * s.variance[j]);
      acc -= 0.5 * s.mean[j] * s.mean[j] / s.variance[j];
    }
    zero_row_[c] = acc;
  }
}

GaussianNB GaussianNB::fit(const SparseMatrix& x, std::span<const Label> y, const NbParams& params) {
  if (x.rows() == 0) throw TrainingError("empty training set");
  if (x.rows() != y.size()) throw TrainingError("row/label count mismatch");
  const std::size_t d = x.cols();

  std::array<double, 2> count{};
  for (Label l : y) count[static_cast<std::size_t>(l)] += 1;
  if (count[0] == 0 || count[1] == 0) throw TrainingError("GaussianNB needs both classes");

  // Two passes: means, then squared deviations. Absent entries are zeros.
  std::array<std::vector<double>, 2> sum{std::vector<double>(d, 0), std::vector<double>(d, 0)};
  std::vector<double> all_sum(d, 0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto c = static_cast<std::size_t>(y[r]);
    RowView row = x.row(r);
    for (std::size_t k = 0; k < row.indices.size(); ++k) {
      sum[c][row.indices[k]] += row.values[k];
      all_sum[row.indices[k]] += row.values[k];
    }
  }
  std::array<ClassStats, 2> classes;
  std::vector<double> all_mean(d);
  const double n = static_cast<double>(x.rows());
  for (std::size_t j = 0; j < d; ++j) all_mean[j] = all_sum[j] / n;
  for (std::size_t c = 0; c < 2; ++c) {
    classes[c].prior = count[c] / n;
    classes[c].mean.resize(d);
    for (std::size_t j = 0; j < d; ++j) classes[c].mean[j] = sum[c][j] / count[c];
  }

  std::array<std::vector<double>, 2> sq{std::vector<double>(d, 0), std::vector<double>(d, 0)};
  std::array<std::vector<double>, 2> nz{std::vector<double>(d, 0), std::vector<double>(d, 0)};
  std::vector<double> all_sq(d, 0), all_nz(d, 0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto c = static_cast<std::size_t>(y[r]);
    RowView row = x.row(r);
    for (std::size_t k = 0; k < row.indices.size(); ++k) {
      const std::uint32_t j = row.indices[k];
      const double dc = row.values[k] - classes[c].mean[j];
      const double da = row.values[k] - all_mean[j];
      sq[c][j] += dc * dc;
      nz[c][j] += 1;
      all_sq[j] += da * da;
      all_nz[j] += 1;
    }
  }
  double max_var = 0;
  for (std::size_t j = 0; j < d; ++j) {
    const double v = (all_sq[j] + (n - all_nz[j]) * all_mean[j] * all_mean[j]) / n;
    max_var = std::max(max_var, v);
  }
  // All-constant data would leave a zero epsilon; fall back to the raw factor.
  const double epsilon = params.var_smoothing * (max_var > 0 ? max_var : 1.0);

  for (std::size_t c = 0; c < 2; ++c) {
    classes[c].variance.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
      const double m = classes[c].mean[j];
      const double v = (sq[c][j] + (count[c] - nz[c][j]) * m * m) / count[c];
      classes[c].variance[j] = v + epsilon;
    }
  }
  return GaussianNB(std::move(classes), epsilon);
}

std::array<double, 2> GaussianNB::joint_log_likelihood(RowView row) const {
  std::array<double, 2> jll = zero_row_;
  for (std::size_t c = 0; c < 2; ++c) {
    const ClassStats& s = classes_[c];
    double acc = 0;
    for (std::size_t k = 0; k < row.indices.size(); ++k) {
      const std::uint32_t j = row.indices[k];
      const double diff = row.values[k] - s.mean[j];
      acc += (diff * diff - s.mean[j] * s.mean[j]) / s.variance[j];
    }
    jll[c] -= 0.5 * acc;
  }
  return jll;
}

Prediction GaussianNB::predict(RowView row) const {
  const auto jll = joint_log_likelihood(row);
  const double delta = jll[0] - jll[1];  // log(neg / pos)
  double posterior = delta > 0 ? std::exp(-delta) / (1.0 + std::exp(-delta)) : 1.0 / (1.0 + std::exp(delta));
  posterior = std::clamp(posterior, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
  return {posterior >= 0.5 ? Label::positive : Label::negative, posterior};
}

}  // namespace onboard
