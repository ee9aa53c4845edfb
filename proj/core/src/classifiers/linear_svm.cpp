#include "onboard/classifiers/linear_svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "onboard/errors.hpp"
#include "onboard/rng.hpp"

namespace onboard {

namespace {

// Exact minimizer over b of sum(max(0, 1 - y_i (s_i + b))). The sum is
// convex and piecewise linear with kinks at y_i - s_i, and its slope is
// k - P after the k smallest kinks, P being the positive count. The flat
// bottom therefore runs from the P-th to the (P+1)-th smallest kink.
double optimal_bias(std::span<const double> scores, std::span<const Label> y) {
  std::vector<double> kinks(scores.size());
  std::size_t positives = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool pos = y[i] == Label::positive;
    kinks[i] = (pos ? 1.0 : -1.0) - scores[i];
    positives += pos;
  }
  const auto upper = kinks.begin() + static_cast<std::ptrdiff_t>(positives);
  std::nth_element(kinks.begin(), upper, kinks.end());
  const double hi = *upper;
  const double lo = *std::max_element(kinks.begin(), upper);
  return lo / 2.0 + hi / 2.0;
}

}  // namespace

LinearSvm LinearSvm::fit(const SparseMatrix& x, std::span<const Label> y, const SvmParams& params,
                         std::uint64_t seed) {
  const std::size_t n = x.rows(), d = x.cols();
  if (n == 0) throw TrainingError("empty training set");
  if (n != y.size()) throw TrainingError("row/label count mismatch");
  if (!(params.c > 0) || params.epochs < 1) throw TrainingError("SVM needs C > 0 and epochs >= 1");
  bool has_pos = false, has_neg = false;
  for (Label l : y) (l == Label::positive ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) throw TrainingError("SVM needs both classes");

  std::vector<double> row_sqnorm(n, 0);
  for (std::size_t r = 0; r < n; ++r) {
    for (double v : x.row(r).values) {
      if (!std::isfinite(v)) throw TrainingError("non-finite feature value in row " + std::to_string(r));
      row_sqnorm[r] += v * v;
    }
  }

  const double lambda = 1.0 / (params.c * static_cast<double>(n));
  const double radius = 1.0 / std::sqrt(lambda);

  // w = scale * v keeps the shrink step O(1). The running sum of iterates
  // over the second half is u + s_sum * v, so a sparse change to v only
  // touches the same coordinates of u.
  std::vector<double> v(d, 0.0), u(d, 0.0);
  double scale = 1.0, v_sqnorm = 0.0, b = 0.0, s_sum = 0.0;
  std::uint64_t averaged = 0;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::uint64_t t = 0;
  const int average_from = params.epochs / 2;

  std::vector<double> scores(n);
  auto refit_bias = [&](std::span<const double> w, double w_scale) {
    for (std::size_t r = 0; r < n; ++r) scores[r] = w_scale * x.row(r).dot(w);
    return optimal_bias(scores, y);
  };

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    rng.shuffle(order);
    const bool averaging = epoch >= average_from;
    // The bias is unregularized, so 1 / (lambda * t) steps on it never
    // settle. It is re-solved exactly at each epoch start instead and held
    // fixed while w takes its steps.
    b = refit_bias(v, scale);
    for (std::size_t i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double yi = y[i] == Label::positive ? 1.0 : -1.0;
      RowView row = x.row(i);
      double vx = row.dot(v);
      const double margin = yi * (scale * vx + b);

      const double shrink = 1.0 - 1.0 / static_cast<double>(t);
      if (shrink <= 0.0) {
        std::fill(v.begin(), v.end(), 0.0);
        scale = 1.0;
        v_sqnorm = 0.0;
        vx = 0.0;
      } else {
        scale *= shrink;
      }

      if (margin < 1.0) {
        const double coef = eta * yi / scale;
        v_sqnorm += 2.0 * coef * vx + coef * coef * row_sqnorm[i];
        for (std::size_t k = 0; k < row.indices.size(); ++k) {
          const double delta = coef * row.values[k];
          v[row.indices[k]] += delta;
          u[row.indices[k]] -= s_sum * delta;
        }
      }

      const double norm = scale * std::sqrt(std::max(v_sqnorm, 0.0));
      if (norm > radius) scale *= radius / norm;

      if (scale < 1e-9) {
        for (double& e : v) e *= scale;
        v_sqnorm *= scale * scale;
        s_sum /= scale;
        scale = 1.0;
      }
      if (averaging) {
        s_sum += scale;
        ++averaged;
      }
    }
  }
  std::vector<double> avg_w(d);
  for (std::size_t j = 0; j < d; ++j) avg_w[j] = (u[j] + s_sum * v[j]) / static_cast<double>(averaged);
  const double bias = refit_bias(avg_w, 1.0);
  return LinearSvm(std::move(avg_w), bias);
}

Prediction LinearSvm::predict(RowView row) const {
  const double s = decision(row);
  return {s >= 0.0 ? Label::positive : Label::negative, s};
}

double LinearSvm::objective(std::span<const double> w, double b, const SparseMatrix& x, std::span<const Label> y,
                            double c) {
  double reg = 0;
  for (double e : w) reg += e * e;
  double hinge = 0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double yi = y[r] == Label::positive ? 1.0 : -1.0;
    hinge += std::max(0.0, 1.0 - yi * (x.row(r).dot(w) + b));
  }
  return 0.5 * reg + c * hinge;
}

}  // namespace onboard
