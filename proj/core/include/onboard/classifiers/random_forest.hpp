#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "onboard/classifiers/decision_tree.hpp"

namespace onboard {

class RandomForest {
 public:
  RandomForest() = default;
  explicit RandomForest(std::vector<DecisionTree> trees);

  /// Tree i draws its bootstrap and feature subsets from
  /// Rng(derive_seed(seed, {i})); trees may be grown in parallel with
  /// results identical to sequential growth.
  static RandomForest fit(const SparseMatrix& x, std::span<const Label> y, const ForestParams& params,
                          std::uint64_t seed);

  /// n draws with replacement, returned as per-row multiplicities.
  static std::vector<std::uint32_t> bootstrap_counts(std::size_t n, Rng& rng);

  /// Parameters each member tree is grown with.
  static TreeParams tree_params(const ForestParams& params);

  /// score = share of trees voting positive; positive only on a strict
  /// majority (a tied vote is negative).
  Prediction predict(RowView row) const;

  /// Positive votes among the first n trees for every prefix length:
  /// out[n] for n in [0, trees().size()].
  std::vector<std::uint32_t> prefix_votes(RowView row) const;

  const std::vector<DecisionTree>& trees() const noexcept { return trees_; }

  friend bool operator==(const RandomForest& a, const RandomForest& b) { return a.trees_ == b.trees_; }

 private:
  // Scatters a sparse row into a dense buffer covering every split feature.
  std::span<const double> densify(RowView row, std::vector<double>& buffer) const;

  std::vector<DecisionTree> trees_;
  std::size_t split_width_ = 0;  // 1 + largest split feature
};

}  // namespace onboard
