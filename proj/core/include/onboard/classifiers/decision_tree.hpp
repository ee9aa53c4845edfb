#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "onboard/classifiers/params.hpp"
#include "onboard/rng.hpp"
#include "onboard/sparse.hpp"

namespace onboard {

double gini_impurity(double positive, double negative);
double entropy_impurity(double positive, double negative);
double impurity(Criterion c, double positive, double negative);

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0;       // go left when x[feature] <= threshold
  std::int32_t left = -1;
  std::int32_t right = -1;
  double positive_weight = 0;
  double negative_weight = 0;
  double impurity = 0;

  bool is_leaf() const noexcept { return feature < 0; }
  /// Majority label; ties go to negative.
  Label label() const noexcept { return positive_weight > negative_weight ? Label::positive : Label::negative; }

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Binary CART classifier over sparse rows (absent entries are 0).
class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  /// Throws TrainingError on empty input or label/row count mismatch.
  static DecisionTree fit(const SparseMatrix& x, std::span<const Label> y, const TreeParams& params,
                          std::uint64_t seed = 0);

  /// Grows one tree with per-row integer sample weights (0 excludes a row).
  static DecisionTree grow(const SparseMatrix& x, const ColumnIndex& columns, std::span<const Label> y,
                           std::span<const std::uint32_t> weights, const TreeParams& params, Rng& rng);

  const TreeNode& leaf_for(RowView row) const;
  /// Same traversal over a dense copy of the row (size >= feature count).
  const TreeNode& leaf_for(std::span<const double> dense) const;
  /// label = leaf majority, score = leaf positive fraction.
  Prediction predict(RowView row) const;

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  std::size_t depth() const;

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

 private:
  std::vector<TreeNode> nodes_;
};

}  // namespace onboard
