#include "onboard/classifiers/random_forest.hpp"

#include <algorithm>

#include "onboard/errors.hpp"
#include "onboard/parallel.hpp"

namespace onboard {

RandomForest::RandomForest(std::vector<DecisionTree> trees) : trees_(std::move(trees)) {
  for (const DecisionTree& t : trees_) {
    for (const TreeNode& n : t.nodes()) {
      if (!n.is_leaf()) split_width_ = std::max(split_width_, static_cast<std::size_t>(n.feature) + 1);
    }
  }
}

std::span<const double> RandomForest::densify(RowView row, std::vector<double>& buffer) const {
  const std::size_t width = std::max<std::size_t>(split_width_, row.indices.empty() ? 0 : row.indices.back() + 1);
  buffer.assign(width, 0.0);
  for (std::size_t k = 0; k < row.indices.size(); ++k) buffer[row.indices[k]] = row.values[k];
  return buffer;
}

std::vector<std::uint32_t> RandomForest::prefix_votes(RowView row) const {
  std::vector<double> buffer;
  const auto dense = densify(row, buffer);
  std::vector<std::uint32_t> out(trees_.size() + 1, 0);
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    out[t + 1] = out[t] + (trees_[t].leaf_for(dense).label() == Label::positive ? 1u : 0u);
  }
  return out;
}

std::vector<std::uint32_t> RandomForest::bootstrap_counts(std::size_t n, Rng& rng) {
  std::vector<std::uint32_t> counts(n, 0);
  for (std::size_t i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(rng.below(n))];
  return counts;
}

TreeParams RandomForest::tree_params(const ForestParams& params) {
  TreeParams tp;
  tp.max_features = params.max_features;
  return tp;
}

RandomForest RandomForest::fit(const SparseMatrix& x, std::span<const Label> y, const ForestParams& params,
                               std::uint64_t seed) {
  if (x.rows() == 0) throw TrainingError("empty training set");
  if (x.rows() != y.size()) throw TrainingError("row/label count mismatch");
  if (params.n_estimators < 1) throw TrainingError("n_estimators must be positive");

  const ColumnIndex columns(x);
  const TreeParams tp = tree_params(params);
  std::vector<DecisionTree> trees(static_cast<std::size_t>(params.n_estimators));
  parallel_for(trees.size(), [&](std::size_t i) {
    Rng rng(derive_seed(seed, {i}));
    const auto weights = bootstrap_counts(x.rows(), rng);
    trees[i] = DecisionTree::grow(x, columns, y, weights, tp, rng);
  });
  return RandomForest(std::move(trees));
}

Prediction RandomForest::predict(RowView row) const {
  std::size_t votes = 0;
  std::vector<double> buffer;
  const auto dense = densify(row, buffer);
  for (const DecisionTree& t : trees_) {
    if (t.leaf_for(dense).label() == Label::positive) ++votes;
  }
  const double share = trees_.empty() ? 0.0 : static_cast<double>(votes) / static_cast<double>(trees_.size());
  return {2 * votes > trees_.size() ? Label::positive : Label::negative, share};
}

}  // namespace onboard
