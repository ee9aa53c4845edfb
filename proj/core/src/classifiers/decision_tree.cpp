#include "onboard/classifiers/decision_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "onboard/errors.hpp"

namespace onboard {

double gini_impurity(double positive, double negative) {
  const double total = positive + negative;
  if (total <= 0) return 0;
  const double p = positive / total, q = negative / total;
  return 1.0 - p * p - q * q;
}

double entropy_impurity(double positive, double negative) {
  const double total = positive + negative;
  if (total <= 0) return 0;
  double h = 0;
  for (double c : {positive, negative}) {
    if (c > 0) {
      const double p = c / total;
      h -= p * std::log2(p);
    }
  }
  return h;
}

double impurity(Criterion c, double positive, double negative) {
  return c == Criterion::gini ? gini_impurity(positive, negative) : entropy_impurity(positive, negative);
}

namespace {

// Equal-gain tolerance: a later candidate must beat the incumbent by more
// than this to replace it, and a split must improve by more than this.
constexpr double kGainEps = 1e-12;

struct Entry {
  double value;
  std::uint64_t pos;
  std::uint64_t neg;
};

struct Candidate {
  std::uint32_t feature;
  double threshold;
  double decrease;
};

class Grower {
 public:
  Grower(const SparseMatrix& x, const ColumnIndex& cols, std::span<const Label> y,
         std::span<const std::uint32_t> w, const TreeParams& p, Rng& rng)
      : x_(x), cols_(cols), y_(y), w_(w), p_(p), rng_(rng), stamp_(x.rows(), 0), side_(x.rows(), 0) {
    const std::size_t d = x.cols();
    mtry_ = resolve_max_features(p.max_features, d);
    n_features_ = d;
    feature_stamp_.assign(d, 0);
    local_ptr_.assign(d + 1, 0);
    local_end_.assign(d, 0);
    all_features_.resize(d);
    std::iota(all_features_.begin(), all_features_.end(), 0u);
    for (std::size_t r = 0; r < x.rows(); ++r) {
      if (w[r] > 0) samples_.push_back(static_cast<std::uint32_t>(r));
    }
  }

  std::vector<TreeNode> run() {
    struct Pending {
      std::int32_t node;
      std::size_t begin, end;
      int depth;
    };
    std::vector<TreeNode> nodes;
    nodes.push_back(make_node(0, samples_.size()));
    std::vector<Pending> stack{{0, 0, samples_.size(), 0}};

    while (!stack.empty()) {
      Pending cur = stack.back();
      stack.pop_back();
      TreeNode& node = nodes[static_cast<std::size_t>(cur.node)];
      const double total = node.positive_weight + node.negative_weight;
      if (node.positive_weight == 0 || node.negative_weight == 0 || total < p_.min_samples_split ||
          total < 2.0 * p_.min_samples_leaf || (p_.max_depth > 0 && cur.depth >= p_.max_depth)) {
        continue;
      }
      auto split = find_split(cur.begin, cur.end, node.positive_weight, node.negative_weight, node.impurity);
      if (!split) continue;

      const std::uint32_t f = split->feature;
      const double thr = split->threshold;
      // Absent entries are 0; only the column's entries can differ from that.
      const std::uint32_t zero_left = 0.0 <= thr ? 1 : 0;
      for (std::size_t i = cur.begin; i < cur.end; ++i) side_[samples_[i]] = zero_left;
      mark_nonzero_sides(f, thr, cur.begin, cur.end);
      auto mid = std::partition(samples_.begin() + static_cast<std::ptrdiff_t>(cur.begin),
                                samples_.begin() + static_cast<std::ptrdiff_t>(cur.end),
                                [&](std::uint32_t r) { return side_[r] != 0; });
      const std::size_t split_at = static_cast<std::size_t>(mid - samples_.begin());

      const auto left = static_cast<std::int32_t>(nodes.size());
      TreeNode left_node = make_node(cur.begin, split_at);
      TreeNode right_node = make_node(split_at, cur.end);
      TreeNode& parent = nodes[static_cast<std::size_t>(cur.node)];
      parent.feature = static_cast<std::int32_t>(f);
      parent.threshold = thr;
      parent.left = left;
      parent.right = left + 1;
      nodes.push_back(left_node);
      nodes.push_back(right_node);
      stack.push_back({left + 1, split_at, cur.end, cur.depth + 1});
      stack.push_back({left, cur.begin, split_at, cur.depth + 1});
    }
    return nodes;
  }

 private:
  TreeNode make_node(std::size_t begin, std::size_t end) const {
    TreeNode n;
    std::uint64_t pos = 0, neg = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const std::uint32_t r = samples_[i];
      (y_[r] == Label::positive ? pos : neg) += w_[r];
    }
    n.positive_weight = static_cast<double>(pos);
    n.negative_weight = static_cast<double>(neg);
    n.impurity = impurity(p_.criterion, n.positive_weight, n.negative_weight);
    return n;
  }

  // Collects value-sorted groups of equal feature values, zeros included.
  // Returns false when the feature is constant within the node.
  bool gather(std::uint32_t f, std::size_t begin, std::size_t end, std::uint64_t pos, std::uint64_t neg) {
    groups_.clear();
    auto add = [this](double v, std::uint64_t p, std::uint64_t n) {
      if (!groups_.empty() && groups_.back().value == v) {
        groups_.back().pos += p;
        groups_.back().neg += n;
      } else {
        groups_.push_back({v, p, n});
      }
    };
    const std::size_t node_size = end - begin;
    if (local_) {
      if (feature_stamp_[f] != current_stamp_) return false;
      entries_.assign(local_entries_.begin() + static_cast<std::ptrdiff_t>(local_ptr_[f]),
                      local_entries_.begin() + static_cast<std::ptrdiff_t>(local_end_[f]));
      std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) { return a.value < b.value; });
      for (const Entry& e : entries_) add(e.value, e.pos, e.neg);
    } else if (cols_.nnz(f) <= node_size * 8) {
      // The column is already in value order. Only in-node rows carry the
      // current stamp.
      const auto rows = cols_.rows(f);
      const auto vals = cols_.values(f);
      for (std::size_t k = 0; k < rows.size(); ++k) {
        const std::uint32_t r = rows[k];
        if (stamp_[r] != current_stamp_) continue;
        const bool positive = y_[r] == Label::positive;
        add(vals[k], positive ? w_[r] : 0u, positive ? 0u : w_[r]);
      }
    } else {
      entries_.clear();
      for (std::size_t i = begin; i < end; ++i) {
        const std::uint32_t r = samples_[i];
        const double v = x_.row(r).at(f);
        if (v == 0.0) continue;
        const bool positive = y_[r] == Label::positive;
        entries_.push_back({v, positive ? w_[r] : 0u, positive ? 0u : w_[r]});
      }
      std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) { return a.value < b.value; });
      for (const Entry& e : entries_) add(e.value, e.pos, e.neg);
    }
    std::uint64_t nz_pos = 0, nz_neg = 0;
    for (const Entry& g : groups_) {
      nz_pos += g.pos;
      nz_neg += g.neg;
    }
    if (pos + neg > nz_pos + nz_neg) {
      const auto at = std::lower_bound(groups_.begin(), groups_.end(), 0.0,
                                       [](const Entry& g, double v) { return g.value < v; });
      groups_.insert(at, Entry{0.0, pos - nz_pos, neg - nz_neg});
    }
    return groups_.size() >= 2;
  }

  // Buckets the node's nonzero entries by feature. Fills present_ with the
  // features that occur, in first-seen order.
  void build_local(std::size_t begin, std::size_t end, std::size_t node_nnz) {
    present_.clear();
    for (std::size_t i = begin; i < end; ++i) {
      for (std::uint32_t f : x_.row(samples_[i]).indices) {
        if (feature_stamp_[f] != current_stamp_) {
          feature_stamp_[f] = current_stamp_;
          present_.push_back(f);
          local_end_[f] = 0;
        }
        ++local_end_[f];
      }
    }
    std::size_t offset = 0;
    for (std::uint32_t f : present_) {
      local_ptr_[f] = offset;
      offset += local_end_[f];
      local_end_[f] = local_ptr_[f];
    }
    local_entries_.resize(node_nnz);
    for (std::size_t i = begin; i < end; ++i) {
      const std::uint32_t r = samples_[i];
      const RowView row = x_.row(r);
      const bool positive = y_[r] == Label::positive;
      const std::uint64_t p = positive ? w_[r] : 0u, n = positive ? 0u : w_[r];
      for (std::size_t k = 0; k < row.indices.size(); ++k) {
        local_entries_[local_end_[row.indices[k]]++] = Entry{row.values[k], p, n};
      }
    }
  }

  // side_[r] = 1 sends row r left. Rewrites the rows whose entry in column f
  // is stored.
  void mark_nonzero_sides(std::uint32_t f, double thr, std::size_t begin, std::size_t end) {
    if (cols_.nnz(f) <= (end - begin) * 8) {
      ++current_stamp_;
      for (std::size_t i = begin; i < end; ++i) stamp_[samples_[i]] = current_stamp_;
      const auto rows = cols_.rows(f);
      const auto vals = cols_.values(f);
      for (std::size_t k = 0; k < rows.size(); ++k) {
        if (stamp_[rows[k]] == current_stamp_) side_[rows[k]] = vals[k] <= thr ? 1 : 0;
      }
    } else {
      for (std::size_t i = begin; i < end; ++i) {
        const std::uint32_t r = samples_[i];
        side_[r] = x_.row(r).at(f) <= thr ? 1 : 0;
      }
    }
  }

  std::optional<Candidate> score_threshold(std::uint32_t f, double thr, double lp, double ln, double pos,
                                           double neg, double parent_impurity) const {
    const double rp = pos - lp, rn = neg - ln;
    const double wl = lp + ln, wr = rp + rn, w = pos + neg;
    if (wl < p_.min_samples_leaf || wr < p_.min_samples_leaf) return std::nullopt;
    const double dec = parent_impurity - (wl / w) * impurity(p_.criterion, lp, ln) -
                       (wr / w) * impurity(p_.criterion, rp, rn);
    return Candidate{f, thr, dec};
  }

  std::optional<Candidate> best_for_feature(std::uint32_t f, double pos, double neg, double parent_impurity) {
    std::optional<Candidate> best;
    if (p_.splitter == Splitter::random) {
      const double lo = groups_.front().value, hi = groups_.back().value;
      double thr = lo + rng_.unit() * (hi - lo);
      if (thr >= hi || thr < lo) thr = lo;
      double lp = 0, ln = 0;
      for (const Entry& g : groups_) {
        if (g.value > thr) break;
        lp += static_cast<double>(g.pos);
        ln += static_cast<double>(g.neg);
      }
      return score_threshold(f, thr, lp, ln, pos, neg, parent_impurity);
    }
    // Rank thresholds by w * (weighted child impurity) with its constant
    // parts dropped; the decrease is recomputed exactly for the winner.
    const double w = pos + neg, min_leaf = p_.min_samples_leaf;
    const bool gini = p_.criterion == Criterion::gini;
    double lp = 0, ln = 0, best_score = 0, best_lp = 0, best_ln = 0;
    std::size_t best_i = groups_.size();
    for (std::size_t i = 0; i + 1 < groups_.size(); ++i) {
      lp += static_cast<double>(groups_[i].pos);
      ln += static_cast<double>(groups_[i].neg);
      const double wl = lp + ln, wr = w - wl;
      if (wl < min_leaf || wr < min_leaf) continue;
      const double rp = pos - lp, rn = neg - ln;
      const double score = gini ? (lp * lp + ln * ln) / wl + (rp * rp + rn * rn) / wr
                                : -(wl * entropy_impurity(lp, ln) + wr * entropy_impurity(rp, rn));
      if (best_i == groups_.size() || score > best_score + kGainEps * w) {
        best_i = i;
        best_score = score;
        best_lp = lp;
        best_ln = ln;
      }
    }
    if (best_i == groups_.size()) return std::nullopt;
    const double a = groups_[best_i].value, b = groups_[best_i + 1].value;
    double thr = a / 2.0 + b / 2.0;
    if (!(thr >= a && thr < b)) thr = a;
    return score_threshold(f, thr, best_lp, best_ln, pos, neg, parent_impurity);
  }

  std::optional<Candidate> find_split(std::size_t begin, std::size_t end, double pos, double neg,
                                      double parent_impurity) {
    ++current_stamp_;
    for (std::size_t i = begin; i < end; ++i) stamp_[samples_[i]] = current_stamp_;
    const auto ipos = static_cast<std::uint64_t>(pos), ineg = static_cast<std::uint64_t>(neg);
    // Features with no nonzero entry in the node are constant there. Small
    // nodes collect the present ones and draw among them; large nodes draw
    // from all features, where most are present anyway. Either way the
    // non-constant features are visited in uniformly random order.
    std::size_t node_nnz = 0;
    for (std::size_t i = begin; i < end; ++i) node_nnz += x_.row(samples_[i]).indices.size();
    std::vector<std::uint32_t>* pool = &all_features_;
    local_ = node_nnz < n_features_;
    if (local_) {
      build_local(begin, end, node_nnz);
      pool = &present_;
    }

    candidates_.clear();
    if (mtry_ >= n_features_) {
      if (pool == &present_) {
        std::sort(present_.begin(), present_.end());
      } else {
        std::iota(all_features_.begin(), all_features_.end(), 0u);
      }
      for (std::uint32_t f : *pool) {
        if (!gather(f, begin, end, ipos, ineg)) continue;
        if (auto c = best_for_feature(f, pos, neg, parent_impurity)) candidates_.push_back(*c);
      }
    } else {
      // Lazy Fisher-Yates draw; constant features do not count toward mtry.
      std::vector<std::uint32_t>& v = *pool;
      const std::size_t d = v.size();
      std::size_t drawn = 0, informative = 0;
      while (informative < mtry_ && drawn < d) {
        const std::size_t j = drawn + static_cast<std::size_t>(rng_.below(d - drawn));
        std::swap(v[drawn], v[j]);
        const std::uint32_t f = v[drawn++];
        if (!gather(f, begin, end, ipos, ineg)) continue;
        ++informative;
        if (auto c = best_for_feature(f, pos, neg, parent_impurity)) candidates_.push_back(*c);
      }
      std::sort(candidates_.begin(), candidates_.end(),
                [](const Candidate& a, const Candidate& b) { return a.feature < b.feature; });
    }

    std::optional<Candidate> best;
    for (const Candidate& c : candidates_) {
      if (!best || c.decrease > best->decrease + kGainEps) best = c;
    }
    if (!best || best->decrease <= kGainEps) return std::nullopt;
    return best;
  }

  const SparseMatrix& x_;
  const ColumnIndex& cols_;
  std::span<const Label> y_;
  std::span<const std::uint32_t> w_;
  const TreeParams& p_;
  Rng& rng_;
  std::size_t mtry_ = 0;
  std::size_t n_features_ = 0;
  std::vector<std::uint32_t> present_;
  std::vector<std::uint32_t> all_features_;
  std::vector<std::uint32_t> feature_stamp_;
  bool local_ = false;
  std::vector<std::size_t> local_ptr_;
  std::vector<std::size_t> local_end_;
  std::vector<Entry> local_entries_;
  std::vector<std::uint32_t> samples_;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::uint32_t> side_;
  std::uint32_t current_stamp_ = 0;
  std::vector<Entry> entries_;
  std::vector<Entry> groups_;
  std::vector<Candidate> candidates_;
};

void check_training_input(const SparseMatrix& x, std::span<const Label> y) {
  if (x.rows() == 0) throw TrainingError("empty training set");
  if (x.rows() != y.size()) throw TrainingError("row/label count mismatch");
}

}  // namespace

DecisionTree DecisionTree::grow(const SparseMatrix& x, const ColumnIndex& columns, std::span<const Label> y,
                                std::span<const std::uint32_t> weights, const TreeParams& params, Rng& rng) {
  check_training_input(x, y);
  if (weights.size() != x.rows()) throw TrainingError("weight count mismatch");
  if (params.min_samples_split < 2 || params.min_samples_leaf < 1) {
    throw TrainingError("min_samples_split must be >= 2 and min_samples_leaf >= 1");
  }
  Grower g(x, columns, y, weights, params, rng);
  return DecisionTree(g.run());
}

DecisionTree DecisionTree::fit(const SparseMatrix& x, std::span<const Label> y, const TreeParams& params,
                               std::uint64_t seed) {
  check_training_input(x, y);
  ColumnIndex columns(x);
  std::vector<std::uint32_t> weights(x.rows(), 1);
  Rng rng(seed);
  return grow(x, columns, y, weights, params, rng);
}

const TreeNode& DecisionTree::leaf_for(RowView row) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const TreeNode& n = nodes_[i];
    i = static_cast<std::size_t>(row.at(static_cast<std::uint32_t>(n.feature)) <= n.threshold ? n.left : n.right);
  }
  return nodes_[i];
}

const TreeNode& DecisionTree::leaf_for(std::span<const double> dense) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const TreeNode& n = nodes_[i];
    i = static_cast<std::size_t>(dense[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes_[i];
}

Prediction DecisionTree::predict(RowView row) const {
  const TreeNode& leaf = leaf_for(row);
  const double total = leaf.positive_weight + leaf.negative_weight;
  return {leaf.label(), total > 0 ? leaf.positive_weight / total : 0.0};
}

std::size_t DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  std::size_t best = 0;
  while (!stack.empty()) {
    auto [i, dep] = stack.back();
    stack.pop_back();
    best = std::max(best, dep);
    if (!nodes_[i].is_leaf()) {
      stack.push_back({static_cast<std::size_t>(nodes_[i].left), dep + 1});
      stack.push_back({static_cast<std::size_t>(nodes_[i].right), dep + 1});
    }
  }
  return best;
}

}  // namespace onboard
