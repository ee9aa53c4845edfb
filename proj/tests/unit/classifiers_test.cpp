#include <doctest.h>

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "onboard/classifiers/model.hpp"
#include "onboard/errors.hpp"
#include "oracles.hpp"

using namespace onboard;
using fixture::to_labels;
using fixture::to_sparse;

namespace {

struct Data {
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
};

Data random_set(Rng& rng, std::size_t n, std::size_t d, int levels) {
  Data out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> r(d);
    for (double& v : r) v = levels > 0 ? static_cast<double>(rng.below(static_cast<std::uint64_t>(levels))) : rng.unit() * 4 - 1;
    out.rows.push_back(r);
    out.y.push_back(static_cast<int>(rng.below(2)));
  }
  return out;
}

// Rows with a planted keyword column 0 that determines the class, plus
// noise columns.
Data planted(Rng& rng, std::size_t n, std::size_t d) {
  Data out;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(rng.below(2));
    std::vector<double> r(d, 0.0);
    r[0] = label ? 0.5 + rng.unit() : 0.0;
    for (std::size_t j = 1; j < d; ++j) {
      if (rng.bernoulli(0.2)) r[j] = rng.unit();
    }
    out.rows.push_back(r);
    out.y.push_back(label);
  }
  return out;
}

std::vector<Prediction> predict_all(const TrainedModel& m, const SparseMatrix& x) {
  std::vector<Prediction> out;
  for (std::size_t r = 0; r < x.rows(); ++r) out.push_back(m.predict(x.row(r)));
  return out;
}

// Leaf sample counts (weights) and accepted-split decreases for a tree.
void check_tree_invariants(const DecisionTree& t, Criterion c, int min_leaf) {
  for (const TreeNode& n : t.nodes()) {
    CHECK(n.positive_weight + n.negative_weight >= min_leaf);
    if (n.is_leaf()) continue;
    const TreeNode& l = t.nodes()[static_cast<std::size_t>(n.left)];
    const TreeNode& r = t.nodes()[static_cast<std::size_t>(n.right)];
    const double w = n.positive_weight + n.negative_weight;
    const double wl = l.positive_weight + l.negative_weight, wr = r.positive_weight + r.negative_weight;
    CHECK(wl + wr == w);
    const double dec = n.impurity - wl / w * impurity(c, l.positive_weight, l.negative_weight) -
                       wr / w * impurity(c, r.positive_weight, r.negative_weight);
    CHECK(dec > 0);
  }
}

}  // namespace

TEST_CASE("impurity closed forms") {
  CHECK(gini_impurity(3, 1) == doctest::Approx(0.375));
  CHECK(gini_impurity(4, 0) == 0);
  CHECK(entropy_impurity(2, 2) == doctest::Approx(1.0));
  CHECK(entropy_impurity(0, 5) == 0);
}

TEST_CASE("decision tree on pure labels is a single zero-impurity leaf") {
  const auto x = to_sparse({{1, 2}, {3, 4}, {5, 6}});
  const auto y = to_labels({1, 1, 1});
  const DecisionTree t = DecisionTree::fit(x, y, TreeParams{});
  REQUIRE(t.nodes().size() == 1);
  CHECK(t.nodes()[0].impurity == 0);
  CHECK(t.predict(x.row(0)).label == Label::positive);
  CHECK(t.predict(x.row(0)).score == 1.0);
  CHECK_THROWS_AS(DecisionTree::fit(SparseMatrix(2), {}, TreeParams{}), TrainingError);
}

TEST_CASE("root split equals the exhaustive best split") {
  Rng rng(31);
  for (int round = 0; round < 3000; ++round) {
    const std::size_t n = 2 + rng.below(19), d = 1 + rng.below(5);
    const Data data = random_set(rng, n, d, round % 3 == 0 ? 0 : 2 + static_cast<int>(rng.below(4)));
    for (Criterion c : {Criterion::gini, Criterion::entropy}) {
      for (int min_leaf : {1, 2}) {
        TreeParams p;
        p.criterion = c;
        p.min_samples_leaf = min_leaf;
        const DecisionTree t = DecisionTree::fit(to_sparse(data.rows), to_labels(data.y), p);
        const auto expected = oracle::best_root_split(data.rows, data.y, c == Criterion::entropy, min_leaf);
        const TreeNode& root = t.nodes()[0];
        if (!expected) {
          CHECK(root.is_leaf());
          continue;
        }
        REQUIRE_FALSE(root.is_leaf());
        CHECK(static_cast<std::size_t>(root.feature) == expected->feature);
        CHECK(root.threshold == doctest::Approx(expected->threshold).epsilon(1e-12));
        check_tree_invariants(t, c, min_leaf);
      }
    }
  }
}

TEST_CASE("gini and entropy agree on a separating two-point feature") {
  const auto x = to_sparse({{0, 5}, {1, 5}});
  const auto y = to_labels({0, 1});
  TreeParams g, e;
  e.criterion = Criterion::entropy;
  const DecisionTree tg = DecisionTree::fit(x, y, g), te = DecisionTree::fit(x, y, e);
  CHECK(tg.nodes()[0].feature == 0);
  CHECK(te.nodes()[0].feature == 0);
  CHECK(tg.nodes()[0].threshold == te.nodes()[0].threshold);
  CHECK(tg.nodes()[1].impurity == 0);
  CHECK(te.nodes()[2].impurity == 0);
}

TEST_CASE("tree stopping rules and ties") {
  // A 1-1 tie in a leaf predicts negative.
  const auto x = to_sparse({{1}, {1}});
  const DecisionTree t = DecisionTree::fit(x, to_labels({1, 0}), TreeParams{});
  CHECK(t.nodes().size() == 1);
  CHECK(t.predict(x.row(0)).label == Label::negative);
  CHECK(t.predict(x.row(0)).score == 0.5);

  Rng rng(2);
  const Data data = planted(rng, 200, 6);
  TreeParams stump;
  stump.max_depth = 1;
  CHECK(DecisionTree::fit(to_sparse(data.rows), to_labels(data.y), stump).depth() == 1);
  TreeParams big_split;
  big_split.min_samples_split = 1000;
  CHECK(DecisionTree::fit(to_sparse(data.rows), to_labels(data.y), big_split).nodes().size() == 1);
  TreeParams bad;
  bad.min_samples_split = 1;
  CHECK_THROWS_AS(DecisionTree::fit(to_sparse(data.rows), to_labels(data.y), bad), TrainingError);
}

TEST_CASE("tree invariants on random data, both splitters") {
  Rng rng(5);
  for (int round = 0; round < 200; ++round) {
    const Data data = random_set(rng, 5 + rng.below(60), 1 + rng.below(8), static_cast<int>(rng.below(5)));
    TreeParams p;
    p.criterion = rng.bernoulli(0.5) ? Criterion::gini : Criterion::entropy;
    p.splitter = rng.bernoulli(0.5) ? Splitter::best : Splitter::random;
    p.min_samples_leaf = 1 + static_cast<int>(rng.below(4));
    p.min_samples_split = 2 + static_cast<int>(rng.below(8));
    p.max_features = static_cast<MaxFeatures>(rng.below(4));
    const auto x = to_sparse(data.rows);
    const auto y = to_labels(data.y);
    const DecisionTree t = DecisionTree::fit(x, y, p, 77);
    check_tree_invariants(t, p.criterion, p.min_samples_leaf);
    CHECK(DecisionTree::fit(x, y, p, 77) == t);
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const Prediction pr = t.predict(x.row(r));
      CHECK(pr.score >= 0);
      CHECK(pr.score <= 1);
      CHECK((pr.label == Label::positive) == (pr.score > 0.5));
    }
  }
}

TEST_CASE("max_features resolution") {
  CHECK(resolve_max_features(MaxFeatures::sqrt, 1874) == 44);
  CHECK(resolve_max_features(MaxFeatures::auto_, 1874) == 44);
  CHECK(resolve_max_features(MaxFeatures::log2, 1874) == 11);
  CHECK(resolve_max_features(MaxFeatures::all, 7) == 7);
  CHECK(resolve_max_features(MaxFeatures::log2, 1) == 1);
}

TEST_CASE("forest of one full-feature tree equals the tree grown on its bootstrap") {
  Rng data_rng(9);
  const Data data = random_set(data_rng, 40, 4, 3);
  const auto x = to_sparse(data.rows);
  const auto y = to_labels(data.y);
  ForestParams fp;
  fp.n_estimators = 1;
  fp.max_features = MaxFeatures::all;
  const RandomForest f = RandomForest::fit(x, y, fp, 123);

  Rng rng(derive_seed(123, {0}));
  const auto weights = RandomForest::bootstrap_counts(x.rows(), rng);
  std::uint32_t total = 0;
  for (auto w : weights) total += w;
  CHECK(total == x.rows());
  const DecisionTree t = DecisionTree::grow(x, ColumnIndex(x), y, weights, RandomForest::tree_params(fp), rng);
  REQUIRE(f.trees().size() == 1);
  CHECK(f.trees()[0] == t);
}

TEST_CASE("forest vote rule") {
  // Ten stumps, seven voting positive everywhere.
  std::vector<DecisionTree> trees;
  for (int i = 0; i < 10; ++i) {
    TreeNode leaf;
    (i < 7 ? leaf.positive_weight : leaf.negative_weight) = 1;
    trees.emplace_back(std::vector<TreeNode>{leaf});
  }
  const RandomForest f(trees);
  const Prediction p = f.predict(SparseVector{});
  CHECK(p.score == doctest::Approx(0.7));
  CHECK(p.label == Label::positive);

  trees.resize(4);
  trees[2] = trees[3] = DecisionTree(std::vector<TreeNode>{TreeNode{-1, 0, -1, -1, 0, 1, 0}});
  const RandomForest tied(trees);
  CHECK(tied.predict(SparseVector{}).score == 0.5);
  CHECK(tied.predict(SparseVector{}).label == Label::negative);
  CHECK(tied.prefix_votes(SparseVector{}) == std::vector<std::uint32_t>{0, 1, 2, 2, 2});
}

TEST_CASE("forest fits planted signal and its prefixes equal smaller forests") {
  Rng rng(10);
  const Data data = planted(rng, 300, 30);
  const auto x = to_sparse(data.rows);
  const auto y = to_labels(data.y);
  ForestParams fp;
  fp.n_estimators = 30;
  const RandomForest f = RandomForest::fit(x, y, fp, 5);
  std::size_t correct = 0;
  for (std::size_t r = 0; r < x.rows(); ++r) correct += f.predict(x.row(r)).label == y[r];
  CHECK(static_cast<double>(correct) / static_cast<double>(x.rows()) >= 0.95);

  fp.n_estimators = 12;
  const RandomForest small = RandomForest::fit(x, y, fp, 5);
  for (std::size_t i = 0; i < small.trees().size(); ++i) CHECK(small.trees()[i] == f.trees()[i]);
  for (std::size_t r = 0; r < 20; ++r) {
    const auto votes = f.prefix_votes(x.row(r));
    std::uint32_t v = 0;
    for (const auto& t : small.trees()) v += t.predict(x.row(r)).label == Label::positive;
    CHECK(votes[12] == v);
    CHECK(votes.back() == static_cast<std::uint32_t>(std::lround(f.predict(x.row(r)).score * 30)));
  }
  CHECK(RandomForest::fit(x, y, fp, 5) == small);
}

TEST_CASE("gaussian nb matches the hand Bayes formula") {
  const std::vector<std::vector<double>> rows = {{1.0, 2.0}, {2.0, 1.5}, {1.5, 3.0}, {4.0, 0.5}, {5.0, 1.0}, {4.5, 0.0}};
  const std::vector<int> y = {1, 1, 1, 0, 0, 0};
  const auto x = to_sparse(rows);
  const GaussianNB nb = GaussianNB::fit(x, to_labels(y), NbParams{1e-9});
  CHECK(nb.stats(Label::positive).prior == doctest::Approx(0.5));
  const std::vector<std::vector<double>> queries = {{1.0, 2.0}, {3.0, 1.0}, {2.8, 1.2}, {0, 0}, {4.0, 3.0}};
  for (const auto& q : queries) {
    const double expected = oracle::nb_posterior(rows, y, q, 1e-9);
    CHECK(std::abs(nb.predict(to_sparse({q}).row(0)).score - expected) < 1e-9);
  }
}

TEST_CASE("gaussian nb symmetry, priors and zero rows") {
  // Classes mirrored about x = 2.
  const auto x = to_sparse({{0}, {1}, {3}, {4}});
  const GaussianNB nb = GaussianNB::fit(x, to_labels({1, 1, 0, 0}), NbParams{});
  CHECK(std::abs(nb.predict(to_sparse({{2}}).row(0)).score - 0.5) < 1e-9);

  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (int i = 0; i < 100; ++i) {
    rows.push_back({static_cast<double>(i % 7)});
    y.push_back(i < 30 ? 1 : 0);
  }
  const GaussianNB p = GaussianNB::fit(to_sparse(rows), to_labels(y), NbParams{});
  CHECK(p.stats(Label::positive).prior == doctest::Approx(0.3));
  CHECK(p.stats(Label::negative).prior == doctest::Approx(0.7));

  // A feature that is zero everywhere still yields a finite posterior.
  const GaussianNB z = GaussianNB::fit(to_sparse({{0, 1}, {0, 2}, {0, 5}}), to_labels({1, 0, 0}), NbParams{});
  const Prediction pz = z.predict(SparseVector{});
  CHECK(std::isfinite(pz.score));
  CHECK(pz.score > 0);
  CHECK(pz.score < 1);
  CHECK_THROWS_AS(GaussianNB::fit(x, to_labels({1, 1, 1, 1}), NbParams{}), TrainingError);
}

TEST_CASE("svm separates a 1-d pair and stays near the primal optimum") {
  const auto pair = to_sparse({{-2}, {3}});
  const auto pair_y = to_labels({0, 1});
  const LinearSvm s = LinearSvm::fit(pair, pair_y, SvmParams{}, 1);
  CHECK(s.predict(pair.row(0)).label == Label::negative);
  CHECK(s.predict(pair.row(1)).label == Label::positive);

  const std::vector<double> xs = {-3, -1, 1.5, 4};
  const std::vector<int> ys = {0, 0, 1, 1};
  std::vector<std::vector<double>> rows;
  for (double v : xs) rows.push_back({v});
  const auto x = to_sparse(rows);
  for (double c : {0.1, 1.0, 10.0}) {
    const LinearSvm m = LinearSvm::fit(x, to_labels(ys), SvmParams{c, SvmParams{}.epochs}, 3);
    const double got = oracle::svm_objective_1d(m.weights()[0], m.bias(), xs, ys, c);
    CHECK(got == doctest::Approx(LinearSvm::objective(m.weights(), m.bias(), x, to_labels(ys), c)));
    const double best = oracle::svm_grid_minimum_1d(xs, ys, c, 4, 6, 800);
    CHECK(got <= best * 1.05 + 1e-12);
  }
}

TEST_CASE("svm predictions are stable when C is scaled on separable data") {
  Rng rng(6);
  const Data data = planted(rng, 80, 5);
  const auto x = to_sparse(data.rows);
  const auto y = to_labels(data.y);
  const LinearSvm a = LinearSvm::fit(x, y, SvmParams{1.0, 100}, 4);
  const LinearSvm b = LinearSvm::fit(x, y, SvmParams{10.0, 100}, 4);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    CHECK(a.predict(x.row(r)).label == y[r]);
    CHECK(b.predict(x.row(r)).label == a.predict(x.row(r)).label);
  }
}

TEST_CASE("svm rejects bad input") {
  SparseMatrix x(1);
  SparseVector v;
  v.push(0, std::nan(""));
  x.append_row(v);
  x.append_row(SparseVector{});
  CHECK_THROWS_AS(LinearSvm::fit(x, to_labels({1, 0}), SvmParams{}, 0), TrainingError);
  CHECK_THROWS_AS(LinearSvm::fit(SparseMatrix(1), {}, SvmParams{}, 0), TrainingError);
}

TEST_CASE("trained models: determinism, label-score consistency, batch predict") {
  Rng rng(44);
  const Data data = planted(rng, 120, 12);
  const auto x = to_sparse(data.rows);
  const auto y = to_labels(data.y);
  TreeParams tp;
  tp.splitter = Splitter::random;
  tp.max_features = MaxFeatures::sqrt;
  const std::vector<Hyperparameters> cells = {ForestParams{15, MaxFeatures::log2}, tp, NbParams{1e-7}, SvmParams{1.0, 20}};
  for (const Hyperparameters& hp : cells) {
    const ModelSpec spec{hp, 99};
    const TrainedModel m = TrainedModel::train(spec, x, y);
    CHECK(TrainedModel::train(spec, x, y) == m);
    const auto batch = m.predict(x);
    CHECK(batch == predict_all(m, x));
    for (const Prediction& p : batch) {
      CHECK(std::isfinite(p.score));
      switch (spec.kind()) {
        case ClassifierKind::random_forest:
        case ClassifierKind::decision_tree:
          CHECK(p.score >= 0);
          CHECK(p.score <= 1);
          CHECK((p.label == Label::positive) == (p.score > 0.5));
          break;
        case ClassifierKind::gaussian_nb:
          CHECK(p.score > 0);
          CHECK(p.score < 1);
          CHECK((p.label == Label::positive) == (p.score >= 0.5));
          break;
        case ClassifierKind::svm:
          CHECK((p.label == Label::positive) == (p.score >= 0));
          break;
      }
    }
    CHECK_THROWS_AS(m.predict(SparseMatrix(x.cols() + 1)), ArtifactMismatch);
    SparseVector wide;
    wide.push(static_cast<std::uint32_t>(x.cols() + 4), 1.0);
    CHECK_THROWS_AS(m.predict(RowView(wide)), ArtifactMismatch);
  }
  CHECK_THROWS_AS(TrainedModel::train(ModelSpec{NbParams{}, 0}, x, to_labels(std::vector<int>(120, 1))), TrainingError);
}

TEST_CASE("model persistence round trip") {
  Rng rng(45);
  const Data data = planted(rng, 80, 10);
  const auto x = to_sparse(data.rows);
  const auto y = to_labels(data.y);
  fixture::TempDir dir;
  const std::vector<Hyperparameters> cells = {ForestParams{5, MaxFeatures::sqrt}, TreeParams{}, NbParams{}, SvmParams{}};
  for (const Hyperparameters& hp : cells) {
    TrainedModel m = TrainedModel::train(ModelSpec{hp, 7}, x, y);
    m.set_vocabulary_hash("0123456789abcdef");
    m.info().question = "rq1_t5";
    m.info().threshold = 5;
    m.save(dir / "m.json");
    const TrainedModel back = TrainedModel::load(dir / "m.json", std::string("0123456789abcdef"));
    CHECK(back == m);
    CHECK(back.predict(x) == m.predict(x));
    CHECK(back.info().threshold == 5);
    CHECK(back.to_json().dump() == m.to_json().dump());
    CHECK_THROWS_AS(TrainedModel::load(dir / "m.json", std::string("ffffffffffffffff")), ArtifactMismatch);
  }
  CHECK_THROWS_AS(TrainedModel::from_json(nlohmann::json::parse(R"({"format":"onboard-model/1","kind":"rf"})")),
                  InputError);
  CHECK_THROWS_AS(TrainedModel::from_json(nlohmann::json::parse("[]")), InputError);
}

TEST_CASE("hyperparameter JSON") {
  const auto j = hyperparameters_to_json(ForestParams{3000, MaxFeatures::log2});
  CHECK(j.dump() == R"({"n_estimators":3000,"max_features":"log2"})");
  const Hyperparameters back = hyperparameters_from_json(ClassifierKind::random_forest, j, true);
  CHECK(std::get<ForestParams>(back) == ForestParams{3000, MaxFeatures::log2});
  CHECK_THROWS_AS(hyperparameters_from_json(ClassifierKind::svm, nlohmann::json::parse(R"({"gamma":1})"), false),
                  std::invalid_argument);
  CHECK_THROWS_AS(hyperparameters_from_json(ClassifierKind::decision_tree,
                                            nlohmann::json::parse(R"({"criterion":"gini"})"), true),
                  std::invalid_argument);
  CHECK(describe(ForestParams{3000, MaxFeatures::log2}) == "n_estimators=3000 max_features=log2");
  CHECK(parse_kind("RandomForest") == ClassifierKind::random_forest);
  CHECK(parse_kind("gnb") == ClassifierKind::gaussian_nb);
  CHECK_THROWS_AS(parse_kind("knn"), std::invalid_argument);
}
