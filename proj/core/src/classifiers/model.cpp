#include "onboard/classifiers/model.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include "onboard/errors.hpp"

namespace onboard {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

int get_int(const json& v, const std::string& name, int min_value) {
  if (!v.is_number_integer() && !(v.is_number_float() && v.get<double>() == static_cast<int>(v.get<double>()))) {
    throw std::invalid_argument(name + " must be an integer");
  }
  const int x = v.is_number_integer() ? v.get<int>() : static_cast<int>(v.get<double>());
  if (x < min_value) throw std::invalid_argument(name + " must be >= " + std::to_string(min_value));
  return x;
}

double get_positive(const json& v, const std::string& name, bool allow_zero) {
  if (!v.is_number()) throw std::invalid_argument(name + " must be a number");
  const double x = v.get<double>();
  if (!(x > 0 || (allow_zero && x == 0))) throw std::invalid_argument(name + " must be positive");
  return x;
}

std::string get_string(const json& v, const std::string& name) {
  if (!v.is_string()) throw std::invalid_argument(name + " must be a string");
  return v.get<std::string>();
}

ordered_json tree_to_json(const DecisionTree& t) {
  ordered_json j;
  std::vector<int> feature, left, right;
  std::vector<double> threshold, pos, neg, imp;
  for (const TreeNode& n : t.nodes()) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    pos.push_back(n.positive_weight);
    neg.push_back(n.negative_weight);
    imp.push_back(n.impurity);
  }
  j["feature"] = feature;
  j["threshold"] = threshold;
  j["left"] = left;
  j["right"] = right;
  j["positive"] = pos;
  j["negative"] = neg;
  j["impurity"] = imp;
  return j;
}

DecisionTree tree_from_json(const json& j, std::size_t n_features) {
  const auto feature = j.at("feature").get<std::vector<int>>();
  const auto threshold = j.at("threshold").get<std::vector<double>>();
  const auto left = j.at("left").get<std::vector<int>>();
  const auto right = j.at("right").get<std::vector<int>>();
  const auto pos = j.at("positive").get<std::vector<double>>();
  const auto neg = j.at("negative").get<std::vector<double>>();
  const auto imp = j.at("impurity").get<std::vector<double>>();
  const std::size_t n = feature.size();
  if (n == 0 || threshold.size() != n || left.size() != n || right.size() != n || pos.size() != n ||
      neg.size() != n || imp.size() != n) {
    throw InputError("model: inconsistent tree arrays");
  }
  std::vector<TreeNode> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    TreeNode& node = nodes[i];
    node.feature = feature[i];
    node.threshold = threshold[i];
    node.left = left[i];
    node.right = right[i];
    node.positive_weight = pos[i];
    node.negative_weight = neg[i];
    node.impurity = imp[i];
    if (node.feature >= 0) {
      // Children are always created after their parent.
      if (static_cast<std::size_t>(node.feature) >= n_features || node.left <= static_cast<int>(i) ||
          node.right <= static_cast<int>(i) || static_cast<std::size_t>(node.left) >= n ||
          static_cast<std::size_t>(node.right) >= n) {
        throw InputError("model: invalid tree node " + std::to_string(i));
      }
    }
  }
  return DecisionTree(std::move(nodes));
}

ordered_json fitted_to_json(const FittedModel& f) {
  ordered_json j;
  if (auto* rf = std::get_if<RandomForest>(&f)) {
    ordered_json trees = ordered_json::array();
    for (const DecisionTree& t : rf->trees()) trees.push_back(tree_to_json(t));
    j["trees"] = std::move(trees);
  } else if (auto* dt = std::get_if<DecisionTree>(&f)) {
    j = tree_to_json(*dt);
  } else if (auto* nb = std::get_if<GaussianNB>(&f)) {
    j["epsilon"] = nb->epsilon();
    ordered_json classes = ordered_json::array();
    for (Label l : {Label::negative, Label::positive}) {
      ordered_json c;
      c["label"] = to_string(l);
      c["prior"] = nb->stats(l).prior;
      c["mean"] = nb->stats(l).mean;
      c["variance"] = nb->stats(l).variance;
      classes.push_back(std::move(c));
    }
    j["classes"] = std::move(classes);
  } else if (auto* svm = std::get_if<LinearSvm>(&f)) {
    j["weights"] = svm->weights();
    j["bias"] = svm->bias();
  }
  return j;
}

FittedModel fitted_from_json(ClassifierKind kind, const json& j, std::size_t n_features) {
  switch (kind) {
    case ClassifierKind::random_forest: {
      std::vector<DecisionTree> trees;
      for (const json& t : j.at("trees")) trees.push_back(tree_from_json(t, n_features));
      return RandomForest(std::move(trees));
    }
    case ClassifierKind::decision_tree:
      return tree_from_json(j, n_features);
    case ClassifierKind::gaussian_nb: {
      std::array<GaussianNB::ClassStats, 2> classes;
      const json& cs = j.at("classes");
      if (cs.size() != 2) throw InputError("model: GaussianNB needs two classes");
      for (std::size_t c = 0; c < 2; ++c) {
        classes[c].prior = cs[c].at("prior").get<double>();
        classes[c].mean = cs[c].at("mean").get<std::vector<double>>();
        classes[c].variance = cs[c].at("variance").get<std::vector<double>>();
        if (classes[c].mean.size() != n_features || classes[c].variance.size() != n_features) {
          throw InputError("model: GaussianNB parameter length mismatch");
        }
      }
      return GaussianNB(std::move(classes), j.at("epsilon").get<double>());
    }
    case ClassifierKind::svm: {
      auto w = j.at("weights").get<std::vector<double>>();
      if (w.size() != n_features) throw InputError("model: SVM weight length mismatch");
      return LinearSvm(std::move(w), j.at("bias").get<double>());
    }
  }
  throw InputError("model: unknown kind");
}

}  // namespace

ordered_json hyperparameters_to_json(const Hyperparameters& hp) {
  ordered_json j = ordered_json::object();
  if (auto* f = std::get_if<ForestParams>(&hp)) {
    j["n_estimators"] = f->n_estimators;
    j["max_features"] = to_string(f->max_features);
  } else if (auto* t = std::get_if<TreeParams>(&hp)) {
    j["criterion"] = to_string(t->criterion);
    j["splitter"] = to_string(t->splitter);
    j["min_samples_split"] = t->min_samples_split;
    j["min_samples_leaf"] = t->min_samples_leaf;
    j["max_features"] = to_string(t->max_features);
    j["max_depth"] = t->max_depth;
  } else if (auto* n = std::get_if<NbParams>(&hp)) {
    j["var_smoothing"] = n->var_smoothing;
  } else if (auto* s = std::get_if<SvmParams>(&hp)) {
    j["C"] = s->c;
    j["epochs"] = s->epochs;
  }
  return j;
}

Hyperparameters hyperparameters_from_json(ClassifierKind kind, const json& obj, bool require_all) {
  if (!obj.is_object()) throw std::invalid_argument("hyperparameters must be an object");
  std::set<std::string> required, optional;
  switch (kind) {
    case ClassifierKind::random_forest:
      required = {"n_estimators", "max_features"};
      break;
    case ClassifierKind::decision_tree:
      required = {"criterion", "splitter", "min_samples_split", "min_samples_leaf"};
      optional = {"max_features", "max_depth"};
      break;
    case ClassifierKind::gaussian_nb:
      required = {"var_smoothing"};
      break;
    case ClassifierKind::svm:
      required = {"C"};
      optional = {"epochs"};
      break;
  }
  for (const auto& [name, value] : obj.items()) {
    if (!required.count(name) && !optional.count(name)) {
      throw std::invalid_argument(std::string("unknown hyperparameter '") + name + "' for " + short_name(kind));
    }
  }
  if (require_all) {
    for (const auto& name : required) {
      if (!obj.contains(name)) {
        throw std::invalid_argument("missing hyperparameter '" + name + "' for " + short_name(kind));
      }
    }
  }
  auto has = [&](const char* name) { return obj.contains(name); };

  switch (kind) {
    case ClassifierKind::random_forest: {
      ForestParams p;
      if (has("n_estimators")) p.n_estimators = get_int(obj["n_estimators"], "n_estimators", 1);
      if (has("max_features")) p.max_features = parse_max_features(get_string(obj["max_features"], "max_features"));
      return p;
    }
    case ClassifierKind::decision_tree: {
      TreeParams p;
      if (has("criterion")) p.criterion = parse_criterion(get_string(obj["criterion"], "criterion"));
      if (has("splitter")) p.splitter = parse_splitter(get_string(obj["splitter"], "splitter"));
      if (has("min_samples_split")) p.min_samples_split = get_int(obj["min_samples_split"], "min_samples_split", 2);
      if (has("min_samples_leaf")) p.min_samples_leaf = get_int(obj["min_samples_leaf"], "min_samples_leaf", 1);
      if (has("max_features")) p.max_features = parse_max_features(get_string(obj["max_features"], "max_features"));
      if (has("max_depth")) p.max_depth = get_int(obj["max_depth"], "max_depth", 0);
      return p;
    }
    case ClassifierKind::gaussian_nb: {
      NbParams p;
      if (has("var_smoothing")) p.var_smoothing = get_positive(obj["var_smoothing"], "var_smoothing", true);
      return p;
    }
    case ClassifierKind::svm: {
      SvmParams p;
      if (has("C")) p.c = get_positive(obj["C"], "C", false);
      if (has("epochs")) p.epochs = get_int(obj["epochs"], "epochs", 1);
      return p;
    }
  }
  throw std::invalid_argument("unknown classifier kind");
}

TrainedModel TrainedModel::train(const ModelSpec& spec, const SparseMatrix& x, std::span<const Label> y) {
  if (x.rows() == 0) throw TrainingError("empty training set");
  if (x.rows() != y.size()) throw TrainingError("row/label count mismatch");
  TrainedModel m;
  m.spec_ = spec;
  m.n_features_ = x.cols();
  for (Label l : y) ++(l == Label::positive ? m.info_.positive_count : m.info_.negative_count);
  if (m.info_.positive_count == 0 || m.info_.negative_count == 0) {
    throw TrainingError("training data must contain both classes");
  }
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, ForestParams>) {
          m.fitted_ = RandomForest::fit(x, y, p, spec.seed);
        } else if constexpr (std::is_same_v<P, TreeParams>) {
          m.fitted_ = DecisionTree::fit(x, y, p, spec.seed);
        } else if constexpr (std::is_same_v<P, NbParams>) {
          m.fitted_ = GaussianNB::fit(x, y, p);
        } else {
          m.fitted_ = LinearSvm::fit(x, y, p, spec.seed);
        }
      },
      spec.params);
  return m;
}

Prediction TrainedModel::predict(RowView row) const {
  if (!row.indices.empty() && row.indices.back() >= n_features_) {
    throw ArtifactMismatch("feature row exceeds the model's " + std::to_string(n_features_) + " columns");
  }
  return std::visit([&](const auto& f) { return f.predict(row); }, fitted_);
}

std::vector<Prediction> TrainedModel::predict(const SparseMatrix& rows) const {
  if (rows.cols() != n_features_) {
    throw ArtifactMismatch("dimension mismatch: rows have " + std::to_string(rows.cols()) +
                           " columns, model expects " + std::to_string(n_features_));
  }
  std::vector<Prediction> out;
  out.reserve(rows.rows());
  std::visit(
      [&](const auto& f) {
        for (std::size_t r = 0; r < rows.rows(); ++r) out.push_back(f.predict(rows.row(r)));
      },
      fitted_);
  return out;
}

ordered_json TrainedModel::to_json() const {
  ordered_json j;
  j["format"] = "onboard-model/1";
  j["kind"] = short_name(spec_.kind());
  j["hyperparameters"] = hyperparameters_to_json(spec_.params);
  j["seed"] = spec_.seed;
  j["n_features"] = n_features_;
  j["vocabulary_hash"] = vocabulary_hash_;
  ordered_json info;
  info["question"] = info_.question;
  info["threshold"] = info_.threshold;
  info["project"] = info_.project;
  info["positive_count"] = info_.positive_count;
  info["negative_count"] = info_.negative_count;
  info["data_until"] = info_.data_until;
  j["training"] = std::move(info);
  j["parameters"] = fitted_to_json(fitted_);
  return j;
}

TrainedModel TrainedModel::from_json(const json& j, const std::optional<std::string>& expected_vocabulary_hash) {
  TrainedModel m;
  try {
    if (j.at("format").get<std::string>() != "onboard-model/1") throw InputError("model: unsupported format");
    const ClassifierKind kind = parse_kind(j.at("kind").get<std::string>());
    m.spec_.params = hyperparameters_from_json(kind, j.at("hyperparameters"), true);
    m.spec_.seed = j.at("seed").get<std::uint64_t>();
    m.n_features_ = j.at("n_features").get<std::size_t>();
    m.vocabulary_hash_ = j.at("vocabulary_hash").get<std::string>();
    const json& info = j.at("training");
    m.info_.question = info.at("question").get<std::string>();
    m.info_.threshold = info.at("threshold").get<int>();
    m.info_.project = info.at("project").get<std::string>();
    m.info_.positive_count = info.at("positive_count").get<std::size_t>();
    m.info_.negative_count = info.at("negative_count").get<std::size_t>();
    m.info_.data_until = info.at("data_until").get<std::string>();
    m.fitted_ = fitted_from_json(kind, j.at("parameters"), m.n_features_);
  } catch (const json::exception& e) {
    throw InputError(std::string("model: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("model: ") + e.what());
  }
  if (expected_vocabulary_hash && *expected_vocabulary_hash != m.vocabulary_hash_) {
    throw ArtifactMismatch("vocabulary hash mismatch: model was trained with " + m.vocabulary_hash_ +
                           ", got " + *expected_vocabulary_hash);
  }
  return m;
}

void TrainedModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << to_json().dump() << '\n';
}

TrainedModel TrainedModel::load(const std::filesystem::path& path,
                                const std::optional<std::string>& expected_vocabulary_hash) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return from_json(j, expected_vocabulary_hash);
}

}  // namespace onboard
