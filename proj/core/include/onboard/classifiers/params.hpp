#pragma once

#include <cstddef>
#include <string>
#include <variant>

#include "onboard/roles.hpp"

namespace onboard {

struct Prediction {
  Label label = Label::negative;
  /// Higher means more positive. Forest: positive-vote share; tree: leaf
  /// positive fraction; GaussianNB: positive posterior; SVM: margin w.x + b.
  double score = 0;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

enum class Criterion { gini, entropy };
enum class Splitter { best, random };
/// auto is an alias of sqrt.
enum class MaxFeatures { all, sqrt, log2, auto_ };

/// Candidate features per split: sqrt -> ceil(sqrt(d)), log2 -> ceil(log2(d)),
/// never below 1 or above d.
std::size_t resolve_max_features(MaxFeatures m, std::size_t d);

struct TreeParams {
  Criterion criterion = Criterion::gini;
  Splitter splitter = Splitter::best;
  int min_samples_split = 2;
  int min_samples_leaf = 1;
  MaxFeatures max_features = MaxFeatures::all;
  int max_depth = 0;  // 0 = unlimited

  friend bool operator==(const TreeParams&, const TreeParams&) = default;
};

struct ForestParams {
  int n_estimators = 100;
  MaxFeatures max_features = MaxFeatures::sqrt;

  friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

struct NbParams {
  double var_smoothing = 1e-9;

  friend bool operator==(const NbParams&, const NbParams&) = default;
};

struct SvmParams {
  double c = 1.0;
  int epochs = 500;

  friend bool operator==(const SvmParams&, const SvmParams&) = default;
};

enum class ClassifierKind { random_forest, decision_tree, gaussian_nb, svm };

/// One full hyperparameter assignment; the alternative determines the kind.
using Hyperparameters = std::variant<ForestParams, TreeParams, NbParams, SvmParams>;

ClassifierKind kind_of(const Hyperparameters& hp);

/// "rf", "dt", "gnb", "svm"
const char* short_name(ClassifierKind k);
/// "RandomForest", "DecisionTree", "GaussianNB", "SVM"
const char* display_name(ClassifierKind k);
/// Accepts short or display names, case-sensitive. Throws std::invalid_argument.
ClassifierKind parse_kind(const std::string& name);

const char* to_string(Criterion c);
const char* to_string(Splitter s);
const char* to_string(MaxFeatures m);
Criterion parse_criterion(const std::string& s);
Splitter parse_splitter(const std::string& s);
MaxFeatures parse_max_features(const std::string& s);

/// "n_estimators=3000 max_features=log2"
std::string describe(const Hyperparameters& hp);

}  // namespace onboard
