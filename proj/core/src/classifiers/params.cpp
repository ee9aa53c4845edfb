#include "onboard/classifiers/params.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace onboard {

std::size_t resolve_max_features(MaxFeatures m, std::size_t d) {
  if (d == 0) return 0;
  std::size_t k = d;
  switch (m) {
    case MaxFeatures::all:
      k = d;
      break;
    case MaxFeatures::sqrt:
    case MaxFeatures::auto_:
      k = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
      break;
    case MaxFeatures::log2:
      k = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(d))));
      break;
  }
  if (k < 1) k = 1;
  return k > d ? d : k;
}

ClassifierKind kind_of(const Hyperparameters& hp) {
  switch (hp.index()) {
    case 0:
      return ClassifierKind::random_forest;
    case 1:
      return ClassifierKind::decision_tree;
    case 2:
      return ClassifierKind::gaussian_nb;
    default:
      return ClassifierKind::svm;
  }
}

const char* short_name(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::random_forest:
      return "rf";
    case ClassifierKind::decision_tree:
      return "dt";
    case ClassifierKind::gaussian_nb:
      return "gnb";
    case ClassifierKind::svm:
      return "svm";
  }
  return "?";
}

const char* display_name(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::random_forest:
      return "RandomForest";
    case ClassifierKind::decision_tree:
      return "DecisionTree";
    case ClassifierKind::gaussian_nb:
      return "GaussianNB";
    case ClassifierKind::svm:
      return "SVM";
  }
  return "?";
}

ClassifierKind parse_kind(const std::string& name) {
  for (auto k : {ClassifierKind::random_forest, ClassifierKind::decision_tree, ClassifierKind::gaussian_nb,
                 ClassifierKind::svm}) {
    if (name == short_name(k) || name == display_name(k)) return k;
  }
  throw std::invalid_argument("unknown classifier '" + name + "'");
}

const char* to_string(Criterion c) { return c == Criterion::gini ? "gini" : "entropy"; }
const char* to_string(Splitter s) { return s == Splitter::best ? "best" : "random"; }
const char* to_string(MaxFeatures m) {
  switch (m) {
    case MaxFeatures::all:
      return "all";
    case MaxFeatures::sqrt:
      return "sqrt";
    case MaxFeatures::log2:
      return "log2";
    case MaxFeatures::auto_:
      return "auto";
  }
  return "?";
}

Criterion parse_criterion(const std::string& s) {
  if (s == "gini") return Criterion::gini;
  if (s == "entropy") return Criterion::entropy;
  throw std::invalid_argument("criterion must be gini or entropy, got '" + s + "'");
}

Splitter parse_splitter(const std::string& s) {
  if (s == "best") return Splitter::best;
  if (s == "random") return Splitter::random;
  throw std::invalid_argument("splitter must be best or random, got '" + s + "'");
}

MaxFeatures parse_max_features(const std::string& s) {
  if (s == "all" || s == "none" || s == "None") return MaxFeatures::all;
  if (s == "sqrt") return MaxFeatures::sqrt;
  if (s == "log2") return MaxFeatures::log2;
  if (s == "auto") return MaxFeatures::auto_;
  throw std::invalid_argument("max_features must be all, sqrt, log2 or auto, got '" + s + "'");
}

std::string describe(const Hyperparameters& hp) {
  std::ostringstream os;
  if (auto* f = std::get_if<ForestParams>(&hp)) {
    os << "n_estimators=" << f->n_estimators << " max_features=" << to_string(f->max_features);
  } else if (auto* t = std::get_if<TreeParams>(&hp)) {
    os << "criterion=" << to_string(t->criterion) << " splitter=" << to_string(t->splitter)
       << " min_samples_split=" << t->min_samples_split << " min_samples_leaf=" << t->min_samples_leaf;
    if (t->max_features != MaxFeatures::all) os << " max_features=" << to_string(t->max_features);
    if (t->max_depth > 0) os << " max_depth=" << t->max_depth;
  } else if (auto* n = std::get_if<NbParams>(&hp)) {
    os << "var_smoothing=" << n->var_smoothing;
  } else if (auto* s = std::get_if<SvmParams>(&hp)) {
    os << "C=" << s->c << " epochs=" << s->epochs;
  }
  return os.str();
}

}  // namespace onboard
