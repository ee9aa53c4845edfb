#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "onboard/classifiers/decision_tree.hpp"
#include "onboard/classifiers/gaussian_nb.hpp"
#include "onboard/classifiers/linear_svm.hpp"
#include "onboard/classifiers/params.hpp"
#include "onboard/classifiers/random_forest.hpp"

namespace onboard {

struct ModelSpec {
  Hyperparameters params;
  std::uint64_t seed = 0;

  ClassifierKind kind() const { return kind_of(params); }
  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Flat {"name": value} object in canonical parameter order.
nlohmann::ordered_json hyperparameters_to_json(const Hyperparameters& hp);

/// Reads a flat {"name": value} object. Unknown names and invalid values
/// throw std::invalid_argument; so do missing grid parameters when
/// require_all is set (optional knobs such as max_depth keep defaults).
Hyperparameters hyperparameters_from_json(ClassifierKind kind, const nlohmann::json& obj, bool require_all);

/// Metadata carried with a fitted model. Contains no wall-clock time so
/// that persisted models are reproducible.
struct TrainingInfo {
  std::size_t positive_count = 0;
  std::size_t negative_count = 0;
  std::string question;       // e.g. "rq1_t5"
  int threshold = 0;
  std::string project;
  std::string data_until;     // latest resolved_at among training issues

  friend bool operator==(const TrainingInfo&, const TrainingInfo&) = default;
};

using FittedModel = std::variant<RandomForest, DecisionTree, GaussianNB, LinearSvm>;

class TrainedModel {
 public:
  TrainedModel() = default;

  /// Dispatches on spec.params. Throws TrainingError.
  static TrainedModel train(const ModelSpec& spec, const SparseMatrix& x, std::span<const Label> y);

  /// Throws ArtifactMismatch when the row references columns past n_features().
  Prediction predict(RowView row) const;
  /// Throws ArtifactMismatch unless rows.cols() == n_features().
  std::vector<Prediction> predict(const SparseMatrix& rows) const;

  const ModelSpec& spec() const noexcept { return spec_; }
  const FittedModel& fitted() const noexcept { return fitted_; }
  std::size_t n_features() const noexcept { return n_features_; }

  const std::string& vocabulary_hash() const noexcept { return vocabulary_hash_; }
  void set_vocabulary_hash(std::string h) { vocabulary_hash_ = std::move(h); }
  TrainingInfo& info() noexcept { return info_; }
  const TrainingInfo& info() const noexcept { return info_; }

  nlohmann::ordered_json to_json() const;
  /// Throws InputError on malformed documents and ArtifactMismatch when
  /// expected_vocabulary_hash is given and differs from the stored one.
  static TrainedModel from_json(const nlohmann::json& j,
                                const std::optional<std::string>& expected_vocabulary_hash = std::nullopt);
  void save(const std::filesystem::path& path) const;
  static TrainedModel load(const std::filesystem::path& path,
                           const std::optional<std::string>& expected_vocabulary_hash = std::nullopt);

  friend bool operator==(const TrainedModel&, const TrainedModel&) = default;

 private:
  ModelSpec spec_;
  FittedModel fitted_;
  std::size_t n_features_ = 0;
  std::string vocabulary_hash_;
  TrainingInfo info_;
};

inline std::vector<Prediction> predict(const TrainedModel& m, const SparseMatrix& rows) { return m.predict(rows); }

}  // namespace onboard
