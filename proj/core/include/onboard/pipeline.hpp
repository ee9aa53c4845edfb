#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "onboard/classifiers/model.hpp"
#include "onboard/corpus.hpp"
#include "onboard/features.hpp"
#include "onboard/roles.hpp"

namespace onboard {

// Positions below index into a label sequence (for the benchmark, the
// entries of a RoleLabeling), never into the dataset directly.

struct SplitPlan {
  double test_fraction = 0.15;
  std::uint64_t seed = 0;
  bool stratified = true;
};

struct Split {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

/// Per-class proportional test allocation; the rounding remainder goes to
/// the class with the larger fractional part (positive first on a tie).
/// Each class keeps at least one member on both sides. Throws
/// TrainingError when a class has fewer than 2 members and
/// std::invalid_argument for a fraction outside (0, 1).
Split stratified_split(std::span<const Label> labels, const SplitPlan& plan);

struct BalancedSample {
  std::vector<std::size_t> rows;  // positions; minority duplicates allowed
  std::vector<Label> labels;      // parallel to rows
  std::size_t target_size = 0;    // per class
  std::uint64_t seed = 0;
};

/// target = min(2 * minority, majority). The minority is shuffled once and
/// repeated cyclically up to target; the majority is sampled without
/// replacement. Throws TrainingError unless both classes are in `train`.
BalancedSample balance(std::span<const std::size_t> train, std::span<const Label> labels, std::uint64_t seed);

struct Fold {
  std::vector<std::size_t> train;       // positions into the sample, ascending
  std::vector<std::size_t> validation;  // positions into the sample, ascending
};

/// Stratified k-fold over sample positions. Each class is shuffled and
/// dealt round-robin, the negatives continuing where the positives ended,
/// so fold sizes differ by at most one. Throws TrainingError when a class
/// has fewer than k members.
std::vector<Fold> kfold(std::span<const Label> sample_labels, int k, std::uint64_t seed);

struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

/// Throws std::invalid_argument on a length mismatch.
Confusion confusion(std::span<const Label> truth, std::span<const Label> predicted);

/// Positive-class metrics; each ratio is 0 when its denominator is 0.
struct Metrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  friend bool operator==(const Metrics&, const Metrics&) = default;
};

Metrics metrics_from(const Confusion& c);
Metrics evaluate(const TrainedModel& m, const SparseMatrix& rows, std::span<const Label> labels);

enum class ScoringMetric { precision, recall, f1 };
const char* to_string(ScoringMetric m);
ScoringMetric parse_metric(const std::string& s);
double score_of(const Metrics& m, ScoringMetric metric);

/// One hyperparameter assignment per cell, in cartesian-product order.
using Grid = std::vector<Hyperparameters>;

Grid default_grid(ClassifierKind kind);

/// Grids keyed by kind; kinds missing from a config use default_grid.
struct GridConfig {
  std::map<ClassifierKind, Grid> grids;
  const Grid& grid(ClassifierKind kind) const { return grids.at(kind); }
};

GridConfig default_grid_config();

/// {"rf": {"n_estimators": [100, 1000], "max_features": ["sqrt"]}, ...}.
/// A parameter missing from a kind's object keeps its default value; the
/// product varies the last canonical parameter fastest. Throws InputError.
GridConfig parse_grid_config(const nlohmann::json& j);
GridConfig load_grid_config(const std::filesystem::path& path);

struct CvResult {
  Hyperparameters cell;
  std::vector<Metrics> folds;
  double score = 0;         // mean of the scoring metric over folds
  std::string diagnostic;   // non-empty when training failed
};

struct GridSearchResult {
  std::size_t best = 0;  // index into the grid
  std::vector<CvResult> results;
};

/// Every fold trains on x rows `fold.train` with seed derive_seed(seed,
/// {fold index}). Cells and folds run in parallel; reduction is by index.
/// A training failure scores the cell 0 and records the message. Ties in
/// score go to the earliest cell. Throws std::invalid_argument on an empty
/// grid or fold list.
GridSearchResult grid_search(const SparseMatrix& x, std::span<const Label> y, std::span<const Fold> folds,
                             const Grid& grid, std::uint64_t seed,
                             ScoringMetric metric = ScoringMetric::precision);

struct BenchmarkConfig {
  QuestionKind question = QuestionKind::rq1;
  std::vector<int> thresholds{1, 5, 10};  // ignored for rq2
  std::vector<ClassifierKind> classifiers{ClassifierKind::random_forest, ClassifierKind::decision_tree,
                                          ClassifierKind::gaussian_nb, ClassifierKind::svm};
  GridConfig grids = default_grid_config();
  std::uint64_t seed = 0;
  double test_fraction = 0.15;
  int runs = 5;
  int folds = 10;
  ScoringMetric metric = ScoringMetric::precision;
  std::uint32_t min_df = 1;
};

struct RunResult {
  int run = 0;
  std::uint64_t sampling_seed = 0;
  std::size_t per_class = 0;  // balanced size of each class
  std::size_t vocabulary_size = 0;
  std::string vocabulary_hash;
  std::size_t best_cell = 0;
  double cv_score = 0;
  Metrics test;
  bool ok = true;
  std::string diagnostic;
};

struct ClassifierResult {
  ClassifierKind kind{};
  Grid grid;
  std::vector<RunResult> runs;
  Metrics mean;              // over successful runs; the headline number
  std::size_t modal_cell = 0;  // most frequent winner, earliest on a tie
};

struct ThresholdResult {
  Question question;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::uint64_t split_seed = 0;
  std::vector<ClassifierResult> classifiers;
};

struct BenchmarkReport {
  std::string project;
  BenchmarkConfig config;
  std::vector<ThresholdResult> results;
  bool complete = true;
};

/// Ids each threshold's fits touched, for the no-leakage check. Indices
/// refer to Dataset::issues().
struct FitAudit {
  std::map<std::string, std::vector<bool>> fit_issues;   // keyed by question name
  std::map<std::string, std::vector<bool>> test_issues;
};

/// Per threshold: label, split once, then for each sampling run balance,
/// rebuild the vocabulary from the balanced rows, build features, and for
/// each classifier grid-search, refit the winner on the whole balanced
/// sample and evaluate on the held-out split. Throws TrainingError when a
/// labeling cannot be split; later per-run failures are recorded and the
/// report is marked incomplete. Throws std::logic_error if a fit ever sees
/// a held-out issue.
BenchmarkReport run_benchmark(const Dataset& d, const BenchmarkConfig& config, FitAudit* audit = nullptr);

/// project,question,threshold,classifier,precision,recall,f1,best
/// The best column flags every classifier tied for the highest mean
/// precision within a threshold.
void write_report_csv(const BenchmarkReport& report, std::ostream& out);
nlohmann::ordered_json report_to_json(const BenchmarkReport& report);

struct TrainedBundle {
  TrainedModel model;
  Vocabulary vocabulary;
};

/// Balances the whole labeling with derive_seed(seed, {0}), builds the
/// vocabulary from the balanced issues and fits with derive_seed(seed, {1}).
TrainedBundle train_model(const Dataset& d, const RoleLabeling& labeling, const Hyperparameters& params,
                          std::uint64_t seed, std::uint32_t min_df = 1,
                          const FeatureExtractor& extractor = FeatureExtractor{});

struct TaggedIssue {
  std::string issue_id;
  Prediction prediction;
};

/// Sorts by descending score, then ascending id.
void rank_tagged(std::vector<TaggedIssue>& tagged);

/// Scores the dataset's unresolved issues. Throws ArtifactMismatch when the
/// vocabulary hash differs from the model's.
std::vector<TaggedIssue> tag_issues(const TrainedModel& m, const Vocabulary& v, const Dataset& d,
                                    const FeatureExtractor& extractor = FeatureExtractor{});

}  // namespace onboard
