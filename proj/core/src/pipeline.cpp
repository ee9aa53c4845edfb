#include "onboard/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>

#include "onboard/errors.hpp"
#include "onboard/parallel.hpp"
#include "onboard/rng.hpp"

namespace onboard {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::array<std::vector<std::size_t>, 2> by_class(std::span<const std::size_t> positions,
                                                 std::span<const Label> labels) {
  std::array<std::vector<std::size_t>, 2> out;
  for (std::size_t p : positions) out[static_cast<std::size_t>(labels[p])].push_back(p);
  return out;
}

std::vector<std::size_t> iota_positions(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

}  // namespace

Split stratified_split(std::span<const Label> labels, const SplitPlan& plan) {
  if (!(plan.test_fraction > 0 && plan.test_fraction < 1)) {
    throw std::invalid_argument("test_fraction must lie in (0, 1)");
  }
  const auto all = iota_positions(labels.size());
  auto classes = by_class(all, labels);
  for (const auto& c : classes) {
    if (c.size() < 2) {
      throw TrainingError("single-class labeling: each class needs at least 2 issues to split (got " +
                          std::to_string(classes[1].size()) + " positive, " + std::to_string(classes[0].size()) +
                          " negative)");
    }
  }

  const double n = static_cast<double>(labels.size());
  const auto total_test = static_cast<std::size_t>(std::floor(plan.test_fraction * n + 0.5));
  std::array<std::size_t, 2> take{};
  std::array<double, 2> frac{};
  for (std::size_t c = 0; c < 2; ++c) {
    const double exact = plan.test_fraction * static_cast<double>(classes[c].size());
    take[c] = static_cast<std::size_t>(std::floor(exact));
    frac[c] = exact - std::floor(exact);
  }
  std::size_t assigned = take[0] + take[1];
  // Largest remainder; the positive class wins exact ties.
  const std::array<std::size_t, 2> order = frac[1] >= frac[0] ? std::array<std::size_t, 2>{1, 0}
                                                               : std::array<std::size_t, 2>{0, 1};
  for (std::size_t c : order) {
    if (assigned < total_test) {
      ++take[c];
      ++assigned;
    }
  }
  for (std::size_t c = 0; c < 2; ++c) take[c] = std::clamp<std::size_t>(take[c], 1, classes[c].size() - 1);

  Rng rng(plan.seed);
  Split s;
  for (std::size_t c : {std::size_t{1}, std::size_t{0}}) {
    auto members = classes[c];
    rng.shuffle(members);
    s.test.insert(s.test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take[c]));
    s.train.insert(s.train.end(), members.begin() + static_cast<std::ptrdiff_t>(take[c]), members.end());
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

BalancedSample balance(std::span<const std::size_t> train, std::span<const Label> labels, std::uint64_t seed) {
  auto classes = by_class(train, labels);
  if (classes[0].empty() || classes[1].empty()) {
    throw TrainingError("cannot balance a single-class training set");
  }
  // Positive is the minority when the classes are equal.
  const std::size_t minority = classes[1].size() <= classes[0].size() ? 1 : 0;
  const std::size_t majority = 1 - minority;
  const std::size_t target = std::min(2 * classes[minority].size(), classes[majority].size());

  Rng rng(seed);
  BalancedSample b;
  b.target_size = target;
  b.seed = seed;
  b.rows.reserve(2 * target);

  auto& mino = classes[minority];
  rng.shuffle(mino);
  for (std::size_t i = 0; i < target; ++i) b.rows.push_back(mino[i % mino.size()]);

  auto& majo = classes[majority];
  for (std::size_t i = 0; i < target; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(majo.size() - i));
    std::swap(majo[i], majo[j]);
    b.rows.push_back(majo[i]);
  }
  b.labels.reserve(b.rows.size());
  for (std::size_t p : b.rows) b.labels.push_back(labels[p]);
  return b;
}

std::vector<Fold> kfold(std::span<const Label> sample_labels, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("k must be at least 2");
  const auto kk = static_cast<std::size_t>(k);
  auto classes = by_class(iota_positions(sample_labels.size()), sample_labels);
  for (const auto& c : classes) {
    if (c.size() < kk) {
      throw TrainingError("a class has " + std::to_string(c.size()) + " samples, fewer than " +
                          std::to_string(k) + " folds");
    }
  }
  Rng rng(seed);
  std::vector<std::size_t> fold_of(sample_labels.size());
  std::size_t next = 0;
  for (std::size_t c : {std::size_t{1}, std::size_t{0}}) {
    rng.shuffle(classes[c]);
    for (std::size_t p : classes[c]) fold_of[p] = next++ % kk;
  }
  std::vector<Fold> folds(kk);
  for (std::size_t p = 0; p < fold_of.size(); ++p) {
    for (std::size_t f = 0; f < kk; ++f) (f == fold_of[p] ? folds[f].validation : folds[f].train).push_back(p);
  }
  return folds;
}

Confusion confusion(std::span<const Label> truth, std::span<const Label> predicted) {
  if (truth.size() != predicted.size()) throw std::invalid_argument("confusion: length mismatch");
  Confusion c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool t = truth[i] == Label::positive, p = predicted[i] == Label::positive;
    if (t && p) ++c.tp;
    else if (!t && p) ++c.fp;
    else if (t) ++c.fn;
    else ++c.tn;
  }
  return c;
}

Metrics metrics_from(const Confusion& c) {
  Metrics m;
  const auto tp = static_cast<double>(c.tp);
  if (c.tp + c.fp > 0) m.precision = tp / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) m.recall = tp / static_cast<double>(c.tp + c.fn);
  if (m.precision + m.recall > 0) m.f1 = 2 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

Metrics evaluate(const TrainedModel& m, const SparseMatrix& rows, std::span<const Label> labels) {
  if (rows.rows() != labels.size()) throw std::invalid_argument("evaluate: length mismatch");
  std::vector<Label> predicted;
  predicted.reserve(labels.size());
  for (const Prediction& p : m.predict(rows)) predicted.push_back(p.label);
  return metrics_from(confusion(labels, predicted));
}

const char* to_string(ScoringMetric m) {
  switch (m) {
    case ScoringMetric::precision: return "precision";
    case ScoringMetric::recall: return "recall";
    case ScoringMetric::f1: return "f1";
  }
  return "?";
}

ScoringMetric parse_metric(const std::string& s) {
  if (s == "precision") return ScoringMetric::precision;
  if (s == "recall") return ScoringMetric::recall;
  if (s == "f1") return ScoringMetric::f1;
  throw std::invalid_argument("unknown metric '" + s + "'");
}

double score_of(const Metrics& m, ScoringMetric metric) {
  switch (metric) {
    case ScoringMetric::precision: return m.precision;
    case ScoringMetric::recall: return m.recall;
    case ScoringMetric::f1: return m.f1;
  }
  return 0;
}

namespace {

const std::vector<std::string>& canonical_params(ClassifierKind kind) {
  static const std::vector<std::string> rf{"n_estimators", "max_features"};
  static const std::vector<std::string> dt{"criterion",        "splitter",     "min_samples_split",
                                           "min_samples_leaf", "max_features", "max_depth"};
  static const std::vector<std::string> gnb{"var_smoothing"};
  static const std::vector<std::string> svm{"C", "epochs"};
  switch (kind) {
    case ClassifierKind::random_forest: return rf;
    case ClassifierKind::decision_tree: return dt;
    case ClassifierKind::gaussian_nb: return gnb;
    case ClassifierKind::svm: return svm;
  }
  return rf;
}

constexpr ClassifierKind kAllKinds[] = {ClassifierKind::random_forest, ClassifierKind::decision_tree,
                                        ClassifierKind::gaussian_nb, ClassifierKind::svm};

Grid expand_grid(ClassifierKind kind, const json& axes) {
  if (!axes.is_object()) throw InputError(std::string("grid for ") + short_name(kind) + " must be an object");
  std::vector<std::pair<std::string, std::vector<json>>> dims;
  for (const auto& name : canonical_params(kind)) {
    if (!axes.contains(name)) continue;
    const json& v = axes.at(name);
    std::vector<json> values = v.is_array() ? v.get<std::vector<json>>() : std::vector<json>{v};
    if (values.empty()) throw InputError("grid parameter '" + name + "' has no values");
    dims.emplace_back(name, std::move(values));
  }
  for (const auto& [name, value] : axes.items()) {
    const auto& known = canonical_params(kind);
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw InputError("unknown grid parameter '" + name + "' for " + short_name(kind));
    }
  }
  Grid grid;
  std::vector<std::size_t> idx(dims.size(), 0);
  while (true) {
    json cell = json::object();
    for (std::size_t i = 0; i < dims.size(); ++i) cell[dims[i].first] = dims[i].second[idx[i]];
    try {
      grid.push_back(hyperparameters_from_json(kind, cell, false));
    } catch (const std::invalid_argument& e) {
      throw InputError(std::string("grid for ") + short_name(kind) + ": " + e.what());
    }
    std::size_t i = dims.size();
    while (i > 0) {
      --i;
      if (++idx[i] < dims[i].second.size()) break;
      idx[i] = 0;
      if (i == 0) return grid;
    }
    if (dims.empty()) return grid;
  }
}

}  // namespace

Grid default_grid(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::random_forest:
      return expand_grid(kind, json{{"n_estimators", {100, 1000, 3000}}, {"max_features", {"auto", "sqrt", "log2"}}});
    case ClassifierKind::decision_tree:
      return expand_grid(kind, json{{"criterion", {"gini", "entropy"}},
                                    {"splitter", {"best", "random"}},
                                    {"min_samples_split", {2, 5, 10}},
                                    {"min_samples_leaf", {1, 2, 4}}});
    case ClassifierKind::gaussian_nb:
      return expand_grid(kind, json{{"var_smoothing", {1e-9, 1e-7, 1e-5}}});
    case ClassifierKind::svm:
      return expand_grid(kind, json{{"C", {0.1, 1, 10}}});
  }
  return {};
}

GridConfig default_grid_config() {
  GridConfig g;
  for (ClassifierKind k : kAllKinds) g.grids[k] = default_grid(k);
  return g;
}

GridConfig parse_grid_config(const json& j) {
  if (!j.is_object()) throw InputError("grid config must be a JSON object");
  GridConfig g = default_grid_config();
  for (const auto& [key, axes] : j.items()) {
    ClassifierKind kind;
    try {
      kind = parse_kind(key);
    } catch (const std::invalid_argument&) {
      throw InputError("unknown classifier '" + key + "' in grid config");
    }
    g.grids[kind] = expand_grid(kind, axes);
  }
  return g;
}

GridConfig load_grid_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open grid config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return parse_grid_config(j);
}

GridSearchResult grid_search(const SparseMatrix& x, std::span<const Label> y, std::span<const Fold> folds,
                             const Grid& grid, std::uint64_t seed, ScoringMetric metric) {
  if (grid.empty()) throw std::invalid_argument("grid_search: empty grid");
  if (folds.empty()) throw std::invalid_argument("grid_search: no folds");
  if (x.rows() != y.size()) throw std::invalid_argument("grid_search: row/label count mismatch");

  struct FoldData {
    SparseMatrix train_x, valid_x;
    std::vector<Label> train_y, valid_y;
  };
  std::vector<FoldData> data(folds.size());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    data[f].train_x = x.select_rows(folds[f].train);
    data[f].valid_x = x.select_rows(folds[f].validation);
    for (std::size_t p : folds[f].train) data[f].train_y.push_back(y[p]);
    for (std::size_t p : folds[f].validation) data[f].valid_y.push_back(y[p]);
  }

  // Cells that differ only in n_estimators share one fit per fold: tree i
  // depends on (seed, i) alone, so smaller forests are prefixes of the
  // largest. Cells with identical effective parameters share a fit too.
  struct Family {
    Hyperparameters fit;
    std::vector<std::size_t> cells;
  };
  auto family_key = [](Hyperparameters hp) {
    if (auto* f = std::get_if<ForestParams>(&hp)) {
      if (f->max_features == MaxFeatures::auto_) f->max_features = MaxFeatures::sqrt;
      f->n_estimators = 0;
    } else if (auto* t = std::get_if<TreeParams>(&hp)) {
      if (t->max_features == MaxFeatures::auto_) t->max_features = MaxFeatures::sqrt;
    }
    return hp;
  };
  std::vector<Family> families;
  std::vector<Hyperparameters> keys;
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    const Hyperparameters key = family_key(grid[cell]);
    auto it = std::find(keys.begin(), keys.end(), key);
    if (it == keys.end()) {
      keys.push_back(key);
      families.push_back({grid[cell], {}});
      it = keys.end() - 1;
    }
    Family& fam = families[static_cast<std::size_t>(it - keys.begin())];
    fam.cells.push_back(cell);
    if (auto* f = std::get_if<ForestParams>(&fam.fit)) {
      f->n_estimators = std::max(f->n_estimators, std::get<ForestParams>(grid[cell]).n_estimators);
    }
  }

  const std::size_t k = folds.size();
  std::vector<Metrics> fold_metrics(grid.size() * k);
  std::vector<std::string> errors(grid.size() * k);
  parallel_for(families.size() * k, [&](std::size_t task) {
    const Family& fam = families[task / k];
    const std::size_t f = task % k;
    const FoldData& fd = data[f];
    try {
      const TrainedModel m = TrainedModel::train({fam.fit, derive_seed(seed, {f})}, fd.train_x, fd.train_y);
      const auto* forest = std::get_if<RandomForest>(&m.fitted());
      if (!forest) {
        const Metrics met = evaluate(m, fd.valid_x, fd.valid_y);
        for (std::size_t cell : fam.cells) fold_metrics[cell * k + f] = met;
        return;
      }
      const std::size_t rows = fd.valid_x.rows();
      std::vector<std::vector<std::uint32_t>> votes(rows);
      for (std::size_t r = 0; r < rows; ++r) votes[r] = forest->prefix_votes(fd.valid_x.row(r));
      for (std::size_t cell : fam.cells) {
        const auto n = static_cast<std::size_t>(std::get<ForestParams>(grid[cell]).n_estimators);
        std::vector<Label> predicted(rows);
        for (std::size_t r = 0; r < rows; ++r) {
          predicted[r] = 2 * votes[r][n] > n ? Label::positive : Label::negative;
        }
        fold_metrics[cell * k + f] = metrics_from(confusion(fd.valid_y, predicted));
      }
    } catch (const std::exception& e) {
      for (std::size_t cell : fam.cells) errors[cell * k + f] = "fold " + std::to_string(f) + ": " + e.what();
    }
  });

  GridSearchResult out;
  out.results.resize(grid.size());
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    CvResult& r = out.results[cell];
    r.cell = grid[cell];
    for (std::size_t f = 0; f < k; ++f) {
      if (!errors[cell * k + f].empty() && r.diagnostic.empty()) r.diagnostic = errors[cell * k + f];
      r.folds.push_back(fold_metrics[cell * k + f]);
    }
    if (r.diagnostic.empty()) {
      double sum = 0;
      for (const Metrics& m : r.folds) sum += score_of(m, metric);
      r.score = sum / static_cast<double>(k);
    }
    if (r.score > out.results[out.best].score) out.best = cell;
  }
  return out;
}

namespace {

std::vector<std::size_t> unique_sorted(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

Metrics mean_of(const std::vector<RunResult>& runs) {
  Metrics m;
  std::size_t n = 0;
  for (const RunResult& r : runs) {
    if (!r.ok) continue;
    m.precision += r.test.precision;
    m.recall += r.test.recall;
    m.f1 += r.test.f1;
    ++n;
  }
  if (n > 0) {
    m.precision /= static_cast<double>(n);
    m.recall /= static_cast<double>(n);
    m.f1 /= static_cast<double>(n);
  }
  return m;
}

std::size_t modal_cell(const std::vector<RunResult>& runs, std::size_t grid_size) {
  std::vector<std::size_t> votes(grid_size, 0);
  for (const RunResult& r : runs) {
    if (r.ok) ++votes[r.best_cell];
  }
  return static_cast<std::size_t>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

std::vector<Question> questions_for(const BenchmarkConfig& c) {
  std::vector<Question> qs;
  if (c.question == QuestionKind::rq2) {
    qs.push_back({QuestionKind::rq2, 1});
  } else {
    for (int t : c.thresholds) qs.push_back({QuestionKind::rq1, t});
  }
  return qs;
}

}  // namespace

BenchmarkReport run_benchmark(const Dataset& d, const BenchmarkConfig& config, FitAudit* audit) {
  if (config.runs < 1) throw std::invalid_argument("runs must be >= 1");
  BenchmarkReport report;
  report.project = d.project();
  report.config = config;

  const FeatureExtractor extractor;
  const std::vector<IssueText> texts = extractor.extract_all(d);
  FitAudit local_audit;
  FitAudit& au = audit ? *audit : local_audit;

  for (const Question& q : questions_for(config)) {
    const RoleLabeling labeling = label(d, q);
    std::vector<Label> labels;
    std::vector<std::size_t> issue_of;
    for (const LabeledIssue& e : labeling.entries) {
      labels.push_back(e.label);
      issue_of.push_back(e.issue_index);
    }

    ThresholdResult tr;
    tr.question = q;
    tr.positives = labeling.count(Label::positive);
    tr.negatives = labeling.count(Label::negative);
    tr.split_seed = derive_seed(config.seed, {0, static_cast<std::uint64_t>(q.threshold)});
    const Split split = stratified_split(labels, {config.test_fraction, tr.split_seed, true});
    tr.train_size = split.train.size();
    tr.test_size = split.test.size();

    auto& fit_seen = au.fit_issues[q.name()];
    auto& test_seen = au.test_issues[q.name()];
    fit_seen.assign(d.issues().size(), false);
    test_seen.assign(d.issues().size(), false);
    for (std::size_t p : split.test) test_seen[issue_of[p]] = true;
    auto record_fit = [&](std::span<const std::size_t> positions) {
      for (std::size_t p : positions) {
        if (test_seen[issue_of[p]]) {
          throw std::logic_error("leakage: held-out issue " + labeling.entries[p].issue_id + " used in a fit");
        }
        fit_seen[issue_of[p]] = true;
      }
    };

    std::vector<Label> test_labels;
    for (std::size_t p : split.test) test_labels.push_back(labels[p]);

    for (ClassifierKind kind : config.classifiers) {
      ClassifierResult cr;
      cr.kind = kind;
      cr.grid = config.grids.grid(kind);
      tr.classifiers.push_back(std::move(cr));
    }

    for (int run = 0; run < config.runs; ++run) {
      const auto run_u = static_cast<std::uint64_t>(run);
      const std::uint64_t sampling_seed = derive_seed(config.seed, {1, static_cast<std::uint64_t>(q.threshold), run_u});
      const BalancedSample sample = balance(split.train, labels, sampling_seed);
      record_fit(sample.rows);

      const auto distinct = unique_sorted(sample.rows);
      record_fit(distinct);
      std::vector<TokenizedDoc> docs;
      docs.reserve(distinct.size());
      for (std::size_t p : distinct) docs.push_back(texts[issue_of[p]].doc);
      const Vocabulary vocab = build_vocabulary(docs, config.min_df);

      SparseMatrix train_x(feature_count(vocab));
      for (std::size_t p : sample.rows) train_x.append_row(feature_row(texts[issue_of[p]], vocab));
      SparseMatrix test_x(feature_count(vocab));
      for (std::size_t p : split.test) test_x.append_row(feature_row(texts[issue_of[p]], vocab));

      const auto folds = kfold(sample.labels, config.folds,
                               derive_seed(config.seed, {2, static_cast<std::uint64_t>(q.threshold), run_u}));
      for (const Fold& f : folds) {
        for (std::size_t i : f.train) record_fit(std::span<const std::size_t>(&sample.rows[i], 1));
      }

      for (std::size_t ci = 0; ci < tr.classifiers.size(); ++ci) {
        ClassifierResult& cr = tr.classifiers[ci];
        RunResult rr;
        rr.run = run;
        rr.sampling_seed = sampling_seed;
        rr.per_class = sample.target_size;
        rr.vocabulary_size = vocab.size();
        rr.vocabulary_hash = vocab.hash();
        const std::uint64_t model_seed =
            derive_seed(config.seed, {3, static_cast<std::uint64_t>(q.threshold), run_u, static_cast<std::uint64_t>(cr.kind)});
        try {
          const GridSearchResult gs = grid_search(train_x, sample.labels, folds, cr.grid, model_seed, config.metric);
          rr.best_cell = gs.best;
          rr.cv_score = gs.results[gs.best].score;
          const TrainedModel m =
              TrainedModel::train({cr.grid[gs.best], derive_seed(model_seed, {folds.size()})}, train_x, sample.labels);
          rr.test = evaluate(m, test_x, test_labels);
        } catch (const std::exception& e) {
          rr.ok = false;
          rr.diagnostic = e.what();
          report.complete = false;
        }
        cr.runs.push_back(std::move(rr));
      }
    }
    for (ClassifierResult& cr : tr.classifiers) {
      cr.mean = mean_of(cr.runs);
      cr.modal_cell = modal_cell(cr.runs, cr.grid.size());
    }
    report.results.push_back(std::move(tr));
  }
  return report;
}

namespace {

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

ordered_json metrics_json(const Metrics& m) {
  ordered_json j;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
  return j;
}

std::string question_column(const Question& q) { return q.kind == QuestionKind::rq1 ? "rq1" : "rq2"; }

std::string threshold_column(const Question& q) {
  return q.kind == QuestionKind::rq1 ? std::to_string(q.threshold) : std::string();
}

}  // namespace

void write_report_csv(const BenchmarkReport& report, std::ostream& out) {
  out << "project,question,threshold,classifier,precision,recall,f1,best\n";
  for (const ThresholdResult& tr : report.results) {
    double top = -1;
    for (const ClassifierResult& cr : tr.classifiers) top = std::max(top, cr.mean.precision);
    for (const ClassifierResult& cr : tr.classifiers) {
      std::string project = report.project;
      if (project.find_first_of(",\"\n") != std::string::npos) {
        std::string quoted = "\"";
        for (char ch : project) {
          if (ch == '"') quoted += '"';
          quoted += ch;
        }
        project = quoted + "\"";
      }
      out << project << ',' << question_column(tr.question) << ',' << threshold_column(tr.question) << ','
          << display_name(cr.kind) << ',' << fixed6(cr.mean.precision) << ',' << fixed6(cr.mean.recall) << ','
          << fixed6(cr.mean.f1) << ',' << (cr.mean.precision == top ? "yes" : "no") << '\n';
    }
  }
}

ordered_json report_to_json(const BenchmarkReport& report) {
  const BenchmarkConfig& c = report.config;
  ordered_json j;
  j["project"] = report.project;
  j["question"] = c.question == QuestionKind::rq1 ? "rq1" : "rq2";
  j["complete"] = report.complete;
  ordered_json cfg;
  cfg["seed"] = c.seed;
  cfg["test_fraction"] = c.test_fraction;
  cfg["runs"] = c.runs;
  cfg["folds"] = c.folds;
  cfg["metric"] = to_string(c.metric);
  cfg["min_df"] = c.min_df;
  if (c.question == QuestionKind::rq1) cfg["thresholds"] = c.thresholds;
  j["config"] = std::move(cfg);

  ordered_json results = ordered_json::array();
  for (const ThresholdResult& tr : report.results) {
    ordered_json t;
    t["question"] = tr.question.name();
    if (tr.question.kind == QuestionKind::rq1) t["threshold"] = tr.question.threshold;
    t["positives"] = tr.positives;
    t["negatives"] = tr.negatives;
    t["train_size"] = tr.train_size;
    t["test_size"] = tr.test_size;
    t["split_seed"] = tr.split_seed;
    ordered_json classifiers = ordered_json::array();
    for (const ClassifierResult& cr : tr.classifiers) {
      ordered_json cj;
      cj["classifier"] = display_name(cr.kind);
      cj["mean"] = metrics_json(cr.mean);
      cj["modal_best"] = hyperparameters_to_json(cr.grid[cr.modal_cell]);
      cj["grid_size"] = cr.grid.size();
      ordered_json runs = ordered_json::array();
      for (const RunResult& r : cr.runs) {
        ordered_json rj;
        rj["run"] = r.run;
        rj["sampling_seed"] = r.sampling_seed;
        rj["per_class"] = r.per_class;
        rj["vocabulary_size"] = r.vocabulary_size;
        rj["vocabulary_hash"] = r.vocabulary_hash;
        rj["ok"] = r.ok;
        if (r.ok) {
          rj["best"] = hyperparameters_to_json(cr.grid[r.best_cell]);
          rj["cv_score"] = r.cv_score;
          rj["test"] = metrics_json(r.test);
        } else {
          rj["diagnostic"] = r.diagnostic;
        }
        runs.push_back(std::move(rj));
      }
      cj["runs"] = std::move(runs);
      classifiers.push_back(std::move(cj));
    }
    t["classifiers"] = std::move(classifiers);
    results.push_back(std::move(t));
  }
  j["results"] = std::move(results);
  return j;
}

TrainedBundle train_model(const Dataset& d, const RoleLabeling& labeling, const Hyperparameters& params,
                          std::uint64_t seed, std::uint32_t min_df, const FeatureExtractor& extractor) {
  std::vector<Label> labels;
  for (const LabeledIssue& e : labeling.entries) labels.push_back(e.label);
  const auto all = iota_positions(labels.size());
  const BalancedSample sample = balance(all, labels, derive_seed(seed, {0}));

  std::vector<IssueText> texts;
  texts.reserve(labels.size());
  for (const LabeledIssue& e : labeling.entries) texts.push_back(extractor.extract(d.issues()[e.issue_index]));

  std::vector<TokenizedDoc> docs;
  for (std::size_t p : unique_sorted(sample.rows)) docs.push_back(texts[p].doc);
  TrainedBundle out;
  out.vocabulary = build_vocabulary(docs, min_df);

  SparseMatrix x(feature_count(out.vocabulary));
  for (std::size_t p : sample.rows) x.append_row(feature_row(texts[p], out.vocabulary));
  out.model = TrainedModel::train({params, derive_seed(seed, {1})}, x, sample.labels);
  out.model.set_vocabulary_hash(out.vocabulary.hash());

  TrainingInfo& info = out.model.info();
  info.question = labeling.question.name();
  info.threshold = labeling.question.threshold;
  info.project = d.project();
  std::optional<Timestamp> latest;
  for (const LabeledIssue& e : labeling.entries) {
    const auto& r = d.issues()[e.issue_index].resolved_at;
    if (r && (!latest || latest->epoch_ms < r->epoch_ms)) latest = r;
  }
  info.data_until = latest ? format_rfc3339(*latest) : std::string();
  return out;
}

void rank_tagged(std::vector<TaggedIssue>& tagged) {
  std::sort(tagged.begin(), tagged.end(), [](const TaggedIssue& a, const TaggedIssue& b) {
    if (a.prediction.score != b.prediction.score) return a.prediction.score > b.prediction.score;
    return a.issue_id < b.issue_id;
  });
}

std::vector<TaggedIssue> tag_issues(const TrainedModel& m, const Vocabulary& v, const Dataset& d,
                                    const FeatureExtractor& extractor) {
  if (v.hash() != m.vocabulary_hash()) {
    throw ArtifactMismatch("vocabulary hash " + v.hash() + " does not match the model's " + m.vocabulary_hash());
  }
  std::vector<TaggedIssue> out;
  for (const Issue& issue : d.issues()) {
    if (issue.resolved_at) continue;
    out.push_back({issue.id, m.predict(feature_row(extractor.extract(issue), v))});
  }
  rank_tagged(out);
  return out;
}

}  // namespace onboard
