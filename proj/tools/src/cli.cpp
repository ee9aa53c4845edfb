#include "onboard_cli/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "onboard/corpus.hpp"
#include "onboard/errors.hpp"
#include "onboard/features.hpp"
#include "onboard/pipeline.hpp"
#include "onboard/roles.hpp"
#include "onboard/synthetic.hpp"

namespace onboard::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string input;
  std::string output_dir = ".";
  std::string output;
  std::string question = "rq1";
  std::vector<int> thresholds{1, 5, 10};
  std::string grid;
  std::uint64_t seed = 0;
  std::string classifier = "all";
  std::string metric = "precision";
  std::vector<std::string> params;
  std::string model;
  std::string vocabulary;
  int runs = 5;
  int folds = 10;
  double test_fraction = 0.15;
  std::uint32_t min_df = 1;
  SyntheticConfig synth;
  bool uneven = false;
};

std::string fmt(double v, int decimals = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

fs::path prepare_output_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw InputError("cannot create output directory " + dir + ": " + ec.message());
  return p;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path.string());
  return f;
}

QuestionKind question_kind(const std::string& q) { return q == "rq2" ? QuestionKind::rq2 : QuestionKind::rq1; }

std::vector<Question> questions(const Options& o) {
  std::vector<Question> qs;
  if (question_kind(o.question) == QuestionKind::rq2) {
    qs.push_back({QuestionKind::rq2, 1});
  } else {
    for (int t : o.thresholds) qs.push_back({QuestionKind::rq1, t});
  }
  return qs;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

int cmd_ingest(const Options& o, std::ostream& out) {
  const Dataset d = load_dataset(o.input);
  const DatasetStats s = compute_stats(d);
  const IrfStats irf = compute_irf(d);
  auto period = [&]() -> std::string {
    if (!s.period_start || !s.period_end) return "n/a";
    return format_month(month_of(*s.period_start)) + " - " + format_month(month_of(*s.period_end));
  };
  out << "project:               " << d.project() << '\n'
      << "issues:                " << s.issue_count << '\n'
      << "resolved issues:       " << s.resolved_count << '\n'
      << "contributors:          " << s.contributor_count << '\n'
      << "period:                " << period() << '\n'
      << "avg title length:      " << fmt(s.avg_title_chars) << " chars, " << fmt(s.avg_title_words) << " words\n"
      << "avg description length: " << fmt(s.avg_desc_chars) << " chars, " << fmt(s.avg_desc_words) << " words\n"
      << "contributors with >= 2 resolutions: " << irf.contributors.size() << '\n'
      << "IRF median (days):     avg " << fmt(irf.med.avg) << ", med " << fmt(irf.med.median) << ", sd "
      << fmt(irf.med.sd) << '\n'
      << "IRF average (days):    avg " << fmt(irf.avg.avg) << ", med " << fmt(irf.avg.median) << ", sd "
      << fmt(irf.avg.sd) << '\n';

  if (!o.output_dir.empty() && o.output_dir != ".") {
    const fs::path dir = prepare_output_dir(o.output_dir);
    ordered_json j;
    j["project"] = d.project();
    j["issue_count"] = s.issue_count;
    j["resolved_count"] = s.resolved_count;
    j["contributor_count"] = s.contributor_count;
    j["period_start"] = s.period_start ? json(format_rfc3339(*s.period_start)) : json(nullptr);
    j["period_end"] = s.period_end ? json(format_rfc3339(*s.period_end)) : json(nullptr);
    j["avg_title_chars"] = s.avg_title_chars;
    j["avg_title_words"] = s.avg_title_words;
    j["avg_description_chars"] = s.avg_desc_chars;
    j["avg_description_words"] = s.avg_desc_words;
    auto summary = [](const SummaryStats& x) {
      ordered_json k;
      k["avg"] = x.avg;
      k["median"] = x.median;
      k["sd"] = x.sd;
      return k;
    };
    j["irf_med"] = summary(irf.med);
    j["irf_avg"] = summary(irf.avg);
    open_output(dir / "stats.json") << j.dump(2) << '\n';

    auto csv = open_output(dir / "irf.csv");
    csv << "contributor_id,resolutions,irf_med_days,irf_avg_days\n";
    for (const ContributorIrf& c : irf.contributors) {
      csv << csv_field(c.contributor_id) << ',' << c.resolutions << ',' << fmt(c.irf_med, 6) << ','
          << fmt(c.irf_avg, 6) << '\n';
    }
  }
  return kOk;
}

int cmd_label(const Options& o, std::ostream& out) {
  const Dataset d = load_dataset(o.input);
  const fs::path dir = prepare_output_dir(o.output_dir);
  for (const Question& q : questions(o)) {
    const RoleLabeling l = label(d, q);
    auto f = open_output(dir / ("labels_" + q.name() + ".csv"));
    write_labeling_csv(l, f);
    out << q.name() << ": " << l.count(Label::positive) << " positive, " << l.count(Label::negative)
        << " negative\n";
  }
  return kOk;
}

std::vector<ClassifierKind> classifier_filter(const std::string& c) {
  if (c == "all") {
    return {ClassifierKind::random_forest, ClassifierKind::decision_tree, ClassifierKind::gaussian_nb,
            ClassifierKind::svm};
  }
  return {parse_kind(c)};
}

int cmd_benchmark(const Options& o, std::ostream& out, std::ostream& err) {
  const Dataset d = load_dataset(o.input);
  BenchmarkConfig cfg;
  cfg.question = question_kind(o.question);
  cfg.thresholds = o.thresholds;
  cfg.classifiers = classifier_filter(o.classifier);
  if (!o.grid.empty()) cfg.grids = load_grid_config(o.grid);
  cfg.seed = o.seed;
  cfg.metric = parse_metric(o.metric);
  cfg.runs = o.runs;
  cfg.folds = o.folds;
  cfg.test_fraction = o.test_fraction;
  cfg.min_df = o.min_df;

  const BenchmarkReport report = run_benchmark(d, cfg);
  const fs::path dir = prepare_output_dir(o.output_dir);
  {
    auto f = open_output(dir / "report.csv");
    write_report_csv(report, f);
  }
  open_output(dir / "report.json") << report_to_json(report).dump(2) << '\n';

  std::ostringstream table;
  write_report_csv(report, table);
  out << table.str();
  if (!report.complete) {
    err << "error: some sampling runs failed; see report.json diagnostics\n";
    return kPipeline;
  }
  return kOk;
}

json parse_param_value(const std::string& text) {
  if (text.empty()) throw UsageError("empty parameter value");
  std::size_t pos = 0;
  try {
    const long long i = std::stoll(text, &pos);
    if (pos == text.size()) return i;
  } catch (const std::exception&) {
  }
  try {
    const double v = std::stod(text, &pos);
    if (pos == text.size()) return v;
  } catch (const std::exception&) {
  }
  return text;
}

int cmd_train(const Options& o, std::ostream& out) {
  if (o.classifier == "all") throw UsageError("train needs a single --classifier");
  const ClassifierKind kind = parse_kind(o.classifier);
  if (question_kind(o.question) == QuestionKind::rq1 && o.thresholds.size() != 1) {
    throw UsageError("train needs exactly one --thresholds value");
  }
  json params = json::object();
  for (const std::string& p : o.params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--param expects name=value, got '" + p + "'");
    params[p.substr(0, eq)] = parse_param_value(p.substr(eq + 1));
  }
  Hyperparameters hp;
  try {
    hp = hyperparameters_from_json(kind, params, true);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const Dataset d = load_dataset(o.input);
  const Question q = questions(o).front();
  const RoleLabeling l = label(d, q);
  const TrainedBundle b = train_model(d, l, hp, o.seed, o.min_df);
  const fs::path dir = prepare_output_dir(o.output_dir);
  b.model.save(dir / "model.json");
  b.vocabulary.save(dir / "vocabulary.json");
  out << "trained " << display_name(kind) << " for " << q.name() << " on " << b.model.info().positive_count
      << " positive / " << b.model.info().negative_count << " negative balanced rows; vocabulary "
      << b.vocabulary.size() << " terms, hash " << b.vocabulary.hash() << '\n';
  return kOk;
}

int cmd_tag(const Options& o, std::ostream& out) {
  const fs::path vocab_path =
      o.vocabulary.empty() ? fs::path(o.model).parent_path() / "vocabulary.json" : fs::path(o.vocabulary);
  const Vocabulary v = Vocabulary::load(vocab_path);
  const TrainedModel m = TrainedModel::load(o.model, v.hash());
  const Dataset d = load_dataset(o.input);
  const auto tagged = tag_issues(m, v, d);

  const fs::path dir = prepare_output_dir(o.output_dir);
  auto f = open_output(dir / "tags.csv");
  f << "issue_id,score,label\n";
  std::size_t positives = 0;
  for (const TaggedIssue& t : tagged) {
    f << csv_field(t.issue_id) << ',' << fmt(t.prediction.score, 6) << ',' << to_string(t.prediction.label) << '\n';
    if (t.prediction.label == Label::positive) ++positives;
  }
  out << "tagged " << tagged.size() << " unresolved issues; " << positives << " recommended for newcomers\n";
  return kOk;
}

int cmd_synth(const Options& o, std::ostream& out) {
  SyntheticConfig cfg = o.synth;
  cfg.seed = o.seed;
  cfg.even_load = !o.uneven;
  Dataset d;
  try {
    d = generate_synthetic(cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const fs::path path(o.output);
  if (path.has_parent_path()) prepare_output_dir(path.parent_path().string());
  save_dataset(d, path);
  out << "wrote " << d.issues().size() << " issues (" << d.resolved_count() << " resolved, "
      << d.contributors().size() << " contributors) to " << o.output << '\n';
  return kOk;
}

void add_common(CLI::App* c, Options& o) {
  c->add_option("--input", o.input, "Issue export (JSON Lines)")->required()->check(CLI::ExistingFile);
  c->add_option("--output-dir", o.output_dir, "Directory for output files");
}

void add_question(CLI::App* c, Options& o) {
  c->add_option("--question", o.question, "Labeling question")->check(CLI::IsMember({"rq1", "rq2"}));
  c->add_option("--thresholds", o.thresholds, "Newcomer thresholds for rq1")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Newcomer issue classification toolkit", "onboard"};
  app.require_subcommand(1);
  Options o;

  auto* ingest = app.add_subcommand("ingest", "Validate an issue export and print dataset statistics");
  add_common(ingest, o);

  auto* lab = app.add_subcommand("label", "Write role labels for rq1 thresholds or rq2");
  add_common(lab, o);
  add_question(lab, o);

  const std::vector<std::string> kinds{"rf", "dt", "gnb", "svm", "all"};
  auto* bench = app.add_subcommand("benchmark", "Split, balance, grid-search and evaluate all classifiers");
  add_common(bench, o);
  add_question(bench, o);
  bench->add_option("--grid", o.grid, "Grid config (JSON)")->check(CLI::ExistingFile);
  bench->add_option("--seed", o.seed, "Master seed")->required();
  bench->add_option("--classifier", o.classifier, "Classifier filter")->check(CLI::IsMember(kinds));
  bench->add_option("--metric", o.metric, "Grid-search score")->check(CLI::IsMember({"precision", "recall", "f1"}));
  bench->add_option("--runs", o.runs, "Sampling runs")->check(CLI::PositiveNumber);
  bench->add_option("--folds", o.folds, "Cross-validation folds")->check(CLI::Range(2, 1000));
  bench->add_option("--test-fraction", o.test_fraction, "Held-out fraction")->check(CLI::Range(0.0, 1.0));
  bench->add_option("--min-df", o.min_df, "Minimum document frequency for vocabulary terms");

  auto* train = app.add_subcommand("train", "Fit one classifier configuration and persist it");
  add_common(train, o);
  add_question(train, o);
  train->add_option("--classifier", o.classifier, "Classifier kind")
      ->required()
      ->check(CLI::IsMember({"rf", "dt", "gnb", "svm"}));
  train->add_option("--param", o.params, "Hyperparameter name=value (repeatable)");
  train->add_option("--seed", o.seed, "Seed")->required();
  train->add_option("--min-df", o.min_df, "Minimum document frequency for vocabulary terms");

  auto* tag = app.add_subcommand("tag", "Rank unresolved issues with a trained rq1 model");
  add_common(tag, o);
  tag->add_option("--model", o.model, "model.json from train")->required()->check(CLI::ExistingFile);
  tag->add_option("--vocabulary", o.vocabulary, "vocabulary.json (default: next to the model)");

  auto* synth = app.add_subcommand("synth", "Generate a planted-signal synthetic issue export");
  synth->add_option("--output", o.output, "Output JSON Lines file")->required();
  synth->add_option("--seed", o.seed, "Seed")->required();
  synth->add_option("--project", o.synth.project, "Project name");
  synth->add_option("--contributors", o.synth.contributors, "Number of resolvers");
  synth->add_option("--issues", o.synth.resolved_issues, "Resolved issues");
  synth->add_option("--unresolved", o.synth.unresolved_issues, "Unresolved issues");
  synth->add_option("--threshold", o.synth.newcomer_threshold, "Newcomer threshold the marker follows");
  synth->add_option("--marker", o.synth.marker, "Marker word");
  synth->add_option("--marker-positive", o.synth.marker_positive, "Marker rate among newcomer issues");
  synth->add_option("--marker-negative", o.synth.marker_negative, "Marker rate among other issues");
  synth->add_option("--vocabulary-size", o.synth.background_vocabulary, "Background word count");
  synth->add_flag("--uneven", o.uneven, "Heavy-tailed issues per contributor");

  std::vector<const char*> argv{"onboard"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  if (ingest->parsed()) return cmd_ingest(o, out);
  if (lab->parsed()) return cmd_label(o, out);
  if (bench->parsed()) return cmd_benchmark(o, out, err);
  if (train->parsed()) return cmd_train(o, out);
  if (tag->parsed()) return cmd_tag(o, out);
  return cmd_synth(o, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const SchemaError& e) {
    err << "error: invalid input, " << e.what() << '\n';
    return kInputSchema;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputSchema;
  } catch (const ArtifactMismatch& e) {
    err << "error: " << e.what() << '\n';
    return kArtifactMismatch;
  } catch (const TrainingError& e) {
    err << "error: " << e.what() << '\n';
    return kPipeline;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kPipeline;
  }
}

}  // namespace onboard::cli
