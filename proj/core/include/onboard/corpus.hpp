#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "onboard/time.hpp"

namespace onboard {

struct Issue {
  std::string id;
  std::string project;
  std::string title;
  std::string description;
  std::optional<std::string> resolver_id;
  Timestamp created_at;
  std::optional<Timestamp> resolved_at;

  bool resolved() const noexcept { return resolved_at.has_value(); }

  friend bool operator==(const Issue&, const Issue&) = default;
};

/// Validated, immutable issue collection for one project.
///
/// Issues are ordered by (resolved_at, id) ascending with unresolved issues
/// last (ordered by id among themselves).
class Dataset {
 public:
  Dataset() = default;

  /// Validates the issue invariants and sorts. Throws SchemaError with
  /// line 0 when a violation is found (records have no line context here).
  Dataset(std::string project, std::vector<Issue> issues);

  const std::string& project() const noexcept { return project_; }
  const std::vector<Issue>& issues() const noexcept { return issues_; }
  std::size_t size() const noexcept { return issues_.size(); }
  std::size_t resolved_count() const noexcept { return resolved_count_; }

  /// Distinct resolver ids, sorted.
  const std::vector<std::string>& contributors() const noexcept { return contributors_; }

  /// Position of an issue id in issues(), if present.
  std::optional<std::size_t> find(const std::string& id) const;

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.project_ == b.project_ && a.issues_ == b.issues_;
  }

 private:
  std::string project_;
  std::vector<Issue> issues_;
  std::vector<std::string> contributors_;
  std::vector<std::size_t> by_id_;  // positions sorted by id
  std::size_t resolved_count_ = 0;
};

/// Parses JSON Lines. Blank lines are skipped. Throws SchemaError naming the
/// 1-based line and offending field.
Dataset parse_dataset(std::istream& in);
Dataset load_dataset(const std::filesystem::path& path);

void write_issue_jsonl(const Issue& issue, std::ostream& out);
void save_dataset(const Dataset& d, std::ostream& out);
void save_dataset(const Dataset& d, const std::filesystem::path& path);

struct DatasetStats {
  std::size_t issue_count = 0;
  std::size_t resolved_count = 0;
  std::size_t contributor_count = 0;
  std::optional<Timestamp> period_start;  // min created_at
  std::optional<Timestamp> period_end;    // max resolved_at
  double avg_title_chars = 0;
  double avg_title_words = 0;
  double avg_desc_chars = 0;
  double avg_desc_words = 0;
};

/// Code points in a UTF-8 string, whitespace included.
std::size_t char_count(std::string_view text);
/// Maximal runs of non-whitespace characters.
std::size_t word_count(std::string_view text);

DatasetStats compute_stats(const Dataset& d);

struct ContributorIrf {
  std::string contributor_id;
  std::size_t resolutions = 0;
  double irf_med = 0;  // days
  double irf_avg = 0;  // days
};

struct SummaryStats {
  double avg = 0;
  double median = 0;
  double sd = 0;  // sample standard deviation, 0 below two values
};

struct IrfStats {
  std::vector<ContributorIrf> contributors;  // sorted by id; >= 2 resolutions only
  SummaryStats med;                          // over per-contributor irf_med
  SummaryStats avg;                          // over per-contributor irf_avg
};

IrfStats compute_irf(const Dataset& d);

double median_of(std::vector<double> values);
SummaryStats summarize(const std::vector<double>& values);

}  // namespace onboard
