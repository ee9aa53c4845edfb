#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "onboard/corpus.hpp"
#include "onboard/time.hpp"

namespace onboard {

enum class Label : std::uint8_t { negative = 0, positive = 1 };

inline const char* to_string(Label l) { return l == Label::positive ? "positive" : "negative"; }

/// Consecutive months of monthly activity needed to count as an active developer.
inline constexpr int kActiveStreakMonths = 6;

struct ContributorHistory {
  std::string contributor_id;
  std::vector<std::pair<std::string, Timestamp>> resolved_issues;  // by (resolved_at, id)
  std::map<MonthKey, int> monthly_counts;
  int total = 0;
};

/// month -> median resolved-issue count among that month's resolvers.
using MonthlyMedians = std::map<MonthKey, double>;

/// One history per contributor with at least one resolved issue, sorted by id.
std::vector<ContributorHistory> build_histories(const Dataset& d);

MonthlyMedians monthly_medians(const std::vector<ContributorHistory>& histories);

/// Months in which the contributor resolved at least the monthly median.
std::set<MonthKey> monthly_active(const ContributorHistory& h, const MonthlyMedians& m);

/// Contributors monthly-active for `streak` consecutive calendar months at
/// any point in their history.
std::set<std::string> active_developers(const std::vector<ContributorHistory>& histories,
                                        const MonthlyMedians& m, int streak = kActiveStreakMonths);

enum class QuestionKind { rq1, rq2 };

struct Question {
  QuestionKind kind = QuestionKind::rq1;
  int threshold = 1;  // newcomer threshold t; 1 for rq2

  /// "rq1_t5" or "rq2".
  std::string name() const;
  friend bool operator==(const Question&, const Question&) = default;
};

struct LabeledIssue {
  std::size_t issue_index;  // position in Dataset::issues()
  std::string issue_id;
  Label label;
};

struct RoleLabeling {
  Question question;
  std::vector<LabeledIssue> entries;  // dataset order
  std::set<std::string> active_developers;  // populated for rq2

  std::size_t count(Label l) const;
  std::optional<Label> label_of(const std::string& issue_id) const;
};

/// Positive iff the issue is among its resolver's first t resolved issues.
/// Throws std::invalid_argument for t < 1.
RoleLabeling label_rq1(const Dataset& d, int t);

/// Domain is each contributor's first resolved issue; positive iff the
/// contributor ever became an active developer.
RoleLabeling label_rq2(const Dataset& d);

RoleLabeling label(const Dataset& d, const Question& q);

/// CSV with header "issue_id,question,label".
void write_labeling_csv(const RoleLabeling& labeling, std::ostream& out);

}  // namespace onboard
