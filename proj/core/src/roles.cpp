#include "onboard/roles.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace onboard {

std::string Question::name() const {
  if (kind == QuestionKind::rq2) return "rq2";
  return "rq1_t" + std::to_string(threshold);
}

std::size_t RoleLabeling::count(Label l) const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [l](const LabeledIssue& e) { return e.label == l; }));
}

std::optional<Label> RoleLabeling::label_of(const std::string& issue_id) const {
  for (const LabeledIssue& e : entries) {
    if (e.issue_id == issue_id) return e.label;
  }
  return std::nullopt;
}

std::vector<ContributorHistory> build_histories(const Dataset& d) {
  // Dataset order is already (resolved_at, id).
  std::map<std::string, ContributorHistory> by_id;
  for (const Issue& issue : d.issues()) {
    if (!issue.resolved_at) continue;
    ContributorHistory& h = by_id[*issue.resolver_id];
    h.resolved_issues.emplace_back(issue.id, *issue.resolved_at);
    ++h.monthly_counts[month_of(*issue.resolved_at)];
    ++h.total;
  }
  std::vector<ContributorHistory> out;
  out.reserve(by_id.size());
  for (auto& [id, h] : by_id) {
    h.contributor_id = id;
    out.push_back(std::move(h));
  }
  return out;
}

MonthlyMedians monthly_medians(const std::vector<ContributorHistory>& histories) {
  std::map<MonthKey, std::vector<double>> counts;
  for (const ContributorHistory& h : histories) {
    for (const auto& [month, n] : h.monthly_counts) counts[month].push_back(n);
  }
  MonthlyMedians medians;
  for (auto& [month, values] : counts) medians.emplace(month, median_of(std::move(values)));
  return medians;
}

std::set<MonthKey> monthly_active(const ContributorHistory& h, const MonthlyMedians& m) {
  std::set<MonthKey> months;
  for (const auto& [month, n] : h.monthly_counts) {
    auto it = m.find(month);
    if (it != m.end() && n >= it->second) months.insert(month);
  }
  return months;
}

std::set<std::string> active_developers(const std::vector<ContributorHistory>& histories,
                                        const MonthlyMedians& m, int streak) {
  std::set<std::string> active;
  for (const ContributorHistory& h : histories) {
    int run = 0;
    std::optional<MonthKey> prev;
    for (MonthKey month : monthly_active(h, m)) {
      run = (prev && month.value == prev->value + 1) ? run + 1 : 1;
      prev = month;
      if (run >= streak) {
        active.insert(h.contributor_id);
        break;
      }
    }
  }
  return active;
}

RoleLabeling label_rq1(const Dataset& d, int t) {
  if (t < 1) throw std::invalid_argument("newcomer threshold must be positive");
  RoleLabeling labeling;
  labeling.question = {QuestionKind::rq1, t};
  std::unordered_map<std::string_view, int> seen;
  const auto& issues = d.issues();
  for (std::size_t i = 0; i < issues.size(); ++i) {
    const Issue& issue = issues[i];
    if (!issue.resolved_at) continue;
    int rank = ++seen[*issue.resolver_id];
    labeling.entries.push_back({i, issue.id, rank <= t ? Label::positive : Label::negative});
  }
  return labeling;
}

RoleLabeling label_rq2(const Dataset& d) {
  RoleLabeling labeling;
  labeling.question = {QuestionKind::rq2, 1};
  const auto histories = build_histories(d);
  labeling.active_developers = active_developers(histories, monthly_medians(histories));

  std::unordered_map<std::string_view, bool> seen;
  const auto& issues = d.issues();
  for (std::size_t i = 0; i < issues.size(); ++i) {
    const Issue& issue = issues[i];
    if (!issue.resolved_at) continue;
    if (!seen.emplace(*issue.resolver_id, true).second) continue;
    const bool retained = labeling.active_developers.count(*issue.resolver_id) > 0;
    labeling.entries.push_back({i, issue.id, retained ? Label::positive : Label::negative});
  }
  return labeling;
}

RoleLabeling label(const Dataset& d, const Question& q) {
  return q.kind == QuestionKind::rq1 ? label_rq1(d, q.threshold) : label_rq2(d);
}

void write_labeling_csv(const RoleLabeling& labeling, std::ostream& out) {
  out << "issue_id,question,label\n";
  const std::string q = labeling.question.name();
  for (const LabeledIssue& e : labeling.entries) {
    // Ids containing separators are quoted.
    if (e.issue_id.find_first_of(",\"\n") != std::string::npos) {
      out << '"';
      for (char c : e.issue_id) {
        if (c == '"') out << '"';
        out << c;
      }
      out << '"';
    } else {
      out << e.issue_id;
    }
    out << ',' << q << ',' << to_string(e.label) << '\n';
  }
}

}  // namespace onboard
