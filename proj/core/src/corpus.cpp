#include "onboard/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "onboard/errors.hpp"

namespace onboard {

using nlohmann::json;

namespace {

bool issue_order(const Issue& a, const Issue& b) {
  if (a.resolved_at.has_value() != b.resolved_at.has_value()) return a.resolved_at.has_value();
  if (a.resolved_at && *a.resolved_at != *b.resolved_at) return *a.resolved_at < *b.resolved_at;
  return a.id < b.id;
}

void check_issue(const Issue& issue, std::size_t line) {
  if (issue.id.empty()) throw SchemaError(line, "id", "must be a nonempty string");
  if (issue.resolved_at.has_value() != issue.resolver_id.has_value()) {
    throw SchemaError(line, issue.resolved_at ? "resolver_id" : "resolved_at",
                      "resolved_at and resolver_id must be present together");
  }
  if (issue.resolved_at && *issue.resolved_at < issue.created_at) {
    throw SchemaError(line, "resolved_at", "precedes created_at");
  }
}

const json* field(const json& obj, const char* name) {
  auto it = obj.find(name);
  return it == obj.end() ? nullptr : &*it;
}

std::string required_string(const json& obj, const char* name, std::size_t line) {
  const json* v = field(obj, name);
  if (!v) throw SchemaError(line, name, "missing required key");
  if (!v->is_string()) throw SchemaError(line, name, "expected a string");
  return v->get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* name, std::size_t line) {
  const json* v = field(obj, name);
  if (!v || v->is_null()) return std::nullopt;
  if (!v->is_string()) throw SchemaError(line, name, "expected a string or null");
  return v->get<std::string>();
}

Timestamp to_timestamp(const std::string& text, const char* name, std::size_t line) {
  auto ts = parse_rfc3339(text);
  if (!ts) throw SchemaError(line, name, "not an RFC 3339 timestamp: '" + text + "'");
  return *ts;
}

Issue parse_issue(const std::string& text, std::size_t line) {
  json obj;
  try {
    obj = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(line, "<record>", std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw SchemaError(line, "<record>", "expected a JSON object");

  Issue issue;
  issue.id = required_string(obj, "id", line);
  issue.project = required_string(obj, "project", line);
  issue.title = required_string(obj, "title", line);
  issue.description = optional_string(obj, "description", line).value_or("");
  issue.resolver_id = optional_string(obj, "resolver_id", line);
  issue.created_at = to_timestamp(required_string(obj, "created_at", line), "created_at", line);
  if (auto resolved = optional_string(obj, "resolved_at", line)) {
    issue.resolved_at = to_timestamp(*resolved, "resolved_at", line);
  }
  check_issue(issue, line);
  return issue;
}

}  // namespace

Dataset::Dataset(std::string project, std::vector<Issue> issues)
    : project_(std::move(project)), issues_(std::move(issues)) {
  std::unordered_map<std::string_view, std::size_t> seen;
  seen.reserve(issues_.size());
  for (const Issue& issue : issues_) {
    check_issue(issue, 0);
    if (!seen.emplace(issue.id, 0).second) throw SchemaError(0, "id", "duplicate id " + issue.id);
    if (issue.resolved()) ++resolved_count_;
  }
  std::sort(issues_.begin(), issues_.end(), issue_order);

  for (const Issue& issue : issues_) {
    if (issue.resolver_id) contributors_.push_back(*issue.resolver_id);
  }
  std::sort(contributors_.begin(), contributors_.end());
  contributors_.erase(std::unique(contributors_.begin(), contributors_.end()), contributors_.end());

  by_id_.resize(issues_.size());
  std::iota(by_id_.begin(), by_id_.end(), std::size_t{0});
  std::sort(by_id_.begin(), by_id_.end(),
            [&](std::size_t a, std::size_t b) { return issues_[a].id < issues_[b].id; });
}

std::optional<std::size_t> Dataset::find(const std::string& id) const {
  auto it = std::lower_bound(by_id_.begin(), by_id_.end(), id,
                             [&](std::size_t pos, const std::string& key) { return issues_[pos].id < key; });
  if (it == by_id_.end() || issues_[*it].id != id) return std::nullopt;
  return *it;
}

Dataset parse_dataset(std::istream& in) {
  std::vector<Issue> issues;
  std::unordered_map<std::string, std::size_t> first_line;
  std::string project;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    Issue issue = parse_issue(text, line);
    if (issues.empty()) {
      project = issue.project;
    } else if (issue.project != project) {
      throw SchemaError(line, "project", "mixed projects in one file ('" + project + "' and '" +
                                             issue.project + "')");
    }
    auto [it, inserted] = first_line.emplace(issue.id, line);
    if (!inserted) {
      throw SchemaError(line, "id", "duplicate id '" + issue.id + "' (first seen on line " +
                                        std::to_string(it->second) + ")");
    }
    issues.push_back(std::move(issue));
  }
  if (in.bad()) throw InputError("read failure");
  return Dataset(std::move(project), std::move(issues));
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return parse_dataset(in);
}

void write_issue_jsonl(const Issue& issue, std::ostream& out) {
  nlohmann::ordered_json obj;
  obj["id"] = issue.id;
  obj["project"] = issue.project;
  obj["title"] = issue.title;
  obj["description"] = issue.description;
  obj["resolver_id"] = issue.resolver_id ? nlohmann::ordered_json(*issue.resolver_id) : nlohmann::ordered_json(nullptr);
  obj["created_at"] = format_rfc3339(issue.created_at);
  obj["resolved_at"] =
      issue.resolved_at ? nlohmann::ordered_json(format_rfc3339(*issue.resolved_at)) : nlohmann::ordered_json(nullptr);
  out << obj.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
}

void save_dataset(const Dataset& d, std::ostream& out) {
  for (const Issue& issue : d.issues()) write_issue_jsonl(issue, out);
}

void save_dataset(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  save_dataset(d, out);
}

std::size_t char_count(std::string_view text) {
  std::size_t n = 0;
  for (unsigned char c : text) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::size_t word_count(std::string_view text) {
  std::size_t n = 0;
  bool in_word = false;
  for (unsigned char c : text) {
    bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

DatasetStats compute_stats(const Dataset& d) {
  DatasetStats s;
  s.issue_count = d.size();
  s.resolved_count = d.resolved_count();
  s.contributor_count = d.contributors().size();
  if (d.size() == 0) return s;

  double title_chars = 0, title_words = 0, desc_chars = 0, desc_words = 0;
  for (const Issue& issue : d.issues()) {
    title_chars += static_cast<double>(char_count(issue.title));
    title_words += static_cast<double>(word_count(issue.title));
    desc_chars += static_cast<double>(char_count(issue.description));
    desc_words += static_cast<double>(word_count(issue.description));
    if (!s.period_start || issue.created_at < *s.period_start) s.period_start = issue.created_at;
    if (issue.resolved_at && (!s.period_end || *issue.resolved_at > *s.period_end)) {
      s.period_end = issue.resolved_at;
    }
  }
  const double n = static_cast<double>(d.size());
  s.avg_title_chars = title_chars / n;
  s.avg_title_words = title_words / n;
  s.avg_desc_chars = desc_chars / n;
  s.avg_desc_words = desc_words / n;
  return s;
}

double median_of(std::vector<double> values) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return (values[mid - 1] + values[mid]) / 2.0;
}

SummaryStats summarize(const std::vector<double>& values) {
  SummaryStats s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.avg = std::accumulate(values.begin(), values.end(), 0.0) / n;
  s.median = median_of(values);
  if (values.size() > 1) {
    double ss = 0;
    for (double v : values) ss += (v - s.avg) * (v - s.avg);
    s.sd = std::sqrt(ss / (n - 1));
  }
  return s;
}

IrfStats compute_irf(const Dataset& d) {
  std::map<std::string, std::vector<Timestamp>> resolutions;
  for (const Issue& issue : d.issues()) {
    if (issue.resolved_at) resolutions[*issue.resolver_id].push_back(*issue.resolved_at);
  }

  IrfStats stats;
  std::vector<double> meds, avgs;
  for (auto& [id, times] : resolutions) {
    if (times.size() < 2) continue;
    std::sort(times.begin(), times.end());
    std::vector<double> gaps;
    gaps.reserve(times.size() - 1);
    for (std::size_t i = 1; i < times.size(); ++i) gaps.push_back(days_between(times[i - 1], times[i]));
    ContributorIrf c;
    c.contributor_id = id;
    c.resolutions = times.size();
    c.irf_avg = std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(gaps.size());
    c.irf_med = median_of(std::move(gaps));
    meds.push_back(c.irf_med);
    avgs.push_back(c.irf_avg);
    stats.contributors.push_back(std::move(c));
  }
  stats.med = summarize(meds);
  stats.avg = summarize(avgs);
  return stats;
}

}  // namespace onboard
