#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include "onboard/time.hpp"

namespace fixture {

onboard::Timestamp ts(const std::string& rfc3339) {
  auto t = onboard::parse_rfc3339(rfc3339);
  if (!t) throw std::invalid_argument("bad timestamp in test: " + rfc3339);
  return *t;
}

onboard::Issue resolved_issue(const std::string& id, const std::string& resolver, const std::string& resolved_at,
                              const std::string& title, const std::string& description) {
  onboard::Issue i;
  i.id = id;
  i.project = "p";
  i.title = title;
  i.description = description;
  i.resolver_id = resolver;
  i.resolved_at = ts(resolved_at);
  i.created_at = onboard::Timestamp{i.resolved_at->epoch_ms - 86'400'000};
  return i;
}

onboard::Issue open_issue(const std::string& id, const std::string& title, const std::string& description) {
  onboard::Issue i;
  i.id = id;
  i.project = "p";
  i.title = title;
  i.description = description;
  i.created_at = ts("2021-06-01T00:00:00Z");
  return i;
}

std::vector<oracle::Event> random_events(onboard::Rng& rng, std::size_t max_events) {
  constexpr std::int64_t kDay = 86'400'000;
  const std::int64_t start = ts("2018-01-01T00:00:00Z").epoch_ms;
  const int span_months = 24;
  std::vector<oracle::Event> events;
  const std::size_t contributors = 2 + rng.below(40);
  std::size_t next_id = 0;
  auto id = [&] {
    // Unordered ids so that (time, id) order differs from insertion order.
    return "I" + std::to_string(rng.below(1'000'000)) + "-" + std::to_string(next_id++);
  };
  for (std::size_t c = 0; c < contributors && events.size() < max_events; ++c) {
    const std::string name = "c" + std::to_string(c);
    const bool steady = rng.bernoulli(0.4);
    const int first_month = static_cast<int>(rng.below(span_months));
    const int months = steady ? 1 + static_cast<int>(rng.below(12)) : 1 + static_cast<int>(rng.below(3));
    for (int m = first_month; m < first_month + months && events.size() < max_events; ++m) {
      if (!steady && rng.bernoulli(0.5)) continue;
      const std::size_t n = steady ? 1 + rng.below(6) : 1 + rng.below(2);
      for (std::size_t k = 0; k < n && events.size() < max_events; ++k) {
        // 30-day "months" from the start keep events inside calendar months
        // most of the time while still crossing boundaries now and then.
        const std::int64_t day = static_cast<std::int64_t>(m) * 30 + static_cast<std::int64_t>(rng.below(30));
        events.push_back({id(), name, start + day * kDay + (rng.bernoulli(0.5) ? 0 : 3'600'000)});
      }
    }
  }
  return events;
}

onboard::Dataset dataset_from_events(const std::vector<oracle::Event>& events, const std::string& project) {
  std::vector<onboard::Issue> issues;
  for (const oracle::Event& e : events) {
    onboard::Issue i;
    i.id = e.issue_id;
    i.project = project;
    i.title = "t";
    i.resolver_id = e.contributor;
    i.resolved_at = onboard::Timestamp{e.resolved_ms};
    i.created_at = onboard::Timestamp{e.resolved_ms - 1000};
    issues.push_back(std::move(i));
  }
  return onboard::Dataset(project, std::move(issues));
}

onboard::SparseMatrix to_sparse(const std::vector<std::vector<double>>& dense) {
  onboard::SparseMatrix m(dense.empty() ? 0 : dense[0].size());
  for (const auto& row : dense) {
    onboard::SparseVector v;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] != 0.0) v.push(static_cast<std::uint32_t>(j), row[j]);
    }
    m.append_row(v);
  }
  return m;
}

std::vector<onboard::Label> to_labels(const std::vector<int>& y) {
  std::vector<onboard::Label> out;
  for (int v : y) out.push_back(v ? onboard::Label::positive : onboard::Label::negative);
  return out;
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("onboard-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

}  // namespace fixture
