#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <tuple>

namespace oracle {

std::map<std::string, double> tfidf(const std::vector<Doc>& corpus, const Doc& doc) {
  const double n = static_cast<double>(corpus.size());
  std::map<std::string, double> raw;
  for (const std::string& term : doc) {
    int df = 0;
    for (const Doc& d : corpus) {
      if (std::find(d.begin(), d.end(), term) != d.end()) ++df;
    }
    if (df == 0) continue;
    const double tf = static_cast<double>(std::count(doc.begin(), doc.end(), term));
    raw[term] = tf * (std::log((1.0 + n) / (1.0 + df)) + 1.0);
  }
  double norm = 0;
  for (const auto& [t, w] : raw) norm += w * w;
  norm = std::sqrt(norm);
  for (auto& [t, w] : raw) w /= norm;
  return raw;
}

double gini(double pos, double neg) {
  const double n = pos + neg;
  if (n == 0) return 0;
  return 1.0 - (pos / n) * (pos / n) - (neg / n) * (neg / n);
}

double entropy_bits(double pos, double neg) {
  const double n = pos + neg;
  double h = 0;
  if (pos > 0) h -= pos / n * std::log2(pos / n);
  if (neg > 0) h -= neg / n * std::log2(neg / n);
  return h;
}

std::optional<RootSplit> best_root_split(const std::vector<std::vector<double>>& rows, const std::vector<int>& y,
                                         bool entropy, int min_leaf, double tie) {
  auto imp = [&](double p, double n) { return entropy ? entropy_bits(p, n) : gini(p, n); };
  double pos = 0, neg = 0;
  for (int l : y) (l ? pos : neg) += 1;
  const double parent = imp(pos, neg);
  const double total = pos + neg;
  std::optional<RootSplit> best;
  const std::size_t d = rows.empty() ? 0 : rows[0].size();
  for (std::size_t f = 0; f < d; ++f) {
    std::vector<double> values;
    for (const auto& r : rows) values.push_back(r[f]);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      const double thr = (values[i] + values[i + 1]) / 2.0;
      double lp = 0, ln = 0, rp = 0, rn = 0;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const bool left = rows[r][f] <= thr;
        if (y[r]) {
          (left ? lp : rp) += 1;
        } else {
          (left ? ln : rn) += 1;
        }
      }
      if (lp + ln < min_leaf || rp + rn < min_leaf) continue;
      const double dec = parent - (lp + ln) / total * imp(lp, ln) - (rp + rn) / total * imp(rp, rn);
      if (!best || dec > best->decrease + tie) best = RootSplit{f, thr, dec};
    }
  }
  if (best && best->decrease <= tie) return std::nullopt;
  return best;
}

double nb_posterior(const std::vector<std::vector<double>>& rows, const std::vector<int>& y,
                    const std::vector<double>& query, double smoothing) {
  const std::size_t d = query.size();
  auto mean_var = [&](int cls, std::size_t f) {
    double s = 0, n = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (cls < 0 || y[r] == cls) {
        s += rows[r][f];
        n += 1;
      }
    }
    const double m = s / n;
    double v = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (cls < 0 || y[r] == cls) v += (rows[r][f] - m) * (rows[r][f] - m);
    }
    return std::pair{m, v / n};
  };
  double max_var = 0;
  for (std::size_t f = 0; f < d; ++f) max_var = std::max(max_var, mean_var(-1, f).second);
  const double eps = smoothing * max_var;

  double joint[2];
  for (int cls = 0; cls < 2; ++cls) {
    const double prior = static_cast<double>(std::count(y.begin(), y.end(), cls)) / static_cast<double>(y.size());
    double p = prior;
    for (std::size_t f = 0; f < d; ++f) {
      auto [m, v] = mean_var(cls, f);
      v += eps;
      p *= std::exp(-(query[f] - m) * (query[f] - m) / (2 * v)) / std::sqrt(2 * std::numbers::pi * v);
    }
    joint[cls] = p;
  }
  return joint[1] / (joint[0] + joint[1]);
}

double svm_objective_1d(double w, double b, const std::vector<double>& x, const std::vector<int>& y, double c) {
  double hinge = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double s = y[i] ? 1.0 : -1.0;
    hinge += std::max(0.0, 1.0 - s * (w * x[i] + b));
  }
  return 0.5 * w * w + c * hinge;
}

double svm_grid_minimum_1d(const std::vector<double>& x, const std::vector<int>& y, double c, double w_range,
                           double b_range, int steps) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= steps; ++i) {
    const double w = -w_range + 2.0 * w_range * i / steps;
    for (int j = 0; j <= steps; ++j) {
      const double b = -b_range + 2.0 * b_range * j / steps;
      best = std::min(best, svm_objective_1d(w, b, x, y, c));
    }
  }
  return best;
}

int month_index(std::int64_t epoch_ms) {
  std::int64_t days = epoch_ms / 86'400'000;
  if (epoch_ms % 86'400'000 < 0) --days;
  int year = 1970;
  auto leap = [](int yr) { return (yr % 4 == 0 && yr % 100 != 0) || yr % 400 == 0; };
  while (days >= (leap(year) ? 366 : 365)) {
    days -= leap(year) ? 366 : 365;
    ++year;
  }
  while (days < 0) {
    --year;
    days += leap(year) ? 366 : 365;
  }
  const int lengths[] = {31, leap(year) ? 29 : 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  int month = 0;
  while (days >= lengths[month]) days -= lengths[month++];
  return year * 12 + month;
}

namespace {

bool earlier(const Event& a, const Event& b) {
  return std::tie(a.resolved_ms, a.issue_id) < std::tie(b.resolved_ms, b.issue_id);
}

std::set<std::string> contributors_of(const std::vector<Event>& events) {
  std::set<std::string> out;
  for (const Event& e : events) out.insert(e.contributor);
  return out;
}

int count_in_month(const std::vector<Event>& events, const std::string& c, int month) {
  int n = 0;
  for (const Event& e : events) {
    if (e.contributor == c && month_index(e.resolved_ms) == month) ++n;
  }
  return n;
}

}  // namespace

std::set<std::string> rq1_positives(const std::vector<Event>& events, int t) {
  std::set<std::string> out;
  for (const Event& e : events) {
    int rank = 0;
    for (const Event& o : events) {
      if (o.contributor == e.contributor && earlier(o, e)) ++rank;
    }
    if (rank < t) out.insert(e.issue_id);
  }
  return out;
}

std::map<int, double> monthly_medians(const std::vector<Event>& events) {
  std::set<int> months;
  for (const Event& e : events) months.insert(month_index(e.resolved_ms));
  std::map<int, double> out;
  for (int m : months) {
    std::vector<double> counts;
    for (const std::string& c : contributors_of(events)) {
      const int n = count_in_month(events, c, m);
      if (n > 0) counts.push_back(n);
    }
    out[m] = median(counts);
  }
  return out;
}

std::set<int> monthly_active(const std::vector<Event>& events, const std::string& contributor) {
  const auto medians = monthly_medians(events);
  std::set<int> out;
  for (const auto& [m, med] : medians) {
    const int n = count_in_month(events, contributor, m);
    if (n >= 1 && n >= med) out.insert(m);
  }
  return out;
}

std::set<std::string> active_developers(const std::vector<Event>& events, int streak) {
  std::set<std::string> out;
  if (events.empty()) return out;
  int lo = std::numeric_limits<int>::max(), hi = std::numeric_limits<int>::min();
  for (const Event& e : events) {
    lo = std::min(lo, month_index(e.resolved_ms));
    hi = std::max(hi, month_index(e.resolved_ms));
  }
  for (const std::string& c : contributors_of(events)) {
    const auto active = monthly_active(events, c);
    for (int start = lo; start + streak - 1 <= hi; ++start) {
      bool all = true;
      for (int m = start; m < start + streak; ++m) all = all && active.count(m) > 0;
      if (all) {
        out.insert(c);
        break;
      }
    }
  }
  return out;
}

std::map<std::string, bool> rq2_labels(const std::vector<Event>& events) {
  const auto active = active_developers(events);
  std::map<std::string, bool> out;
  for (const std::string& c : contributors_of(events)) {
    const Event* first = nullptr;
    for (const Event& e : events) {
      if (e.contributor == c && (!first || earlier(e, *first))) first = &e;
    }
    out[first->issue_id] = active.count(c) > 0;
  }
  return out;
}

Prf prf(std::size_t tp, std::size_t fp, std::size_t fn) {
  Prf m;
  const double t = static_cast<double>(tp);
  if (tp + fp > 0) m.precision = t / static_cast<double>(tp + fp);
  if (tp + fn > 0) m.recall = t / static_cast<double>(tp + fn);
  if (m.precision + m.recall > 0) m.f1 = 2 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

std::size_t whitespace_words(const std::string& s) {
  std::size_t n = 0;
  bool in_word = false;
  for (char ch : s) {
    const bool space = ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\v' || ch == '\f';
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0;
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace oracle
