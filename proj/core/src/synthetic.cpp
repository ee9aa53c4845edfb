#include "onboard/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "onboard/rng.hpp"
#include "onboard/text.hpp"

namespace onboard {

namespace {

constexpr char kConsonants[] = "bdfgklmnprtvz";
constexpr char kVowels[] = "aeiou";
constexpr std::int64_t kDayMs = 86'400'000;

const std::vector<std::string>& sentiment_words() {
  static const std::vector<std::string> words{"good", "great", "nice", "clean", "helpful",
                                              "bad", "crash", "broken", "error", "annoying"};
  return words;
}

class ZipfSampler {
 public:
  explicit ZipfSampler(std::size_t n) : cdf_(n) {
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += 1.0 / static_cast<double>(i + 1);
      cdf_[i] = acc;
    }
    for (double& c : cdf_) c /= acc;
  }

  std::size_t operator()(Rng& rng) const {
    const double u = rng.unit();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

std::size_t uniform_between(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

}  // namespace

std::vector<std::string> background_words(std::size_t count) {
  const Stopwords& stop = Stopwords::bundled();
  const Lemmatizer& lem = Lemmatizer::bundled();
  const SentimentLexicon& lex = SentimentLexicon::bundled();
  const std::size_t nc = sizeof(kConsonants) - 1, nv = sizeof(kVowels) - 1;

  std::vector<std::string> out;
  out.reserve(count);
  // Enumerate 2-, 3-, 4-syllable words in mixed-radix order.
  for (std::size_t syllables = 2; out.size() < count && syllables <= 4; ++syllables) {
    std::size_t combos = 1;
    for (std::size_t s = 0; s < syllables; ++s) combos *= nc * nv;
    for (std::size_t code = 0; code < combos && out.size() < count; ++code) {
      std::string w;
      std::size_t c = code;
      for (std::size_t s = 0; s < syllables; ++s) {
        w += kConsonants[c % nc];
        c /= nc;
        w += kVowels[c % nv];
        c /= nv;
      }
      if (stop.contains(w) || lex.strength(w) != 0 || lem.lemma(w) != w) continue;
      out.push_back(std::move(w));
    }
  }
  if (out.size() < count) throw std::invalid_argument("background vocabulary too large");
  return out;
}

Dataset generate_synthetic(const SyntheticConfig& cfg) {
  if (cfg.contributors == 0 || cfg.resolved_issues < cfg.contributors) {
    throw std::invalid_argument("need at least one resolved issue per contributor");
  }
  if (cfg.newcomer_threshold < 1) throw std::invalid_argument("newcomer_threshold must be >= 1");
  for (double p : {cfg.marker_positive, cfg.marker_negative, cfg.marker_unresolved, cfg.sentiment_rate}) {
    if (!(p >= 0 && p <= 1)) throw std::invalid_argument("probabilities must lie in [0, 1]");
  }
  if (cfg.title_words_min > cfg.title_words_max || cfg.description_words_min > cfg.description_words_max ||
      cfg.span_days < 1) {
    throw std::invalid_argument("invalid length or span settings");
  }

  Rng rng(cfg.seed);
  const std::vector<std::string> vocab = background_words(cfg.background_vocabulary);
  for (const std::string& w : vocab) {
    if (w == cfg.marker) throw std::invalid_argument("marker collides with a background word");
  }
  const ZipfSampler zipf(vocab.size());

  std::vector<std::size_t> load(cfg.contributors, 1);
  if (cfg.even_load) {
    for (std::size_t c = 0; c < cfg.contributors; ++c) {
      load[c] = cfg.resolved_issues / cfg.contributors + (c < cfg.resolved_issues % cfg.contributors ? 1 : 0);
    }
  } else {
    // Extra issues go to contributors with Zipf-distributed probability.
    const ZipfSampler who(cfg.contributors);
    for (std::size_t i = cfg.contributors; i < cfg.resolved_issues; ++i) ++load[who(rng)];
  }

  auto make_text = [&](std::size_t lo, std::size_t hi) {
    std::string s;
    const std::size_t n = uniform_between(rng, lo, hi);
    for (std::size_t i = 0; i < n; ++i) {
      if (i) s += ' ';
      s += vocab[zipf(rng)];
    }
    return s;
  };
  auto insert_word = [&](std::string& text, const std::string& word) {
    std::vector<std::size_t> gaps{0};
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == ' ') gaps.push_back(i + 1);
    }
    const std::size_t at = gaps[static_cast<std::size_t>(rng.below(gaps.size()))];
    text.insert(at, text.empty() ? word : word + " ");
  };

  const std::int64_t start_ms = 1'420'070'400'000;  // 2015-01-01T00:00:00Z
  const std::int64_t span_ms = static_cast<std::int64_t>(cfg.span_days) * kDayMs;

  std::vector<Issue> issues;
  issues.reserve(cfg.resolved_issues + cfg.unresolved_issues);
  std::size_t next_id = 1;
  auto new_issue = [&](bool marked) {
    Issue is;
    is.id = "SYN-" + std::to_string(next_id++);
    is.project = cfg.project;
    is.title = make_text(cfg.title_words_min, cfg.title_words_max);
    is.description = make_text(cfg.description_words_min, cfg.description_words_max);
    if (rng.bernoulli(cfg.sentiment_rate)) {
      const auto& sw = sentiment_words();
      insert_word(is.description, sw[static_cast<std::size_t>(rng.below(sw.size()))]);
    }
    if (marked) insert_word(is.description, cfg.marker);
    return is;
  };

  for (std::size_t c = 0; c < cfg.contributors; ++c) {
    const std::string resolver = "dev" + std::to_string(c + 1);
    std::vector<std::int64_t> times(load[c]);
    for (auto& t : times) t = start_ms + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(span_ms)));
    std::sort(times.begin(), times.end());
    for (std::size_t k = 0; k < times.size(); ++k) {
      const bool newcomer = k < static_cast<std::size_t>(cfg.newcomer_threshold);
      Issue is = new_issue(rng.bernoulli(newcomer ? cfg.marker_positive : cfg.marker_negative));
      is.resolver_id = resolver;
      is.resolved_at = Timestamp{times[k]};
      const auto lag = static_cast<std::int64_t>(rng.below(30 * kDayMs));
      is.created_at = Timestamp{std::max(start_ms - 30 * kDayMs, times[k] - lag)};
      issues.push_back(std::move(is));
    }
  }
  for (std::size_t u = 0; u < cfg.unresolved_issues; ++u) {
    Issue is = new_issue(rng.bernoulli(cfg.marker_unresolved));
    is.created_at = Timestamp{start_ms + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(span_ms)))};
    issues.push_back(std::move(is));
  }
  return Dataset(cfg.project, std::move(issues));
}

}  // namespace onboard
