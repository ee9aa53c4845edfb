#include "onboard/text.hpp"

#include <algorithm>
#include <charconv>

#include "onboard/errors.hpp"

namespace onboard {
namespace {

template <typename Fn>
void for_each_entry(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    fn(line, line_no);
  }
}

bool ends_with(const std::string& w, std::string_view suffix) {
  return w.size() >= suffix.size() && w.compare(w.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool has_vowel(std::string_view s) { return s.find_first_of("aeiouy") != std::string_view::npos; }

bool is_consonant(char c) {
  return c >= 'a' && c <= 'z' && std::string_view("aeiou").find(c) == std::string_view::npos;
}

std::string undouble(std::string stem) {
  const std::size_t n = stem.size();
  if (n >= 4 && stem[n - 1] == stem[n - 2] && is_consonant(stem[n - 1]) &&
      std::string_view("lsz").find(stem[n - 1]) == std::string_view::npos) {
    stem.pop_back();
  }
  return stem;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      current.push_back(static_cast<char>(c));
    } else if (c >= 'A' && c <= 'Z') {
      current.push_back(static_cast<char>(c - 'A' + 'a'));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Stopwords Stopwords::parse(std::string_view text) {
  Stopwords s;
  for_each_entry(text, [&](std::string_view line, std::size_t) {
    for (auto& t : tokenize(line)) s.words_.insert(std::move(t));
  });
  return s;
}

const Stopwords& Stopwords::bundled() {
  static const Stopwords instance = parse(resources::stopwords());
  return instance;
}

Lemmatizer Lemmatizer::parse(std::string_view text) {
  Lemmatizer l;
  for_each_entry(text, [&](std::string_view line, std::size_t line_no) {
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw InputError("lemma exceptions line " + std::to_string(line_no) + ": expected a tab");
    }
    l.exceptions_.emplace(std::string(line.substr(0, tab)), std::string(line.substr(tab + 1)));
  });
  return l;
}

const Lemmatizer& Lemmatizer::bundled() {
  static const Lemmatizer instance = parse(resources::lemma_exceptions());
  return instance;
}

std::string Lemmatizer::step(const std::string& w) const {
  if (auto it = exceptions_.find(w); it != exceptions_.end()) return it->second;
  const std::size_t n = w.size();

  if (n >= 5 && ends_with(w, "ies")) return w.substr(0, n - 3) + "y";
  if (ends_with(w, "sses")) return w.substr(0, n - 2);
  if (n >= 5 && (ends_with(w, "xes") || ends_with(w, "ches") || ends_with(w, "shes"))) {
    return w.substr(0, n - 2);
  }
  if (n >= 4 && w.back() == 's' && !ends_with(w, "ss") && !ends_with(w, "us") && !ends_with(w, "is")) {
    return w.substr(0, n - 1);
  }
  if (n >= 6 && ends_with(w, "ing") && has_vowel(std::string_view(w).substr(0, n - 3))) {
    return undouble(w.substr(0, n - 3));
  }
  if (n >= 5 && ends_with(w, "ed") && has_vowel(std::string_view(w).substr(0, n - 2))) {
    return undouble(w.substr(0, n - 2));
  }
  if (n >= 7 && ends_with(w, "er") && has_vowel(std::string_view(w).substr(0, n - 2))) {
    return w.substr(0, n - 2);
  }
  return w;
}

std::string Lemmatizer::lemma(std::string word) const {
  // Each rule strictly shortens the word or maps through the exception
  // table, whose targets are fixpoints in the bundled data; the bound
  // guards against cyclic user tables.
  for (int i = 0; i < 16; ++i) {
    std::string next = step(word);
    if (next == word) break;
    word = std::move(next);
  }
  return word;
}

TokenizedDoc Preprocessor::operator()(std::string_view text) const {
  TokenizedDoc doc;
  for (auto& token : tokenize(text)) {
    if (stopwords_->contains(token)) continue;
    std::string lemma = lemmatizer_->lemma(std::move(token));
    if (lemma.empty() || stopwords_->contains(lemma)) continue;
    doc.tokens.push_back(std::move(lemma));
  }
  return doc;
}

SentimentLexicon SentimentLexicon::parse(std::string_view text) {
  SentimentLexicon lex;
  for_each_entry(text, [&](std::string_view line, std::size_t line_no) {
    auto tab = line.find('\t');
    int value = 0;
    if (tab == std::string_view::npos) {
      throw InputError("lexicon line " + std::to_string(line_no) + ": expected term<TAB>strength");
    }
    auto digits = line.substr(tab + 1);
    if (!digits.empty() && digits.front() == '+') digits.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || value == 0 || value > 5 ||
        value < -5 || value == 1 || value == -1) {
      throw InputError("lexicon line " + std::to_string(line_no) + ": strength must be in +-2..+-5");
    }
    auto terms = tokenize(line.substr(0, tab));
    if (terms.size() != 1) {
      throw InputError("lexicon line " + std::to_string(line_no) + ": term must be a single word");
    }
    lex.terms_[terms.front()] = value;
  });
  return lex;
}

const SentimentLexicon& SentimentLexicon::bundled() {
  static const SentimentLexicon instance = parse(resources::sentiment_lexicon());
  return instance;
}

int SentimentLexicon::strength(const std::string& term) const {
  auto it = terms_.find(term);
  return it == terms_.end() ? 0 : it->second;
}

SentimentScore sentiment(std::string_view text, const SentimentLexicon& lexicon) {
  SentimentScore score;
  for (const auto& word : tokenize(text)) {
    const int s = lexicon.strength(word);
    score.positive = std::max(score.positive, s);
    score.negative = std::min(score.negative, s);
  }
  return score;
}

}  // namespace onboard
