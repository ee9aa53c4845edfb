#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace onboard {

/// Bundled resources compiled in from core/data/.
namespace resources {
std::string_view stopwords();
std::string_view sentiment_lexicon();
std::string_view lemma_exceptions();
}  // namespace resources

/// Lowercased maximal runs of ASCII letters and digits. Every other byte,
/// including non-ASCII, is a separator.
std::vector<std::string> tokenize(std::string_view text);

class Stopwords {
 public:
  /// One word per line; blank lines and '#' comments ignored.
  static Stopwords parse(std::string_view text);
  static const Stopwords& bundled();

  bool contains(std::string_view word) const { return words_.count(std::string(word)) > 0; }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

/// Suffix-rule lemmatizer with an exception table. Rules are applied until
/// a fixpoint, so lemma(lemma(w)) == lemma(w).
class Lemmatizer {
 public:
  /// "inflected<TAB>lemma" per line.
  static Lemmatizer parse(std::string_view text);
  static const Lemmatizer& bundled();

  std::string lemma(std::string word) const;

 private:
  std::string step(const std::string& word) const;

  std::unordered_map<std::string, std::string> exceptions_;
};

struct TokenizedDoc {
  std::vector<std::string> tokens;

  friend bool operator==(const TokenizedDoc&, const TokenizedDoc&) = default;
};

/// lowercase -> tokenize -> drop stopwords -> lemmatize. Lemmas that land on
/// a stopword are dropped too.
class Preprocessor {
 public:
  Preprocessor() : Preprocessor(Stopwords::bundled(), Lemmatizer::bundled()) {}
  Preprocessor(const Stopwords& stopwords, const Lemmatizer& lemmatizer)
      : stopwords_(&stopwords), lemmatizer_(&lemmatizer) {}

  TokenizedDoc operator()(std::string_view text) const;

 private:
  const Stopwords* stopwords_;
  const Lemmatizer* lemmatizer_;
};

inline TokenizedDoc preprocess(std::string_view text) { return Preprocessor{}(text); }

struct SentimentScore {
  int positive = 1;   // [+1, +5]
  int negative = -1;  // [-5, -1]

  friend bool operator==(const SentimentScore&, const SentimentScore&) = default;
};

class SentimentLexicon {
 public:
  /// "term<TAB>strength" per line, strengths in +-2..+-5. Throws
  /// InputError on malformed lines or out-of-range strengths.
  static SentimentLexicon parse(std::string_view text);
  static const SentimentLexicon& bundled();

  /// 0 when the term is absent.
  int strength(const std::string& term) const;
  std::size_t size() const { return terms_.size(); }

 private:
  std::unordered_map<std::string, int> terms_;
};

/// Strongest positive and strongest negative lexicon hit over the lowercase
/// whole words of the raw text; (+1, -1) without hits.
SentimentScore sentiment(std::string_view text, const SentimentLexicon& lexicon);

}  // namespace onboard
