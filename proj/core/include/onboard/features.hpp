#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "onboard/corpus.hpp"
#include "onboard/roles.hpp"
#include "onboard/sparse.hpp"
#include "onboard/text.hpp"

namespace onboard {

/// Term -> column mapping with document frequencies, built from training
/// documents only. Terms are indexed in lexicographic order.
class Vocabulary {
 public:
  Vocabulary() = default;

  std::size_t size() const noexcept { return terms_.size(); }
  std::size_t corpus_size() const noexcept { return corpus_size_; }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  std::uint32_t df(std::size_t index) const { return df_[index]; }
  std::optional<std::uint32_t> index_of(const std::string& term) const;

  /// ln((1 + N) / (1 + df)) + 1
  double idf(std::size_t index) const;

  /// FNV-1a over N and the (term, df) sequence, as 16 hex digits.
  std::string hash() const;

  nlohmann::ordered_json to_json() const;
  static Vocabulary from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.corpus_size_ == b.corpus_size_ && a.terms_ == b.terms_ && a.df_ == b.df_;
  }

 private:
  friend Vocabulary build_vocabulary(std::span<const TokenizedDoc>, std::uint32_t);
  void reindex();

  std::vector<std::string> terms_;
  std::vector<std::uint32_t> df_;
  std::size_t corpus_size_ = 0;
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// Throws InputError on an empty corpus. Terms occurring in fewer than
/// min_df documents are left out.
Vocabulary build_vocabulary(std::span<const TokenizedDoc> docs, std::uint32_t min_df = 1);

/// Raw tf times smoothed idf, L2-normalized; out-of-vocabulary terms ignored.
SparseVector tfidf_transform(const TokenizedDoc& doc, const Vocabulary& v);

/// Per-issue text features that do not depend on the vocabulary.
struct IssueText {
  TokenizedDoc doc;          // preprocess(title + " " + description)
  SentimentScore sentiment;  // raw description
  std::size_t word_count = 0;  // raw description
};

class FeatureExtractor {
 public:
  FeatureExtractor() : FeatureExtractor(Preprocessor{}, SentimentLexicon::bundled()) {}
  FeatureExtractor(Preprocessor preprocessor, const SentimentLexicon& lexicon)
      : preprocessor_(preprocessor), lexicon_(&lexicon) {}

  IssueText extract(const Issue& issue) const;
  /// One entry per dataset issue, in dataset order.
  std::vector<IssueText> extract_all(const Dataset& d) const;

 private:
  Preprocessor preprocessor_;
  const SentimentLexicon* lexicon_;
};

/// Column layout: [0, |V|) TF-IDF, then positive sentiment, negative
/// sentiment, description word count.
inline std::size_t feature_count(const Vocabulary& v) { return v.size() + 3; }

SparseVector feature_row(const IssueText& text, const Vocabulary& v);

struct FeatureMatrix {
  std::vector<std::string> row_ids;
  SparseMatrix matrix;
  std::vector<Label> labels;  // empty when assembled without labels
  std::size_t vocabulary_size = 0;
};

/// One row per labeled issue, in labeling order. Throws InputError when an
/// issue id appears twice.
FeatureMatrix assemble_features(const Dataset& d, const RoleLabeling& labeling, const Vocabulary& v,
                                const FeatureExtractor& extractor = FeatureExtractor{});

}  // namespace onboard
