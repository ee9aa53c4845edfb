#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "onboard/corpus.hpp"

namespace onboard {

/// Generator for corpora with a known class signal. Issues among their
/// resolver's first `newcomer_threshold` resolutions carry the marker word
/// with probability marker_positive, all others with marker_negative.
/// Everything else (background words, sentiment words, lengths) is drawn
/// independently of the class.
struct SyntheticConfig {
  std::string project = "synthetic";
  std::size_t contributors = 200;
  std::size_t resolved_issues = 2000;
  std::size_t unresolved_issues = 0;
  /// Every contributor resolves exactly resolved_issues / contributors
  /// issues (the remainder goes to the first ones) when true; otherwise
  /// counts follow a heavy-tailed draw with at least one each.
  bool even_load = true;
  int newcomer_threshold = 1;
  std::string marker = "easyfix";
  double marker_positive = 0.9;
  double marker_negative = 0.05;
  /// Chance that an unresolved issue carries the marker.
  double marker_unresolved = 0.5;
  std::size_t background_vocabulary = 2000;
  std::size_t title_words_min = 4, title_words_max = 10;
  std::size_t description_words_min = 20, description_words_max = 60;
  /// Chance per description of one class-independent sentiment word.
  double sentiment_rate = 0.3;
  int span_days = 3 * 365;
  std::uint64_t seed = 0;
};

/// Pronounceable consonant-vowel pseudo-words that survive preprocessing
/// unchanged (not stopwords, not altered by lemmatization).
std::vector<std::string> background_words(std::size_t count);

/// Throws std::invalid_argument on inconsistent counts or probabilities.
Dataset generate_synthetic(const SyntheticConfig& config);

}  // namespace onboard
