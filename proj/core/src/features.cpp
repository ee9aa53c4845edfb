#include "onboard/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "onboard/errors.hpp"

namespace onboard {

std::optional<std::uint32_t> Vocabulary::index_of(const std::string& term) const {
  auto it = index_.find(term);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double Vocabulary::idf(std::size_t index) const {
  const double n = static_cast<double>(corpus_size_);
  return std::log((1.0 + n) / (1.0 + static_cast<double>(df_[index]))) + 1.0;
}

std::string Vocabulary::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::string_view bytes) {
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  mix(std::to_string(corpus_size_));
  mix("\n");
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    mix(terms_[i]);
    mix("\t");
    mix(std::to_string(df_[i]));
    mix("\n");
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void Vocabulary::reindex() {
  index_.clear();
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) index_.emplace(terms_[i], static_cast<std::uint32_t>(i));
}

nlohmann::ordered_json Vocabulary::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = "onboard-vocabulary/1";
  j["corpus_size"] = corpus_size_;
  j["hash"] = hash();
  j["terms"] = terms_;
  j["df"] = df_;
  return j;
}

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
  Vocabulary v;
  try {
    v.corpus_size_ = j.at("corpus_size").get<std::size_t>();
    v.terms_ = j.at("terms").get<std::vector<std::string>>();
    v.df_ = j.at("df").get<std::vector<std::uint32_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("vocabulary: ") + e.what());
  }
  if (v.terms_.size() != v.df_.size()) throw InputError("vocabulary: terms/df length mismatch");
  for (std::size_t i = 0; i < v.terms_.size(); ++i) {
    if (v.df_[i] < 1 || v.df_[i] > v.corpus_size_) throw InputError("vocabulary: df out of range");
    if (i > 0 && !(v.terms_[i - 1] < v.terms_[i])) throw InputError("vocabulary: terms not sorted");
  }
  v.reindex();
  if (auto it = j.find("hash"); it != j.end() && it->get<std::string>() != v.hash()) {
    throw ArtifactMismatch("vocabulary: stored hash does not match contents");
  }
  return v;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << to_json().dump(1) << '\n';
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return from_json(j);
}

Vocabulary build_vocabulary(std::span<const TokenizedDoc> docs, std::uint32_t min_df) {
  if (docs.empty()) throw InputError("cannot build a vocabulary from an empty corpus");
  std::map<std::string, std::uint32_t> df;
  std::vector<const std::string*> unique;
  for (const TokenizedDoc& doc : docs) {
    unique.clear();
    for (const auto& t : doc.tokens) unique.push_back(&t);
    std::sort(unique.begin(), unique.end(), [](auto* a, auto* b) { return *a < *b; });
    unique.erase(std::unique(unique.begin(), unique.end(), [](auto* a, auto* b) { return *a == *b; }),
                 unique.end());
    for (const std::string* t : unique) ++df[*t];
  }
  Vocabulary v;
  v.corpus_size_ = docs.size();
  for (auto& [term, count] : df) {
    if (count < min_df) continue;
    v.terms_.push_back(term);
    v.df_.push_back(count);
  }
  v.reindex();
  return v;
}

SparseVector tfidf_transform(const TokenizedDoc& doc, const Vocabulary& v) {
  std::map<std::uint32_t, double> tf;
  for (const auto& t : doc.tokens) {
    if (auto idx = v.index_of(t)) tf[*idx] += 1.0;
  }
  SparseVector out;
  double norm2 = 0;
  for (auto& [idx, count] : tf) {
    const double w = count * v.idf(idx);
    out.push(idx, w);
    norm2 += w * w;
  }
  if (norm2 > 0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& w : out.values) w *= inv;
  }
  return out;
}

IssueText FeatureExtractor::extract(const Issue& issue) const {
  IssueText t;
  std::string combined;
  combined.reserve(issue.title.size() + 1 + issue.description.size());
  combined.append(issue.title).append(" ").append(issue.description);
  t.doc = preprocessor_(combined);
  t.sentiment = sentiment(issue.description, *lexicon_);
  t.word_count = word_count(issue.description);
  return t;
}

std::vector<IssueText> FeatureExtractor::extract_all(const Dataset& d) const {
  std::vector<IssueText> out;
  out.reserve(d.size());
  for (const Issue& issue : d.issues()) out.push_back(extract(issue));
  return out;
}

SparseVector feature_row(const IssueText& text, const Vocabulary& v) {
  SparseVector row = tfidf_transform(text.doc, v);
  const auto base = static_cast<std::uint32_t>(v.size());
  row.push(base, static_cast<double>(text.sentiment.positive));
  row.push(base + 1, static_cast<double>(text.sentiment.negative));
  if (text.word_count > 0) row.push(base + 2, static_cast<double>(text.word_count));
  return row;
}

FeatureMatrix assemble_features(const Dataset& d, const RoleLabeling& labeling, const Vocabulary& v,
                                const FeatureExtractor& extractor) {
  FeatureMatrix fm;
  fm.matrix = SparseMatrix(feature_count(v));
  fm.vocabulary_size = v.size();
  std::unordered_set<std::string_view> seen;
  for (const LabeledIssue& e : labeling.entries) {
    if (!seen.insert(e.issue_id).second) throw InputError("duplicate issue id in labeling: " + e.issue_id);
    fm.matrix.append_row(feature_row(extractor.extract(d.issues().at(e.issue_index)), v));
    fm.row_ids.push_back(e.issue_id);
    fm.labels.push_back(e.label);
  }
  return fm;
}

}  // namespace onboard
