#pragma once

#include <map>
#include <vector>

#include "onboard/features.hpp"
#include "onboard/roles.hpp"
#include "onboard/synthetic.hpp"

namespace bench {

// Feature matrix and rq1 (t = 1) labels for a planted synthetic corpus.
struct Corpus {
  onboard::Dataset dataset;
  std::vector<onboard::IssueText> texts;
  onboard::Vocabulary vocabulary;
  onboard::SparseMatrix x;
  std::vector<onboard::Label> y;
};

inline const Corpus& corpus(std::size_t issues) {
  static std::map<std::size_t, Corpus> cache;
  auto it = cache.find(issues);
  if (it != cache.end()) return it->second;
  Corpus c;
  onboard::SyntheticConfig cfg;
  cfg.resolved_issues = issues;
  cfg.contributors = issues / 10;
  cfg.seed = 1;
  c.dataset = onboard::generate_synthetic(cfg);
  c.texts = onboard::FeatureExtractor{}.extract_all(c.dataset);
  std::vector<onboard::TokenizedDoc> docs;
  for (const auto& t : c.texts) docs.push_back(t.doc);
  c.vocabulary = onboard::build_vocabulary(docs);
  c.x = onboard::SparseMatrix(onboard::feature_count(c.vocabulary));
  for (const auto& t : c.texts) c.x.append_row(onboard::feature_row(t, c.vocabulary));
  const onboard::RoleLabeling l = onboard::label_rq1(c.dataset, 1);
  for (const auto& e : l.entries) c.y.push_back(e.label);
  return cache.emplace(issues, std::move(c)).first->second;
}

}  // namespace bench
