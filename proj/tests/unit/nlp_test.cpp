#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "onboard/errors.hpp"
#include "onboard/features.hpp"
#include "onboard/synthetic.hpp"
#include "onboard/text.hpp"
#include "oracles.hpp"

using namespace onboard;

namespace {

std::vector<TokenizedDoc> docs_of(const std::vector<std::vector<std::string>>& raw) {
  std::vector<TokenizedDoc> out;
  for (const auto& r : raw) out.push_back(TokenizedDoc{r});
  return out;
}

double weight(const SparseVector& v, const Vocabulary& vocab, const std::string& term) {
  auto idx = vocab.index_of(term);
  if (!idx) return 0;
  return RowView(v).at(*idx);
}

std::string random_text(Rng& rng) {
  static const std::vector<std::string> pieces = {
      "The",     "buttons", "were",   "broken", "crashes", "Running", "tested", "WINDOWS", "x86_64", "e.g.",
      "classes", "boxes",   "ladies", "stopped", "is",     "a",       "quickly", "builder", "don't", "2048",
      "été",     "--",      "foo.bar()", "worthless", "loved", "analyses", "children", "matches", "passes"};
  std::string s;
  const std::size_t n = rng.below(15);
  for (std::size_t i = 0; i < n; ++i) s += pieces[rng.below(pieces.size())] + (rng.bernoulli(0.2) ? ", " : " ");
  return s;
}

}  // namespace

TEST_CASE("tokenize lowercases and splits on non-alphanumerics") {
  CHECK(tokenize("Foo.bar(x86_64) ÉTÉ 42") == std::vector<std::string>{"foo", "bar", "x86", "64", "t", "42"});
  CHECK(tokenize("").empty());
}

TEST_CASE("preprocess drops stopwords and lemmatizes") {
  CHECK(preprocess("The Buttons were broken").tokens == std::vector<std::string>{"button", "broken"});
  CHECK(preprocess("").tokens.empty());
  CHECK(preprocess("the and of").tokens.empty());
  CHECK(preprocess("Crashes when running tests").tokens == std::vector<std::string>{"crash", "run", "test"});
  CHECK(preprocess("children bought boxes").tokens == std::vector<std::string>{"child", "buy", "box"});
}

TEST_CASE("bundled resources load") {
  CHECK(Stopwords::bundled().size() >= 120);
  CHECK(Stopwords::bundled().contains("the"));
  CHECK_FALSE(Stopwords::bundled().contains("button"));
  CHECK(SentimentLexicon::bundled().size() > 50);
  CHECK(SentimentLexicon::bundled().strength("worthless") == -4);
  CHECK(SentimentLexicon::bundled().strength("button") == 0);
}

TEST_CASE("preprocess output is a fixpoint") {
  Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    const TokenizedDoc once = preprocess(random_text(rng));
    std::string joined;
    for (const auto& t : once.tokens) joined += t + " ";
    CHECK(preprocess(joined) == once);
    for (const auto& t : once.tokens) {
      CHECK_FALSE(t.empty());
      CHECK_FALSE(Stopwords::bundled().contains(t));
    }
  }
}

TEST_CASE("lemmatizer and resource parsers") {
  const Lemmatizer& l = Lemmatizer::bundled();
  CHECK(l.lemma("ladies") == "lady");
  CHECK(l.lemma("classes") == "class");
  CHECK(l.lemma("status") == "status");
  CHECK(l.lemma("stopped") == "stop");
  CHECK(l.lemma(l.lemma("builders")) == l.lemma("builders"));
  CHECK_THROWS_AS(Lemmatizer::parse("no tab here"), InputError);
  CHECK_THROWS_AS(SentimentLexicon::parse("awful\t-7"), InputError);
  CHECK_THROWS_AS(SentimentLexicon::parse("meh\t1"), InputError);
  CHECK(SentimentLexicon::parse("# comment\nawful\t-5\n").strength("awful") == -5);
  CHECK(Stopwords::parse("# c\nfoo\n\nbar\n").size() == 2);
}

TEST_CASE("sentiment max and min rule") {
  const auto lex = SentimentLexicon::parse("nice\t3\nawful\t-4\ngood\t2\nbad\t-2\n");
  CHECK(sentiment("this is fine", lex) == SentimentScore{1, -1});
  CHECK(sentiment("Nice but AWFUL, bad and good", lex) == SentimentScore{3, -4});
  CHECK(sentiment("", lex) == SentimentScore{1, -1});
  // Whole words only.
  CHECK(sentiment("goodness badge", lex) == SentimentScore{1, -1});

  const SentimentScore mixed =
      sentiment("I loved the new dialog but the export is worthless garbage", SentimentLexicon::bundled());
  CHECK(mixed.positive >= 2);
  CHECK(mixed.negative <= -2);
}

TEST_CASE("sentiment bounds hold on random byte strings") {
  Rng rng(4);
  for (int i = 0; i < 2000; ++i) {
    std::string s;
    const std::size_t n = rng.below(200);
    for (std::size_t k = 0; k < n; ++k) s.push_back(static_cast<char>(rng.below(256)));
    if (rng.bernoulli(0.5)) s += " worthless great ";
    const SentimentScore sc = sentiment(s, SentimentLexicon::bundled());
    CHECK(sc.positive >= 1);
    CHECK(sc.positive <= 5);
    CHECK(sc.negative <= -1);
    CHECK(sc.negative >= -5);
  }
}

TEST_CASE("build_vocabulary counts document frequency once per document") {
  const auto docs = docs_of({{"b", "a", "b"}, {"b"}});
  const Vocabulary v = build_vocabulary(docs);
  CHECK(v.terms() == std::vector<std::string>{"a", "b"});
  CHECK(v.df(*v.index_of("a")) == 1);
  CHECK(v.df(*v.index_of("b")) == 2);
  CHECK(v.corpus_size() == 2);
  CHECK_THROWS_AS(build_vocabulary(std::vector<TokenizedDoc>{}), InputError);

  const Vocabulary pruned = build_vocabulary(docs, 2);
  CHECK(pruned.terms() == std::vector<std::string>{"b"});
}

TEST_CASE("document frequencies match a set-membership scan") {
  Rng rng(12);
  std::vector<std::vector<std::string>> raw;
  for (int i = 0; i < 100; ++i) {
    std::vector<std::string> doc;
    const std::size_t n = rng.below(12);
    for (std::size_t k = 0; k < n; ++k) doc.push_back("w" + std::to_string(rng.below(40)));
    raw.push_back(doc);
  }
  const Vocabulary v = build_vocabulary(docs_of(raw));
  std::set<std::string> all;
  for (const auto& d : raw) all.insert(d.begin(), d.end());
  REQUIRE(v.size() == all.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string& term = v.terms()[i];
    CHECK(v.index_of(term) == i);
    std::uint32_t df = 0;
    for (const auto& d : raw) df += std::set<std::string>(d.begin(), d.end()).count(term);
    CHECK(v.df(i) == df);
    CHECK(v.df(i) >= 1);
    CHECK(v.df(i) <= v.corpus_size());
    if (i > 0) CHECK(v.terms()[i - 1] < term);
  }
}

TEST_CASE("tf-idf on a four-document corpus equals the hand calculation") {
  const std::vector<std::vector<std::string>> raw = {
      {"crash", "window", "crash"}, {"window", "resize"}, {"crash", "log"}, {"button", "label"}};
  const Vocabulary v = build_vocabulary(docs_of(raw));
  const double idf2 = std::log(5.0 / 3.0) + 1.0;  // df = 2 of N = 4
  const double idf1 = std::log(5.0 / 2.0) + 1.0;  // df = 1

  const SparseVector d1 = tfidf_transform(TokenizedDoc{raw[0]}, v);
  CHECK(weight(d1, v, "crash") == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-12));
  CHECK(weight(d1, v, "window") == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-12));
  CHECK(d1.nnz() == 2);

  const SparseVector d2 = tfidf_transform(TokenizedDoc{raw[1]}, v);
  const double n2 = std::sqrt(idf2 * idf2 + idf1 * idf1);
  CHECK(std::abs(weight(d2, v, "window") - idf2 / n2) < 1e-9);
  CHECK(std::abs(weight(d2, v, "resize") - idf1 / n2) < 1e-9);

  const SparseVector d4 = tfidf_transform(TokenizedDoc{raw[3]}, v);
  CHECK(std::abs(weight(d4, v, "button") - std::sqrt(0.5)) < 1e-9);

  for (const auto& doc : raw) {
    const SparseVector got = tfidf_transform(TokenizedDoc{doc}, v);
    for (const auto& [term, w] : oracle::tfidf(raw, doc)) CHECK(std::abs(weight(got, v, term) - w) < 1e-9);
  }
}

TEST_CASE("tf-idf edge cases and norms") {
  const Vocabulary v = build_vocabulary(docs_of({{"a", "b"}, {"b", "c"}}));
  const SparseVector single = tfidf_transform(TokenizedDoc{{"a"}}, v);
  REQUIRE(single.nnz() == 1);
  CHECK(single.values[0] == doctest::Approx(1.0));
  CHECK(tfidf_transform(TokenizedDoc{{"zzz", "qqq"}}, v).nnz() == 0);
  CHECK(tfidf_transform(TokenizedDoc{}, v).nnz() == 0);
  // df = N gives the minimum idf of 1.
  CHECK(v.idf(*v.index_of("b")) == doctest::Approx(1.0));
  CHECK(v.idf(*v.index_of("a")) > v.idf(*v.index_of("b")));

  Rng rng(21);
  std::vector<std::vector<std::string>> raw;
  for (int i = 0; i < 60; ++i) {
    std::vector<std::string> doc;
    const std::size_t n = rng.below(10);
    for (std::size_t k = 0; k < n; ++k) doc.push_back("t" + std::to_string(rng.below(25)));
    raw.push_back(doc);
  }
  const Vocabulary big = build_vocabulary(docs_of(raw));
  const std::string before = big.hash();
  for (int i = 0; i < 100; ++i) {
    std::vector<std::string> doc;
    const std::size_t n = rng.below(10);
    for (std::size_t k = 0; k < n; ++k) doc.push_back("t" + std::to_string(rng.below(35)));
    const SparseVector row = tfidf_transform(TokenizedDoc{doc}, big);
    double norm = 0;
    for (double x : row.values) norm += x * x;
    if (row.nnz() == 0) {
      CHECK(norm == 0);
    } else {
      CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  // Transforming never changes the vocabulary.
  CHECK(big.hash() == before);
}

TEST_CASE("vocabulary JSON round trip and hash") {
  const Vocabulary v = build_vocabulary(docs_of({{"x", "y"}, {"y", "z"}, {"q"}}));
  const Vocabulary back = Vocabulary::from_json(nlohmann::json::parse(v.to_json().dump()));
  CHECK(back == v);
  CHECK(back.hash() == v.hash());
  CHECK(v.hash().size() == 16);
  const Vocabulary other = build_vocabulary(docs_of({{"x", "y"}, {"y"}, {"q"}}));
  CHECK(other.hash() != v.hash());

  fixture::TempDir dir;
  v.save(dir / "vocab.json");
  CHECK(Vocabulary::load(dir / "vocab.json") == v);
  CHECK_THROWS_AS(Vocabulary::from_json(nlohmann::json::parse(R"({"terms": 3})")), InputError);
}

TEST_CASE("assemble_features concatenates the three blocks") {
  std::vector<Issue> issues = {
      fixture::resolved_issue("a", "x", "2020-01-01T00:00:00Z", "Crash on save", "It crashes badly, worthless"),
      fixture::resolved_issue("b", "y", "2020-01-02T00:00:00Z", "Great feature", ""),
      fixture::resolved_issue("c", "x", "2020-01-03T00:00:00Z", "Save dialog", "the dialog is great and helpful"),
      fixture::open_issue("open", "Crash", "unlabeled")};
  const Dataset d("p", issues);
  const RoleLabeling labeling = label_rq1(d, 1);
  const FeatureExtractor fx;
  std::vector<TokenizedDoc> docs;
  for (const auto& e : labeling.entries) docs.push_back(fx.extract(d.issues()[e.issue_index]).doc);
  const Vocabulary v = build_vocabulary(docs);

  const FeatureMatrix m = assemble_features(d, labeling, v);
  REQUIRE(m.matrix.rows() == labeling.entries.size());
  CHECK(m.matrix.cols() == v.size() + 3);
  CHECK(m.vocabulary_size == v.size());
  for (std::size_t r = 0; r < m.matrix.rows(); ++r) {
    const Issue& issue = d.issues()[labeling.entries[r].issue_index];
    CHECK(m.row_ids[r] == issue.id);
    CHECK(m.labels[r] == labeling.entries[r].label);
    const RowView row = m.matrix.row(r);
    const SparseVector tf = tfidf_transform(preprocess(issue.title + " " + issue.description), v);
    for (std::size_t k = 0; k < tf.nnz(); ++k) CHECK(row.at(tf.indices[k]) == tf.values[k]);
    const SentimentScore s = sentiment(issue.description, SentimentLexicon::bundled());
    const auto base = static_cast<std::uint32_t>(v.size());
    CHECK(row.at(base) == s.positive);
    CHECK(row.at(base + 1) == s.negative);
    CHECK(row.at(base + 2) == static_cast<double>(word_count(issue.description)));
  }
  // Empty description: neutral sentiment and zero words.
  const RowView b = m.matrix.row(1);
  const auto base = static_cast<std::uint32_t>(v.size());
  CHECK(b.at(base) == 1);
  CHECK(b.at(base + 1) == -1);
  CHECK(b.at(base + 2) == 0);

  RoleLabeling dup = labeling;
  dup.entries.push_back(dup.entries.front());
  CHECK_THROWS_AS(assemble_features(d, dup, v), InputError);
}

TEST_CASE("synthetic background words survive preprocessing") {
  const auto words = background_words(500);
  CHECK(words.size() == 500);
  CHECK(std::set<std::string>(words.begin(), words.end()).size() == 500);
  for (const auto& w : words) {
    CHECK(preprocess(w).tokens == std::vector<std::string>{w});
    CHECK(SentimentLexicon::bundled().strength(w) == 0);
  }
}
