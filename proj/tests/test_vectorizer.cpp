#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "verdictpipe/error.hpp"
#include "verdictpipe/pipeline.hpp"
#include "verdictpipe/rng.hpp"
#include "verdictpipe/vectorizer.hpp"

using namespace verdictpipe;

namespace {

NgramBag bag_of(std::initializer_list<std::pair<const char*, std::size_t>> items) {
  NgramBag b;
  for (auto [k, v] : items) b.counts[k] = v;
  return b;
}

std::vector<std::vector<std::string>> random_token_docs(CounterRng& rng, std::size_t max_docs, std::size_t max_tokens) {
  static const std::vector<std::string> words = {"appeal", "court", "order", "petit", "respond", "tribun",
                                                 "evid", "wit", "bench", "decre", "stay", "land"};
  std::vector<std::vector<std::string>> docs(1 + rng.below(max_docs));
  for (auto& d : docs) {
    const std::size_t vocab = 3 + rng.below(words.size() - 3);
    for (std::size_t i = 0, n = rng.below(max_tokens + 1); i < n; ++i) d.push_back(words[rng.below(vocab)]);
  }
  return docs;
}

}  // namespace

TEST_CASE("vocabulary examples") {
  const std::vector<NgramBag> bags = {bag_of({{"appeal", 1}, {"xyz_rare", 2}}), bag_of({{"appeal", 3}}),
                                      bag_of({{"appeal", 1}}), bag_of({{"appeal", 1}})};
  const auto vocab = build_vocabulary(bags, 0.10);
  REQUIRE(vocab.size() == 2);
  CHECK(vocab.idf()[*vocab.index_of("appeal")] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(vocab.idf()[*vocab.index_of("xyz_rare")] == doctest::Approx(std::log(5.0 / 2.0) + 1.0));
  CHECK(vocab.idf()[*vocab.index_of("xyz_rare")] == doctest::Approx(1.9163).epsilon(1e-4));

  std::vector<NgramBag> ten(10, bag_of({{"common", 1}}));
  ten[0].counts["once"] = 1;
  const auto pruned = build_vocabulary(ten, 0.20);
  CHECK_FALSE(pruned.index_of("once").has_value());
  CHECK(pruned.index_of("common").has_value());
}

TEST_CASE("min_df threshold is an exact ceiling") {
  CHECK(Vocabulary::min_df_count(0.10, 4) == 1);
  CHECK(Vocabulary::min_df_count(0.20, 10) == 2);
  CHECK(Vocabulary::min_df_count(0.10, 30) == 3);  // 0.1*30 is 3.0000000000000004 in floating point
  CHECK(Vocabulary::min_df_count(0.7, 10) == 7);
  CHECK(Vocabulary::min_df_count(0.15, 10) == 2);
  CHECK(Vocabulary::min_df_count(1.0, 7) == 7);
}

TEST_CASE("build_vocabulary errors") {
  CHECK_THROWS_AS(build_vocabulary(std::vector<NgramBag>{}, 0.1), Error);
  const std::vector<NgramBag> empties(3);
  try {
    build_vocabulary(empties, 0.1);
    FAIL("expected EmptyVocabulary");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyVocabulary);
  }
  const std::vector<NgramBag> one = {bag_of({{"a", 1}})};
  CHECK_THROWS_AS(build_vocabulary(one, 0.0), Error);
  CHECK_THROWS_AS(build_vocabulary(one, 1.5), Error);
}

TEST_CASE("vectorize examples") {
  const std::vector<NgramBag> bags = {bag_of({{"alpha", 1}, {"beta", 1}}), bag_of({{"alpha", 2}})};
  const auto vocab = build_vocabulary(bags, 0.5);
  const auto oov = vectorize(bag_of({{"gamma", 4}}), vocab);
  CHECK(oov.empty());
  CHECK(oov.l2_norm == 0.0);
  const auto single = vectorize(bag_of({{"beta", 7}}), vocab);
  REQUIRE(single.entries.size() == 1);
  CHECK(single.entries[0].second == 1.0);
}

TEST_CASE("pruning soundness and idf monotonicity on random corpora") {
  CounterRng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto docs = random_token_docs(rng, 20, 60);
    std::vector<NgramBag> bags;
    for (const auto& d : docs) bags.push_back(ngrams(TokenList{d}, 1 + rng.below(4)));
    const double ratio = 0.05 + 0.5 * rng.uniform();
    Vocabulary vocab;
    try {
      vocab = build_vocabulary(bags, ratio);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyVocabulary);
      continue;
    }
    const auto threshold = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(bags.size()) - 1e-9));
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      CHECK(vocab.df()[i] >= threshold);
      CHECK(vocab.idf()[i] >= 1.0);
      if (i > 0) CHECK(vocab.terms()[i - 1] < vocab.terms()[i]);
      for (std::size_t j = 0; j < vocab.size(); ++j)
        if (vocab.df()[i] < vocab.df()[j]) CHECK(vocab.idf()[i] > vocab.idf()[j]);
    }
    for (const auto& b : bags) {
      const auto v = vectorize(b, vocab);
      if (v.empty()) continue;
      double sq = 0;
      for (const auto& [idx, w] : v.entries) {
        CHECK(idx < vocab.size());
        CHECK(w > 0);
        sq += w * w;
      }
      CHECK(std::abs(sq - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("tf-idf matches the naive oracle") {
  CounterRng rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const auto docs = random_token_docs(rng, 20, 200);
    const std::size_t n_max = 1 + rng.below(4);
    const double ratio = 0.1 * static_cast<double>(1 + rng.below(4));
    std::vector<NgramBag> bags;
    for (const auto& d : docs) bags.push_back(ngrams(TokenList{d}, n_max));
    const auto oracle = vptest::naive_tfidf(docs, n_max, ratio);
    if (oracle.terms.empty()) {
      CHECK_THROWS_AS(build_vocabulary(bags, ratio), Error);
      continue;
    }
    const auto vocab = build_vocabulary(bags, ratio);
    REQUIRE(vocab.terms() == oracle.terms);
    for (std::size_t d = 0; d < docs.size(); ++d) {
      const auto got = vptest::dense(vectorize(bags[d], vocab), vocab.size());
      for (std::size_t t = 0; t < got.size(); ++t) CHECK(std::abs(got[t] - oracle.rows[d][t]) < 1e-12);
    }
  }
}

TEST_CASE("duplicating every document keeps the vocabulary and scales df") {
  // Smoothed idf is ln((1+N)/(1+df))+1, which is not invariant under
  // N, df -> 2N, 2df; the vectors shift slightly and the terms do not.
  CounterRng rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const auto docs = random_token_docs(rng, 10, 40);
    std::vector<NgramBag> bags;
    for (const auto& d : docs) bags.push_back(ngrams(TokenList{d}, 2));
    std::vector<NgramBag> doubled = bags;
    doubled.insert(doubled.end(), bags.begin(), bags.end());
    Vocabulary a;
    try {
      a = build_vocabulary(bags, 0.2);
    } catch (const Error&) {
      continue;
    }
    const auto b = build_vocabulary(doubled, 0.2);
    REQUIRE(a.terms() == b.terms());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(b.df()[i] == 2 * a.df()[i]);
      CHECK(b.idf()[i] == Vocabulary::smoothed_idf(2 * a.corpus_size(), 2 * a.df()[i]));
    }
    for (const auto& bag : bags) {
      const auto va = vectorize(bag, a);
      const auto vb = vectorize(bag, b);
      REQUIRE(va.entries.size() == vb.entries.size());
      for (std::size_t i = 0; i < va.entries.size(); ++i) CHECK(va.entries[i].first == vb.entries[i].first);
    }
  }
}

TEST_CASE("vocabulary column constructor rejects unsorted terms") {
  CHECK_THROWS_AS(Vocabulary({"b", "a"}, {1, 1}, {1.0, 1.0}, 2, 0.1), Error);
  CHECK_NOTHROW(Vocabulary({"a", "b"}, {1, 1}, {1.0, 1.0}, 2, 0.1));
}

TEST_CASE("csv export shape, determinism and round trip") {
  Dataset ds;
  ds.feature_names = {"alpha", "beta_gamma"};
  ds.vectors.resize(2);
  ds.vectors[0].entries = {{0, 0.6}, {1, 0.8}};
  ds.vectors[1].entries = {{1, 1.0}};
  ds.labels = {Disposition::Allow, Disposition::Dispose};
  ds.doc_ids = {"a", "b"};
  const auto csv = format_csv(ds);
  CHECK(csv == "alpha,beta_gamma,label\n0.6,0.8,allow\n0,1,dispose\n");
  CHECK(format_csv(ds) == csv);

  CounterRng rng(24);
  Dataset big;
  for (int f = 0; f < 5; ++f) big.feature_names.push_back("f" + std::string(1, static_cast<char>('a' + f)));
  for (int r = 0; r < 20; ++r) {
    FeatureVector v;
    for (std::uint32_t f = 0; f < 5; ++f)
      if (rng.uniform() < 0.6) v.entries.emplace_back(f, rng.uniform());
    big.vectors.push_back(v);
    big.labels.push_back(disposition_at(rng.below(3)));
    big.doc_ids.push_back("d" + std::to_string(r));
  }
  vptest::ScratchDir dir("csv");
  export_csv(big, dir / "x.csv");
  const auto back = import_csv(dir / "x.csv");
  CHECK(back.feature_names == big.feature_names);
  CHECK(back.labels == big.labels);
  REQUIRE(back.size() == big.size());
  for (std::size_t r = 0; r < big.size(); ++r) {
    const auto a = vptest::dense(big.vectors[r], 5);
    const auto b = vptest::dense(back.vectors[r], 5);
    for (std::size_t f = 0; f < 5; ++f) CHECK(std::abs(a[f] - b[f]) <= 5e-6 * std::max(1e-300, std::abs(a[f])));
  }
  CHECK_THROWS_AS(parse_csv("a,label\n0.5\n"), Error);
  CHECK_THROWS_AS(parse_csv("a,label\n0.5,granted\n"), Error);
}

TEST_CASE("dataset validation") {
  Dataset ds;
  ds.vectors.resize(2);
  ds.labels = {Disposition::Allow};
  ds.doc_ids = {"a", "b"};
  CHECK_THROWS_AS(ds.validate(), Error);
}
