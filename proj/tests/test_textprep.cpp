#include <doctest.h>

#include <cctype>

#include "support.hpp"
#include "verdictpipe/error.hpp"
#include "verdictpipe/rng.hpp"
#include "verdictpipe/textprep.hpp"

using namespace verdictpipe;

namespace {

std::vector<std::string> toks(std::string_view text, const PrepConfig& cfg = PrepConfig::defaults()) {
  return normalize(text, cfg).tokens;
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

// Random mix of ASCII letters, digits, punctuation and multibyte code points.
std::string random_text(CounterRng& rng, std::size_t len) {
  static const std::vector<std::string> pieces = {
      "a", "B", "c", "z", "Q", "e", "o", " ", " ", "\t", "\n", "7", "0", ".", ",", "-", "'", "!",
      "\xc3\xa9", "\xc3\x9f", "\xe2\x80\x94", "\xe0\xa4\x85", "\xf0\x9f\x98\x80", "appeal", "THE", "ing", "ation"};
  std::string out;
  for (std::size_t i = 0; i < len; ++i) out += pieces[rng.below(pieces.size())];
  return out;
}

}  // namespace

TEST_CASE("normalize follows the fixed seven-step order") {
  CHECK(toks("The appeal is DISMISSED with costs of Rs. 5000.") == std::vector<std::string>{"appeal", "dismiss", "cost"});
  CHECK(toks("").empty());
  CHECK(toks("a an 42 .").empty());
  // Digits are deleted inside tokens, then the remainder is length-filtered.
  CHECK(toks("rs5000").empty());
  // Deleting digits does not split: "sec302ipc" becomes one word.
  CHECK(toks("sec302ipc") == std::vector<std::string>{"secipc"});
  // Hyphens and apostrophes split.
  CHECK(toks("high-court's") == std::vector<std::string>{"high", "court"});
}

TEST_CASE("stopwords are matched before stemming") {
  auto cfg = PrepConfig::defaults();
  // "having" is a stopword; its stem "have" would not be checked again.
  CHECK(toks("having", cfg).empty());
  cfg.stemmer = StemmerKind::None;
  CHECK(toks("Appeals ALLOWED", cfg) == std::vector<std::string>{"appeals", "allowed"});
}

TEST_CASE("bundled stopword list") {
  CHECK(bundled_stopwords().size() == 179);
  CHECK(PrepConfig::defaults().stopwords.contains("the"));
  CHECK_NOTHROW(PrepConfig::defaults().validate());
}

TEST_CASE("parse_stopwords skips blanks and comments") {
  const auto words = parse_stopwords("# list\nfoo\n\n  bar \r\n");
  CHECK(words == std::set<std::string>{"foo", "bar"});
}

TEST_CASE("PrepConfig validation") {
  auto cfg = PrepConfig::defaults();
  cfg.ngram_max = 5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = PrepConfig::defaults();
  cfg.ngram_max = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = PrepConfig::defaults();
  cfg.min_token_len = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = PrepConfig::defaults();
  cfg.stopwords.insert("Upper");
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = PrepConfig::defaults();
  cfg.stopwords.insert("abc1");
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("porter examples") {
  CHECK(porter_stem("caresses") == "caress");
  CHECK(porter_stem("relational") == "relat");
  CHECK(porter_stem("sky") == "sky");
  CHECK(porter_stem("dismissed") == "dismiss");
  CHECK(porter_stem("allowed") == "allow");
  CHECK(porter_stem("is") == "is");
}

TEST_CASE("porter matches the committed reference vocabulary") {
  const auto vocab = vptest::load_porter_vocabulary();
  REQUIRE(vocab.size() >= 1000);
  std::size_t mismatches = 0;
  for (const auto& [word, stem] : vocab) {
    if (porter_stem(word) != stem) {
      if (++mismatches <= 10) MESSAGE(word << " -> " << porter_stem(word) << " expected " << stem);
    }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("token invariants hold on random unicode text") {
  CounterRng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    auto plain = PrepConfig::defaults();
    plain.min_token_len = 1 + rng.below(4);
    plain.stemmer = StemmerKind::None;
    auto porter = plain;
    porter.stemmer = StemmerKind::Porter;
    const std::string text = random_text(rng, rng.below(60));
    // Stopwords are removed before stemming, so check them on the unstemmed run.
    std::vector<std::string> expected;
    for (const auto& w : normalize(text, plain).tokens) {
      CHECK(w.size() >= plain.min_token_len);
      CHECK_FALSE(plain.stopwords.contains(w));
      for (char c : w) CHECK((c >= 'a' && c <= 'z'));
      if (auto s = porter_stem(w); s.size() >= porter.min_token_len) expected.push_back(s);
    }
    const auto stemmed = normalize(text, porter).tokens;
    CHECK(stemmed == expected);
    for (const auto& t : stemmed) CHECK(t.size() >= porter.min_token_len);
  }
}

TEST_CASE("re-normalizing joined output") {
  CounterRng rng(12);
  auto plain = PrepConfig::defaults();
  plain.stemmer = StemmerKind::None;
  const auto porter = PrepConfig::defaults();
  for (int trial = 0; trial < 300; ++trial) {
    const std::string text = random_text(rng, rng.below(80));
    const auto once = normalize(text, plain).tokens;
    CHECK(normalize(join(once), plain).tokens == once);

    const auto stemmed = normalize(text, porter).tokens;
    for (const auto& t : normalize(join(stemmed), porter).tokens)
      for (char c : t) CHECK((c >= 'a' && c <= 'z'));
  }
}

TEST_CASE("ngrams examples") {
  const auto bag = ngrams(TokenList{{"appeal", "allow", "cost"}}, 4);
  CHECK(bag.total() == 6);
  CHECK(bag.counts.size() == 6);
  CHECK(bag.counts.at("appeal_allow_cost") == 1);
  CHECK(bag.counts.at("allow_cost") == 1);
  CHECK(ngrams(TokenList{}, 4).counts.empty());
  CHECK(ngrams(TokenList{{"aaa", "bbb", "ccc", "ddd", "eee"}}, 2).total() == 9);
  // Duplicates accumulate.
  const auto dup = ngrams(TokenList{{"aaa", "aaa", "aaa"}}, 2);
  CHECK(dup.counts.at("aaa") == 3);
  CHECK(dup.counts.at("aaa_aaa") == 2);
}

TEST_CASE("ngram occurrence formula") {
  for (std::size_t t = 0; t <= 50; ++t) {
    TokenList list;
    for (std::size_t i = 0; i < t; ++i) list.tokens.push_back("w" + std::string(1, static_cast<char>('a' + i % 7)));
    for (std::size_t n = 1; n <= 4; ++n) {
      std::size_t expected = 0;
      for (std::size_t k = 1; k <= std::min(n, t); ++k) expected += t - k + 1;
      CHECK(ngrams(list, n).total() == expected);
    }
  }
}
