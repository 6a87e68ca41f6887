#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace verdictpipe {

enum class StemmerKind { Porter, None };

struct PrepConfig {
  std::size_t min_token_len = 3;
  std::set<std::string> stopwords;  // filled with the bundled list by default()
  std::size_t ngram_max = 4;
  StemmerKind stemmer = StemmerKind::Porter;

  /// min_token_len=3, the bundled 179-word English list, 1..4-grams, Porter.
  static PrepConfig defaults();

  /// Throws Error{InvalidConfig} when an invariant is violated.
  void validate() const;
};

struct TokenList {
  std::vector<std::string> tokens;
};

/// n-gram key (tokens joined by '_') to occurrence count. Ordered so that
/// every downstream reduction iterates deterministically.
struct NgramBag {
  std::map<std::string, std::size_t> counts;

  std::size_t total() const noexcept;
};

/// The bundled English stopword list, in file order.
const std::vector<std::string>& bundled_stopwords();

/// Parses a one-word-per-line stopword resource (blank lines and '#' comments skipped).
std::set<std::string> parse_stopwords(std::string_view text);

/// Porter (1980) stemmer, tartarus reference variant. Input must match [a-z]+.
std::string porter_stem(std::string_view word);

/// Lowercase, punctuation to space, drop digits, split, length filter,
/// stopword filter, stem -- always in that order.
TokenList normalize(std::string_view raw_text, const PrepConfig& cfg);

/// Contiguous n-grams for n = 1..min(ngram_max, tokens.size()).
NgramBag ngrams(const TokenList& tokens, std::size_t ngram_max);

}  // namespace verdictpipe
