#include "verdictpipe/textprep.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "verdictpipe/error.hpp"

namespace verdictpipe {

namespace detail {
extern const std::string_view kBundledStopwordText;
}  // namespace detail

namespace {

bool is_ascii_alpha(unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_ascii_digit(unsigned char c) { return c >= '0' && c <= '9'; }

}  // namespace

std::size_t NgramBag::total() const noexcept {
  std::size_t n = 0;
  for (const auto& [term, count] : counts) n += count;
  return n;
}

const std::vector<std::string>& bundled_stopwords() {
  static const std::vector<std::string> words = [] {
    std::vector<std::string> out;
    std::istringstream in{std::string(detail::kBundledStopwordText)};
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      out.push_back(line);
    }
    return out;
  }();
  return words;
}

std::set<std::string> parse_stopwords(std::string_view text) {
  std::set<std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    line.erase(0, first == std::string::npos ? line.size() : first);
    if (line.empty() || line.front() == '#') continue;
    out.insert(line);
  }
  return out;
}

PrepConfig PrepConfig::defaults() {
  PrepConfig cfg;
  const auto& words = bundled_stopwords();
  cfg.stopwords.insert(words.begin(), words.end());
  return cfg;
}

void PrepConfig::validate() const {
  if (min_token_len < 1) throw Error(ErrorCode::InvalidConfig, "min_token_len must be >= 1");
  if (ngram_max < 1 || ngram_max > 4) throw Error(ErrorCode::InvalidConfig, "ngram_max must be in [1,4]");
  for (const auto& w : stopwords) {
    for (unsigned char c : w) {
      if (std::isupper(c) || is_ascii_digit(c)) {
        throw Error(ErrorCode::InvalidConfig, "stopword '" + w + "' must be lowercase and digit-free");
      }
    }
  }
}

TokenList normalize(std::string_view raw_text, const PrepConfig& cfg) {
  // Steps 1-3 in one pass: ASCII letters are lowercased, digits deleted,
  // everything else (including every non-ASCII byte) becomes a separator.
  std::string cleaned;
  cleaned.reserve(raw_text.size());
  for (unsigned char c : raw_text) {
    if (is_ascii_alpha(c)) {
      cleaned.push_back(static_cast<char>(std::tolower(c)));
    } else if (is_ascii_digit(c)) {
      continue;
    } else {
      cleaned.push_back(' ');
    }
  }

  TokenList out;
  std::size_t pos = 0;
  while (pos < cleaned.size()) {
    while (pos < cleaned.size() && cleaned[pos] == ' ') ++pos;
    const std::size_t start = pos;
    while (pos < cleaned.size() && cleaned[pos] != ' ') ++pos;
    if (pos == start) break;
    std::string word = cleaned.substr(start, pos - start);
    if (word.size() < cfg.min_token_len) continue;
    if (cfg.stopwords.contains(word)) continue;
    if (cfg.stemmer == StemmerKind::Porter) {
      word = porter_stem(word);
      // Porter can shorten a surviving word below the minimum ("ties" -> "ti").
      if (word.size() < cfg.min_token_len) continue;
    }
    out.tokens.push_back(std::move(word));
  }
  return out;
}

NgramBag ngrams(const TokenList& tokens, std::size_t ngram_max) {
  NgramBag bag;
  const auto& t = tokens.tokens;
  const std::size_t top = std::min(ngram_max, t.size());
  for (std::size_t n = 1; n <= top; ++n) {
    for (std::size_t i = 0; i + n <= t.size(); ++i) {
      std::string key = t[i];
      for (std::size_t j = 1; j < n; ++j) {
        key.push_back('_');
        key += t[i + j];
      }
      ++bag.counts[key];
    }
  }
  return bag;
}

}  // namespace verdictpipe
