#include "verdictpipe/labeler.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "verdictpipe/error.hpp"

namespace verdictpipe {
namespace {

bool is_space(unsigned char c) { return std::isspace(c) != 0; }

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<Disposition> match_sentence(const std::string& lowered, const LabelerConfig& cfg) {
  for (const auto& p : cfg.patterns) {
    if (std::regex_search(lowered, p.regex)) return p.label;
  }
  return std::nullopt;
}

}  // namespace

DispositionPattern::DispositionPattern(Disposition l, std::string src)
    : label(l), source(std::move(src)) {
  try {
    regex = std::regex(source, std::regex::ECMAScript | std::regex::optimize);
  } catch (const std::regex_error& e) {
    throw Error(ErrorCode::InvalidConfig, "bad disposition pattern '" + source + "': " + e.what());
  }
}

LabelerConfig LabelerConfig::defaults() {
  LabelerConfig cfg;
  cfg.patterns = {
      {Disposition::Allow, "appeal(s)? (is|are|stand(s)?) allowed"},
      {Disposition::Allow, "appeal(s)? allowed"},
      {Disposition::Dismiss, "appeal(s)? (is|are|stand(s)?) dismissed"},
      {Disposition::Dismiss, "appeal(s)? dismissed"},
      {Disposition::Dismiss, "petition(s)? (is|are) dismissed"},
      {Disposition::Dispose, "disposed of"},
      {Disposition::Dispose, "stand(s)? disposed"},
  };
  return cfg;
}

void LabelerConfig::validate() const {
  if (tail_sentences < 1) throw Error(ErrorCode::InvalidConfig, "tail_sentences must be >= 1");
  for (Disposition d : kAllDispositions) {
    const bool covered = std::any_of(patterns.begin(), patterns.end(),
                                     [d](const DispositionPattern& p) { return p.label == d; });
    if (!covered) {
      throw Error(ErrorCode::InvalidConfig,
                  "no pattern for class '" + std::string(disposition_name(d)) + "'");
    }
  }
}

std::vector<DispositionPattern> parse_pattern_file(std::string_view text) {
  std::vector<DispositionPattern> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::InvalidConfig, "pattern file line " + std::to_string(lineno) + ": expected label<TAB>pattern");
    }
    const auto label = parse_disposition(trim(line.substr(0, tab)));
    if (!label) {
      throw Error(ErrorCode::InvalidConfig, "pattern file line " + std::to_string(lineno) + ": unknown label");
    }
    out.emplace_back(*label, line.substr(tab + 1));
  }
  return out;
}

std::string format_pattern_file(const std::vector<DispositionPattern>& patterns) {
  std::string out;
  for (const auto& p : patterns) {
    out += disposition_name(p.label);
    out += '\t';
    out += p.source;
    out += '\n';
  }
  return out;
}

std::string_view unlabeled_reason_name(UnlabeledReason reason) noexcept {
  return reason == UnlabeledReason::Empty ? "Empty" : "NoMatch";
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    const bool terminator = c == '.' || c == '?' || c == '!' || c == ';';
    if (terminator && i + 1 < text.size() && is_space(static_cast<unsigned char>(text[i + 1]))) {
      std::string s = trim(text.substr(start, i + 1 - start));
      if (!s.empty()) out.push_back(std::move(s));
      start = i + 1;
    }
  }
  std::string last = trim(text.substr(start));
  if (!last.empty()) out.push_back(std::move(last));
  return out;
}

LabelResult extract_disposition(std::string_view raw_text, const LabelerConfig& cfg) {
  const auto sentences = split_sentences(raw_text);
  if (sentences.empty()) return {std::nullopt, UnlabeledReason::Empty};

  const std::size_t first = sentences.size() > cfg.tail_sentences ? sentences.size() - cfg.tail_sentences : 0;
  for (std::size_t i = sentences.size(); i-- > first;) {
    if (auto label = match_sentence(lowercase(sentences[i]), cfg)) return {label, UnlabeledReason::NoMatch};
  }
  return {std::nullopt, UnlabeledReason::NoMatch};
}

std::string strip_disposition_sentences(std::string_view raw_text, const LabelerConfig& cfg) {
  std::string out;
  for (const auto& s : split_sentences(raw_text)) {
    if (match_sentence(lowercase(s), cfg)) continue;
    if (!out.empty()) out.push_back(' ');
    out += s;
  }
  return out;
}

}  // namespace verdictpipe
