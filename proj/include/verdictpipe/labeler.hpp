#pragma once

#include <cstddef>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "verdictpipe/disposition.hpp"

namespace verdictpipe {

struct DispositionPattern {
  Disposition label;
  std::string source;  // as written in the config; matched against lowercased sentences
  std::regex regex;

  DispositionPattern(Disposition label, std::string source);
};

struct LabelerConfig {
  std::size_t tail_sentences = 20;
  std::vector<DispositionPattern> patterns;

  static LabelerConfig defaults();

  /// Throws Error{InvalidConfig} unless every class has at least one pattern.
  void validate() const;
};

/// Reads the `label<TAB>pattern` override format; order is significant.
std::vector<DispositionPattern> parse_pattern_file(std::string_view text);
std::string format_pattern_file(const std::vector<DispositionPattern>& patterns);

enum class UnlabeledReason { NoMatch, Empty };

std::string_view unlabeled_reason_name(UnlabeledReason reason) noexcept;

struct LabelResult {
  std::optional<Disposition> label;
  UnlabeledReason reason = UnlabeledReason::NoMatch;  // meaningful only when !label

  bool labeled() const noexcept { return label.has_value(); }
};

/// Splits on [.?!;] followed by whitespace. Sentences are trimmed; empty ones dropped.
std::vector<std::string> split_sentences(std::string_view text);

/// Scans the last tail_sentences sentences; the last sentence with any match
/// decides, and within a sentence the first pattern in config order wins.
LabelResult extract_disposition(std::string_view raw_text, const LabelerConfig& cfg);

/// The text with every sentence that matches any disposition pattern removed.
/// Used to keep the operative order out of the feature space.
std::string strip_disposition_sentences(std::string_view raw_text, const LabelerConfig& cfg);

}  // namespace verdictpipe
