#include <doctest.h>

#include "support.hpp"
#include "verdictpipe/error.hpp"
#include "verdictpipe/labeler.hpp"
#include "verdictpipe/rng.hpp"
#include "verdictpipe/synth.hpp"

using namespace verdictpipe;

namespace {
std::optional<Disposition> label_of(std::string_view text) {
  return extract_disposition(text, LabelerConfig::defaults()).label;
}
}  // namespace

TEST_CASE("labeler examples") {
  CHECK(label_of("Heard counsel. In the result, the appeal is dismissed.") == Disposition::Dismiss);
  CHECK(label_of("Facts recited. The appeals are allowed and the impugned order is set aside.") == Disposition::Allow);
  CHECK(label_of("Background. The appeal is dismissed. Costs follow. The connected appeal is allowed in part.") ==
        Disposition::Allow);
  const auto none = extract_disposition("The court reserved judgment.", LabelerConfig::defaults());
  CHECK_FALSE(none.labeled());
  CHECK(none.reason == UnlabeledReason::NoMatch);
  const auto blank = extract_disposition("   \n ", LabelerConfig::defaults());
  CHECK(blank.reason == UnlabeledReason::Empty);
}

TEST_CASE("hand-written fixtures") {
  for (const auto& f : vptest::hand_label_fixtures()) {
    INFO(f.text);
    CHECK(label_of(f.text) == f.expected);
  }
}

TEST_CASE("every generator template is recognized") {
  for (auto d : kAllDispositions)
    for (const auto& t : disposition_templates(d)) {
      INFO(t);
      CHECK(label_of(t) == d);
    }
}

TEST_CASE("only the tail is scanned") {
  LabelerConfig cfg = LabelerConfig::defaults();
  cfg.tail_sentences = 2;
  CHECK_FALSE(extract_disposition("The appeal is allowed. One. Two.", cfg).labeled());
  CHECK(extract_disposition("The appeal is allowed. One.", cfg).label == Disposition::Allow);
}

TEST_CASE("locality: appending non-matching and prepending anything") {
  CounterRng rng(5);
  const std::vector<std::string> filler = {"Costs are reserved.", "The record is returned.", "We thank counsel.",
                                           "The parties shall bear their own costs."};
  for (const auto& f : vptest::hand_label_fixtures()) {
    if (!f.expected) continue;
    std::string appended = f.text;
    for (std::size_t i = 0, n = rng.below(5); i < n; ++i) appended += " " + filler[rng.below(filler.size())];
    CHECK(label_of(appended) == f.expected);
    CHECK(label_of("The appeal is dismissed by the trial court. " + f.text) == f.expected);
  }
}

TEST_CASE("split_sentences") {
  CHECK(split_sentences("One. Two? Three! Four; five") ==
        std::vector<std::string>{"One.", "Two?", "Three!", "Four;", "five"});
  // No whitespace after the period: not a boundary.
  CHECK(split_sentences("Rs.5000 paid.").size() == 1);
  CHECK(split_sentences("  ").empty());
}

TEST_CASE("strip_disposition_sentences removes operative orders only") {
  const auto cfg = LabelerConfig::defaults();
  const std::string stripped =
      strip_disposition_sentences("The facts are simple. The appeal is allowed. No costs.", cfg);
  CHECK(stripped.find("allowed") == std::string::npos);
  CHECK(stripped.find("facts") != std::string::npos);
  CHECK(stripped.find("costs") != std::string::npos);
  CHECK_FALSE(extract_disposition(stripped, cfg).labeled());
}

TEST_CASE("pattern file round trip and validation") {
  const auto cfg = LabelerConfig::defaults();
  const auto text = format_pattern_file(cfg.patterns);
  const auto parsed = parse_pattern_file(text);
  REQUIRE(parsed.size() == cfg.patterns.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    CHECK(parsed[i].label == cfg.patterns[i].label);
    CHECK(parsed[i].source == cfg.patterns[i].source);
  }
  CHECK_THROWS_AS(parse_pattern_file("allow\t(unclosed"), Error);
  CHECK_THROWS_AS(parse_pattern_file("granted\tappeal granted"), Error);

  LabelerConfig missing;
  missing.patterns = parse_pattern_file("allow\tappeal allowed\ndismiss\tappeal dismissed\n");
  CHECK_THROWS_AS(missing.validate(), Error);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("labeling is deterministic") {
  const auto cfg = LabelerConfig::defaults();
  for (const auto& doc : generate_synthetic_corpus(60, 3)) {
    const auto a = extract_disposition(doc.text, cfg);
    const auto b = extract_disposition(doc.text, cfg);
    CHECK(a.label == b.label);
    CHECK(a.label == doc.truth);
  }
}
