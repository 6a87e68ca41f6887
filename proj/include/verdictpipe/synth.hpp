#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "verdictpipe/disposition.hpp"

namespace verdictpipe {

struct SynthConfig {
  std::size_t min_neutral = 5;
  std::size_t max_neutral = 20;
  std::size_t min_topical = 3;  // class-correlated sentences
  std::size_t max_topical = 8;
};

struct SyntheticDocument {
  std::string text;
  Disposition truth;
};

/// Round-robin class assignment; each document mixes neutral boilerplate,
/// class-correlated sentences and exactly one operative-order sentence
/// recognised by the default labeler patterns. Requires n >= 30.
std::vector<SyntheticDocument> generate_synthetic_corpus(std::size_t n, std::uint64_t seed,
                                                         const SynthConfig& cfg = {});

/// Writes case_00001.txt ... plus labels.tsv (file name, true label).
void write_synthetic_corpus(const std::vector<SyntheticDocument>& docs, const std::filesystem::path& dir);

/// The operative-order templates, per class, as used by the generator.
const std::vector<std::string>& disposition_templates(Disposition d);

}  // namespace verdictpipe
