#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "verdictpipe/corpus.hpp"
#include "verdictpipe/labeler.hpp"
#include "verdictpipe/textprep.hpp"
#include "verdictpipe/vectorizer.hpp"

namespace verdictpipe {

/// Everything needed to turn raw text into a feature vector the same way at
/// training and serving time.
struct PipelineConfig {
  PrepConfig prep = PrepConfig::defaults();
  LabelerConfig labeler = LabelerConfig::defaults();
  double min_df_ratio = 0.10;
  // Drop sentences matching a disposition pattern before normalizing, so the
  // operative order cannot leak the label into the features.
  bool exclude_disposition_sentences = false;
};

NgramBag featurize_text(std::string_view raw_text, const PipelineConfig& cfg);

/// Labeled documents of a manifest with their n-gram bags, in manifest order.
/// Unlabeled documents are skipped.
struct PreparedCorpus {
  std::vector<std::string> doc_ids;
  std::vector<Disposition> labels;
  std::vector<NgramBag> bags;

  std::size_t size() const noexcept { return doc_ids.size(); }
};

PreparedCorpus prepare_corpus(const CorpusManifest& manifest, const PipelineConfig& cfg);

/// Vectorizes the selected rows against vocab.
Dataset make_dataset(const PreparedCorpus& corpus, std::span<const std::size_t> rows, const Vocabulary& vocab);

/// Fits the vocabulary on the selected rows only.
Vocabulary fit_vocabulary(const PreparedCorpus& corpus, std::span<const std::size_t> rows, double min_df_ratio);

std::vector<std::size_t> all_rows(std::size_t n);

}  // namespace verdictpipe
