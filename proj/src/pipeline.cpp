#include "verdictpipe/pipeline.hpp"

#include <numeric>

#include "verdictpipe/error.hpp"

namespace verdictpipe {

NgramBag featurize_text(std::string_view raw_text, const PipelineConfig& cfg) {
  if (cfg.exclude_disposition_sentences) {
    const std::string stripped = strip_disposition_sentences(raw_text, cfg.labeler);
    return ngrams(normalize(stripped, cfg.prep), cfg.prep.ngram_max);
  }
  return ngrams(normalize(raw_text, cfg.prep), cfg.prep.ngram_max);
}

PreparedCorpus prepare_corpus(const CorpusManifest& manifest, const PipelineConfig& cfg) {
  PreparedCorpus out;
  for (const auto& doc : manifest.documents) {
    if (!doc.label) continue;
    out.doc_ids.push_back(doc.doc_id);
    out.labels.push_back(*doc.label);
    out.bags.push_back(featurize_text(doc.raw_text, cfg));
  }
  return out;
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

Vocabulary fit_vocabulary(const PreparedCorpus& corpus, std::span<const std::size_t> rows, double min_df_ratio) {
  std::vector<NgramBag> bags;
  bags.reserve(rows.size());
  for (std::size_t r : rows) bags.push_back(corpus.bags.at(r));
  return build_vocabulary(bags, min_df_ratio);
}

Dataset make_dataset(const PreparedCorpus& corpus, std::span<const std::size_t> rows, const Vocabulary& vocab) {
  Dataset ds;
  ds.feature_names = vocab.terms();
  for (std::size_t r : rows) {
    ds.vectors.push_back(vectorize(corpus.bags.at(r), vocab));
    ds.labels.push_back(corpus.labels.at(r));
    ds.doc_ids.push_back(corpus.doc_ids.at(r));
  }
  return ds;
}

}  // namespace verdictpipe
