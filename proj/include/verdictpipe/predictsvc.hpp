#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <stop_token>
#include <string>
#include <utility>
#include <vector>

#include "verdictpipe/bundle.hpp"
#include "verdictpipe/corpus.hpp"

namespace verdictpipe {

struct FeatureContribution {
  std::string term;
  double contribution = 0.0;
};

struct Prediction {
  std::string doc_id;
  Disposition predicted = Disposition::Allow;
  ClassProbabilities probabilities{};
  std::vector<FeatureContribution> explanation;  // |contribution| descending
  std::string pipeline_fingerprint;
  bool empty_vector = false;  // EmptyVectorWarning: prediction comes from base rates only
};

/// Per-feature attribution toward the predicted class (k >= 1):
///   trees   - change in node value along v's decision path, summed per split feature;
///   linear  - weight * value;
///   network - d(logit)/dx * value.
/// Zero contributions are dropped; ties on |c| break by term.
std::vector<FeatureContribution> explain(const TrainedModel& model, const Vocabulary& vocab, const FeatureVector& v,
                                         Disposition predicted, std::size_t k);

/// Throws EmptyDocument for blank text. `fingerprint` may carry a
/// precomputed bundle_fingerprint(bundle); it is computed when empty.
Prediction predict_document(const ModelBundle& bundle, std::string_view raw_text, std::string doc_id = {},
                            std::size_t explain_k = 10, std::string fingerprint = {});

/// Plain-text prediction file. The `generated_at` line is the only
/// non-deterministic line; pass an empty timestamp to omit it.
std::string render_prediction(const Prediction& p, const std::string& timestamp);

struct WatchConfig {
  std::filesystem::path in_dir;
  std::filesystem::path out_dir;
  std::chrono::milliseconds poll_interval{1000};
  std::chrono::milliseconds stability_window{2000};
  std::set<std::string> extensions = {".pdf", ".txt"};
  std::size_t explain_k = 10;
  ConverterConfig converter;

  /// Throws InvalidConfig/MissingFile for equal or missing directories.
  void validate() const;
};

inline constexpr const char* kProcessedLedger = "processed.list";

/// Drop-directory service. poll_once() is one scan step; run() loops until
/// the stop token fires. Files are processed serially, each doc_id once,
/// with the processed set persisted in out_dir/processed.list.
class DirectoryWatcher {
 public:
  using Clock = std::chrono::steady_clock;

  DirectoryWatcher(const ModelBundle& bundle, WatchConfig cfg);

  /// Returns the number of files processed in this scan.
  std::size_t poll_once(Clock::time_point now = Clock::now());

  void run(std::stop_token stop);

  const std::set<std::string>& processed() const noexcept { return processed_; }

 private:
  struct Pending {
    std::uintmax_t size = 0;
    Clock::time_point stable_since;
  };

  void process(const std::filesystem::path& file, const std::string& doc_id);
  void record_processed(const std::string& doc_id);

  const ModelBundle& bundle_;
  WatchConfig cfg_;
  std::string fingerprint_;
  std::set<std::string> processed_;
  std::map<std::filesystem::path, Pending> pending_;
};

}  // namespace verdictpipe
