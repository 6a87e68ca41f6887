#pragma once

// Helpers shared by the unit tests and the acceptance binary: independent
// oracles, fixtures and a scratch-directory guard.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "verdictpipe/bundle.hpp"
#include "verdictpipe/disposition.hpp"
#include "verdictpipe/learners.hpp"
#include "verdictpipe/pipeline.hpp"
#include "verdictpipe/vectorizer.hpp"

namespace vptest {

namespace fs = std::filesystem;

fs::path data_dir();

/// Fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag);
  ~ScratchDir();
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  const fs::path& path() const noexcept { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

void write_file(const fs::path& path, const std::string& text);
std::string read_file(const fs::path& path);

/// word -> stem pairs from the committed reference vocabulary.
std::vector<std::pair<std::string, std::string>> load_porter_vocabulary();

struct LabelFixture {
  std::string text;
  std::optional<verdictpipe::Disposition> expected;
};

/// Hand-written operative-order sentences and short judgment tails.
const std::vector<LabelFixture>& hand_label_fixtures();

/// Dense TF-IDF recomputed by brute force from token sequences, sharing no
/// code with the vectorizer.
struct NaiveTfidf {
  std::vector<std::string> terms;              // sorted
  std::vector<std::vector<double>> rows;       // one dense row per document
};
NaiveTfidf naive_tfidf(const std::vector<std::vector<std::string>>& token_docs, std::size_t ngram_max,
                       double min_df_ratio);

/// Dense copy of a sparse vector.
std::vector<double> dense(const verdictpipe::FeatureVector& v, std::size_t width);

/// Linearly separable 40-document dataset over 6 features: each class owns
/// two features that dominate its rows.
verdictpipe::Dataset separable_dataset();

/// Central finite-difference check of the MLP gradient on a small dataset;
/// returns the largest relative error over all parameters.
double mlp_gradient_check_max_error(std::size_t samples, std::size_t features, std::size_t hidden, std::uint64_t seed);

/// The generator's documents run through the pipeline in memory, with doc
/// ids case_00001... and generator ground truth as labels.
verdictpipe::PreparedCorpus synthetic_prepared(std::size_t n, std::uint64_t seed, const verdictpipe::PipelineConfig& cfg);

/// A bundle trained on every document of a synthetic corpus.
verdictpipe::ModelBundle synthetic_bundle(std::size_t n, std::uint64_t seed, verdictpipe::LearnerKind kind,
                                          bool exclude_dispositions);

}  // namespace vptest
