#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "verdictpipe/disposition.hpp"
#include "verdictpipe/textprep.hpp"

namespace verdictpipe {

/// Pruned n-gram vocabulary with smoothed IDF: idf = ln((1+N)/(1+df)) + 1.
/// Immutable once built.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Rebuilds the index from already-computed columns (bundle loading).
  /// terms must be strictly increasing.
  Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> df, std::vector<double> idf,
             std::size_t corpus_size, double min_df_ratio);

  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const std::vector<std::size_t>& df() const noexcept { return df_; }
  const std::vector<double>& idf() const noexcept { return idf_; }
  std::size_t corpus_size() const noexcept { return corpus_size_; }
  double min_df_ratio() const noexcept { return min_df_ratio_; }

  std::optional<std::uint32_t> index_of(const std::string& term) const;

  /// ceil(min_df_ratio * N), computed so that exact products are not bumped
  /// up by floating-point noise.
  static std::size_t min_df_count(double min_df_ratio, std::size_t corpus_size);

  static double smoothed_idf(std::size_t corpus_size, std::size_t df);

 private:
  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::vector<double> idf_;
  std::size_t corpus_size_ = 0;
  double min_df_ratio_ = 0.10;
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// Sparse L2-normalized TF-IDF vector. Entries are sorted by index.
struct FeatureVector {
  std::vector<std::pair<std::uint32_t, double>> entries;
  double l2_norm = 0.0;  // norm of the raw count*idf weights before normalization

  bool empty() const noexcept { return entries.empty(); }
  /// Value at a feature index (0 when absent).
  double value(std::uint32_t index) const noexcept;
};

struct Dataset {
  std::vector<FeatureVector> vectors;
  std::vector<Disposition> labels;
  std::vector<std::string> feature_names;
  std::vector<std::string> doc_ids;

  std::size_t size() const noexcept { return vectors.size(); }
  /// Throws LengthMismatch when the parallel lists disagree.
  void validate() const;
  /// Subset in the given order.
  Dataset select(std::span<const std::size_t> rows) const;
};

/// Throws EmptyCorpus or EmptyVocabulary; 0 < min_df_ratio <= 1.
Vocabulary build_vocabulary(std::span<const NgramBag> bags, double min_df_ratio);

FeatureVector vectorize(const NgramBag& bag, const Vocabulary& vocab);

/// Dense CSV: header = feature names then "label", 6 significant digits.
std::string format_csv(const Dataset& ds);
void export_csv(const Dataset& ds, const std::filesystem::path& path);

/// Parses what export_csv writes. doc_ids become "row_<n>".
Dataset import_csv(const std::filesystem::path& path);
Dataset parse_csv(std::string_view text);

}  // namespace verdictpipe
