#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "verdictpipe/disposition.hpp"
#include "verdictpipe/vectorizer.hpp"

namespace verdictpipe {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct AverageMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct ConfusionMatrix {
  std::array<std::array<std::size_t, kNumClasses>, kNumClasses> counts{};  // [true][predicted]
  std::array<std::array<double, kNumClasses>, kNumClasses> normalized{};   // row-normalized; zero rows stay zero
};

struct ClassificationReport {
  std::array<ClassMetrics, kNumClasses> per_class{};
  double accuracy = 0.0;
  AverageMetrics macro_avg;
  AverageMetrics weighted_avg;
  std::size_t total = 0;
};

/// Throws LengthMismatch.
ConfusionMatrix confusion(std::span<const Disposition> y_true, std::span<const Disposition> y_pred);

/// Throws LengthMismatch or Empty. Zero denominators give 0.
ClassificationReport classification_report(std::span<const Disposition> y_true,
                                           std::span<const Disposition> y_pred);

ClassificationReport report_from_confusion(const ConfusionMatrix& cm);

/// Six-row table (allow, dismiss, dispose, accuracy, macro avg, weighted avg)
/// with precision / recall / f1-score columns at two decimals.
std::string render_report(const ClassificationReport& report);

nlohmann::json report_to_json(const ClassificationReport& report, const ConfusionMatrix& cm);

/// Header `true\pred,allow,dismiss,dispose`, one row per true class.
std::string confusion_csv(const ConfusionMatrix& cm, bool normalized);

struct SplitConfig {
  double test_ratio = 0.20;
  std::uint64_t seed = 2022;
};

struct SplitIndices {
  std::vector<std::size_t> train;  // sorted
  std::vector<std::size_t> test;   // sorted
};

/// Per class c with n_c samples, test takes round-half-up(ratio * n_c),
/// at least 1 and at most n_c - 1, chosen by a seeded shuffle of the class's
/// doc_ids in sorted order. Throws ClassTooSmall when a present class has
/// fewer than two samples, LengthMismatch on bad input.
SplitIndices stratified_split(std::span<const std::string> doc_ids, std::span<const Disposition> labels,
                              const SplitConfig& cfg);

std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, const SplitConfig& cfg);

/// round-half-up(ratio * n), clamped to [1, n - 1].
std::size_t test_count_for_class(std::size_t n, double ratio);

}  // namespace verdictpipe
