#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "verdictpipe/corpus.hpp"
#include "verdictpipe/eval.hpp"
#include "verdictpipe/learners.hpp"
#include "verdictpipe/pipeline.hpp"
#include "verdictpipe/predictsvc.hpp"

namespace verdictpipe {

inline constexpr const char* kConfigEnvVar = "VERDICTPIPE_CONFIG";

/// Flat view of every tunable. Defaults:
///   prep.min_token_len=3 prep.ngram_max=4 prep.stemmer=porter prep.stopwords_file="" (bundled list)
///   labeler.tail_sentences=20 labeler.patterns_file="" (built-in patterns)
///   vectorizer.min_df_ratio=0.10 exclude_disposition_sentences=false
///   learner.kind=gbt learner.seed=42 learner.hyper={} (per-kind defaults)
///   split.test_ratio=0.20 split.seed=2022
///   watch.poll_interval_ms=1000 watch.stability_window_ms=2000 watch.explain_k=10
///   converter.command="pdftotext -layout -enc UTF-8 {input} -"
struct CliConfig {
  std::size_t min_token_len = 3;
  std::size_t ngram_max = 4;
  std::string stemmer = "porter";
  std::string stopwords_file;
  std::size_t tail_sentences = 20;
  std::string patterns_file;
  double min_df_ratio = 0.10;
  bool exclude_disposition_sentences = false;
  std::string learner_kind = "gbt";
  std::uint64_t learner_seed = 42;
  std::map<std::string, double> hyper;
  double test_ratio = 0.20;
  std::uint64_t split_seed = 2022;
  std::int64_t poll_interval_ms = 1000;
  std::int64_t stability_window_ms = 2000;
  std::size_t explain_k = 10;
  std::string converter_command = ConverterConfig{}.command_template;

  bool operator==(const CliConfig&) const = default;
};

/// Command-line overrides; unset fields fall through to the file, then defaults.
struct FlagOverrides {
  std::optional<std::size_t> min_token_len;
  std::optional<std::size_t> ngram_max;
  std::optional<std::string> stemmer;
  std::optional<std::string> stopwords_file;
  std::optional<std::size_t> tail_sentences;
  std::optional<std::string> patterns_file;
  std::optional<double> min_df_ratio;
  std::optional<bool> exclude_disposition_sentences;
  std::optional<std::string> learner_kind;
  std::optional<std::uint64_t> learner_seed;
  std::map<std::string, double> hyper;  // merged key-by-key over the file's hyper map
  std::optional<double> test_ratio;
  std::optional<std::uint64_t> split_seed;
  std::optional<std::int64_t> poll_interval_ms;
  std::optional<std::int64_t> stability_window_ms;
  std::optional<std::size_t> explain_k;
  std::optional<std::string> converter_command;
};

/// Applies a config document onto cfg. Unknown keys and wrong types throw
/// Error{InvalidConfig}.
void apply_config_json(const nlohmann::json& j, CliConfig& cfg);

void apply_flags(const FlagOverrides& flags, CliConfig& cfg);

/// defaults <- file (if any) <- flags.
CliConfig resolve_config(const nlohmann::json* file, const FlagOverrides& flags);

/// Reads a JSON config file; throws IoFailure / InvalidConfig.
nlohmann::json read_config_file(const std::filesystem::path& path);

nlohmann::json config_to_json(const CliConfig& cfg);

/// Materializes the pipeline settings, loading stopword/pattern files.
PipelineConfig to_pipeline_config(const CliConfig& cfg);
LearnerSpec to_learner_spec(const CliConfig& cfg);
SplitConfig to_split_config(const CliConfig& cfg);
ConverterConfig to_converter_config(const CliConfig& cfg);

}  // namespace verdictpipe
