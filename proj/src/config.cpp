#include "verdictpipe/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "verdictpipe/error.hpp"

namespace verdictpipe {
using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) invalid(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) invalid("unknown config key '" + where + (where.empty() ? "" : ".") + key + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    invalid("config key '" + where + "." + key + "' has the wrong type");
  }
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void apply_config_json(const json& j, CliConfig& cfg) {
  check_keys(j, {"prep", "labeler", "vectorizer", "exclude_disposition_sentences", "learner", "split", "watch",
                 "converter"},
             "");
  if (j.contains("prep")) {
    const auto& p = j["prep"];
    check_keys(p, {"min_token_len", "ngram_max", "stemmer", "stopwords_file"}, "prep");
    read(p, "min_token_len", cfg.min_token_len, "prep");
    read(p, "ngram_max", cfg.ngram_max, "prep");
    read(p, "stemmer", cfg.stemmer, "prep");
    read(p, "stopwords_file", cfg.stopwords_file, "prep");
  }
  if (j.contains("labeler")) {
    const auto& l = j["labeler"];
    check_keys(l, {"tail_sentences", "patterns_file"}, "labeler");
    read(l, "tail_sentences", cfg.tail_sentences, "labeler");
    read(l, "patterns_file", cfg.patterns_file, "labeler");
  }
  if (j.contains("vectorizer")) {
    const auto& v = j["vectorizer"];
    check_keys(v, {"min_df_ratio"}, "vectorizer");
    read(v, "min_df_ratio", cfg.min_df_ratio, "vectorizer");
  }
  read(j, "exclude_disposition_sentences", cfg.exclude_disposition_sentences, "");
  if (j.contains("learner")) {
    const auto& l = j["learner"];
    check_keys(l, {"kind", "seed", "hyper"}, "learner");
    read(l, "kind", cfg.learner_kind, "learner");
    read(l, "seed", cfg.learner_seed, "learner");
    if (l.contains("hyper")) {
      std::map<std::string, double> hyper;
      read(l, "hyper", hyper, "learner");
      for (const auto& [k, v] : hyper) cfg.hyper[k] = v;
    }
  }
  if (j.contains("split")) {
    const auto& s = j["split"];
    check_keys(s, {"test_ratio", "seed"}, "split");
    read(s, "test_ratio", cfg.test_ratio, "split");
    read(s, "seed", cfg.split_seed, "split");
  }
  if (j.contains("watch")) {
    const auto& w = j["watch"];
    check_keys(w, {"poll_interval_ms", "stability_window_ms", "explain_k"}, "watch");
    read(w, "poll_interval_ms", cfg.poll_interval_ms, "watch");
    read(w, "stability_window_ms", cfg.stability_window_ms, "watch");
    read(w, "explain_k", cfg.explain_k, "watch");
  }
  if (j.contains("converter")) {
    const auto& c = j["converter"];
    check_keys(c, {"command"}, "converter");
    read(c, "command", cfg.converter_command, "converter");
  }
}

void apply_flags(const FlagOverrides& f, CliConfig& cfg) {
  auto set = [](const auto& flag, auto& field) {
    if (flag) field = *flag;
  };
  set(f.min_token_len, cfg.min_token_len);
  set(f.ngram_max, cfg.ngram_max);
  set(f.stemmer, cfg.stemmer);
  set(f.stopwords_file, cfg.stopwords_file);
  set(f.tail_sentences, cfg.tail_sentences);
  set(f.patterns_file, cfg.patterns_file);
  set(f.min_df_ratio, cfg.min_df_ratio);
  set(f.exclude_disposition_sentences, cfg.exclude_disposition_sentences);
  set(f.learner_kind, cfg.learner_kind);
  set(f.learner_seed, cfg.learner_seed);
  for (const auto& [k, v] : f.hyper) cfg.hyper[k] = v;
  set(f.test_ratio, cfg.test_ratio);
  set(f.split_seed, cfg.split_seed);
  set(f.poll_interval_ms, cfg.poll_interval_ms);
  set(f.stability_window_ms, cfg.stability_window_ms);
  set(f.explain_k, cfg.explain_k);
  set(f.converter_command, cfg.converter_command);
}

CliConfig resolve_config(const json* file, const FlagOverrides& flags) {
  CliConfig cfg;
  if (file != nullptr) apply_config_json(*file, cfg);
  apply_flags(flags, cfg);
  return cfg;
}

json read_config_file(const std::filesystem::path& path) {
  try {
    return json::parse(slurp(path));
  } catch (const json::exception& e) {
    invalid("config file " + path.string() + " is not valid JSON: " + e.what());
  }
}

json config_to_json(const CliConfig& c) {
  return {{"prep",
           {{"min_token_len", c.min_token_len},
            {"ngram_max", c.ngram_max},
            {"stemmer", c.stemmer},
            {"stopwords_file", c.stopwords_file}}},
          {"labeler", {{"tail_sentences", c.tail_sentences}, {"patterns_file", c.patterns_file}}},
          {"vectorizer", {{"min_df_ratio", c.min_df_ratio}}},
          {"exclude_disposition_sentences", c.exclude_disposition_sentences},
          {"learner", {{"kind", c.learner_kind}, {"seed", c.learner_seed}, {"hyper", c.hyper}}},
          {"split", {{"test_ratio", c.test_ratio}, {"seed", c.split_seed}}},
          {"watch",
           {{"poll_interval_ms", c.poll_interval_ms},
            {"stability_window_ms", c.stability_window_ms},
            {"explain_k", c.explain_k}}},
          {"converter", {{"command", c.converter_command}}}};
}

PipelineConfig to_pipeline_config(const CliConfig& c) {
  PipelineConfig p;
  p.prep.min_token_len = c.min_token_len;
  p.prep.ngram_max = c.ngram_max;
  if (c.stemmer == "porter") {
    p.prep.stemmer = StemmerKind::Porter;
  } else if (c.stemmer == "none") {
    p.prep.stemmer = StemmerKind::None;
  } else {
    invalid("stemmer must be 'porter' or 'none'");
  }
  if (!c.stopwords_file.empty()) p.prep.stopwords = parse_stopwords(slurp(c.stopwords_file));
  p.prep.validate();
  p.labeler.tail_sentences = c.tail_sentences;
  if (!c.patterns_file.empty()) p.labeler.patterns = parse_pattern_file(slurp(c.patterns_file));
  p.labeler.validate();
  if (!(c.min_df_ratio > 0.0 && c.min_df_ratio <= 1.0)) invalid("min_df_ratio must be in (0,1]");
  p.min_df_ratio = c.min_df_ratio;
  p.exclude_disposition_sentences = c.exclude_disposition_sentences;
  return p;
}

LearnerSpec to_learner_spec(const CliConfig& c) {
  const auto kind = parse_learner_kind(c.learner_kind);
  if (!kind) invalid("unknown model kind '" + c.learner_kind + "' (expected gbt, rf, svm or mlp)");
  LearnerSpec spec = LearnerSpec::defaults(*kind, c.learner_seed);
  for (const auto& [k, v] : c.hyper) spec.hyper[k] = v;
  spec.validate();
  return spec;
}

SplitConfig to_split_config(const CliConfig& c) { return SplitConfig{c.test_ratio, c.split_seed}; }

ConverterConfig to_converter_config(const CliConfig& c) { return ConverterConfig{c.converter_command}; }

}  // namespace verdictpipe
