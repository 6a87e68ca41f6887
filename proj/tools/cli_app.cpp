#include "cli_app.hpp"

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "verdictpipe/bundle.hpp"
#include "verdictpipe/config.hpp"
#include "verdictpipe/corpus.hpp"
#include "verdictpipe/error.hpp"
#include "verdictpipe/eval.hpp"
#include "verdictpipe/learners.hpp"
#include "verdictpipe/pipeline.hpp"
#include "verdictpipe/predictsvc.hpp"
#include "verdictpipe/synth.hpp"

namespace verdictpipe::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

volatile std::sig_atomic_t g_signalled = 0;

extern "C" void on_signal(int) { g_signalled = 1; }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Options {
  std::string config_path;
  FlagOverrides flags;
  std::vector<std::string> hyper_pairs;
  bool exclude = false;
  bool include = false;

  CliConfig resolve() {
    for (const auto& pair : hyper_pairs) {
      const auto eq = pair.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::InvalidConfig, "--hyper expects key=value, got '" + pair + "'");
      try {
        flags.hyper[pair.substr(0, eq)] = std::stod(pair.substr(eq + 1));
      } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidConfig, "--hyper value for '" + pair.substr(0, eq) + "' is not a number");
      }
    }
    if (exclude && include) throw Error(ErrorCode::InvalidConfig, "--exclude-dispositions conflicts with --include-dispositions");
    if (exclude) flags.exclude_disposition_sentences = true;
    if (include) flags.exclude_disposition_sentences = false;

    std::string path = config_path;
    if (path.empty()) {
      if (const char* env = std::getenv(kConfigEnvVar)) path = env;
    }
    if (path.empty()) return resolve_config(nullptr, flags);
    const json file = read_config_file(path);
    return resolve_config(&file, flags);
  }
};

void add_pipeline_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--min-token-len", o.flags.min_token_len, "Drop words shorter than this");
  cmd->add_option("--ngram-max", o.flags.ngram_max, "Largest n-gram order (1-4)");
  cmd->add_option("--stemmer", o.flags.stemmer, "porter | none");
  cmd->add_option("--stopwords", o.flags.stopwords_file, "Stopword file, one word per line");
  cmd->add_option("--tail-sentences", o.flags.tail_sentences, "Trailing sentences scanned for the disposition");
  cmd->add_option("--patterns", o.flags.patterns_file, "Disposition pattern file (label<TAB>regex)");
  cmd->add_option("--min-df", o.flags.min_df_ratio, "Minimum document-frequency ratio");
  cmd->add_flag("--exclude-dispositions", o.exclude, "Remove operative-order sentences from the features");
  cmd->add_flag("--include-dispositions", o.include, "Keep operative-order sentences in the features");
  cmd->add_option("--converter", o.flags.converter_command, "PDF converter command with {input} placeholder");
}

void add_learner_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--model", o.flags.learner_kind, "gbt | rf | svm | mlp");
  cmd->add_option("--seed", o.flags.learner_seed, "Learner seed");
  cmd->add_option("--hyper", o.hyper_pairs, "Hyperparameter override key=value (repeatable)");
}

CorpusManifest ingest(const fs::path& dir, const CliConfig& cfg, const PipelineConfig& pipeline) {
  return ingest_directory(dir, to_converter_config(cfg), pipeline.labeler);
}

void report_ingest_errors(const CorpusManifest& m, std::ostream& err) {
  for (const auto& e : m.errors) err << "warning: skipped " << e.source_path.string() << ": " << error_name(e.code) << '\n';
}

PreparedCorpus labeled_corpus(const fs::path& dir, const CliConfig& cfg, const PipelineConfig& pipeline,
                              std::ostream& err) {
  const auto manifest = ingest(dir, cfg, pipeline);
  report_ingest_errors(manifest, err);
  auto corpus = prepare_corpus(manifest, pipeline);
  if (corpus.size() == 0) throw Error(ErrorCode::EmptyDataset, "EmptyDataset: no labeled documents in " + dir.string());
  return corpus;
}

json pipeline_file(const PipelineConfig& p, const Vocabulary& vocab) {
  return {{"prep_config", prep_config_to_json(p)},
          {"labeler_config", labeler_config_to_json(p.labeler)},
          {"vocabulary", vocabulary_to_json(vocab)}};
}

int cmd_ingest(const std::string& dir, const std::string& out_path, Options& o, std::ostream& out) {
  const auto cfg = o.resolve();
  const auto pipeline = to_pipeline_config(cfg);
  const auto manifest = ingest(dir, cfg, pipeline);
  const auto text = format_manifest(manifest);
  if (out_path.empty()) {
    out << text;
  } else {
    write_text(out_path, text);
  }
  return 0;
}

int cmd_dataset(const std::string& dir, const std::string& csv_path, std::string vocab_path, Options& o,
                std::ostream& out, std::ostream& err) {
  const auto cfg = o.resolve();
  const auto pipeline = to_pipeline_config(cfg);
  const auto corpus = labeled_corpus(dir, cfg, pipeline, err);
  const auto rows = all_rows(corpus.size());
  const auto vocab = fit_vocabulary(corpus, rows, pipeline.min_df_ratio);
  export_csv(make_dataset(corpus, rows, vocab), csv_path);
  if (vocab_path.empty()) vocab_path = csv_path + ".vocab.json";
  write_text(vocab_path, pipeline_file(pipeline, vocab).dump(1) + "\n");
  out << "wrote " << corpus.size() << " rows x " << vocab.size() << " features to " << csv_path << '\n';
  return 0;
}

int cmd_train(const std::string& input, const std::string& bundle_path, std::string vocab_path, Options& o,
              std::ostream& out, std::ostream& err) {
  const auto cfg = o.resolve();
  const auto spec = to_learner_spec(cfg);
  ModelBundle bundle;
  Dataset ds;
  if (fs::is_directory(input)) {
    bundle.pipeline = to_pipeline_config(cfg);
    const auto corpus = labeled_corpus(input, cfg, bundle.pipeline, err);
    const auto rows = all_rows(corpus.size());
    bundle.vocabulary = fit_vocabulary(corpus, rows, bundle.pipeline.min_df_ratio);
    ds = make_dataset(corpus, rows, bundle.vocabulary);
  } else {
    if (vocab_path.empty()) vocab_path = input + ".vocab.json";
    json pj;
    try {
      pj = json::parse(read_text(vocab_path));
      prep_config_from_json(pj.at("prep_config"), bundle.pipeline);
      bundle.pipeline.labeler = labeler_config_from_json(pj.at("labeler_config"));
      bundle.vocabulary = vocabulary_from_json(pj.at("vocabulary"));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::CorruptBundle, "bad vocabulary file " + vocab_path + ": " + e.what());
    }
    bundle.pipeline.min_df_ratio = bundle.vocabulary.min_df_ratio();
    ds = import_csv(input);
    if (ds.feature_names != bundle.vocabulary.terms()) {
      throw Error(ErrorCode::CorruptBundle, "CSV header does not match vocabulary " + vocab_path);
    }
    if (ds.size() == 0) throw Error(ErrorCode::EmptyDataset, "EmptyDataset: " + input + " has no rows");
  }
  bundle.model = train(ds, spec);
  save_bundle(bundle, bundle_path);
  out << "trained " << learner_kind_name(spec.kind) << " on " << ds.size() << " documents ("
      << bundle.vocabulary.size() << " features); final loss " << bundle.model.training_meta.final_loss << '\n';
  return 0;
}

int cmd_evaluate(const std::string& dir, const std::string& confusion_path, const std::string& json_path,
                 const std::string& bundle_path, Options& o, std::ostream& out, std::ostream& err) {
  const auto cfg = o.resolve();
  const auto spec = to_learner_spec(cfg);
  ModelBundle bundle;
  bundle.pipeline = to_pipeline_config(cfg);
  const auto corpus = labeled_corpus(dir, cfg, bundle.pipeline, err);
  const auto split = stratified_split(corpus.doc_ids, corpus.labels, to_split_config(cfg));
  bundle.vocabulary = fit_vocabulary(corpus, split.train, bundle.pipeline.min_df_ratio);
  const auto train_ds = make_dataset(corpus, split.train, bundle.vocabulary);
  const auto test_ds = make_dataset(corpus, split.test, bundle.vocabulary);
  bundle.model = train(train_ds, spec);

  std::vector<Disposition> predicted;
  for (const auto& v : test_ds.vectors) predicted.push_back(predict(bundle.model, v));
  const auto cm = confusion(test_ds.labels, predicted);
  const auto report = report_from_confusion(cm);

  out << learner_kind_name(spec.kind) << " classifier (train " << train_ds.size() << ", test " << test_ds.size()
      << ", " << bundle.vocabulary.size() << " features)\n\n";
  out << render_report(report) << '\n';
  out << "confusion matrix (rows true, columns predicted)\n" << confusion_csv(cm, false) << '\n';
  out << "normalized confusion matrix\n" << confusion_csv(cm, true);
  if (!confusion_path.empty()) write_text(confusion_path, confusion_csv(cm, true));
  if (!json_path.empty()) write_text(json_path, report_to_json(report, cm).dump(1) + "\n");
  if (!bundle_path.empty()) save_bundle(bundle, bundle_path);
  return 0;
}

int cmd_predict(const std::string& bundle_path, const std::string& file, Options& o, std::ostream& out,
                std::ostream& err) {
  const auto cfg = o.resolve();
  const auto bundle = load_bundle(bundle_path);
  const std::string text = extract_text(file, to_converter_config(cfg));
  const auto p = predict_document(bundle, text, sanitize_doc_id(file), cfg.explain_k);
  if (p.empty_vector) err << "warning: EmptyVectorWarning: no in-vocabulary terms in " << file << '\n';
  out << render_prediction(p, "");
  return 0;
}

int cmd_watch(const std::string& bundle_path, const std::string& in_dir, const std::string& out_dir, Options& o,
              std::ostream& err) {
  const auto cfg = o.resolve();
  const auto bundle = load_bundle(bundle_path);
  WatchConfig wc;
  wc.in_dir = in_dir;
  wc.out_dir = out_dir;
  wc.poll_interval = std::chrono::milliseconds(cfg.poll_interval_ms);
  wc.stability_window = std::chrono::milliseconds(cfg.stability_window_ms);
  wc.explain_k = cfg.explain_k;
  wc.converter = to_converter_config(cfg);
  DirectoryWatcher watcher(bundle, wc);

  g_signalled = 0;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::stop_source stop;
  std::jthread signal_monitor([&stop](std::stop_token self) {
    while (!self.stop_requested() && !stop.stop_requested()) {
      if (g_signalled) stop.request_stop();
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
  });
  err << "watching " << in_dir << " -> " << out_dir << " (" << watcher.processed().size()
      << " already processed)\n";
  try {
    watcher.run(stop.get_token());
  } catch (...) {
    stop.request_stop();
    throw;
  }
  return 0;
}

int cmd_synth(std::size_t n, std::uint64_t seed, const std::string& dir, std::ostream& out) {
  const auto docs = generate_synthetic_corpus(n, seed);
  write_synthetic_corpus(docs, dir);
  out << "wrote " << docs.size() << " documents to " << dir << '\n';
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"verdictpipe: court-judgment disposition prediction"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_path, std::string("JSON config file (default: $") + kConfigEnvVar + ")");

  std::string dir;
  std::string out_path;
  std::string vocab_path;
  std::string bundle_path;
  std::string confusion_path;
  std::string json_path;
  std::string file;
  std::string in_dir;
  std::string out_dir;
  std::size_t synth_n = 300;
  std::uint64_t synth_seed = 7;

  auto* ingest_cmd = app.add_subcommand("ingest", "Build a corpus manifest from a directory");
  ingest_cmd->add_option("dir", dir, "Directory of .txt/.pdf judgments")->required();
  ingest_cmd->add_option("--out", out_path, "Manifest path (default: stdout)");
  add_pipeline_flags(ingest_cmd, o);

  auto* dataset_cmd = app.add_subcommand("dataset", "Normalize, label and vectorize a directory into CSV");
  dataset_cmd->add_option("dir", dir)->required();
  dataset_cmd->add_option("--out", out_path, "CSV path")->required();
  dataset_cmd->add_option("--vocab", vocab_path, "Vocabulary file (default: <csv>.vocab.json)");
  add_pipeline_flags(dataset_cmd, o);

  auto* train_cmd = app.add_subcommand("train", "Train a model bundle from a CSV or a directory");
  train_cmd->add_option("input", dir, "CSV written by `dataset`, or a document directory")->required();
  train_cmd->add_option("--out", bundle_path, "Bundle path")->required();
  train_cmd->add_option("--vocab", vocab_path, "Vocabulary file for CSV input");
  add_pipeline_flags(train_cmd, o);
  add_learner_flags(train_cmd, o);

  auto* eval_cmd = app.add_subcommand("evaluate", "Stratified holdout evaluation with a classification report");
  eval_cmd->add_option("dir", dir)->required();
  eval_cmd->add_option("--confusion-out", confusion_path, "Write the normalized confusion matrix CSV");
  eval_cmd->add_option("--json-out", json_path, "Write the report as JSON");
  eval_cmd->add_option("--bundle-out", bundle_path, "Save the model trained on the training split");
  eval_cmd->add_option("--test-ratio", o.flags.test_ratio, "Held-out fraction per class");
  eval_cmd->add_option("--split-seed", o.flags.split_seed, "Split seed");
  add_pipeline_flags(eval_cmd, o);
  add_learner_flags(eval_cmd, o);

  auto* predict_cmd = app.add_subcommand("predict", "Predict the disposition of one document");
  predict_cmd->add_option("--bundle", bundle_path)->required();
  predict_cmd->add_option("file", file)->required();
  predict_cmd->add_option("--explain-k", o.flags.explain_k, "Number of explanation features");
  predict_cmd->add_option("--converter", o.flags.converter_command, "PDF converter command with {input} placeholder");

  auto* watch_cmd = app.add_subcommand("watch", "Serve predictions for files dropped into a directory");
  watch_cmd->add_option("--bundle", bundle_path)->required();
  watch_cmd->add_option("--in", in_dir)->required();
  watch_cmd->add_option("--out", out_dir)->required();
  watch_cmd->add_option("--poll-ms", o.flags.poll_interval_ms, "Poll interval in milliseconds");
  watch_cmd->add_option("--stability-ms", o.flags.stability_window_ms, "Size-stability window in milliseconds");
  watch_cmd->add_option("--explain-k", o.flags.explain_k, "Number of explanation features");
  watch_cmd->add_option("--converter", o.flags.converter_command, "PDF converter command with {input} placeholder");

  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic labeled corpus");
  synth_cmd->add_option("--n", synth_n, "Number of documents (>= 30)");
  synth_cmd->add_option("--seed", synth_seed, "Generator seed");
  synth_cmd->add_option("--out", out_path, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*ingest_cmd) return cmd_ingest(dir, out_path, o, out);
    if (*dataset_cmd) return cmd_dataset(dir, out_path, vocab_path, o, out, err);
    if (*train_cmd) return cmd_train(dir, bundle_path, vocab_path, o, out, err);
    if (*eval_cmd) return cmd_evaluate(dir, confusion_path, json_path, bundle_path, o, out, err);
    if (*predict_cmd) return cmd_predict(bundle_path, file, o, out, err);
    if (*watch_cmd) return cmd_watch(bundle_path, in_dir, out_dir, o, err);
    if (*synth_cmd) return cmd_synth(synth_n, synth_seed, out_path, out);
  } catch (const Error& e) {
    err << "error: " << e.name() << ": " << e.what() << '\n';
    return e.code() == ErrorCode::InvalidConfig ? 1 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace verdictpipe::cli
