#include "verdictpipe/predictsvc.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "verdictpipe/error.hpp"

namespace verdictpipe {
namespace fs = std::filesystem;

namespace {

void add_tree_path(const DecisionTree& tree, const FeatureVector& v, std::size_t value_index, double scale,
                   std::map<std::uint32_t, double>& acc) {
  const auto path = tree.path(v);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const auto feature = static_cast<std::uint32_t>(tree.nodes[path[i]].feature);
    const double delta = tree.value(path[i + 1])[value_index] - tree.value(path[i])[value_index];
    acc[feature] += scale * delta;
  }
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  ::gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  // Write then rename so a reader never sees a half-written output.
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + tmp.string());
    out << text;
    if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string lower_ext(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

}  // namespace

std::vector<FeatureContribution> explain(const TrainedModel& model, const Vocabulary& vocab, const FeatureVector& v,
                                         Disposition predicted, std::size_t k) {
  const std::size_t cls = class_index(predicted);
  std::map<std::uint32_t, double> acc;

  if (const auto* g = std::get_if<GbtModel>(&model.parameters)) {
    // Node values already carry the shrinkage factor.
    for (std::size_t t = cls; t < g->trees.size(); t += kNumClasses) add_tree_path(g->trees[t], v, 0, 1.0, acc);
  } else if (const auto* f = std::get_if<ForestModel>(&model.parameters)) {
    const double scale = 1.0 / static_cast<double>(f->trees.size());
    for (const auto& tree : f->trees) add_tree_path(tree, v, cls, scale, acc);
  } else if (const auto* l = std::get_if<LinearModel>(&model.parameters)) {
    for (const auto& [feature, x] : v.entries) {
      if (feature < l->num_features) acc[feature] += l->weight(cls, feature) * x;
    }
  } else if (const auto* m = std::get_if<MlpModel>(&model.parameters)) {
    const auto fw = mlp_forward(*m, v);
    const double* w1 = m->params.data() + m->w1_offset();
    const double* w2 = m->params.data() + m->w2_offset();
    for (const auto& [feature, x] : v.entries) {
      if (feature >= m->num_features) continue;
      double grad = 0.0;
      for (std::size_t h = 0; h < m->hidden; ++h) {
        if (fw.hidden_pre[h] > 0.0) grad += w1[static_cast<std::size_t>(feature) * m->hidden + h] * w2[h * kNumClasses + cls];
      }
      acc[feature] += grad * x;
    }
  }

  std::vector<FeatureContribution> out;
  for (const auto& [feature, c] : acc) {
    if (c == 0.0) continue;
    out.push_back({feature < vocab.size() ? vocab.terms()[feature] : "#" + std::to_string(feature), c});
  }
  std::sort(out.begin(), out.end(), [](const FeatureContribution& a, const FeatureContribution& b) {
    const double ma = std::abs(a.contribution);
    const double mb = std::abs(b.contribution);
    return ma != mb ? ma > mb : a.term < b.term;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

Prediction predict_document(const ModelBundle& bundle, std::string_view raw_text, std::string doc_id,
                            std::size_t explain_k, std::string fingerprint) {
  if (std::all_of(raw_text.begin(), raw_text.end(), [](unsigned char c) { return std::isspace(c) != 0; })) {
    throw Error(ErrorCode::EmptyDocument, "document is empty");
  }
  const FeatureVector v = vectorize(featurize_text(raw_text, bundle.pipeline), bundle.vocabulary);
  Prediction p;
  p.doc_id = std::move(doc_id);
  p.probabilities = predict_proba(bundle.model, v);
  p.predicted = argmax(p.probabilities);
  p.empty_vector = v.empty();
  if (!v.empty()) p.explanation = explain(bundle.model, bundle.vocabulary, v, p.predicted, std::max<std::size_t>(explain_k, 1));
  p.pipeline_fingerprint = fingerprint.empty() ? bundle_fingerprint(bundle) : std::move(fingerprint);
  return p;
}

std::string render_prediction(const Prediction& p, const std::string& timestamp) {
  std::ostringstream out;
  char buf[64];
  out << "doc_id: " << p.doc_id << '\n';
  out << "predicted: " << disposition_name(p.predicted) << '\n';
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    std::snprintf(buf, sizeof buf, "%.6f", p.probabilities[k]);
    out << "p(" << disposition_name(disposition_at(k)) << ")=" << buf << '\n';
  }
  if (p.empty_vector) {
    out << "warning: EmptyVectorWarning: no in-vocabulary terms; prediction reflects model base rates\n";
  }
  out << "top features:\n";
  for (const auto& c : p.explanation) {
    std::snprintf(buf, sizeof buf, "%+.6f", c.contribution);
    out << "  " << c.term << '\t' << buf << '\n';
  }
  out << "fingerprint: " << p.pipeline_fingerprint << '\n';
  if (!timestamp.empty()) out << "generated_at: " << timestamp << '\n';
  return out.str();
}

void WatchConfig::validate() const {
  std::error_code ec;
  if (!fs::is_directory(in_dir, ec)) throw Error(ErrorCode::MissingFile, "input directory missing: " + in_dir.string());
  if (!fs::is_directory(out_dir, ec)) throw Error(ErrorCode::MissingFile, "output directory missing: " + out_dir.string());
  if (fs::equivalent(in_dir, out_dir, ec)) throw Error(ErrorCode::InvalidConfig, "input and output directories must differ");
}

DirectoryWatcher::DirectoryWatcher(const ModelBundle& bundle, WatchConfig cfg)
    : bundle_(bundle), cfg_(std::move(cfg)), fingerprint_(bundle_fingerprint(bundle)) {
  cfg_.validate();
  std::ifstream ledger(cfg_.out_dir / kProcessedLedger);
  std::string line;
  while (std::getline(ledger, line)) {
    if (!line.empty()) processed_.insert(line);
  }
}

void DirectoryWatcher::record_processed(const std::string& doc_id) {
  processed_.insert(doc_id);
  std::ofstream ledger(cfg_.out_dir / kProcessedLedger, std::ios::app);
  ledger << doc_id << '\n';
  if (!ledger) throw Error(ErrorCode::IoFailure, "cannot append to " + (cfg_.out_dir / kProcessedLedger).string());
}

void DirectoryWatcher::process(const fs::path& file, const std::string& doc_id) {
  try {
    const std::string text = extract_text(file, cfg_.converter);
    const Prediction p = predict_document(bundle_, text, doc_id, cfg_.explain_k, fingerprint_);
    write_file(cfg_.out_dir / (doc_id + ".prediction.txt"), render_prediction(p, utc_timestamp()));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoFailure) throw;
    write_file(cfg_.out_dir / (doc_id + ".error.txt"),
               "error: " + std::string(e.name()) + "\nmessage: " + e.what() + "\nsource: " + file.string() + "\n");
  }
  record_processed(doc_id);
}

std::size_t DirectoryWatcher::poll_once(Clock::time_point now) {
  std::error_code ec;
  if (!fs::is_directory(cfg_.in_dir, ec)) {
    throw Error(ErrorCode::IoFailure, "input directory vanished: " + cfg_.in_dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(cfg_.in_dir)) {
    if (entry.is_regular_file() && cfg_.extensions.contains(lower_ext(entry.path()))) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::size_t done = 0;
  std::map<fs::path, Pending> still_pending;
  for (const auto& file : files) {
    const std::string doc_id = sanitize_doc_id(file);
    if (processed_.contains(doc_id)) continue;
    const auto size = fs::file_size(file, ec);
    if (ec) continue;
    auto it = pending_.find(file);
    if (it == pending_.end() || it->second.size != size) {
      still_pending[file] = {size, now};
      continue;
    }
    if (now - it->second.stable_since >= cfg_.stability_window) {
      process(file, doc_id);
      ++done;
    } else {
      still_pending[file] = it->second;
    }
  }
  pending_ = std::move(still_pending);
  return done;
}

void DirectoryWatcher::run(std::stop_token stop) {
  while (!stop.stop_requested()) {
    const std::size_t n = poll_once();
    if (n > 0) std::cerr << "processed " << n << " file(s)\n";
    const auto wake = Clock::now() + cfg_.poll_interval;
    while (!stop.stop_requested() && Clock::now() < wake) {
      std::this_thread::sleep_for(std::min<Clock::duration>(cfg_.poll_interval, std::chrono::milliseconds(50)));
    }
  }
}

}  // namespace verdictpipe
