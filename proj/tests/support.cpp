#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include "verdictpipe/learners.hpp"
#include "verdictpipe/rng.hpp"
#include "verdictpipe/synth.hpp"

namespace vptest {
using namespace verdictpipe;

fs::path data_dir() { return VP_TEST_DATA_DIR; }

ScratchDir::ScratchDir(const std::string& tag) {
  static std::uint64_t counter = 0;
  const auto unique = std::to_string(fnv1a64(tag) ^ static_cast<std::uint64_t>(::getpid()) << 20) + "_" +
                      std::to_string(++counter);
  path_ = fs::temp_directory_path() / ("vptest_" + tag + "_" + unique);
  fs::remove_all(path_);
  fs::create_directories(path_);
}

ScratchDir::~ScratchDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::pair<std::string, std::string>> load_porter_vocabulary() {
  std::ifstream in(data_dir() / "porter_vocabulary.tsv");
  if (!in) throw std::runtime_error("missing porter_vocabulary.tsv");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    if (line.empty() || tab == std::string::npos) continue;
    out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return out;
}

const std::vector<LabelFixture>& hand_label_fixtures() {
  using D = Disposition;
  static const std::vector<LabelFixture> fixtures = {
      {"In the result, the appeal is allowed.", D::Allow},
      {"The appeal is allowed and the judgment of the High Court is set aside.", D::Allow},
      {"Both appeals are allowed with costs.", D::Allow},
      {"The appeal stands allowed.", D::Allow},
      {"Accordingly the appeals stand allowed to the extent indicated.", D::Allow},
      {"APPEAL ALLOWED.", D::Allow},
      {"We hear counsel. Appeals allowed.", D::Allow},
      {"In the result, the appeal is dismissed.", D::Dismiss},
      {"The appeal is dismissed with costs.", D::Dismiss},
      {"The appeals are dismissed.", D::Dismiss},
      {"Consequently, the appeal stands dismissed.", D::Dismiss},
      {"Appeal dismissed.", D::Dismiss},
      {"The special leave petition is dismissed.", D::Dismiss},
      {"The writ petitions are dismissed as withdrawn.", D::Dismiss},
      {"The appeal is disposed of in terms of the above directions.", D::Dispose},
      {"The appeals are disposed of accordingly.", D::Dispose},
      {"With these observations the matter is disposed of.", D::Dispose},
      {"The appeals stand disposed of.", D::Dispose},
      {"The civil appeal stands disposed with the above directions.", D::Dispose},
      {"Pending applications, if any, shall stand disposed of.", D::Dispose},
      // Last matching sentence wins.
      {"The appeal is dismissed. On review the appeal is allowed.", D::Allow},
      {"The appeal was earlier allowed by the tribunal. The appeal is dismissed.", D::Dismiss},
      {"The High Court held the appeals were dismissed. We set that aside. The appeals are disposed of.",
       D::Dispose},
      // Within one sentence the first pattern in config order wins.
      {"The appeal is allowed and the connected petition is dismissed.", D::Allow},
      {"The appeals are dismissed and the applications are disposed of.", D::Dismiss},
      // Body text after the operative order does not matter unless it matches.
      {"The appeal is allowed. No order as to costs.", D::Allow},
      {"The appeal is dismissed; the interim order stands vacated.", D::Dismiss},
      // No operative order at all.
      {"The matter is adjourned to next week.", std::nullopt},
      {"The appellant relies on several precedents. Counsel was heard at length.", std::nullopt},
      {"", std::nullopt},
  };
  return fixtures;
}

NaiveTfidf naive_tfidf(const std::vector<std::vector<std::string>>& token_docs, std::size_t ngram_max,
                       double min_df_ratio) {
  const std::size_t n_docs = token_docs.size();
  std::vector<std::map<std::string, double>> counts(n_docs);
  for (std::size_t d = 0; d < n_docs; ++d) {
    const auto& toks = token_docs[d];
    for (std::size_t n = 1; n <= ngram_max; ++n) {
      for (std::size_t i = 0; i + n <= toks.size(); ++i) {
        std::string gram = toks[i];
        for (std::size_t j = 1; j < n; ++j) gram += "_" + toks[i + j];
        counts[d][gram] += 1.0;
      }
    }
  }
  std::map<std::string, std::size_t> df;
  for (const auto& c : counts)
    for (const auto& [g, _] : c) ++df[g];

  NaiveTfidf out;
  std::map<std::string, double> idf;
  for (const auto& [g, f] : df) {
    // Keep a term when its document fraction reaches the ratio.
    if (static_cast<double>(f) / static_cast<double>(n_docs) + 1e-12 < min_df_ratio) continue;
    out.terms.push_back(g);
    idf[g] = std::log((1.0 + n_docs) / (1.0 + f)) + 1.0;
  }
  for (const auto& c : counts) {
    std::vector<double> row(out.terms.size(), 0.0);
    double sq = 0.0;
    for (std::size_t t = 0; t < out.terms.size(); ++t) {
      auto it = c.find(out.terms[t]);
      if (it == c.end()) continue;
      row[t] = it->second * idf[out.terms[t]];
      sq += row[t] * row[t];
    }
    if (sq > 0)
      for (auto& x : row) x /= std::sqrt(sq);
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::vector<double> dense(const FeatureVector& v, std::size_t width) {
  std::vector<double> out(width, 0.0);
  for (const auto& [i, x] : v.entries) out.at(i) = x;
  return out;
}

Dataset separable_dataset() {
  Dataset ds;
  ds.feature_names = {"f_a1", "f_a2", "f_b1", "f_b2", "f_c1", "f_c2"};
  CounterRng rng(99);
  for (std::size_t i = 0; i < 40; ++i) {
    const std::size_t cls = i % 3;
    std::vector<double> dense_row(6);
    for (std::size_t f = 0; f < 6; ++f) dense_row[f] = 0.05 * rng.uniform();
    dense_row[2 * cls] = 0.7 + 0.2 * rng.uniform();
    dense_row[2 * cls + 1] = 0.5 + 0.2 * rng.uniform();
    FeatureVector v;
    double sq = 0;
    for (double x : dense_row) sq += x * x;
    for (std::uint32_t f = 0; f < 6; ++f) v.entries.emplace_back(f, dense_row[f] / std::sqrt(sq));
    v.l2_norm = std::sqrt(sq);
    ds.vectors.push_back(std::move(v));
    ds.labels.push_back(disposition_at(cls));
    char id[16];
    std::snprintf(id, sizeof id, "sep_%02zu", i);
    ds.doc_ids.emplace_back(id);
  }
  return ds;
}

double mlp_gradient_check_max_error(std::size_t samples, std::size_t features, std::size_t hidden,
                                    std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<FeatureVector> xs(samples);
  detail::TrainingRows rows;
  rows.num_features = features;
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::uint32_t f = 0; f < features; ++f) {
      // Sparse-ish rows, like real TF-IDF input.
      if (rng.uniform() < 0.3) continue;
      xs[s].entries.emplace_back(f, 0.1 + rng.uniform());
    }
    rows.y.push_back(s % kNumClasses);
  }
  for (auto& x : xs) rows.x.push_back(&x);

  MlpModel m;
  m.num_features = features;
  m.hidden = hidden;
  m.params.resize(m.param_count());
  for (auto& p : m.params) p = rng.uniform() - 0.5;

  const double l2 = 1e-3;
  std::vector<double> grad;
  mlp_loss(m, rows, l2, &grad);
  double worst = 0.0;
  const double h = 1e-6;
  for (std::size_t i = 0; i < m.params.size(); ++i) {
    MlpModel plus = m, minus = m;
    plus.params[i] += h;
    minus.params[i] -= h;
    const double numeric = (mlp_loss(plus, rows, l2, nullptr) - mlp_loss(minus, rows, l2, nullptr)) / (2 * h);
    const double analytic = grad[i];
    const double scale = std::max(std::abs(analytic), std::abs(numeric));
    const double err = scale < 1e-10 ? std::abs(analytic - numeric) : std::abs(analytic - numeric) / scale;
    worst = std::max(worst, err);
  }
  return worst;
}

PreparedCorpus synthetic_prepared(std::size_t n, std::uint64_t seed, const PipelineConfig& cfg) {
  const auto docs = generate_synthetic_corpus(n, seed);
  CorpusManifest manifest;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "case_%05zu", i + 1);
    CaseDocument d;
    d.doc_id = id;
    d.raw_text = docs[i].text;
    d.label = docs[i].truth;
    manifest.documents.push_back(std::move(d));
  }
  return prepare_corpus(manifest, cfg);
}

ModelBundle synthetic_bundle(std::size_t n, std::uint64_t seed, LearnerKind kind, bool exclude_dispositions) {
  ModelBundle b;
  b.pipeline.exclude_disposition_sentences = exclude_dispositions;
  const auto corpus = synthetic_prepared(n, seed, b.pipeline);
  const auto rows = all_rows(corpus.size());
  b.vocabulary = fit_vocabulary(corpus, rows, b.pipeline.min_df_ratio);
  b.model = train(make_dataset(corpus, rows, b.vocabulary), LearnerSpec::defaults(kind));
  return b;
}

}  // namespace vptest
