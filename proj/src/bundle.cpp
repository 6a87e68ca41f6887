#include "verdictpipe/bundle.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "verdictpipe/error.hpp"
#include "verdictpipe/rng.hpp"

namespace verdictpipe {
using nlohmann::json;

namespace {

[[noreturn]] void corrupt(const std::string& what) { throw Error(ErrorCode::CorruptBundle, "corrupt bundle: " + what); }

void require(bool ok, const char* what) {
  if (!ok) corrupt(what);
}

json tree_to_json(const DecisionTree& t) {
  json feature = json::array();
  json threshold = json::array();
  json left = json::array();
  json right = json::array();
  for (const auto& n : t.nodes) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
  }
  return {{"value_width", t.value_width}, {"feature", feature}, {"threshold", threshold},
          {"left", left},                 {"right", right},     {"values", t.values}};
}

DecisionTree tree_from_json(const json& j, std::size_t num_features, std::size_t width) {
  DecisionTree t;
  t.value_width = j.at("value_width").get<std::size_t>();
  require(t.value_width == width, "tree value width");
  const auto& feature = j.at("feature");
  const auto& threshold = j.at("threshold");
  const auto& left = j.at("left");
  const auto& right = j.at("right");
  require(threshold.size() == feature.size() && left.size() == feature.size() && right.size() == feature.size(),
          "tree column lengths");
  for (std::size_t i = 0; i < feature.size(); ++i) {
    TreeNode n;
    n.feature = feature[i].get<std::int32_t>();
    n.threshold = threshold[i].get<double>();
    n.left = left[i].get<std::int32_t>();
    n.right = right[i].get<std::int32_t>();
    t.nodes.push_back(n);
  }
  t.values = j.at("values").get<std::vector<double>>();
  require(t.well_formed(num_features), "tree structure");
  return t;
}

std::vector<double> doubles(const json& j, std::size_t expected, const char* what) {
  auto v = j.get<std::vector<double>>();
  require(v.size() == expected, what);
  for (double x : v) require(std::isfinite(x), what);
  return v;
}

ClassProbabilities triple(const json& j, const char* what) {
  const auto v = doubles(j, kNumClasses, what);
  return {v[0], v[1], v[2]};
}

}  // namespace

json prep_config_to_json(const PipelineConfig& cfg) {
  return {{"min_token_len", cfg.prep.min_token_len},
          {"stopwords", cfg.prep.stopwords},
          {"ngram_max", cfg.prep.ngram_max},
          {"stemmer", cfg.prep.stemmer == StemmerKind::Porter ? "porter" : "none"},
          {"exclude_disposition_sentences", cfg.exclude_disposition_sentences}};
}

void prep_config_from_json(const json& j, PipelineConfig& cfg) {
  cfg.prep.min_token_len = j.at("min_token_len").get<std::size_t>();
  cfg.prep.stopwords = j.at("stopwords").get<std::set<std::string>>();
  cfg.prep.ngram_max = j.at("ngram_max").get<std::size_t>();
  const auto stemmer = j.at("stemmer").get<std::string>();
  require(stemmer == "porter" || stemmer == "none", "stemmer");
  cfg.prep.stemmer = stemmer == "porter" ? StemmerKind::Porter : StemmerKind::None;
  cfg.exclude_disposition_sentences = j.at("exclude_disposition_sentences").get<bool>();
}

json labeler_config_to_json(const LabelerConfig& cfg) {
  json patterns = json::array();
  for (const auto& p : cfg.patterns) {
    patterns.push_back({{"label", disposition_name(p.label)}, {"pattern", p.source}});
  }
  return {{"tail_sentences", cfg.tail_sentences}, {"patterns", patterns}};
}

LabelerConfig labeler_config_from_json(const json& j) {
  LabelerConfig cfg;
  cfg.tail_sentences = j.at("tail_sentences").get<std::size_t>();
  for (const auto& p : j.at("patterns")) {
    const auto label = parse_disposition(p.at("label").get<std::string>());
    require(label.has_value(), "pattern label");
    cfg.patterns.emplace_back(*label, p.at("pattern").get<std::string>());
  }
  return cfg;
}

json vocabulary_to_json(const Vocabulary& vocab) {
  return {{"terms", vocab.terms()},
          {"df", vocab.df()},
          {"idf", vocab.idf()},
          {"min_df_ratio", vocab.min_df_ratio()},
          {"corpus_size", vocab.corpus_size()}};
}

Vocabulary vocabulary_from_json(const json& j) {
  auto terms = j.at("terms").get<std::vector<std::string>>();
  auto df = j.at("df").get<std::vector<std::size_t>>();
  auto idf = doubles(j.at("idf"), terms.size(), "idf length");
  require(df.size() == terms.size(), "df length");
  return Vocabulary(std::move(terms), std::move(df), std::move(idf), j.at("corpus_size").get<std::size_t>(),
                    j.at("min_df_ratio").get<double>());
}

json model_to_json(const TrainedModel& model) {
  json params;
  if (const auto* g = std::get_if<GbtModel>(&model.parameters)) {
    json trees = json::array();
    for (const auto& t : g->trees) trees.push_back(tree_to_json(t));
    params = {{"base_score", g->base_score}, {"learning_rate", g->learning_rate}, {"trees", trees}};
  } else if (const auto* f = std::get_if<ForestModel>(&model.parameters)) {
    json trees = json::array();
    for (const auto& t : f->trees) trees.push_back(tree_to_json(t));
    params = {{"trees", trees}};
  } else if (const auto* l = std::get_if<LinearModel>(&model.parameters)) {
    params = {{"weights", l->weights}, {"bias", l->bias}};
  } else if (const auto* m = std::get_if<MlpModel>(&model.parameters)) {
    params = {{"hidden", m->hidden}, {"params", m->params}};
  }
  json class_names = json::array();
  for (Disposition d : kAllDispositions) class_names.push_back(disposition_name(d));
  return {{"kind", learner_kind_name(model.kind)},
          {"class_names", class_names},
          {"num_features", model.num_features},
          {"parameters", params},
          {"training_meta",
           {{"iterations", model.training_meta.iterations},
            {"final_loss", model.training_meta.final_loss},
            {"loss_history", model.training_meta.loss_history}}}};
}

TrainedModel model_from_json(const json& j) {
  TrainedModel model;
  const auto kind = parse_learner_kind(j.at("kind").get<std::string>());
  require(kind.has_value(), "model kind");
  model.kind = *kind;
  const auto names = j.at("class_names").get<std::vector<std::string>>();
  require(names.size() == kNumClasses, "class_names");
  for (std::size_t k = 0; k < kNumClasses; ++k) require(names[k] == disposition_name(disposition_at(k)), "class order");
  model.num_features = j.at("num_features").get<std::size_t>();
  const auto& p = j.at("parameters");
  switch (model.kind) {
    case LearnerKind::Gbt: {
      GbtModel g;
      g.base_score = triple(p.at("base_score"), "base_score");
      g.learning_rate = p.at("learning_rate").get<double>();
      for (const auto& t : p.at("trees")) g.trees.push_back(tree_from_json(t, model.num_features, 1));
      require(g.trees.size() % kNumClasses == 0, "tree count");
      model.parameters = std::move(g);
      break;
    }
    case LearnerKind::RandomForest: {
      ForestModel f;
      for (const auto& t : p.at("trees")) f.trees.push_back(tree_from_json(t, model.num_features, kNumClasses));
      require(!f.trees.empty(), "empty forest");
      model.parameters = std::move(f);
      break;
    }
    case LearnerKind::LinearSvm: {
      LinearModel l;
      l.num_features = model.num_features;
      l.weights = doubles(p.at("weights"), kNumClasses * model.num_features, "weights");
      l.bias = triple(p.at("bias"), "bias");
      model.parameters = std::move(l);
      break;
    }
    case LearnerKind::Mlp: {
      MlpModel m;
      m.num_features = model.num_features;
      m.hidden = p.at("hidden").get<std::size_t>();
      require(m.hidden > 0, "hidden units");
      m.params = doubles(p.at("params"), m.param_count(), "network parameters");
      model.parameters = std::move(m);
      break;
    }
  }
  const auto& meta = j.at("training_meta");
  model.training_meta.iterations = meta.at("iterations").get<std::size_t>();
  model.training_meta.final_loss = meta.at("final_loss").get<double>();
  model.training_meta.loss_history = meta.at("loss_history").get<std::vector<double>>();
  return model;
}

json bundle_to_json(const ModelBundle& bundle) {
  return {{"format_version", bundle.format_version},
          {"prep_config", prep_config_to_json(bundle.pipeline)},
          {"labeler_config", labeler_config_to_json(bundle.pipeline.labeler)},
          {"vocabulary", vocabulary_to_json(bundle.vocabulary)},
          {"model", model_to_json(bundle.model)}};
}

ModelBundle bundle_from_json(const json& j) {
  if (!j.is_object() || !j.contains("format_version") || !j.at("format_version").is_number_integer())
    corrupt("missing format_version");
  const int version = j.at("format_version").get<int>();
  if (version != kBundleFormatVersion) {
    throw Error(ErrorCode::SchemaVersionMismatch, "bundle format_version " + std::to_string(version) +
                                                      " is not supported (expected " +
                                                      std::to_string(kBundleFormatVersion) + ")");
  }
  try {
    ModelBundle b;
    b.format_version = version;
    prep_config_from_json(j.at("prep_config"), b.pipeline);
    b.pipeline.labeler = labeler_config_from_json(j.at("labeler_config"));
    b.vocabulary = vocabulary_from_json(j.at("vocabulary"));
    b.pipeline.min_df_ratio = b.vocabulary.min_df_ratio();
    b.model = model_from_json(j.at("model"));
    require(b.model.num_features == b.vocabulary.size(), "model/vocabulary size mismatch");
    b.pipeline.prep.validate();
    b.pipeline.labeler.validate();
    return b;
  } catch (const json::exception& e) {
    corrupt(e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CorruptBundle) throw;
    corrupt(e.what());
  }
}

std::string serialize_bundle(const ModelBundle& bundle) { return bundle_to_json(bundle).dump(1) + "\n"; }

ModelBundle deserialize_bundle(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    corrupt(e.what());
  }
  return bundle_from_json(j);
}

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path) {
  const std::string text = serialize_bundle(bundle);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

ModelBundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_bundle(ss.str());
}

std::string bundle_fingerprint(const ModelBundle& bundle) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(bundle_to_json(bundle).dump())));
  return buf;
}

}  // namespace verdictpipe
