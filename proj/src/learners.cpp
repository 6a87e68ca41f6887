#include "verdictpipe/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "verdictpipe/error.hpp"

namespace verdictpipe {

std::string_view learner_kind_name(LearnerKind kind) noexcept {
  switch (kind) {
    case LearnerKind::Gbt: return "gbt";
    case LearnerKind::RandomForest: return "rf";
    case LearnerKind::LinearSvm: return "svm";
    case LearnerKind::Mlp: return "mlp";
  }
  return "?";
}

std::optional<LearnerKind> parse_learner_kind(std::string_view name) noexcept {
  if (name == "gbt" || name == "xgb") return LearnerKind::Gbt;
  if (name == "rf" || name == "random_forest") return LearnerKind::RandomForest;
  if (name == "svm" || name == "linear_svm") return LearnerKind::LinearSvm;
  if (name == "mlp") return LearnerKind::Mlp;
  return std::nullopt;
}

std::map<std::string, double> LearnerSpec::default_hyper(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::Gbt:
      return {{"rounds", 100}, {"learning_rate", 0.1}, {"max_depth", 6}, {"min_child_weight", 1}, {"lambda", 1}};
    case LearnerKind::RandomForest:
      // max_depth 0 = unlimited; max_features 0 = sqrt(#features).
      return {{"trees", 200}, {"max_depth", 0}, {"bootstrap", 1}, {"max_features", 0}};
    case LearnerKind::LinearSvm:
      return {{"lambda", 1e-4}, {"epochs", 50}};
    case LearnerKind::Mlp:
      return {{"hidden", 64}, {"learning_rate", 0.05}, {"epochs", 200}, {"batch", 32}, {"l2", 0}};
  }
  return {};
}

LearnerSpec LearnerSpec::defaults(LearnerKind kind, std::uint64_t seed) {
  return LearnerSpec{kind, default_hyper(kind), seed};
}

void LearnerSpec::validate() const {
  const auto known = default_hyper(kind);
  for (const auto& [key, value] : hyper) {
    if (!known.contains(key)) {
      throw Error(ErrorCode::InvalidConfig,
                  "unknown hyperparameter '" + key + "' for " + std::string(learner_kind_name(kind)));
    }
    if (!std::isfinite(value) || value < 0) {
      throw Error(ErrorCode::InvalidConfig, "hyperparameter '" + key + "' must be finite and non-negative");
    }
  }
  auto positive = [&](const char* key) {
    if (get(key) <= 0) throw Error(ErrorCode::InvalidConfig, std::string(key) + " must be positive");
  };
  switch (kind) {
    case LearnerKind::Gbt: positive("rounds"); positive("learning_rate"); positive("max_depth"); break;
    case LearnerKind::RandomForest: positive("trees"); break;
    case LearnerKind::LinearSvm: positive("lambda"); positive("epochs"); break;
    case LearnerKind::Mlp: positive("hidden"); positive("learning_rate"); positive("epochs"); positive("batch"); break;
  }
}

double LearnerSpec::get(const std::string& key) const {
  if (const auto it = hyper.find(key); it != hyper.end()) return it->second;
  const auto defaults = default_hyper(kind);
  if (const auto it = defaults.find(key); it != defaults.end()) return it->second;
  throw Error(ErrorCode::InvalidConfig, "unknown hyperparameter '" + key + "'");
}

Disposition argmax(const ClassProbabilities& p) noexcept {
  std::size_t best = 0;
  for (std::size_t k = 1; k < kNumClasses; ++k) {
    if (p[k] > p[best]) best = k;
  }
  return disposition_at(best);
}

ClassProbabilities softmax(const ClassProbabilities& scores) noexcept {
  const double top = *std::max_element(scores.begin(), scores.end());
  ClassProbabilities out{};
  double sum = 0.0;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    out[k] = std::exp(scores[k] - top);
    sum += out[k];
  }
  for (double& x : out) x /= sum;
  return out;
}

namespace detail {

TrainingRows canonical_rows(const Dataset& ds) {
  ds.validate();
  // Row order is canonicalized by doc_id so that permuting the input dataset
  // cannot change any floating-point reduction downstream.
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ds.doc_ids[a] < ds.doc_ids[b]; });
  TrainingRows rows;
  rows.num_features = ds.feature_names.size();
  for (std::size_t i : order) {
    rows.x.push_back(&ds.vectors[i]);
    rows.y.push_back(class_index(ds.labels[i]));
    for (const auto& [f, w] : ds.vectors[i].entries) {
      rows.num_features = std::max<std::size_t>(rows.num_features, f + 1);
    }
  }
  return rows;
}

}  // namespace detail

TrainedModel train(const Dataset& ds, const LearnerSpec& spec) {
  spec.validate();
  if (ds.size() == 0) throw Error(ErrorCode::EmptyDataset, "no labeled documents to train on");
  const auto rows = detail::canonical_rows(ds);

  std::size_t distinct = 0;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    if (std::find(rows.y.begin(), rows.y.end(), k) != rows.y.end()) ++distinct;
  }
  if (distinct < 2 && (spec.kind == LearnerKind::LinearSvm || spec.kind == LearnerKind::Mlp)) {
    throw Error(ErrorCode::SingleClassDataset,
                std::string(learner_kind_name(spec.kind)) + " needs at least two classes");
  }

  TrainedModel model;
  model.kind = spec.kind;
  model.num_features = rows.num_features;
  switch (spec.kind) {
    case LearnerKind::Gbt: model.parameters = train_gbt(rows, spec, model.training_meta); break;
    case LearnerKind::RandomForest: model.parameters = train_forest(rows, spec, model.training_meta); break;
    case LearnerKind::LinearSvm: model.parameters = train_linear_svm(rows, spec, model.training_meta); break;
    case LearnerKind::Mlp: model.parameters = train_mlp(rows, spec, model.training_meta); break;
  }
  return model;
}

ClassProbabilities predict_proba(const TrainedModel& model, const FeatureVector& v) {
  struct Visitor {
    const FeatureVector& v;
    ClassProbabilities operator()(const GbtModel& m) const { return softmax(gbt_raw_scores(m, v)); }
    ClassProbabilities operator()(const ForestModel& m) const {
      ClassProbabilities votes{};
      for (const auto& tree : m.trees) {
        const auto leaf = tree.value(tree.leaf_for(v));
        std::size_t best = 0;
        for (std::size_t k = 1; k < kNumClasses; ++k) {
          if (leaf[k] > leaf[best]) best = k;
        }
        votes[best] += 1.0;
      }
      for (double& x : votes) x /= static_cast<double>(m.trees.size());
      return votes;
    }
    ClassProbabilities operator()(const LinearModel& m) const { return softmax(linear_margins(m, v)); }
    ClassProbabilities operator()(const MlpModel& m) const { return softmax(mlp_forward(m, v).logits); }
  };
  return std::visit(Visitor{v}, model.parameters);
}

Disposition predict(const TrainedModel& model, const FeatureVector& v) {
  return argmax(predict_proba(model, v));
}

}  // namespace verdictpipe
