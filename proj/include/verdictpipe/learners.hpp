#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "verdictpipe/disposition.hpp"
#include "verdictpipe/tree.hpp"
#include "verdictpipe/vectorizer.hpp"

namespace verdictpipe {

enum class LearnerKind { Gbt, RandomForest, LinearSvm, Mlp };

/// "gbt", "rf", "svm", "mlp".
std::string_view learner_kind_name(LearnerKind kind) noexcept;
/// Accepts the short names above plus "random_forest", "linear_svm", "xgb".
std::optional<LearnerKind> parse_learner_kind(std::string_view name) noexcept;

/// Hyperparameters are numeric; booleans are 0/1. Keys not listed in
/// default_hyper(kind) are rejected by validate().
struct LearnerSpec {
  LearnerKind kind = LearnerKind::Gbt;
  std::map<std::string, double> hyper;
  std::uint64_t seed = 42;

  static std::map<std::string, double> default_hyper(LearnerKind kind);
  static LearnerSpec defaults(LearnerKind kind, std::uint64_t seed = 42);

  void validate() const;
  /// Value for key, falling back to the kind's default.
  double get(const std::string& key) const;
};

struct GbtModel {
  ClassProbabilities base_score{};  // raw scores before any tree
  double learning_rate = 0.1;       // already folded into every stored node value
  std::vector<DecisionTree> trees;  // round-major: trees[round * kNumClasses + class]
};

struct ForestModel {
  std::vector<DecisionTree> trees;  // value_width == kNumClasses, node class fractions
};

struct LinearModel {
  std::size_t num_features = 0;
  std::vector<double> weights;  // [class][feature], row-major
  ClassProbabilities bias{};

  double weight(std::size_t cls, std::size_t feature) const { return weights[cls * num_features + feature]; }
};

struct MlpModel {
  std::size_t num_features = 0;
  std::size_t hidden = 0;
  // Flat parameter vector: W1[feature][hidden], b1[hidden], W2[hidden][class], b2[class].
  std::vector<double> params;

  std::size_t w1_offset() const noexcept { return 0; }
  std::size_t b1_offset() const noexcept { return num_features * hidden; }
  std::size_t w2_offset() const noexcept { return b1_offset() + hidden; }
  std::size_t b2_offset() const noexcept { return w2_offset() + hidden * kNumClasses; }
  std::size_t param_count() const noexcept { return b2_offset() + kNumClasses; }
};

struct TrainingMeta {
  std::size_t iterations = 0;      // boosting rounds, trees or epochs actually run
  double final_loss = 0.0;
  std::vector<double> loss_history;  // per round/epoch training loss
};

struct TrainedModel {
  LearnerKind kind = LearnerKind::Gbt;
  std::size_t num_features = 0;
  std::variant<GbtModel, ForestModel, LinearModel, MlpModel> parameters;
  TrainingMeta training_meta;
};

/// Throws EmptyDataset, SingleClassDataset (SVM and MLP only) or NonFiniteLoss.
TrainedModel train(const Dataset& ds, const LearnerSpec& spec);

/// Length-3 distribution in canonical class order.
ClassProbabilities predict_proba(const TrainedModel& model, const FeatureVector& v);

Disposition predict(const TrainedModel& model, const FeatureVector& v);

/// First index of the maximum.
Disposition argmax(const ClassProbabilities& p) noexcept;

/// Numerically stable softmax over three scores.
ClassProbabilities softmax(const ClassProbabilities& scores) noexcept;

// Per-family trainers. They expect rows already in canonical order and are
// exposed for direct testing.
namespace detail {
struct TrainingRows {
  std::vector<const FeatureVector*> x;
  std::vector<std::size_t> y;  // class index
  std::size_t num_features = 0;
};
TrainingRows canonical_rows(const Dataset& ds);
}  // namespace detail

GbtModel train_gbt(const detail::TrainingRows& rows, const LearnerSpec& spec, TrainingMeta& meta);
ForestModel train_forest(const detail::TrainingRows& rows, const LearnerSpec& spec, TrainingMeta& meta);
LinearModel train_linear_svm(const detail::TrainingRows& rows, const LearnerSpec& spec, TrainingMeta& meta);
MlpModel train_mlp(const detail::TrainingRows& rows, const LearnerSpec& spec, TrainingMeta& meta);

ClassProbabilities gbt_raw_scores(const GbtModel& m, const FeatureVector& v);
ClassProbabilities linear_margins(const LinearModel& m, const FeatureVector& v);

/// Mean cross-entropy (plus 0.5*l2*|W|^2) over the rows; fills grad (same
/// layout as params) when non-null.
double mlp_loss(const MlpModel& m, const detail::TrainingRows& rows, double l2, std::vector<double>* grad);

/// Hidden pre-activations and output logits for one input.
struct MlpForward {
  std::vector<double> hidden_pre;
  ClassProbabilities logits{};
};
MlpForward mlp_forward(const MlpModel& m, const FeatureVector& v);

/// Mean softmax log-loss of a GBT model over the rows.
double gbt_log_loss(const GbtModel& m, const detail::TrainingRows& rows);

}  // namespace verdictpipe
