// One-vs-rest Pegasos. The bias is an extra constant-1 feature and is
// regularized along with the weights.

#include <algorithm>
#include <cmath>
#include <numeric>

#include "verdictpipe/error.hpp"
#include "verdictpipe/learners.hpp"
#include "verdictpipe/rng.hpp"

namespace verdictpipe {
namespace {

double dot(const std::vector<double>& w, const FeatureVector& x) {
  double s = w.back();  // constant feature
  for (const auto& [f, v] : x.entries) {
    if (f + 1 < w.size()) s += w[f] * v;
  }
  return s;
}

}  // namespace

ClassProbabilities linear_margins(const LinearModel& m, const FeatureVector& v) {
  ClassProbabilities out = m.bias;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    for (const auto& [f, x] : v.entries) {
      if (f < m.num_features) out[k] += m.weight(k, f) * x;
    }
  }
  return out;
}

LinearModel train_linear_svm(const detail::TrainingRows& rows, const LearnerSpec& spec, TrainingMeta& meta) {
  const std::size_t n = rows.x.size();
  const std::size_t dim = rows.num_features + 1;
  const double lambda = spec.get("lambda");
  const auto epochs = static_cast<std::size_t>(spec.get("epochs"));
  const double radius = 1.0 / std::sqrt(lambda);

  std::vector<std::vector<double>> w(kNumClasses, std::vector<double>(dim, 0.0));
  std::vector<std::size_t> order(n);
  meta = TrainingMeta{};
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    CounterRng rng(spec.seed, epoch);
    deterministic_shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const FeatureVector& x = *rows.x[i];
      for (std::size_t k = 0; k < kNumClasses; ++k) {
        auto& wk = w[k];
        const double y = rows.y[i] == k ? 1.0 : -1.0;
        const double margin = y * dot(wk, x);
        const double shrink = 1.0 - eta * lambda;
        for (double& c : wk) c *= shrink;
        if (margin < 1.0) {
          for (const auto& [f, v] : x.entries) wk[f] += eta * y * v;
          wk.back() += eta * y;
        }
        double sq = 0.0;
        for (double c : wk) sq += c * c;
        const double norm = std::sqrt(sq);
        if (norm > radius) {
          for (double& c : wk) c *= radius / norm;
        }
      }
    }

    double loss = 0.0;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      double sq = 0.0;
      for (double c : w[k]) sq += c * c;
      double hinge = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        const double y = rows.y[r] == k ? 1.0 : -1.0;
        hinge += std::max(0.0, 1.0 - y * dot(w[k], *rows.x[r]));
      }
      loss += 0.5 * lambda * sq + hinge / static_cast<double>(n);
    }
    if (!std::isfinite(loss)) throw Error(ErrorCode::NonFiniteLoss, "SVM objective is not finite");
    meta.loss_history.push_back(loss);
  }
  meta.iterations = epochs;
  meta.final_loss = meta.loss_history.back();

  LinearModel model;
  model.num_features = rows.num_features;
  model.weights.resize(kNumClasses * rows.num_features);
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    std::copy(w[k].begin(), w[k].end() - 1, model.weights.begin() + static_cast<std::ptrdiff_t>(k * rows.num_features));
    model.bias[k] = w[k].back();
  }
  return model;
}

}  // namespace verdictpipe
