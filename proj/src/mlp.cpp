// One hidden ReLU layer, softmax output, mean cross-entropy, mini-batch
// gradient descent at a constant learning rate.

#include <algorithm>
#include <cmath>
#include <numeric>

#include "verdictpipe/error.hpp"
#include "verdictpipe/learners.hpp"
#include "verdictpipe/rng.hpp"

namespace verdictpipe {

MlpForward mlp_forward(const MlpModel& m, const FeatureVector& v) {
  const std::size_t H = m.hidden;
  const double* w1 = m.params.data() + m.w1_offset();
  const double* b1 = m.params.data() + m.b1_offset();
  const double* w2 = m.params.data() + m.w2_offset();
  const double* b2 = m.params.data() + m.b2_offset();

  MlpForward out;
  out.hidden_pre.assign(b1, b1 + H);
  for (const auto& [f, x] : v.entries) {
    if (f >= m.num_features) continue;
    const double* row = w1 + static_cast<std::size_t>(f) * H;
    for (std::size_t h = 0; h < H; ++h) out.hidden_pre[h] += row[h] * x;
  }
  for (std::size_t k = 0; k < kNumClasses; ++k) out.logits[k] = b2[k];
  for (std::size_t h = 0; h < H; ++h) {
    const double a = std::max(0.0, out.hidden_pre[h]);
    if (a == 0.0) continue;
    for (std::size_t k = 0; k < kNumClasses; ++k) out.logits[k] += a * w2[h * kNumClasses + k];
  }
  return out;
}

double mlp_loss(const MlpModel& m, const detail::TrainingRows& rows, double l2, std::vector<double>* grad) {
  const std::size_t H = m.hidden;
  const std::size_t n = rows.x.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  const double* w2 = m.params.data() + m.w2_offset();
  if (grad != nullptr) grad->assign(m.param_count(), 0.0);

  double loss = 0.0;
  std::vector<double> dhidden(H);
  for (std::size_t r = 0; r < n; ++r) {
    const FeatureVector& x = *rows.x[r];
    const MlpForward fw = mlp_forward(m, x);
    const ClassProbabilities p = softmax(fw.logits);
    loss -= std::log(std::max(p[rows.y[r]], 1e-300)) * inv_n;
    if (grad == nullptr) continue;

    ClassProbabilities dlogit{};
    for (std::size_t k = 0; k < kNumClasses; ++k) dlogit[k] = (p[k] - (rows.y[r] == k ? 1.0 : 0.0)) * inv_n;
    double* g = grad->data();
    for (std::size_t k = 0; k < kNumClasses; ++k) g[m.b2_offset() + k] += dlogit[k];
    for (std::size_t h = 0; h < H; ++h) {
      const double a = std::max(0.0, fw.hidden_pre[h]);
      double back = 0.0;
      for (std::size_t k = 0; k < kNumClasses; ++k) {
        g[m.w2_offset() + h * kNumClasses + k] += a * dlogit[k];
        back += w2[h * kNumClasses + k] * dlogit[k];
      }
      dhidden[h] = fw.hidden_pre[h] > 0.0 ? back : 0.0;
      g[m.b1_offset() + h] += dhidden[h];
    }
    for (const auto& [f, v] : x.entries) {
      if (f >= m.num_features) continue;
      double* row = g + m.w1_offset() + static_cast<std::size_t>(f) * H;
      for (std::size_t h = 0; h < H; ++h) row[h] += dhidden[h] * v;
    }
  }

  if (l2 > 0.0) {
    auto penalize = [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        loss += 0.5 * l2 * m.params[i] * m.params[i];
        if (grad != nullptr) (*grad)[i] += l2 * m.params[i];
      }
    };
    penalize(m.w1_offset(), m.b1_offset());
    penalize(m.w2_offset(), m.b2_offset());
  }
  return loss;
}

MlpModel train_mlp(const detail::TrainingRows& rows, const LearnerSpec& spec, TrainingMeta& meta) {
  const std::size_t n = rows.x.size();
  const double lr = spec.get("learning_rate");
  const auto epochs = static_cast<std::size_t>(spec.get("epochs"));
  const auto batch = static_cast<std::size_t>(spec.get("batch"));
  const double l2 = spec.get("l2");

  MlpModel m;
  m.num_features = rows.num_features;
  m.hidden = static_cast<std::size_t>(spec.get("hidden"));
  m.params.assign(m.param_count(), 0.0);

  // Stream 0 initializes, stream 1 + e shuffles epoch e.
  CounterRng init(spec.seed, 0);
  const double r1 = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(m.num_features, 1)));
  const double r2 = 1.0 / std::sqrt(static_cast<double>(m.hidden));
  for (std::size_t i = m.w1_offset(); i < m.b1_offset(); ++i) m.params[i] = (2.0 * init.uniform() - 1.0) * r1;
  for (std::size_t i = m.w2_offset(); i < m.b2_offset(); ++i) m.params[i] = (2.0 * init.uniform() - 1.0) * r2;

  meta = TrainingMeta{};
  std::vector<std::size_t> order(n);
  std::vector<double> grad;
  detail::TrainingRows mini;
  mini.num_features = rows.num_features;
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    CounterRng rng(spec.seed, 1 + epoch);
    deterministic_shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(n, start + batch);
      mini.x.clear();
      mini.y.clear();
      for (std::size_t i = start; i < stop; ++i) {
        mini.x.push_back(rows.x[order[i]]);
        mini.y.push_back(rows.y[order[i]]);
      }
      mlp_loss(m, mini, l2, &grad);
      for (std::size_t i = 0; i < m.params.size(); ++i) m.params[i] -= lr * grad[i];
    }
    const double loss = mlp_loss(m, rows, l2, nullptr);
    if (!std::isfinite(loss)) {
      throw Error(ErrorCode::NonFiniteLoss, "network loss diverged at epoch " + std::to_string(epoch));
    }
    meta.loss_history.push_back(loss);
  }
  meta.iterations = epochs;
  meta.final_loss = meta.loss_history.back();
  return m;
}

}  // namespace verdictpipe
