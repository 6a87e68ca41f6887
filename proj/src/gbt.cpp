// Multiclass gradient boosting on softmax log-loss: one regression tree per
// class per round, exact greedy splits over presorted sparse columns, Newton
// leaf values, shrinkage.

#include <algorithm>
#include <cmath>
#include <limits>

#include "verdictpipe/error.hpp"
#include "verdictpipe/learners.hpp"

namespace verdictpipe {
namespace {

constexpr double kMinPrior = 1e-12;
constexpr double kMinHessian = 1e-16;

struct ColumnEntry {
  double value;
  std::uint32_t row;
};

// Nonzero entries per feature, descending by value (ties by row).
std::vector<std::vector<ColumnEntry>> presort_columns(const detail::TrainingRows& rows) {
  std::vector<std::vector<ColumnEntry>> cols(rows.num_features);
  for (std::size_t r = 0; r < rows.x.size(); ++r) {
    for (const auto& [f, w] : rows.x[r]->entries) {
      if (w != 0.0) cols[f].push_back({w, static_cast<std::uint32_t>(r)});
    }
  }
  for (auto& col : cols) {
    std::sort(col.begin(), col.end(), [](const ColumnEntry& a, const ColumnEntry& b) {
      return a.value != b.value ? a.value > b.value : a.row < b.row;
    });
  }
  return cols;
}

struct TreeParams {
  std::size_t max_depth;
  double min_child_weight;
  double lambda;
  double learning_rate;
};

struct SplitCandidate {
  double gain = 0.0;
  std::int32_t feature = -1;
  double threshold = 0.0;
};

class RegressionTreeBuilder {
 public:
  RegressionTreeBuilder(const std::vector<std::vector<ColumnEntry>>& cols, const detail::TrainingRows& rows,
                        const TreeParams& params)
      : cols_(cols), rows_(rows), p_(params) {}

  // Fits one tree to (grad, hess); leaf_of receives the final node of every row.
  DecisionTree build(const std::vector<double>& grad, const std::vector<double>& hess,
                     std::vector<std::uint32_t>& leaf_of) {
    const std::size_t n = grad.size();
    DecisionTree tree;
    tree.value_width = 1;
    leaf_of.assign(n, 0);

    std::vector<NodeStats> stats(1);
    for (std::size_t r = 0; r < n; ++r) stats[0].add(grad[r], hess[r]);
    tree.nodes.emplace_back();

    std::vector<std::uint32_t> active = {0};
    for (std::size_t depth = 0; depth < p_.max_depth && !active.empty(); ++depth) {
      std::vector<std::int32_t> slot_of(tree.nodes.size(), -1);
      for (std::size_t s = 0; s < active.size(); ++s) slot_of[active[s]] = static_cast<std::int32_t>(s);
      std::vector<SplitCandidate> best(active.size());

      std::vector<NodeStats> acc(active.size());
      std::vector<double> last(active.size());
      for (std::size_t f = 0; f < cols_.size(); ++f) {
        std::fill(acc.begin(), acc.end(), NodeStats{});
        for (const ColumnEntry& e : cols_[f]) {
          const std::int32_t s = slot_of[leaf_of[e.row]];
          if (s < 0) continue;
          if (acc[s].count > 0 && e.value < last[s]) {
            consider(stats[active[s]], acc[s], f, 0.5 * (last[s] + e.value), best[s]);
          }
          acc[s].add(grad[e.row], hess[e.row]);
          last[s] = e.value;
        }
        for (std::size_t s = 0; s < active.size(); ++s) {
          // Rows absent from the column sit at zero on the left.
          if (acc[s].count > 0 && acc[s].count < stats[active[s]].count) {
            consider(stats[active[s]], acc[s], f, 0.5 * last[s], best[s]);
          }
        }
      }

      std::vector<std::uint32_t> next;
      std::vector<std::int32_t> split_of(tree.nodes.size(), -1);
      for (std::size_t s = 0; s < active.size(); ++s) {
        if (best[s].feature < 0) continue;
        const std::uint32_t node = active[s];
        const auto left = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes[node].feature = best[s].feature;
        tree.nodes[node].threshold = best[s].threshold;
        tree.nodes[node].left = left;
        tree.nodes[node].right = left + 1;
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        stats.emplace_back();
        stats.emplace_back();
        split_of[node] = static_cast<std::int32_t>(s);
        next.push_back(static_cast<std::uint32_t>(left));
        next.push_back(static_cast<std::uint32_t>(left + 1));
      }
      for (std::size_t r = 0; r < n; ++r) {
        const std::uint32_t node = leaf_of[r];
        if (node >= split_of.size() || split_of[node] < 0) continue;
        const TreeNode& tn = tree.nodes[node];
        const double x = rows_.x[r]->value(static_cast<std::uint32_t>(tn.feature));
        leaf_of[r] = static_cast<std::uint32_t>((x == 0.0 || x <= tn.threshold) ? tn.left : tn.right);
        stats[leaf_of[r]].add(grad[r], hess[r]);
      }
      active = std::move(next);
    }

    tree.values.resize(tree.nodes.size());
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
      tree.values[i] = -p_.learning_rate * stats[i].g / (stats[i].h + p_.lambda);
    }
    return tree;
  }

 private:
  struct NodeStats {
    double g = 0.0;
    double h = 0.0;
    std::size_t count = 0;
    void add(double gi, double hi) {
      g += gi;
      h += hi;
      ++count;
    }
  };

  double score(double g, double h) const { return g * g / (h + p_.lambda); }

  void consider(const NodeStats& node, const NodeStats& right, std::size_t feature, double threshold,
                SplitCandidate& best) const {
    const double gl = node.g - right.g;
    const double hl = node.h - right.h;
    if (hl < p_.min_child_weight || right.h < p_.min_child_weight) return;
    const double gain = score(gl, hl) + score(right.g, right.h) - score(node.g, node.h);
    if (gain > best.gain) {
      best.gain = gain;
      best.feature = static_cast<std::int32_t>(feature);
      best.threshold = threshold;
    }
  }

  const std::vector<std::vector<ColumnEntry>>& cols_;
  const detail::TrainingRows& rows_;
  TreeParams p_;
};

double mean_log_loss(const std::vector<ClassProbabilities>& scores, const std::vector<std::size_t>& y) {
  double total = 0.0;
  for (std::size_t r = 0; r < y.size(); ++r) {
    const auto& s = scores[r];
    const double top = *std::max_element(s.begin(), s.end());
    double z = 0.0;
    for (double x : s) z += std::exp(x - top);
    total += (top + std::log(z)) - s[y[r]];
  }
  return total / static_cast<double>(y.size());
}

}  // namespace

ClassProbabilities gbt_raw_scores(const GbtModel& m, const FeatureVector& v) {
  ClassProbabilities s = m.base_score;
  for (std::size_t t = 0; t < m.trees.size(); ++t) {
    const auto& tree = m.trees[t];
    s[t % kNumClasses] += tree.values[tree.leaf_for(v)];
  }
  return s;
}

double gbt_log_loss(const GbtModel& m, const detail::TrainingRows& rows) {
  std::vector<ClassProbabilities> scores;
  scores.reserve(rows.x.size());
  for (const auto* x : rows.x) scores.push_back(gbt_raw_scores(m, *x));
  return mean_log_loss(scores, rows.y);
}

GbtModel train_gbt(const detail::TrainingRows& rows, const LearnerSpec& spec, TrainingMeta& meta) {
  const std::size_t n = rows.x.size();
  const auto rounds = static_cast<std::size_t>(spec.get("rounds"));
  const TreeParams params{static_cast<std::size_t>(spec.get("max_depth")), spec.get("min_child_weight"),
                          spec.get("lambda"), spec.get("learning_rate")};

  GbtModel model;
  model.learning_rate = params.learning_rate;
  ClassProbabilities prior{};
  for (std::size_t y : rows.y) prior[y] += 1.0;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    model.base_score[k] = std::log(std::max(prior[k] / static_cast<double>(n), kMinPrior));
  }

  const auto cols = presort_columns(rows);
  RegressionTreeBuilder builder(cols, rows, params);
  std::vector<ClassProbabilities> scores(n, model.base_score);
  std::vector<double> grad(n);
  std::vector<double> hess(n);
  std::vector<std::uint32_t> leaf_of;

  meta = TrainingMeta{};
  for (std::size_t round = 0; round < rounds; ++round) {
    std::vector<ClassProbabilities> probs(n);
    for (std::size_t r = 0; r < n; ++r) probs[r] = softmax(scores[r]);
    // All K trees of a round are fit against the same probabilities.
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      for (std::size_t r = 0; r < n; ++r) {
        const double p = probs[r][k];
        grad[r] = p - (rows.y[r] == k ? 1.0 : 0.0);
        hess[r] = std::max(p * (1.0 - p), kMinHessian);
      }
      DecisionTree tree = builder.build(grad, hess, leaf_of);
      for (std::size_t r = 0; r < n; ++r) scores[r][k] += tree.values[leaf_of[r]];
      model.trees.push_back(std::move(tree));
    }
    const double loss = mean_log_loss(scores, rows.y);
    if (!std::isfinite(loss)) {
      throw Error(ErrorCode::NonFiniteLoss, "gradient boosting diverged at round " + std::to_string(round));
    }
    meta.loss_history.push_back(loss);
  }
  meta.iterations = rounds;
  meta.final_loss = meta.loss_history.empty() ? mean_log_loss(scores, rows.y) : meta.loss_history.back();
  return model;
}

}  // namespace verdictpipe
