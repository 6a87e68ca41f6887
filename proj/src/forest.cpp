#include <algorithm>
#include <cmath>
#include <numeric>

#include "verdictpipe/learners.hpp"
#include "verdictpipe/rng.hpp"

namespace verdictpipe {
namespace {

using ClassWeights = std::array<double, kNumClasses>;

double gini_mass(const ClassWeights& w) {
  // W * gini(w) = W - sum(w_k^2) / W
  const double total = w[0] + w[1] + w[2];
  if (total <= 0.0) return 0.0;
  return total - (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]) / total;
}

struct WorkNode {
  std::uint32_t id;
  std::size_t depth;
  std::vector<std::uint32_t> rows;  // distinct in-bag rows
};

class ClassificationTreeBuilder {
 public:
  ClassificationTreeBuilder(const detail::TrainingRows& rows, std::size_t max_depth, std::size_t mtry)
      : rows_(rows), max_depth_(max_depth), mtry_(mtry) {}

  DecisionTree build(const std::vector<double>& weight, CounterRng& rng) {
    DecisionTree tree;
    tree.value_width = kNumClasses;
    std::vector<ClassWeights> dist;

    std::vector<std::uint32_t> root;
    for (std::size_t r = 0; r < weight.size(); ++r) {
      if (weight[r] > 0.0) root.push_back(static_cast<std::uint32_t>(r));
    }
    tree.nodes.emplace_back();
    dist.push_back(class_weights(root, weight));

    std::vector<WorkNode> stack;
    stack.push_back({0, 0, std::move(root)});
    std::vector<std::uint32_t> features(rows_.num_features);
    while (!stack.empty()) {
      WorkNode node = std::move(stack.back());
      stack.pop_back();
      const ClassWeights& w = dist[node.id];
      const bool pure = std::count_if(w.begin(), w.end(), [](double x) { return x > 0.0; }) <= 1;
      if (pure || node.rows.size() < 2 || (max_depth_ > 0 && node.depth >= max_depth_)) continue;

      std::iota(features.begin(), features.end(), 0);
      Split best;
      // Draw features without replacement; keep going past mtry until some
      // valid partition exists.
      for (std::size_t i = 0; i < features.size(); ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(features.size() - i));
        std::swap(features[i], features[j]);
        evaluate_feature(features[i], node.rows, weight, w, best);
        if (i + 1 >= mtry_ && best.feature >= 0) break;
      }
      if (best.feature < 0) continue;

      std::vector<std::uint32_t> left;
      std::vector<std::uint32_t> right;
      for (std::uint32_t r : node.rows) {
        const double x = rows_.x[r]->value(static_cast<std::uint32_t>(best.feature));
        ((x == 0.0 || x <= best.threshold) ? left : right).push_back(r);
      }
      const auto left_id = static_cast<std::uint32_t>(tree.nodes.size());
      TreeNode& tn = tree.nodes[node.id];
      tn.feature = best.feature;
      tn.threshold = best.threshold;
      tn.left = static_cast<std::int32_t>(left_id);
      tn.right = static_cast<std::int32_t>(left_id + 1);
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      dist.push_back(class_weights(left, weight));
      dist.push_back(class_weights(right, weight));
      stack.push_back({left_id + 1, node.depth + 1, std::move(right)});
      stack.push_back({left_id, node.depth + 1, std::move(left)});
    }

    tree.values.reserve(dist.size() * kNumClasses);
    for (const auto& d : dist) {
      const double total = d[0] + d[1] + d[2];
      for (double x : d) tree.values.push_back(total > 0.0 ? x / total : 0.0);
    }
    return tree;
  }

 private:
  struct Split {
    double decrease = -1.0;
    std::int32_t feature = -1;
    double threshold = 0.0;
  };

  ClassWeights class_weights(const std::vector<std::uint32_t>& node_rows, const std::vector<double>& weight) const {
    ClassWeights w{};
    for (std::uint32_t r : node_rows) w[rows_.y[r]] += weight[r];
    return w;
  }

  void evaluate_feature(std::uint32_t feature, const std::vector<std::uint32_t>& node_rows,
                        const std::vector<double>& weight, const ClassWeights& total, Split& best) {
    values_.clear();
    ClassWeights left = total;  // starts as "everything"; nonzeros are moved out below
    for (std::uint32_t r : node_rows) {
      const double x = rows_.x[r]->value(feature);
      if (x != 0.0) {
        values_.push_back({x, r});
        left[rows_.y[r]] -= weight[r];
      }
    }
    if (values_.empty()) return;
    std::sort(values_.begin(), values_.end(),
              [](const auto& a, const auto& b) { return a.first != b.first ? a.first < b.first : a.second < b.second; });

    const double parent = gini_mass(total);
    ClassWeights right{};
    for (const auto& [x, r] : values_) right[rows_.y[r]] += weight[r];

    auto consider = [&](double threshold) {
      const double decrease = parent - gini_mass(left) - gini_mass(right);
      if (decrease > best.decrease + 1e-12) {
        best.decrease = decrease;
        best.feature = static_cast<std::int32_t>(feature);
        best.threshold = threshold;
      }
    };

    const double zero_mass = left[0] + left[1] + left[2];
    if (values_.size() < node_rows.size() && zero_mass > 0.0) consider(0.5 * values_.front().first);
    for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
      const auto [x, r] = values_[i];
      left[rows_.y[r]] += weight[r];
      right[rows_.y[r]] -= weight[r];
      if (values_[i + 1].first > x) consider(0.5 * (x + values_[i + 1].first));
    }
  }

  const detail::TrainingRows& rows_;
  std::size_t max_depth_;
  std::size_t mtry_;
  std::vector<std::pair<double, std::uint32_t>> values_;
};

}  // namespace

ForestModel train_forest(const detail::TrainingRows& rows, const LearnerSpec& spec, TrainingMeta& meta) {
  const std::size_t n = rows.x.size();
  const auto n_trees = static_cast<std::size_t>(spec.get("trees"));
  const auto max_depth = static_cast<std::size_t>(spec.get("max_depth"));
  const bool bootstrap = spec.get("bootstrap") != 0.0;
  std::size_t mtry = static_cast<std::size_t>(spec.get("max_features"));
  if (mtry == 0) mtry = static_cast<std::size_t>(std::sqrt(static_cast<double>(rows.num_features)));
  mtry = std::clamp<std::size_t>(mtry, 1, std::max<std::size_t>(rows.num_features, 1));

  ClassificationTreeBuilder builder(rows, max_depth, mtry);
  ForestModel model;
  meta = TrainingMeta{};
  std::size_t correct_oob = 0;
  std::size_t oob_total = 0;
  for (std::size_t t = 0; t < n_trees; ++t) {
    // Stream t is private to tree t, so trees could be grown in any order.
    CounterRng rng(spec.seed, t);
    std::vector<double> weight(n, bootstrap ? 0.0 : 1.0);
    if (bootstrap) {
      for (std::size_t i = 0; i < n; ++i) weight[rng.below(n)] += 1.0;
    }
    model.trees.push_back(builder.build(weight, rng));
    if (bootstrap) {
      const auto& tree = model.trees.back();
      for (std::size_t r = 0; r < n; ++r) {
        if (weight[r] > 0.0) continue;
        const auto leaf = tree.value(tree.leaf_for(*rows.x[r]));
        const auto top = static_cast<std::size_t>(std::max_element(leaf.begin(), leaf.end()) - leaf.begin());
        correct_oob += top == rows.y[r] ? 1 : 0;
        ++oob_total;
      }
    }
  }
  meta.iterations = n_trees;
  // Per-tree out-of-bag error rate stands in for a training loss.
  meta.final_loss = oob_total > 0 ? 1.0 - static_cast<double>(correct_oob) / static_cast<double>(oob_total) : 0.0;
  return model;
}

}  // namespace verdictpipe
