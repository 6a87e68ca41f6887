#include "verdictpipe/tree.hpp"

#include <cmath>

namespace verdictpipe {

std::vector<std::size_t> DecisionTree::path(const FeatureVector& v) const {
  std::vector<std::size_t> out;
  std::size_t node = 0;
  for (;;) {
    out.push_back(node);
    const TreeNode& n = nodes[node];
    if (n.is_leaf()) return out;
    const double x = v.value(static_cast<std::uint32_t>(n.feature));
    node = static_cast<std::size_t>((x == 0.0 || x <= n.threshold) ? n.left : n.right);
  }
}

std::size_t DecisionTree::leaf_for(const FeatureVector& v) const {
  std::size_t node = 0;
  while (!nodes[node].is_leaf()) {
    const TreeNode& n = nodes[node];
    const double x = v.value(static_cast<std::uint32_t>(n.feature));
    node = static_cast<std::size_t>((x == 0.0 || x <= n.threshold) ? n.left : n.right);
  }
  return node;
}

bool DecisionTree::well_formed(std::size_t num_features) const noexcept {
  if (nodes.empty() || value_width == 0 || values.size() != nodes.size() * value_width) return false;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const TreeNode& n = nodes[i];
    if (n.is_leaf()) continue;
    if (static_cast<std::size_t>(n.feature) >= num_features || !std::isfinite(n.threshold)) return false;
    for (std::int32_t c : {n.left, n.right}) {
      if (c <= static_cast<std::int32_t>(i) || static_cast<std::size_t>(c) >= nodes.size()) return false;
    }
  }
  for (double x : values) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace verdictpipe
