#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "verdictpipe/vectorizer.hpp"

namespace verdictpipe {

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // x[feature] <= threshold goes left; absent (zero) features go left
  std::int32_t left = -1;
  std::int32_t right = -1;

  bool is_leaf() const noexcept { return feature < 0; }
};

/// Node array with `value_width` values stored per node (internal nodes
/// included, which is what path attribution needs). Node 0 is the root and
/// children always have larger indices than their parent.
struct DecisionTree {
  std::vector<TreeNode> nodes;
  std::size_t value_width = 1;
  std::vector<double> values;

  std::span<const double> value(std::size_t node) const {
    return {values.data() + node * value_width, value_width};
  }

  std::size_t leaf_for(const FeatureVector& v) const;

  /// Node indices from the root to the leaf reached by v.
  std::vector<std::size_t> path(const FeatureVector& v) const;

  /// Structural check: feature < num_features, children in range and
  /// strictly after their parent, values sized to match.
  bool well_formed(std::size_t num_features) const noexcept;
};

}  // namespace verdictpipe
