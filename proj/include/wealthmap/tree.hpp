#pragma once

#include <vector>

#include "wealthmap/dataset.hpp"
#include "wealthmap/rng.hpp"

namespace wealthmap {

struct TreeNode {
    int feature = -1;  // split feature; -1 on leaves
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;  // leaf mean
    double cover = 0.0;  // training rows routed through this node
    double gain = 0.0;   // split SSE reduction; not serialized

    bool is_leaf() const { return left < 0; }
};

struct RegressionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double predict(const double* row) const;
};

struct TreeParams {
    int max_depth = 8;
    int min_samples_leaf = 1;
    int mtry = 0;  // 0 means all features
};

// Greedy CART with variance-reduction splits at midpoints of adjacent
// distinct values. Gain ties resolve to the lowest feature index, then the
// lowest threshold. Per-node candidate features are mtry draws without
// replacement from rng.
RegressionTree fit_regression_tree(const Dataset& data, const TreeParams& params, RngStream& rng);

// Fit on a row subset (duplicates allowed, e.g. bootstrap) against an
// arbitrary per-row target. Backbone for forests and boosting stages.
RegressionTree fit_tree_on_rows(const double* x, std::size_t p, const std::vector<int>& rows,
                                const std::vector<double>& target, const TreeParams& params,
                                RngStream& rng);

}  // namespace wealthmap
