#include "wealthmap/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wealthmap {

double RegressionTree::predict(const double* row) const {
    int idx = 0;
    while (!nodes[static_cast<std::size_t>(idx)].is_leaf()) {
        const TreeNode& node = nodes[static_cast<std::size_t>(idx)];
        idx = row[node.feature] <= node.threshold ? node.left : node.right;
    }
    return nodes[static_cast<std::size_t>(idx)].value;
}

namespace {

struct Builder {
    const double* x;
    std::size_t p;
    const std::vector<double>& target;
    const TreeParams& params;
    RngStream& rng;
    std::vector<TreeNode> nodes;
    std::vector<std::pair<double, double>> scratch;  // (feature value, target)

    int build(std::vector<int>& rows, int depth) {
        double sum = 0.0, sumsq = 0.0;
        for (int r : rows) {
            double t = target[static_cast<std::size_t>(r)];
            sum += t;
            sumsq += t * t;
        }
        double m = static_cast<double>(rows.size());
        double node_sse = sumsq - sum * sum / m;

        int node_id = static_cast<int>(nodes.size());
        nodes.emplace_back();
        nodes.back().value = sum / m;
        nodes.back().cover = m;

        if (depth >= params.max_depth ||
            rows.size() < 2 * static_cast<std::size_t>(params.min_samples_leaf) ||
            rows.size() < 2)
            return node_id;

        int mtry = params.mtry;
        if (mtry <= 0 || mtry > static_cast<int>(p)) mtry = static_cast<int>(p);
        std::vector<int> candidates;
        if (mtry == static_cast<int>(p)) {
            candidates.resize(p);
            std::iota(candidates.begin(), candidates.end(), 0);
        } else {
            candidates = rng.sample_without_replacement(static_cast<int>(p), mtry);
            // evaluated in ascending order so equal gains resolve to the
            // lowest feature index
            std::sort(candidates.begin(), candidates.end());
        }

        double best_gain = 0.0;
        int best_feature = -1;
        double best_threshold = 0.0;
        for (int f : candidates) {
            scratch.clear();
            for (int r : rows)
                scratch.emplace_back(x[static_cast<std::size_t>(r) * p + static_cast<std::size_t>(f)],
                                     target[static_cast<std::size_t>(r)]);
            std::sort(scratch.begin(), scratch.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            double left_sum = 0.0, left_sq = 0.0;
            for (std::size_t i = 0; i + 1 < scratch.size(); ++i) {
                left_sum += scratch[i].second;
                left_sq += scratch[i].second * scratch[i].second;
                if (scratch[i].first == scratch[i + 1].first) continue;
                std::size_t nl = i + 1, nr = scratch.size() - nl;
                if (nl < static_cast<std::size_t>(params.min_samples_leaf) ||
                    nr < static_cast<std::size_t>(params.min_samples_leaf))
                    continue;
                double right_sum = sum - left_sum, right_sq = sumsq - left_sq;
                double sse = (left_sq - left_sum * left_sum / static_cast<double>(nl)) +
                             (right_sq - right_sum * right_sum / static_cast<double>(nr));
                double gain = node_sse - sse;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = f;
                    best_threshold = 0.5 * (scratch[i].first + scratch[i + 1].first);
                }
            }
        }

        if (best_feature < 0 || best_gain <= 1e-12 * std::max(1.0, node_sse)) return node_id;

        std::vector<int> left_rows, right_rows;
        for (int r : rows) {
            double v = x[static_cast<std::size_t>(r) * p + static_cast<std::size_t>(best_feature)];
            (v <= best_threshold ? left_rows : right_rows).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        nodes[static_cast<std::size_t>(node_id)].feature = best_feature;
        nodes[static_cast<std::size_t>(node_id)].threshold = best_threshold;
        nodes[static_cast<std::size_t>(node_id)].gain = best_gain;
        int left_id = build(left_rows, depth + 1);
        nodes[static_cast<std::size_t>(node_id)].left = left_id;
        int right_id = build(right_rows, depth + 1);
        nodes[static_cast<std::size_t>(node_id)].right = right_id;
        return node_id;
    }
};

}  // namespace

RegressionTree fit_tree_on_rows(const double* x, std::size_t p, const std::vector<int>& rows,
                                const std::vector<double>& target, const TreeParams& params,
                                RngStream& rng) {
    if (rows.empty()) throw TooFewRows("cannot fit a tree on zero rows");
    if (params.max_depth < 1) throw Error("max_depth must be >= 1");
    if (params.min_samples_leaf < 1) throw Error("min_samples_leaf must be >= 1");
    Builder builder{x, p, target, params, rng, {}, {}};
    std::vector<int> all_rows = rows;
    builder.build(all_rows, 0);
    RegressionTree tree;
    tree.nodes = std::move(builder.nodes);
    return tree;
}

RegressionTree fit_regression_tree(const Dataset& data, const TreeParams& params, RngStream& rng) {
    data.validate();
    std::vector<int> rows(data.n);
    std::iota(rows.begin(), rows.end(), 0);
    return fit_tree_on_rows(data.x.data(), data.p, rows, data.y, params, rng);
}

}  // namespace wealthmap
