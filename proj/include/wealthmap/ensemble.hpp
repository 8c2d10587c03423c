#pragma once

#include <cstdint>
#include <vector>

#include "wealthmap/tree.hpp"

namespace wealthmap {

enum class Combiner { Mean, Sum };

struct TreeEnsemble {
    std::vector<RegressionTree> trees;
    Combiner combiner = Combiner::Mean;
    double base_score = 0.0;     // 0 for forests, training mean for boosting
    double learning_rate = 1.0;  // boosting only

    double predict(const double* row) const;
    // Split-gain totals per feature, summed over all trees.
    std::vector<double> gain_importance(std::size_t p) const;
};

struct ForestParams {
    int n_trees = 200;
    int mtry = 0;  // 0 means floor(p/3), min 1
    int max_depth = 8;
    int min_samples_leaf = 5;
    bool bootstrap = true;
    std::uint64_t seed = 0;
    int n_threads = 1;
};

// Tree t draws its bootstrap sample and split candidates from an rng stream
// derived from (seed, t), so results are bit-identical for any n_threads.
TreeEnsemble fit_random_forest(const Dataset& data, const ForestParams& params);

struct GbdtParams {
    int n_stages = 200;
    double learning_rate = 0.1;
    int max_depth = 4;
    int min_samples_leaf = 5;
    std::uint64_t seed = 0;
};

// Squared-loss gradient boosting: each stage fits a tree to the residuals.
TreeEnsemble fit_gbdt(const Dataset& data, const GbdtParams& params);

}  // namespace wealthmap
