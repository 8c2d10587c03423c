#include "wealthmap/ensemble.hpp"

#include <numeric>
#include <thread>

namespace wealthmap {

double TreeEnsemble::predict(const double* row) const {
    if (trees.empty()) throw Error("empty ensemble");
    double sum = 0.0;
    for (const auto& tree : trees) sum += tree.predict(row);
    if (combiner == Combiner::Mean) return sum / static_cast<double>(trees.size());
    return base_score + learning_rate * sum;
}

std::vector<double> TreeEnsemble::gain_importance(std::size_t p) const {
    std::vector<double> importance(p, 0.0);
    for (const auto& tree : trees)
        for (const auto& node : tree.nodes)
            if (!node.is_leaf()) importance[static_cast<std::size_t>(node.feature)] += node.gain;
    return importance;
}

TreeEnsemble fit_random_forest(const Dataset& data, const ForestParams& params) {
    data.validate();
    if (params.n_trees < 1) throw Error("n_trees must be >= 1");

    TreeParams tree_params;
    tree_params.max_depth = params.max_depth;
    tree_params.min_samples_leaf = params.min_samples_leaf;
    tree_params.mtry = params.mtry > 0 ? params.mtry
                                       : std::max(1, static_cast<int>(data.p) / 3);

    TreeEnsemble ensemble;
    ensemble.combiner = Combiner::Mean;
    ensemble.base_score = 0.0;
    ensemble.learning_rate = 1.0;
    ensemble.trees.resize(static_cast<std::size_t>(params.n_trees));

    auto fit_one = [&](int t) {
        RngStream rng = RngStream::derive(params.seed, static_cast<std::uint64_t>(t));
        std::vector<int> rows(data.n);
        if (params.bootstrap) {
            for (std::size_t i = 0; i < data.n; ++i)
                rows[i] = static_cast<int>(rng.below(data.n));
        } else {
            std::iota(rows.begin(), rows.end(), 0);
        }
        ensemble.trees[static_cast<std::size_t>(t)] =
            fit_tree_on_rows(data.x.data(), data.p, rows, data.y, tree_params, rng);
    };

    int n_threads = std::max(1, params.n_threads);
    if (n_threads == 1 || params.n_trees == 1) {
        for (int t = 0; t < params.n_trees; ++t) fit_one(t);
    } else {
        std::vector<std::thread> workers;
        for (int w = 0; w < n_threads; ++w)
            workers.emplace_back([&, w] {
                for (int t = w; t < params.n_trees; t += n_threads) fit_one(t);
            });
        for (auto& worker : workers) worker.join();
    }
    return ensemble;
}

TreeEnsemble fit_gbdt(const Dataset& data, const GbdtParams& params) {
    data.validate();
    if (params.n_stages < 1) throw Error("n_stages must be >= 1");
    if (!(params.learning_rate > 0.0 && params.learning_rate <= 1.0))
        throw Error("learning_rate must be in (0, 1]");

    TreeParams tree_params;
    tree_params.max_depth = params.max_depth;
    tree_params.min_samples_leaf = params.min_samples_leaf;
    tree_params.mtry = 0;  // all features

    TreeEnsemble ensemble;
    ensemble.combiner = Combiner::Sum;
    ensemble.learning_rate = params.learning_rate;
    double mean_y = 0.0;
    for (double v : data.y) mean_y += v;
    ensemble.base_score = mean_y / static_cast<double>(data.n);

    std::vector<int> rows(data.n);
    std::iota(rows.begin(), rows.end(), 0);
    std::vector<double> residual(data.n);
    for (std::size_t i = 0; i < data.n; ++i) residual[i] = data.y[i] - ensemble.base_score;

    for (int stage = 0; stage < params.n_stages; ++stage) {
        RngStream rng = RngStream::derive(params.seed, static_cast<std::uint64_t>(stage));
        RegressionTree tree =
            fit_tree_on_rows(data.x.data(), data.p, rows, residual, tree_params, rng);
        for (std::size_t i = 0; i < data.n; ++i)
            residual[i] -= params.learning_rate * tree.predict(data.row(i));
        ensemble.trees.push_back(std::move(tree));
    }
    return ensemble;
}

}  // namespace wealthmap
