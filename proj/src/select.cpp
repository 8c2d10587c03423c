#include "wealthmap/select.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wealthmap/rng.hpp"

namespace wealthmap {

namespace {

Dataset take_columns(const Dataset& data, const std::vector<int>& cols) {
    Dataset d;
    d.row_ids = data.row_ids;
    d.y = data.y;
    d.n = data.n;
    d.p = cols.size();
    for (int c : cols) d.col_names.push_back(data.col_names[static_cast<std::size_t>(c)]);
    d.x.reserve(d.n * d.p);
    for (std::size_t i = 0; i < d.n; ++i)
        for (int c : cols) d.x.push_back(data.at(i, static_cast<std::size_t>(c)));
    return d;
}

ModelSpec reseed(ModelSpec spec, std::uint64_t seed, std::uint64_t round) {
    std::uint64_t derived = RngStream::derive(seed, round).next_u64();
    spec.forest.seed = derived;
    spec.gbdt.seed = derived;
    return spec;
}

}  // namespace

std::vector<std::string> recursive_feature_elimination(const Dataset& data,
                                                       const ModelSpec& spec, int step,
                                                       int n_keep, std::uint64_t seed) {
    data.validate();
    if (step < 1) throw Error("step must be >= 1");
    if (n_keep < 1 || n_keep > static_cast<int>(data.p))
        throw Error("n_keep must be in [1, p]");

    std::vector<int> remaining(data.p);
    std::iota(remaining.begin(), remaining.end(), 0);

    std::uint64_t round = 0;
    while (static_cast<int>(remaining.size()) > n_keep) {
        Dataset sub = take_columns(data, remaining);
        FittedModel model = fit_model(sub, reseed(spec, seed, round++));
        std::vector<double> importance = model.importance(sub.p);

        // sort positions by (importance asc, original column index desc):
        // the front of this order is what gets dropped
        std::vector<std::size_t> by_rank(remaining.size());
        std::iota(by_rank.begin(), by_rank.end(), 0);
        std::sort(by_rank.begin(), by_rank.end(), [&](std::size_t a, std::size_t b) {
            if (importance[a] != importance[b]) return importance[a] < importance[b];
            return remaining[a] > remaining[b];
        });

        int n_drop = std::min(step, static_cast<int>(remaining.size()) - n_keep);
        std::vector<bool> drop(remaining.size(), false);
        for (int i = 0; i < n_drop; ++i) drop[by_rank[static_cast<std::size_t>(i)]] = true;
        std::vector<int> next;
        for (std::size_t i = 0; i < remaining.size(); ++i)
            if (!drop[i]) next.push_back(remaining[i]);
        remaining = std::move(next);
    }

    std::vector<std::string> names;
    for (int c : remaining) names.push_back(data.col_names[static_cast<std::size_t>(c)]);
    return names;
}

SearchSpace default_search_space(ModelFamily family) {
    switch (family) {
        case ModelFamily::Ols:
            return {};
        case ModelFamily::Ridge:
        case ModelFamily::Lasso:
            return {{"lambda", {1e-4, 1e2, false, true}}};
        case ModelFamily::RandomForest:
            return {{"max_depth", {3, 12, true, false}},
                    {"min_samples_leaf", {1, 10, true, false}},
                    {"n_trees", {50, 300, true, false}}};
        case ModelFamily::Gbdt:
            return {{"learning_rate", {0.01, 0.3, false, true}},
                    {"max_depth", {2, 8, true, false}},
                    {"n_stages", {50, 300, true, false}}};
    }
    return {};
}

namespace {

void apply_param(ModelSpec& spec, const std::string& name, double value) {
    int iv = static_cast<int>(std::llround(value));
    if (name == "lambda") spec.lambda = value;
    else if (name == "learning_rate") spec.gbdt.learning_rate = value;
    else if (name == "n_trees") spec.forest.n_trees = iv;
    else if (name == "n_stages") spec.gbdt.n_stages = iv;
    else if (name == "mtry") spec.forest.mtry = iv;
    else if (name == "max_depth") { spec.forest.max_depth = iv; spec.gbdt.max_depth = iv; }
    else if (name == "min_samples_leaf") {
        spec.forest.min_samples_leaf = iv;
        spec.gbdt.min_samples_leaf = iv;
    } else {
        throw Error("unknown search parameter: " + name);
    }
}

}  // namespace

SearchResult random_search(const FeatureMatrix& features, const std::vector<double>& target,
                           ModelFamily family, const SearchSpace& space, int n_iter, int k,
                           std::uint64_t seed) {
    if (n_iter < 1) throw Error("n_iter must be >= 1");
    RngStream rng(seed);

    SearchResult result;
    bool have_best = false;
    for (int iter = 0; iter < n_iter; ++iter) {
        ModelSpec spec;
        spec.family = family;
        spec.forest.seed = seed;
        spec.gbdt.seed = seed;
        std::map<std::string, double> drawn;
        for (const auto& [name, range] : space) {
            double value = range.log_scale ? rng.log_uniform(range.lo, range.hi)
                                           : rng.uniform(range.lo, range.hi);
            if (range.integer) value = std::floor(value + 0.5);
            drawn[name] = value;
            apply_param(spec, name, value);
        }
        CvReport report = k_fold_cv(features, target, spec, k, seed);
        if (!have_best || report.pooled_r2 > result.best_cv_r2) {
            have_best = true;
            result.best_spec = spec;
            result.best_params = drawn;
            result.best_cv_r2 = report.pooled_r2;
        }
    }
    return result;
}

}  // namespace wealthmap
