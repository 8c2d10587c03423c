#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wealthmap/cv.hpp"

namespace wealthmap {

// Iteratively refit and drop the `step` least-important features until
// n_keep remain. Importance ties drop the highest column index first.
// Returns the surviving column names in original column order.
std::vector<std::string> recursive_feature_elimination(const Dataset& data,
                                                       const ModelSpec& spec, int step,
                                                       int n_keep, std::uint64_t seed);

struct ParamRange {
    double lo = 0.0;
    double hi = 0.0;
    bool integer = false;
    bool log_scale = false;  // learning_rate and lambda draw log-uniform
};

// Keys: lambda, learning_rate, max_depth, min_samples_leaf, n_trees,
// n_stages, mtry — applied to whichever family is being searched.
using SearchSpace = std::map<std::string, ParamRange>;

SearchSpace default_search_space(ModelFamily family);

struct SearchResult {
    ModelSpec best_spec;
    std::map<std::string, double> best_params;
    double best_cv_r2 = 0.0;
};

// n_iter uniform draws from the space, each scored by k_fold_cv; argmax of
// pooled R^2, ties keeping the first drawn.
SearchResult random_search(const FeatureMatrix& features, const std::vector<double>& target,
                           ModelFamily family, const SearchSpace& space, int n_iter, int k,
                           std::uint64_t seed);

}  // namespace wealthmap
