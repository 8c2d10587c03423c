#pragma once

#include <string>
#include <vector>

#include "wealthmap/ensemble.hpp"
#include "wealthmap/ingest.hpp"

namespace wealthmap {

struct ShapExplanation {
    double base_value = 0.0;  // expected model output, v(empty set)
    std::vector<std::string> feature_names;
    std::vector<double> contributions;
    double prediction = 0.0;
};

// Cover-based conditional expectation: follow x on features in S, take the
// cover-weighted average of both branches otherwise.
double tree_conditional_expectation(const RegressionTree& tree, const double* x,
                                    const std::vector<bool>& in_set);

// Exact Shapley values by subset enumeration over the cover-based value
// function. Guarded to p <= 15.
ShapExplanation brute_force_shapley(const TreeEnsemble& ensemble, const std::vector<double>& x,
                                    const std::vector<std::string>& names);

// Polynomial-time path-extension computation; identical output to
// brute_force_shapley for every input.
ShapExplanation tree_shap(const TreeEnsemble& ensemble, const std::vector<double>& x,
                          const std::vector<std::string>& names);

struct FeatureImportance {
    std::string feature;
    double mean_abs_shap = 0.0;
    std::vector<std::pair<double, double>> scatter;  // (feature value, shap value)
};

struct GlobalImportance {
    std::vector<FeatureImportance> features;  // sorted by mean_abs_shap descending
};

GlobalImportance global_importance(const std::vector<ShapExplanation>& explanations,
                                   const FeatureMatrix& features);

struct ForceArrow {
    std::string feature;
    double feature_value = 0.0;
    double contribution = 0.0;  // positive pushes the prediction up
};

struct ForcePlotData {
    double base_value = 0.0;
    double prediction = 0.0;
    std::vector<ForceArrow> arrows;  // sorted by |contribution| descending
};

ForcePlotData force_plot_data(const ShapExplanation& explanation, const std::vector<double>& x);

// cluster_id,feature,feature_value,shap_value rows plus a {base_value}
// sidecar JSON next to the CSV.
void write_shap_csv(const std::string& path, const std::vector<std::string>& row_ids,
                    const std::vector<ShapExplanation>& explanations,
                    const FeatureMatrix& features);
void write_global_importance_csv(const std::string& path, const GlobalImportance& importance);

}  // namespace wealthmap
