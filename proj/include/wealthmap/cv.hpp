#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "wealthmap/ensemble.hpp"
#include "wealthmap/linear.hpp"

namespace wealthmap {

enum class ModelFamily { Ols, Ridge, Lasso, RandomForest, Gbdt };

std::string model_family_name(ModelFamily family);
ModelFamily parse_model_family(const std::string& name);

struct ModelSpec {
    ModelFamily family = ModelFamily::Ols;
    double lambda = 0.0;  // ridge / lasso
    ForestParams forest;
    GbdtParams gbdt;
};

struct FittedModel {
    std::variant<LinearModel, TreeEnsemble> model;

    double predict(const double* row) const;
    bool is_tree() const { return std::holds_alternative<TreeEnsemble>(model); }
    // RFE ranking: trees use total split gain, linear uses |standardized
    // coefficient|.
    std::vector<double> importance(std::size_t p) const;
};

FittedModel fit_model(const Dataset& data, const ModelSpec& spec);

double r_squared(const std::vector<double>& y, const std::vector<double>& yhat);

struct CvReport {
    std::vector<double> fold_r2;
    double pooled_r2 = 0.0;
    std::vector<double> oof_predictions;  // aligned with input rows
    std::vector<int> fold_of_row;
};

// Rows are shuffled by seed and cut into k folds of size floor(n/k) or
// ceil(n/k). Imputation means and any standardization are recomputed inside
// each fold from training rows only; the feature matrix may contain missing
// cells.
CvReport k_fold_cv(const FeatureMatrix& features, const std::vector<double>& target,
                   const ModelSpec& spec, int k, std::uint64_t seed);

// Fold sizes for (n, k): first n%k folds get one extra row.
std::vector<std::size_t> fold_sizes(std::size_t n, int k);

// Column means of training rows, ignoring missing cells.
std::vector<double> imputation_means(const FeatureMatrix& features,
                                     const std::vector<int>& train_rows);

}  // namespace wealthmap
