#pragma once

#include <vector>

#include "wealthmap/dataset.hpp"

namespace wealthmap {

enum class LinearKind { Ols, Ridge, Lasso };

struct LinearModel {
    LinearKind kind = LinearKind::Ols;
    std::vector<double> coefficients;  // original units
    double intercept = 0.0;
    double lambda = 0.0;
    std::vector<double> std_coefficients;  // standardized space, for importance

    double predict(const double* row) const;
};

// Features are z-scored internally and the intercept is unpenalized.
// OLS/Ridge solve (Z'Z + lambda I) b = Z'y; Lasso minimizes
// (1/2n)||y - Zb||^2 + lambda |b|_1 by cyclic coordinate descent
// (stops when the largest coefficient change < 1e-8, max 10000 sweeps).
LinearModel fit_linear_family(const Dataset& data, LinearKind kind, double lambda);

}  // namespace wealthmap
