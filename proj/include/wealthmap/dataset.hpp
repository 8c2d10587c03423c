#pragma once

#include <string>
#include <vector>

#include "wealthmap/errors.hpp"
#include "wealthmap/ingest.hpp"

namespace wealthmap {

// Dense design matrix with no missing values; imputation happens before a
// Dataset exists (per CV fold, from training rows only).
struct Dataset {
    std::vector<std::string> row_ids;
    std::vector<std::string> col_names;
    std::vector<double> x;  // row-major, n * p
    std::vector<double> y;
    std::size_t n = 0;
    std::size_t p = 0;

    const double* row(std::size_t i) const { return x.data() + i * p; }
    double at(std::size_t i, std::size_t j) const { return x[i * p + j]; }

    void validate() const;
};

// Pairs an already-imputed feature matrix with a target column.
Dataset make_dataset(const FeatureMatrix& features, const std::vector<double>& target);

}  // namespace wealthmap
