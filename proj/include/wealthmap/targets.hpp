#pragma once

#include <string>
#include <vector>

#include "wealthmap/errors.hpp"

namespace wealthmap {

struct HouseholdRecord {
    std::string cluster_id;
    std::vector<double> assets;
    int toilet_outside = 0;
    int improved_water = 0;
    int head_higher_edu = 0;
};

struct PcaResult {
    std::vector<double> scores;    // length n
    std::vector<double> loadings;  // length p; dropped zero-variance columns get 0
    double explained_share = 0.0;
};

// First principal component of the correlation matrix (columns z-scored
// first). Sign fixed so the loading sum is >= 0; on an exact tie the first
// nonzero loading is made positive. Zero-variance columns are dropped with a
// stderr warning and reported with loading 0.
PcaResult pca_first_component(const std::vector<double>& assets, std::size_t n, std::size_t p);

struct TargetRow {
    std::string cluster_id;
    double wealth_index = 0.0;
    double toilet_access = 0.0;           // share of households with outside toilet
    double clean_water = 0.0;             // share with improved water source
    double educational_attainment = 0.0;  // share of heads with higher education
};

struct TargetTable {
    std::vector<TargetRow> rows;
};

// Household wealth scores come from one pooled PCA over all households;
// cluster targets are per-cluster means, ordered by first appearance.
TargetTable derive_cluster_targets(const std::vector<HouseholdRecord>& households);

std::vector<HouseholdRecord> read_households(const std::string& path);
void write_target_table(const std::string& path, const TargetTable& table);
TargetTable read_target_table(const std::string& path);

}  // namespace wealthmap
