#pragma once

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "wealthmap/geo.hpp"
#include "wealthmap/raster.hpp"

namespace wealthmap {

struct PoiRecord {
    std::string category;
    GeoPoint location;
    std::map<std::string, double> attributes;  // e.g. has_water: 0/1
};

struct SocialRecord {
    std::string cluster_id;
    long total_users = 0;
    long users_4g = 0;
    long users_3g = 0;
    long users_2g = 0;
    long users_wifi = 0;
    long users_apple = 0;
    long users_midhigh = 0;
};

enum class SourceGroup { SM, RS, POI };

std::string source_group_name(SourceGroup g);
SourceGroup parse_source_group(const std::string& name);

// Rectangular per-cluster feature table. NaN marks a missing cell.
struct FeatureMatrix {
    std::vector<std::string> row_ids;
    std::vector<std::string> col_names;
    std::vector<SourceGroup> col_groups;
    std::vector<double> cells;  // row-major

    std::size_t n_rows() const { return row_ids.size(); }
    std::size_t n_cols() const { return col_names.size(); }
    double at(std::size_t row, std::size_t col) const { return cells[row * n_cols() + col]; }
    double& at(std::size_t row, std::size_t col) { return cells[row * n_cols() + col]; }
    static bool is_missing(double v) { return std::isnan(v); }
    static double missing() { return std::nan(""); }

    // Columns of one source group, rows unchanged.
    FeatureMatrix filter_group(SourceGroup group) const;
};

std::vector<ClusterSite> read_clusters(const std::string& path);
std::vector<PoiRecord> read_pois(const std::string& path);
std::vector<SocialRecord> read_social(const std::string& path);

FeatureMatrix assemble_features(const std::vector<ClusterSite>& clusters,
                                const std::vector<std::pair<std::string, RasterGrid>>& rasters,
                                const std::vector<PoiRecord>& pois,
                                const std::vector<SocialRecord>& social);

// Column-mean imputation. Throws AllMissingColumn.
FeatureMatrix impute_missing(const FeatureMatrix& matrix);

// CSV with a two-row header: names, then source-group tags.
void write_feature_matrix(const std::string& path, const FeatureMatrix& matrix);
FeatureMatrix read_feature_matrix(const std::string& path);

}  // namespace wealthmap
