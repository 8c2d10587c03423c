#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wealthmap/ingest.hpp"
#include "wealthmap/targets.hpp"

namespace wealthmap {

struct SceneConfig {
    int n_clusters = 1000;
    int households_per_cluster = 20;
    int n_assets = 10;
    // geographic extent; rasters get a margin so rural radii stay covered
    double lat_min = 13.5, lat_max = 15.5;
    double lon_min = 120.0, lon_max = 122.0;
    double cell_deg = 0.004;
    double poi_intensity = 3.0;
    double asset_strength = 2.0;     // slope of assets on wealth
    double household_spread = 0.5;   // within-cluster wealth sd
    double noise_sd = 1.0;           // scales every observation-noise channel
    double cloud_fraction = 0.05;
    std::uint64_t seed = 42;

    void validate() const;
};

struct SyntheticScene {
    std::vector<ClusterSite> clusters;
    std::vector<HouseholdRecord> households;
    std::vector<std::pair<std::string, RasterGrid>> rasters;  // ntl, lst, ndvi
    std::vector<PoiRecord> pois;
    std::vector<SocialRecord> social;
    std::vector<double> latent_wealth;  // per cluster; ground truth, test-only
};

// Fully determined by config.seed. Each data family (SM, RS, POI) carries
// partial, overlapping signal about the latent cluster wealth.
SyntheticScene generate_scene(const SceneConfig& config);

// clusters.csv, households.csv, pois.csv, social.csv, ntl.asc, lst.asc,
// ndvi.asc under dir; latent_wealth.csv goes to dir/truth/ and never into
// any model input file.
void write_scene(const SyntheticScene& scene, const std::string& dir);

}  // namespace wealthmap
