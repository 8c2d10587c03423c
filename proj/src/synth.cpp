#include "wealthmap/synth.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>

#include "wealthmap/rng.hpp"

namespace wealthmap {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMeterPerDegLat = 111320.0;

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

enum StreamPurpose : std::uint64_t {
    kClusterStream = 1,
    kHouseholdStream,
    kRasterNoiseStream,
    kCloudStream,
    kPoiStream,
    kSocialStream,
};

RngStream stream(const SceneConfig& config, std::uint64_t purpose, std::uint64_t index) {
    return RngStream::derive(config.seed, (purpose << 32) | index);
}

struct RasterSpec {
    const char* name;
    double background;
    double amplitude;  // stamp height per cluster, scaled by wealth response
    double slope;      // wealth response inside the stamp
    double noise;
};

}  // namespace

void SceneConfig::validate() const {
    if (n_clusters < 1 || households_per_cluster < 1 || n_assets < 1)
        throw DegenerateInput("scene counts must be >= 1");
    if (noise_sd < 0.0 || cloud_fraction < 0.0 || cloud_fraction >= 1.0)
        throw DegenerateInput("bad noise_sd or cloud_fraction");
    if (!(lat_max > lat_min && lon_max > lon_min && cell_deg > 0.0))
        throw DegenerateInput("bad scene extent");
}

SyntheticScene generate_scene(const SceneConfig& config) {
    config.validate();
    SyntheticScene scene;

    // clusters and latent wealth
    {
        RngStream rng = stream(config, kClusterStream, 0);
        for (int c = 0; c < config.n_clusters; ++c) {
            ClusterSite site;
            site.id = "c" + std::to_string(c);
            site.centroid = GeoPoint{rng.uniform(config.lat_min, config.lat_max),
                                     rng.uniform(config.lon_min, config.lon_max)};
            site.urbanity = rng.uniform01() < 0.4 ? Urbanity::Urban : Urbanity::Rural;
            scene.clusters.push_back(std::move(site));
            scene.latent_wealth.push_back(rng.normal());
        }
    }

    // households: per-household wealth = cluster wealth + within-cluster
    // spread; graded ordinal assets in {0..4} with per-asset slopes/offsets
    {
        std::vector<double> asset_offset(static_cast<std::size_t>(config.n_assets));
        RngStream setup = stream(config, kHouseholdStream, ~0ULL);
        for (int a = 0; a < config.n_assets; ++a)
            asset_offset[static_cast<std::size_t>(a)] = setup.uniform(-1.0, 1.0);
        static const double kGrade[4] = {-1.5, -0.5, 0.5, 1.5};

        for (int c = 0; c < config.n_clusters; ++c) {
            RngStream rng = stream(config, kHouseholdStream, static_cast<std::uint64_t>(c));
            double w = scene.latent_wealth[static_cast<std::size_t>(c)];
            for (int h = 0; h < config.households_per_cluster; ++h) {
                double u = w + config.household_spread * rng.normal();
                HouseholdRecord rec;
                rec.cluster_id = scene.clusters[static_cast<std::size_t>(c)].id;
                for (int a = 0; a < config.n_assets; ++a) {
                    double level = 0.0;
                    for (double grade : kGrade)
                        level += rng.bernoulli(logistic(
                            config.asset_strength * u +
                            asset_offset[static_cast<std::size_t>(a)] + grade));
                    rec.assets.push_back(level);
                }
                rec.toilet_outside = rng.bernoulli(logistic(-1.2 * u));
                rec.improved_water = rng.bernoulli(logistic(1.0 * u + 0.5));
                rec.head_higher_edu = rng.bernoulli(logistic(0.9 * u - 0.5));
                scene.households.push_back(std::move(rec));
            }
        }
    }

    // rasters: per-cluster Gaussian stamps whose height increases with
    // wealth, plus background and cell noise, plus a cloud mask
    {
        double margin = 0.08;  // covers the 5 km rural radius past the extent
        double lat_lo = config.lat_min - margin, lat_hi = config.lat_max + margin;
        double lon_lo = config.lon_min - margin, lon_hi = config.lon_max + margin;
        int n_rows = static_cast<int>(std::ceil((lat_hi - lat_lo) / config.cell_deg));
        int n_cols = static_cast<int>(std::ceil((lon_hi - lon_lo) / config.cell_deg));

        static const RasterSpec kRasters[] = {
            {"ntl", 0.2, 3.0, 0.8, 0.30},
            {"lst", 25.0, 2.0, 0.5, 0.50},
            {"ndvi", 0.7, -0.25, 0.6, 0.05},
        };
        for (std::size_t ri = 0; ri < 3; ++ri) {
            const RasterSpec& spec = kRasters[ri];
            RasterGrid grid;
            grid.cell_deg = config.cell_deg;
            grid.n_rows = n_rows;
            grid.n_cols = n_cols;
            grid.nodata = -9999.0;
            grid.origin_lat_deg = lat_hi - 0.5 * config.cell_deg;
            grid.origin_lon_deg = lon_lo + 0.5 * config.cell_deg;
            grid.values.assign(static_cast<std::size_t>(n_rows) * static_cast<std::size_t>(n_cols),
                               spec.background);

            for (int c = 0; c < config.n_clusters; ++c) {
                const ClusterSite& site = scene.clusters[static_cast<std::size_t>(c)];
                double w = scene.latent_wealth[static_cast<std::size_t>(c)];
                double height = spec.amplitude * std::exp(spec.slope * w);
                double sigma_m = site.radius_m() / 2.0;
                double reach_deg = 3.0 * sigma_m / kMeterPerDegLat;
                int r0 = std::max(0, static_cast<int>((grid.origin_lat_deg - (site.centroid.lat_deg + reach_deg)) / config.cell_deg));
                int r1 = std::min(n_rows - 1, static_cast<int>((grid.origin_lat_deg - (site.centroid.lat_deg - reach_deg)) / config.cell_deg) + 1);
                double cos_lat = std::cos(site.centroid.lat_deg * kPi / 180.0);
                double reach_lon = reach_deg / cos_lat;
                int c0 = std::max(0, static_cast<int>((site.centroid.lon_deg - reach_lon - grid.origin_lon_deg) / config.cell_deg));
                int c1 = std::min(n_cols - 1, static_cast<int>((site.centroid.lon_deg + reach_lon - grid.origin_lon_deg) / config.cell_deg) + 1);
                for (int row = r0; row <= r1; ++row) {
                    for (int col = c0; col <= c1; ++col) {
                        double d = haversine_distance(site.centroid, grid.cell_center(row, col));
                        if (d > 3.0 * sigma_m) continue;
                        grid.at(row, col) += height * std::exp(-d * d / (2.0 * sigma_m * sigma_m));
                    }
                }
            }

            RngStream noise = stream(config, kRasterNoiseStream, ri);
            for (double& v : grid.values) v += config.noise_sd * spec.noise * noise.normal();
            RngStream clouds = stream(config, kCloudStream, ri);
            for (double& v : grid.values)
                if (clouds.uniform01() < config.cloud_fraction) v = grid.nodata;

            scene.rasters.emplace_back(spec.name, std::move(grid));
        }
    }

    // POIs: per-cluster Poisson counts with wealth-linked intensities,
    // scattered uniformly inside the cluster radius
    {
        struct PoiSpec {
            const char* category;
            double base_rate;
            double wealth_slope;
            bool water_attr;
        };
        static const PoiSpec kPois[] = {
            {"bank", 0.8, 0.9, false},
            {"supermarket", 0.6, 1.0, false},
            {"convenience_store", 1.5, 0.7, false},
            {"restaurant", 2.5, 0.6, false},
            {"hospital", 0.5, 0.3, false},
            {"public_school", 1.5, 0.0, true},
        };
        for (int c = 0; c < config.n_clusters; ++c) {
            RngStream rng = stream(config, kPoiStream, static_cast<std::uint64_t>(c));
            const ClusterSite& site = scene.clusters[static_cast<std::size_t>(c)];
            double w = scene.latent_wealth[static_cast<std::size_t>(c)];
            double cos_lat = std::cos(site.centroid.lat_deg * kPi / 180.0);
            for (const PoiSpec& spec : kPois) {
                int count = rng.poisson(config.poi_intensity * spec.base_rate *
                                        std::exp(spec.wealth_slope * w));
                for (int i = 0; i < count; ++i) {
                    double r = site.radius_m() * std::sqrt(rng.uniform01());
                    double theta = 2.0 * kPi * rng.uniform01();
                    PoiRecord poi;
                    poi.category = spec.category;
                    poi.location = GeoPoint{
                        site.centroid.lat_deg + r * std::cos(theta) / kMeterPerDegLat,
                        site.centroid.lon_deg + r * std::sin(theta) / (kMeterPerDegLat * cos_lat)};
                    if (spec.water_attr)
                        poi.attributes["has_water"] = rng.bernoulli(logistic(1.2 * w + 0.3));
                    scene.pois.push_back(std::move(poi));
                }
            }
        }
    }

    // social media: shares in [0,1] scaled by a wealth-independent total
    {
        for (int c = 0; c < config.n_clusters; ++c) {
            RngStream rng = stream(config, kSocialStream, static_cast<std::uint64_t>(c));
            double w = scene.latent_wealth[static_cast<std::size_t>(c)];
            SocialRecord rec;
            rec.cluster_id = scene.clusters[static_cast<std::size_t>(c)].id;
            rec.total_users = 100 + static_cast<long>(300.0 * std::exp(0.3 * rng.normal()));
            auto segment = [&](double slope, double offset) {
                double share = logistic(slope * w + offset + config.noise_sd * 1.1 * rng.normal());
                return static_cast<long>(std::floor(share * static_cast<double>(rec.total_users)));
            };
            rec.users_4g = segment(0.9, 0.0);
            rec.users_3g = segment(-0.3, 0.5);
            rec.users_2g = segment(-0.8, -0.5);
            rec.users_wifi = segment(0.6, 0.2);
            rec.users_apple = segment(0.8, -1.0);
            rec.users_midhigh = segment(0.7, -0.5);
            scene.social.push_back(std::move(rec));
        }
    }

    return scene;
}

void write_scene(const SyntheticScene& scene, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    fs::create_directories(fs::path(dir) / "truth");

    {
        std::ofstream out(fs::path(dir) / "clusters.csv");
        out << std::setprecision(17);
        out << "cluster_id,lat,lon,urbanity\n";
        for (const auto& c : scene.clusters)
            out << c.id << ',' << c.centroid.lat_deg << ',' << c.centroid.lon_deg << ','
                << (c.urbanity == Urbanity::Urban ? "urban" : "rural") << "\n";
    }
    {
        std::ofstream out(fs::path(dir) / "households.csv");
        out << std::setprecision(17);
        out << "cluster_id,toilet_outside,improved_water,head_higher_edu";
        std::size_t n_assets = scene.households.empty() ? 0 : scene.households[0].assets.size();
        for (std::size_t a = 0; a < n_assets; ++a) out << ",asset_" << (a + 1);
        out << "\n";
        for (const auto& h : scene.households) {
            out << h.cluster_id << ',' << h.toilet_outside << ',' << h.improved_water << ','
                << h.head_higher_edu;
            for (double a : h.assets) out << ',' << a;
            out << "\n";
        }
    }
    {
        std::ofstream out(fs::path(dir) / "pois.csv");
        out << std::setprecision(17);
        out << "category,lat,lon,attributes\n";
        for (const auto& p : scene.pois) {
            out << p.category << ',' << p.location.lat_deg << ',' << p.location.lon_deg << ',';
            bool first = true;
            for (const auto& [name, value] : p.attributes) {
                if (!first) out << ';';
                out << name << '=' << value;
                first = false;
            }
            out << "\n";
        }
    }
    {
        std::ofstream out(fs::path(dir) / "social.csv");
        out << "cluster_id,total,4g,3g,2g,wifi,apple,midhigh\n";
        for (const auto& s : scene.social)
            out << s.cluster_id << ',' << s.total_users << ',' << s.users_4g << ',' << s.users_3g
                << ',' << s.users_2g << ',' << s.users_wifi << ',' << s.users_apple << ','
                << s.users_midhigh << "\n";
    }
    for (const auto& [name, grid] : scene.rasters)
        write_raster((fs::path(dir) / (name + ".asc")).string(), grid);
    {
        std::ofstream out(fs::path(dir) / "truth" / "latent_wealth.csv");
        out << std::setprecision(17);
        out << "cluster_id,latent_wealth\n";
        for (std::size_t c = 0; c < scene.clusters.size(); ++c)
            out << scene.clusters[c].id << ',' << scene.latent_wealth[c] << "\n";
    }
}

}  // namespace wealthmap
