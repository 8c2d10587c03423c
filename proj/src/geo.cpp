#include "wealthmap/geo.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace wealthmap {

namespace {
constexpr double kPi = 3.14159265358979323846;
inline double deg2rad(double d) { return d * kPi / 180.0; }
}  // namespace

GeoPoint make_geo_point(double lat_deg, double lon_deg) {
    if (!(lat_deg >= -90.0 && lat_deg <= 90.0))
        throw InvalidCoordinate("latitude out of range: " + std::to_string(lat_deg));
    if (!(lon_deg >= -180.0 && lon_deg <= 180.0))
        throw InvalidCoordinate("longitude out of range: " + std::to_string(lon_deg));
    return GeoPoint{lat_deg, lon_deg};
}

double haversine_distance(const GeoPoint& a, const GeoPoint& b) {
    if (a.lat_deg == b.lat_deg && a.lon_deg == b.lon_deg) return 0.0;
    double phi1 = deg2rad(a.lat_deg);
    double phi2 = deg2rad(b.lat_deg);
    double dphi = deg2rad(b.lat_deg - a.lat_deg);
    double dlam = deg2rad(b.lon_deg - a.lon_deg);
    double s1 = std::sin(dphi / 2.0);
    double s2 = std::sin(dlam / 2.0);
    double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    h = std::min(1.0, std::max(0.0, h));
    return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

std::uint64_t SpatialIndex::bucket_key(int lat_cell, int lon_cell) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(lat_cell)) << 32) |
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(lon_cell));
}

SpatialIndex SpatialIndex::build(const std::vector<std::pair<std::string, GeoPoint>>& entries) {
    SpatialIndex index;
    std::unordered_set<std::string> seen;
    index.points_.reserve(entries.size());
    for (const auto& [id, point] : entries) {
        if (!seen.insert(id).second) throw DuplicateId("duplicate point id: " + id);
        make_geo_point(point.lat_deg, point.lon_deg);
        std::size_t slot = index.points_.size();
        index.points_.push_back(Entry{id, point});
        int lat_cell = static_cast<int>(std::floor(point.lat_deg / kCellDeg));
        int lon_cell = static_cast<int>(std::floor(point.lon_deg / kCellDeg));
        int lon_cells = static_cast<int>(std::ceil(360.0 / kCellDeg));
        if (lon_cell * kCellDeg >= 180.0) lon_cell -= lon_cells;  // lon == 180 wraps to -180
        index.buckets_[bucket_key(lat_cell, lon_cell)].push_back(slot);
    }
    return index;
}

std::vector<std::string> SpatialIndex::radius_query(const GeoPoint& center, double radius_m) const {
    if (radius_m < 0.0) throw NegativeRadius("radius_m must be >= 0");
    make_geo_point(center.lat_deg, center.lon_deg);

    std::vector<std::string> hits;
    // Conservative angular bounding box; inflate slightly so no boundary
    // point is lost to rounding. Candidates are verified with haversine.
    double ang = radius_m / kEarthRadiusM;
    double dlat_deg = ang * 180.0 / kPi * 1.000001 + 1e-9;
    double lat_lo = center.lat_deg - dlat_deg;
    double lat_hi = center.lat_deg + dlat_deg;

    double max_abs_lat = std::min(90.0, std::max(std::fabs(lat_lo), std::fabs(lat_hi)));
    double cos_band = std::cos(deg2rad(max_abs_lat));
    bool all_lons = lat_lo <= -89.0 || lat_hi >= 89.0 || cos_band < 1e-6;
    double dlon_deg = 360.0;
    if (!all_lons) {
        double s = std::sin(ang) / cos_band;
        if (s >= 1.0) {
            all_lons = true;
        } else {
            dlon_deg = std::asin(s) * 180.0 / kPi * 1.000001 + 1e-9;
        }
    }

    auto test_slot = [&](std::size_t slot) {
        const Entry& e = points_[slot];
        if (haversine_distance(center, e.point) <= radius_m) hits.push_back(e.id);
    };

    if (all_lons || dlon_deg >= 180.0) {
        for (std::size_t slot = 0; slot < points_.size(); ++slot) test_slot(slot);
    } else {
        int lat_cell_lo = static_cast<int>(std::floor(std::max(-90.0, lat_lo) / kCellDeg));
        int lat_cell_hi = static_cast<int>(std::floor(std::min(90.0, lat_hi) / kCellDeg));
        int lon_cell_lo = static_cast<int>(std::floor((center.lon_deg - dlon_deg) / kCellDeg));
        int lon_cell_hi = static_cast<int>(std::floor((center.lon_deg + dlon_deg) / kCellDeg));
        int lon_cells = static_cast<int>(std::ceil(360.0 / kCellDeg));
        for (int lat_cell = lat_cell_lo; lat_cell <= lat_cell_hi; ++lat_cell) {
            for (int lc = lon_cell_lo; lc <= lon_cell_hi; ++lc) {
                // wrap across the antimeridian
                int lon_cell = lc;
                while (lon_cell * kCellDeg < -180.0) lon_cell += lon_cells;
                while (lon_cell * kCellDeg >= 180.0) lon_cell -= lon_cells;
                auto it = buckets_.find(bucket_key(lat_cell, lon_cell));
                if (it == buckets_.end()) continue;
                for (std::size_t slot : it->second) test_slot(slot);
            }
        }
        std::sort(hits.begin(), hits.end());
        hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
        return hits;
    }
    std::sort(hits.begin(), hits.end());
    return hits;
}

}  // namespace wealthmap
