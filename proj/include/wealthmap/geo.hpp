#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wealthmap/errors.hpp"

namespace wealthmap {

inline constexpr double kEarthRadiusM = 6'371'000.0;

struct GeoPoint {
    double lat_deg = 0.0;
    double lon_deg = 0.0;
};

// Throws InvalidCoordinate outside [-90,90] x [-180,180].
GeoPoint make_geo_point(double lat_deg, double lon_deg);

enum class Urbanity { Urban, Rural };

struct ClusterSite {
    std::string id;
    GeoPoint centroid;
    Urbanity urbanity = Urbanity::Rural;

    double radius_m() const { return urbanity == Urbanity::Urban ? 2000.0 : 5000.0; }
};

// Great-circle distance on a sphere of radius 6,371,000 m.
double haversine_distance(const GeoPoint& a, const GeoPoint& b);

// Uniform lat/lon bucket grid over a fixed point set. Queries are exact:
// candidate buckets from a conservative bounding box, then a haversine check
// per point.
class SpatialIndex {
  public:
    static SpatialIndex build(const std::vector<std::pair<std::string, GeoPoint>>& entries);

    // Ids within radius_m of center, boundary inclusive, sorted ascending.
    std::vector<std::string> radius_query(const GeoPoint& center, double radius_m) const;

    std::size_t size() const { return points_.size(); }

  private:
    struct Entry {
        std::string id;
        GeoPoint point;
    };
    std::vector<Entry> points_;
    // bucket key = (lat_cell, lon_cell) -> indexes into points_
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
    static std::uint64_t bucket_key(int lat_cell, int lon_cell);
    static constexpr double kCellDeg = 0.25;
};

}  // namespace wealthmap
