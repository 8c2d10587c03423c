#pragma once

#include <string>
#include <vector>

#include "wealthmap/errors.hpp"
#include "wealthmap/geo.hpp"

namespace wealthmap {

// Georeferenced grid. origin_* is the CENTER of the top-left cell; rows run
// south (decreasing latitude), columns run east.
struct RasterGrid {
    double origin_lat_deg = 0.0;
    double origin_lon_deg = 0.0;
    double cell_deg = 0.0;
    int n_rows = 0;
    int n_cols = 0;
    double nodata = -9999.0;
    std::vector<double> values;  // row-major, n_rows * n_cols

    double at(int row, int col) const {
        return values[static_cast<std::size_t>(row) * static_cast<std::size_t>(n_cols) +
                      static_cast<std::size_t>(col)];
    }
    double& at(int row, int col) {
        return values[static_cast<std::size_t>(row) * static_cast<std::size_t>(n_cols) +
                      static_cast<std::size_t>(col)];
    }
    GeoPoint cell_center(int row, int col) const {
        return GeoPoint{origin_lat_deg - row * cell_deg, origin_lon_deg + col * cell_deg};
    }

    void validate() const;
};

struct SummaryStats {
    long count = 0;
    double mean = 0.0;
    double maximum = 0.0;
    double minimum = 0.0;
    double variance = 0.0;  // population m2
    double skewness = 0.0;  // m3 / m2^1.5, 0 when m2 < 1e-12
    double kurtosis = 0.0;  // excess: m4 / m2^2 - 3, 0 when m2 < 1e-12
};

// Moments over all non-nodata cells whose center lies within radius_m
// (haversine) of center. Throws EmptyZone when no such cell exists.
SummaryStats zonal_statistics(const RasterGrid& raster, const GeoPoint& center, double radius_m);

// ESRI ASCII grid text format.
RasterGrid read_raster(const std::string& path);
void write_raster(const std::string& path, const RasterGrid& raster);

}  // namespace wealthmap
