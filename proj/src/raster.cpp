#include "wealthmap/raster.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace wealthmap {

void RasterGrid::validate() const {
    if (cell_deg <= 0.0) throw MalformedHeader("cell_deg must be > 0");
    if (n_rows <= 0 || n_cols <= 0) throw MalformedHeader("raster dimensions must be positive");
    if (values.size() !=
        static_cast<std::size_t>(n_rows) * static_cast<std::size_t>(n_cols))
        throw DimensionMismatch("values length != n_rows * n_cols");
}

SummaryStats zonal_statistics(const RasterGrid& raster, const GeoPoint& center, double radius_m) {
    raster.validate();
    if (!(radius_m > 0.0)) throw NegativeRadius("radius_m must be > 0");

    // Row/col window from a conservative angular bound; every candidate cell
    // center is still verified with true haversine distance.
    double ang_deg = radius_m / kEarthRadiusM * 180.0 / 3.14159265358979323846;
    double pad = ang_deg * 1.000001 + raster.cell_deg;
    int row_lo = std::max(0, static_cast<int>(std::floor((raster.origin_lat_deg - (center.lat_deg + pad)) / raster.cell_deg)));
    int row_hi = std::min(raster.n_rows - 1, static_cast<int>(std::ceil((raster.origin_lat_deg - (center.lat_deg - pad)) / raster.cell_deg)));
    double cos_lat = std::cos(center.lat_deg * 3.14159265358979323846 / 180.0);
    double lon_pad = cos_lat > 1e-6 ? pad / cos_lat : 360.0;
    int col_lo = 0, col_hi = raster.n_cols - 1;
    if (lon_pad < 180.0) {
        col_lo = std::max(0, static_cast<int>(std::floor((center.lon_deg - lon_pad - raster.origin_lon_deg) / raster.cell_deg)));
        col_hi = std::min(raster.n_cols - 1, static_cast<int>(std::ceil((center.lon_deg + lon_pad - raster.origin_lon_deg) / raster.cell_deg)));
    }

    std::vector<double> zone;
    for (int row = row_lo; row <= row_hi; ++row) {
        for (int col = col_lo; col <= col_hi; ++col) {
            double v = raster.at(row, col);
            if (v == raster.nodata) continue;
            if (haversine_distance(center, raster.cell_center(row, col)) <= radius_m)
                zone.push_back(v);
        }
    }
    if (zone.empty()) throw EmptyZone("no cloudless cell center within radius");

    SummaryStats stats;
    stats.count = static_cast<long>(zone.size());
    double n = static_cast<double>(zone.size());
    double sum = 0.0;
    stats.minimum = zone.front();
    stats.maximum = zone.front();
    for (double v : zone) {
        sum += v;
        stats.minimum = std::min(stats.minimum, v);
        stats.maximum = std::max(stats.maximum, v);
    }
    stats.mean = sum / n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : zone) {
        double d = v - stats.mean;
        double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    stats.variance = m2;
    if (m2 < 1e-12) {
        stats.skewness = 0.0;
        stats.kurtosis = 0.0;
    } else {
        stats.skewness = m3 / std::pow(m2, 1.5);
        stats.kurtosis = m4 / (m2 * m2) - 3.0;
    }
    return stats;
}

namespace {
std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}
}  // namespace

RasterGrid read_raster(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open raster file: " + path);

    int ncols = -1, nrows = -1;
    double xll = 0.0, yll = 0.0, cellsize = 0.0, nodata = -9999.0;
    bool have_xll = false, have_yll = false, have_cell = false;

    // Header: key value lines until the first purely numeric token.
    std::string token;
    double first_value = 0.0;
    bool pending_value = false;
    while (in >> token) {
        std::string key = lower(token);
        if (key == "ncols" || key == "nrows" || key == "xllcorner" || key == "yllcorner" ||
            key == "cellsize" || key == "nodata_value") {
            double value;
            if (!(in >> value)) throw MalformedHeader("missing value for header key " + key);
            if (key == "ncols") ncols = static_cast<int>(value);
            else if (key == "nrows") nrows = static_cast<int>(value);
            else if (key == "xllcorner") { xll = value; have_xll = true; }
            else if (key == "yllcorner") { yll = value; have_yll = true; }
            else if (key == "cellsize") { cellsize = value; have_cell = true; }
            else nodata = value;
        } else {
            std::istringstream num(token);
            if (!(num >> first_value) || !num.eof())
                throw MalformedHeader("unexpected header token: " + token);
            pending_value = true;
            break;
        }
    }
    if (ncols <= 0 || nrows <= 0 || !have_xll || !have_yll || !have_cell || cellsize <= 0.0)
        throw MalformedHeader("incomplete ESRI ASCII header in " + path);

    RasterGrid grid;
    grid.n_cols = ncols;
    grid.n_rows = nrows;
    grid.cell_deg = cellsize;
    grid.nodata = nodata;
    grid.origin_lon_deg = xll + 0.5 * cellsize;
    grid.origin_lat_deg = yll + (nrows - 0.5) * cellsize;

    std::size_t expected = static_cast<std::size_t>(ncols) * static_cast<std::size_t>(nrows);
    grid.values.reserve(expected);
    if (pending_value) grid.values.push_back(first_value);
    double v;
    while (in >> v) {
        grid.values.push_back(v);
        if (grid.values.size() > expected)
            throw DimensionMismatch("raster body has more than ncols*nrows values");
    }
    if (grid.values.size() != expected)
        throw DimensionMismatch("raster body value count != ncols*nrows");
    return grid;
}

void write_raster(const std::string& path, const RasterGrid& raster) {
    raster.validate();
    std::ofstream out(path);
    if (!out) throw Error("cannot write raster file: " + path);
    out << std::setprecision(17);
    out << "ncols " << raster.n_cols << "\n";
    out << "nrows " << raster.n_rows << "\n";
    out << "xllcorner " << raster.origin_lon_deg - 0.5 * raster.cell_deg << "\n";
    out << "yllcorner " << raster.origin_lat_deg - (raster.n_rows - 0.5) * raster.cell_deg << "\n";
    out << "cellsize " << raster.cell_deg << "\n";
    out << "NODATA_value " << raster.nodata << "\n";
    for (int row = 0; row < raster.n_rows; ++row) {
        for (int col = 0; col < raster.n_cols; ++col) {
            if (col) out << ' ';
            out << raster.at(row, col);
        }
        out << "\n";
    }
}

}  // namespace wealthmap
