#include "wealthmap/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "wealthmap/csv.hpp"

namespace wealthmap {

std::string source_group_name(SourceGroup g) {
    switch (g) {
        case SourceGroup::SM: return "SM";
        case SourceGroup::RS: return "RS";
        case SourceGroup::POI: return "POI";
    }
    return "?";
}

SourceGroup parse_source_group(const std::string& name) {
    if (name == "SM") return SourceGroup::SM;
    if (name == "RS") return SourceGroup::RS;
    if (name == "POI") return SourceGroup::POI;
    throw MalformedRecord("unknown source group tag: " + name);
}

FeatureMatrix FeatureMatrix::filter_group(SourceGroup group) const {
    FeatureMatrix out;
    out.row_ids = row_ids;
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < n_cols(); ++c) {
        if (col_groups[c] == group) {
            keep.push_back(c);
            out.col_names.push_back(col_names[c]);
            out.col_groups.push_back(col_groups[c]);
        }
    }
    out.cells.resize(out.n_rows() * out.n_cols());
    for (std::size_t r = 0; r < n_rows(); ++r)
        for (std::size_t k = 0; k < keep.size(); ++k)
            out.at(r, k) = at(r, keep[k]);
    return out;
}

namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

long parse_count(const std::string& s, const std::string& context) {
    double v = parse_real(s, context);
    long n = static_cast<long>(v);
    if (v != static_cast<double>(n) || n < 0)
        throw MalformedRecord("count must be a nonnegative integer in " + context);
    return n;
}

}  // namespace

std::vector<ClusterSite> read_clusters(const std::string& path) {
    auto rows = read_csv(path);
    if (rows.empty()) throw MalformedRecord("empty cluster file: " + path);
    std::vector<ClusterSite> clusters;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != 4)
            throw MalformedRecord("cluster row needs 4 fields: " + path);
        ClusterSite site;
        site.id = row[0];
        site.centroid = make_geo_point(parse_real(row[1], path), parse_real(row[2], path));
        std::string u = lower(row[3]);
        if (u == "urban") site.urbanity = Urbanity::Urban;
        else if (u == "rural") site.urbanity = Urbanity::Rural;
        else throw MalformedRecord("urbanity must be urban|rural, got: " + row[3]);
        clusters.push_back(std::move(site));
    }
    return clusters;
}

std::vector<PoiRecord> read_pois(const std::string& path) {
    auto rows = read_csv(path);
    if (rows.empty()) throw MalformedRecord("empty POI file: " + path);
    std::vector<PoiRecord> pois;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() < 3 || row.size() > 4)
            throw MalformedRecord("POI row needs 3 or 4 fields: " + path);
        PoiRecord poi;
        poi.category = row[0];
        if (poi.category.empty()) throw MalformedRecord("POI category must be nonempty");
        poi.location = make_geo_point(parse_real(row[1], path), parse_real(row[2], path));
        if (row.size() == 4 && !row[3].empty()) {
            std::istringstream attrs(row[3]);
            std::string item;
            while (std::getline(attrs, item, ';')) {
                if (item.empty()) continue;
                auto eq = item.find('=');
                if (eq == std::string::npos)
                    throw MalformedRecord("POI attribute must be name=value: " + item);
                poi.attributes[item.substr(0, eq)] = parse_real(item.substr(eq + 1), path);
            }
        }
        pois.push_back(std::move(poi));
    }
    return pois;
}

std::vector<SocialRecord> read_social(const std::string& path) {
    auto rows = read_csv(path);
    if (rows.empty()) throw MalformedRecord("empty social file: " + path);
    std::vector<SocialRecord> records;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != 8)
            throw MalformedRecord("social row needs 8 fields: " + path);
        SocialRecord rec;
        rec.cluster_id = row[0];
        rec.total_users = parse_count(row[1], path);
        rec.users_4g = parse_count(row[2], path);
        rec.users_3g = parse_count(row[3], path);
        rec.users_2g = parse_count(row[4], path);
        rec.users_wifi = parse_count(row[5], path);
        rec.users_apple = parse_count(row[6], path);
        rec.users_midhigh = parse_count(row[7], path);
        for (long seg : {rec.users_4g, rec.users_3g, rec.users_2g, rec.users_wifi,
                         rec.users_apple, rec.users_midhigh})
            if (seg > rec.total_users)
                throw MalformedRecord("segment count exceeds total_users for cluster " +
                                      rec.cluster_id);
        records.push_back(std::move(rec));
    }
    return records;
}

FeatureMatrix assemble_features(const std::vector<ClusterSite>& clusters,
                                const std::vector<std::pair<std::string, RasterGrid>>& rasters,
                                const std::vector<PoiRecord>& pois,
                                const std::vector<SocialRecord>& social) {
    std::unordered_set<std::string> ids;
    for (const auto& c : clusters)
        if (!ids.insert(c.id).second) throw DuplicateId("duplicate cluster id: " + c.id);

    std::unordered_map<std::string, const SocialRecord*> social_by_cluster;
    for (const auto& rec : social) {
        if (!ids.count(rec.cluster_id))
            throw UnknownCluster("social record for unknown cluster: " + rec.cluster_id);
        social_by_cluster[rec.cluster_id] = &rec;
    }

    // POI category/attribute schema is whatever the input provides, sorted
    // so assembly is order-independent.
    std::set<std::string> categories;
    std::set<std::pair<std::string, std::string>> cat_attrs;
    for (const auto& poi : pois) {
        categories.insert(poi.category);
        for (const auto& [name, _] : poi.attributes) cat_attrs.insert({poi.category, name});
    }

    std::vector<std::pair<std::string, GeoPoint>> entries;
    entries.reserve(pois.size());
    for (std::size_t i = 0; i < pois.size(); ++i)
        entries.emplace_back(std::to_string(i), pois[i].location);
    SpatialIndex poi_index = SpatialIndex::build(entries);

    FeatureMatrix m;
    static const char* kSegments[] = {"4g", "3g", "2g", "wifi", "apple", "midhigh"};
    m.col_names.push_back("sm_total_users");
    m.col_groups.push_back(SourceGroup::SM);
    for (const char* seg : kSegments) {
        m.col_names.push_back(std::string("sm_share_") + seg);
        m.col_groups.push_back(SourceGroup::SM);
    }
    static const char* kStats[] = {"mean", "maximum", "minimum", "skewness", "variance",
                                   "kurtosis"};
    for (const auto& [raster_name, _] : rasters) {
        for (const char* stat : kStats) {
            m.col_names.push_back(raster_name + "_" + stat);
            m.col_groups.push_back(SourceGroup::RS);
        }
    }
    for (const auto& cat : categories) {
        m.col_names.push_back("poi_" + cat + "_count");
        m.col_groups.push_back(SourceGroup::POI);
    }
    for (const auto& [cat, attr] : cat_attrs) {
        m.col_names.push_back("poi_" + cat + "_" + attr + "_share");
        m.col_groups.push_back(SourceGroup::POI);
    }

    for (const auto& c : clusters) m.row_ids.push_back(c.id);
    m.cells.assign(m.n_rows() * m.n_cols(), FeatureMatrix::missing());

    for (std::size_t r = 0; r < clusters.size(); ++r) {
        const ClusterSite& site = clusters[r];
        double radius = site.radius_m();
        std::size_t col = 0;

        if (auto it = social_by_cluster.find(site.id); it != social_by_cluster.end()) {
            const SocialRecord& rec = *it->second;
            double total = static_cast<double>(rec.total_users);
            m.at(r, col++) = total;
            long segs[] = {rec.users_4g, rec.users_3g, rec.users_2g,
                           rec.users_wifi, rec.users_apple, rec.users_midhigh};
            for (long seg : segs)
                m.at(r, col++) = total > 0 ? static_cast<double>(seg) / total : 0.0;
        } else {
            col += 7;  // no social record: SM features stay missing
        }

        for (const auto& [_, raster] : rasters) {
            try {
                SummaryStats s = zonal_statistics(raster, site.centroid, radius);
                m.at(r, col++) = s.mean;
                m.at(r, col++) = s.maximum;
                m.at(r, col++) = s.minimum;
                m.at(r, col++) = s.skewness;
                m.at(r, col++) = s.variance;
                m.at(r, col++) = s.kurtosis;
            } catch (const EmptyZone&) {
                col += 6;  // stays missing, imputed later
            }
        }

        auto hit_ids = poi_index.radius_query(site.centroid, radius);
        std::map<std::string, long> counts;
        std::map<std::pair<std::string, std::string>, std::pair<double, long>> attr_sums;
        for (const auto& id : hit_ids) {
            const PoiRecord& poi = pois[static_cast<std::size_t>(std::stoul(id))];
            ++counts[poi.category];
            for (const auto& [name, value] : poi.attributes) {
                auto& [sum, n] = attr_sums[{poi.category, name}];
                sum += value;
                ++n;
            }
        }
        for (const auto& cat : categories)
            m.at(r, col++) = static_cast<double>(counts.count(cat) ? counts[cat] : 0);
        for (const auto& key : cat_attrs) {
            // "no records" != "records without the attribute": leave missing
            if (auto it = attr_sums.find(key); it != attr_sums.end())
                m.at(r, col) = it->second.first / static_cast<double>(it->second.second);
            ++col;
        }
    }
    return m;
}

FeatureMatrix impute_missing(const FeatureMatrix& matrix) {
    FeatureMatrix out = matrix;
    for (std::size_t c = 0; c < out.n_cols(); ++c) {
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t r = 0; r < out.n_rows(); ++r) {
            double v = out.at(r, c);
            if (!FeatureMatrix::is_missing(v)) {
                sum += v;
                ++n;
            }
        }
        if (n == 0) throw AllMissingColumn("column has no observed values: " + out.col_names[c]);
        double mean = sum / static_cast<double>(n);
        for (std::size_t r = 0; r < out.n_rows(); ++r)
            if (FeatureMatrix::is_missing(out.at(r, c))) out.at(r, c) = mean;
    }
    return out;
}

void write_feature_matrix(const std::string& path, const FeatureMatrix& matrix) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write: " + path);
    out << std::setprecision(17);
    out << "cluster_id";
    for (const auto& name : matrix.col_names) out << ',' << name;
    out << "\ngroup";
    for (auto g : matrix.col_groups) out << ',' << source_group_name(g);
    out << "\n";
    for (std::size_t r = 0; r < matrix.n_rows(); ++r) {
        out << matrix.row_ids[r];
        for (std::size_t c = 0; c < matrix.n_cols(); ++c) {
            out << ',';
            double v = matrix.at(r, c);
            if (!FeatureMatrix::is_missing(v)) out << v;
        }
        out << "\n";
    }
}

FeatureMatrix read_feature_matrix(const std::string& path) {
    auto rows = read_csv(path);
    if (rows.size() < 2) throw MalformedRecord("feature matrix needs a two-row header: " + path);
    FeatureMatrix m;
    const auto& names = rows[0];
    const auto& groups = rows[1];
    if (names.size() != groups.size() || names.size() < 1)
        throw MalformedRecord("feature matrix header rows disagree: " + path);
    for (std::size_t c = 1; c < names.size(); ++c) {
        m.col_names.push_back(names[c]);
        m.col_groups.push_back(parse_source_group(groups[c]));
    }
    for (std::size_t i = 2; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != names.size())
            throw MalformedRecord("feature matrix row width mismatch: " + path);
        m.row_ids.push_back(row[0]);
        for (std::size_t c = 1; c < row.size(); ++c)
            m.cells.push_back(row[c].empty() ? FeatureMatrix::missing()
                                             : parse_real(row[c], path));
    }
    return m;
}

}  // namespace wealthmap
