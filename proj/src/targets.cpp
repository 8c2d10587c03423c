#include "wealthmap/targets.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>

#include "wealthmap/csv.hpp"

namespace wealthmap {

PcaResult pca_first_component(const std::vector<double>& assets, std::size_t n, std::size_t p) {
    if (n < 2 || p < 1) throw DegenerateInput("pca needs n >= 2 and p >= 1");
    if (assets.size() != n * p) throw DimensionMismatch("asset matrix size != n*p");

    std::vector<double> mean(p, 0.0), sd(p, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) mean[j] += assets[i * p + j];
    for (std::size_t j = 0; j < p; ++j) mean[j] /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            double d = assets[i * p + j] - mean[j];
            sd[j] += d * d;
        }
    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < p; ++j) {
        sd[j] = std::sqrt(sd[j] / static_cast<double>(n));
        if (sd[j] > 1e-12) {
            kept.push_back(j);
        } else {
            std::cerr << "warning: dropping zero-variance asset column " << j << "\n";
        }
    }
    if (kept.empty()) throw DegenerateInput("all asset columns are constant");
    std::size_t q = kept.size();

    // z-scores of the kept columns
    std::vector<double> z(n * q);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < q; ++k) {
            std::size_t j = kept[k];
            z[i * q + k] = (assets[i * p + j] - mean[j]) / sd[j];
        }

    // correlation matrix C = Z'Z / n
    std::vector<double> corr(q * q, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < q; ++a) {
            double zi = z[i * q + a];
            for (std::size_t b = a; b < q; ++b) corr[a * q + b] += zi * z[i * q + b];
        }
    for (std::size_t a = 0; a < q; ++a)
        for (std::size_t b = a; b < q; ++b) {
            corr[a * q + b] /= static_cast<double>(n);
            corr[b * q + a] = corr[a * q + b];
        }

    // power iteration, fixed all-ones start
    std::vector<double> v(q, 1.0 / std::sqrt(static_cast<double>(q))), w(q);
    double eigenvalue = 0.0;
    for (int iter = 0; iter < 10000; ++iter) {
        for (std::size_t a = 0; a < q; ++a) {
            double s = 0.0;
            for (std::size_t b = 0; b < q; ++b) s += corr[a * q + b] * v[b];
            w[a] = s;
        }
        double norm = 0.0;
        for (double x : w) norm += x * x;
        norm = std::sqrt(norm);
        if (norm < 1e-300) break;  // C v vanished; v is already in the null space
        double delta = 0.0;
        for (std::size_t a = 0; a < q; ++a) {
            w[a] /= norm;
            delta = std::max(delta, std::fabs(w[a] - v[a]));
        }
        v.swap(w);
        eigenvalue = norm;
        if (delta < 1e-12) break;
    }

    double loading_sum = 0.0;
    for (double x : v) loading_sum += x;
    bool flip = loading_sum < 0.0;
    if (loading_sum == 0.0) {
        for (double x : v)
            if (x != 0.0) {
                flip = x < 0.0;
                break;
            }
    }
    if (flip)
        for (double& x : v) x = -x;

    PcaResult out;
    out.loadings.assign(p, 0.0);
    for (std::size_t k = 0; k < q; ++k) out.loadings[kept[k]] = v[k];
    out.scores.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < q; ++k) s += z[i * q + k] * v[k];
        out.scores[i] = s;
    }
    out.explained_share = eigenvalue / static_cast<double>(q);
    return out;
}

TargetTable derive_cluster_targets(const std::vector<HouseholdRecord>& households) {
    if (households.empty()) throw EmptyCluster("no households");
    std::size_t p = households.front().assets.size();
    for (const auto& h : households) {
        if (h.cluster_id.empty()) throw EmptyCluster("household without cluster_id");
        if (h.assets.size() != p)
            throw DimensionMismatch("asset vector length differs across households");
    }

    std::size_t n = households.size();
    std::vector<double> assets(n * p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) assets[i * p + j] = households[i].assets[j];
    PcaResult pca = pca_first_component(assets, n, p);

    struct Acc {
        double wealth = 0, toilet = 0, water = 0, edu = 0;
        long n = 0;
    };
    std::vector<std::string> order;
    std::map<std::string, Acc> acc;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& h = households[i];
        if (!acc.count(h.cluster_id)) order.push_back(h.cluster_id);
        Acc& a = acc[h.cluster_id];
        a.wealth += pca.scores[i];
        a.toilet += h.toilet_outside;
        a.water += h.improved_water;
        a.edu += h.head_higher_edu;
        ++a.n;
    }

    TargetTable table;
    for (const auto& id : order) {
        const Acc& a = acc[id];
        double cn = static_cast<double>(a.n);
        table.rows.push_back(TargetRow{id, a.wealth / cn, a.toilet / cn, a.water / cn,
                                       a.edu / cn});
    }
    return table;
}

std::vector<HouseholdRecord> read_households(const std::string& path) {
    auto rows = read_csv(path);
    if (rows.empty()) throw MalformedRecord("empty household file: " + path);
    std::vector<HouseholdRecord> households;
    std::size_t width = rows[0].size();
    if (width < 4) throw MalformedRecord("household header needs >= 4 columns: " + path);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != width)
            throw MalformedRecord("household row width mismatch: " + path);
        HouseholdRecord h;
        h.cluster_id = row[0];
        h.toilet_outside = static_cast<int>(parse_real(row[1], path));
        h.improved_water = static_cast<int>(parse_real(row[2], path));
        h.head_higher_edu = static_cast<int>(parse_real(row[3], path));
        for (std::size_t c = 4; c < width; ++c) h.assets.push_back(parse_real(row[c], path));
        households.push_back(std::move(h));
    }
    return households;
}

void write_target_table(const std::string& path, const TargetTable& table) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write: " + path);
    out << std::setprecision(17);
    out << "cluster_id,wealth_index,toilet_access,clean_water,educational_attainment\n";
    for (const auto& r : table.rows)
        out << r.cluster_id << ',' << r.wealth_index << ',' << r.toilet_access << ','
            << r.clean_water << ',' << r.educational_attainment << "\n";
}

TargetTable read_target_table(const std::string& path) {
    auto rows = read_csv(path);
    if (rows.empty()) throw MalformedRecord("empty target table: " + path);
    TargetTable table;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != 5) throw MalformedRecord("target row needs 5 fields: " + path);
        table.rows.push_back(TargetRow{row[0], parse_real(row[1], path), parse_real(row[2], path),
                                       parse_real(row[3], path), parse_real(row[4], path)});
    }
    return table;
}

}  // namespace wealthmap
