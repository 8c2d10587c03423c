// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Heavy checks report their runtime alongside the verdict.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <thread>
#include <vector>

#include "wealthmap/explain.hpp"
#include "wealthmap/pipeline.hpp"
#include "wealthmap/select.hpp"
#include "wealthmap/serialize.hpp"

using namespace wealthmap;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;
double g_worst_local_accuracy = 0.0;  // criterion 2 accumulator

void verdict(int criterion, bool ok, const std::string& label, const std::string& detail = "") {
    if (!ok) ++g_failures;
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << label;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << std::endl;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Dataset random_dataset(std::uint64_t seed, std::size_t n, std::size_t p, double noise = 0.2) {
    RngStream rng(seed);
    Dataset d;
    d.n = n;
    d.p = p;
    for (std::size_t j = 0; j < p; ++j) d.col_names.push_back("f" + std::to_string(j));
    for (std::size_t i = 0; i < n; ++i) {
        d.row_ids.push_back(std::to_string(i));
        double y = noise * rng.normal();
        for (std::size_t j = 0; j < p; ++j) {
            double v = rng.normal();
            d.x.push_back(v);
            y += v * static_cast<double>((j % 3) + 1);
        }
        d.y.push_back(y);
    }
    return d;
}

void track_local_accuracy(const ShapExplanation& ex) {
    double total = std::accumulate(ex.contributions.begin(), ex.contributions.end(), 0.0);
    double gap = std::fabs(ex.base_value + total - ex.prediction);
    double rel = gap / std::max(1.0, std::fabs(ex.prediction));
    g_worst_local_accuracy = std::max(g_worst_local_accuracy, rel);
}

// ---------------------------------------------------------------- criterion 1
void check_shap_oracle() {
    auto start = std::chrono::steady_clock::now();
    RngStream rng(1001);
    double worst = 0.0;
    int forests = 0;
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t p = 2 + rng.below(7);  // 2..8 features
        Dataset d = random_dataset(2000 + static_cast<std::uint64_t>(trial), 50, p);
        ForestParams fp;
        fp.n_trees = 5 + static_cast<int>(rng.below(16));  // 5..20
        fp.max_depth = 2 + static_cast<int>(rng.below(3));  // 2..4
        fp.min_samples_leaf = 2;
        fp.seed = 3000 + static_cast<std::uint64_t>(trial);
        TreeEnsemble forest = fit_random_forest(d, fp);
        ++forests;
        std::vector<std::string> names = d.col_names;
        for (int probe = 0; probe < 20; ++probe) {
            std::vector<double> x(p);
            for (auto& v : x) v = rng.normal();
            ShapExplanation fast = tree_shap(forest, x, names);
            ShapExplanation slow = brute_force_shapley(forest, x, names);
            track_local_accuracy(fast);
            worst = std::max(worst, std::fabs(fast.base_value - slow.base_value));
            for (std::size_t j = 0; j < p; ++j)
                worst = std::max(worst, std::fabs(fast.contributions[j] - slow.contributions[j]));
        }
    }
    double elapsed = seconds_since(start);
    char detail[128];
    std::snprintf(detail, sizeof(detail), "%d forests, max |diff| = %.3g, %.1f s", forests,
                  worst, elapsed);
    verdict(1, worst <= 1e-8 && elapsed < 60.0, "tree_shap matches brute-force Shapley", detail);
}

// ---------------------------------------------------------------- criterion 3
SummaryStats oracle_zonal(const RasterGrid& g, const GeoPoint& center, double radius_m,
                          std::vector<std::pair<int, int>>& cells) {
    std::vector<double> vals;
    for (int r = 0; r < g.n_rows; ++r)
        for (int c = 0; c < g.n_cols; ++c) {
            if (g.at(r, c) == g.nodata) continue;
            if (haversine_distance(center, g.cell_center(r, c)) <= radius_m) {
                cells.push_back({r, c});
                vals.push_back(g.at(r, c));
            }
        }
    SummaryStats s;
    if (vals.empty()) return s;
    double n = static_cast<double>(vals.size());
    double mean = 0;
    for (double v : vals) mean += v;
    mean /= n;
    double m2 = 0, m3 = 0, m4 = 0;
    s.minimum = vals[0];
    s.maximum = vals[0];
    for (double v : vals) {
        double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
        s.minimum = std::min(s.minimum, v);
        s.maximum = std::max(s.maximum, v);
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    s.count = static_cast<long>(vals.size());
    s.mean = mean;
    s.variance = m2;
    s.skewness = m2 < 1e-12 ? 0.0 : m3 / std::pow(m2, 1.5);
    s.kurtosis = m2 < 1e-12 ? 0.0 : m4 / (m2 * m2) - 3.0;
    return s;
}

void check_zonal_oracle() {
    RngStream rng(404);
    auto close = [](double a, double b) {
        return std::fabs(a - b) <= 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)});
    };
    bool ok = true;
    int checked = 0;
    while (checked < 100) {
        RasterGrid g;
        g.n_rows = 5 + static_cast<int>(rng.below(18));
        g.n_cols = 5 + static_cast<int>(rng.below(18));
        g.cell_deg = 0.004 + 0.012 * rng.uniform01();
        g.origin_lat_deg = 14.0 + rng.uniform01();
        g.origin_lon_deg = 120.0 + rng.uniform01();
        g.nodata = -9999.0;
        g.values.resize(static_cast<std::size_t>(g.n_rows) * static_cast<std::size_t>(g.n_cols));
        for (double& v : g.values)
            v = rng.uniform01() < 0.08 ? g.nodata : rng.normal(8.0, 3.0);
        GeoPoint center{g.origin_lat_deg - rng.uniform01() * g.n_rows * g.cell_deg,
                        g.origin_lon_deg + rng.uniform01() * g.n_cols * g.cell_deg};
        double radius = rng.uniform(400.0, 9000.0);
        std::vector<std::pair<int, int>> cells;
        SummaryStats expect = oracle_zonal(g, center, radius, cells);
        if (cells.empty()) {
            try {
                zonal_statistics(g, center, radius);
                ok = false;
            } catch (const EmptyZone&) {
            }
            continue;
        }
        SummaryStats got = zonal_statistics(g, center, radius);
        ok = ok && got.count == expect.count && got.minimum == expect.minimum &&
             got.maximum == expect.maximum && close(got.mean, expect.mean) &&
             close(got.variance, expect.variance) && close(got.skewness, expect.skewness) &&
             close(got.kurtosis, expect.kurtosis);
        ++checked;
    }

    // the {1,2,3} hand case
    RasterGrid row;
    row.n_rows = 1;
    row.n_cols = 3;
    row.cell_deg = 0.01;
    row.origin_lat_deg = 15.0;
    row.origin_lon_deg = 121.0;
    row.nodata = -9999.0;
    row.values = {1.0, 2.0, 3.0};
    SummaryStats hand = zonal_statistics(row, row.cell_center(0, 1), 2000.0);
    ok = ok && hand.count == 3 && close(hand.variance, 2.0 / 3.0) &&
         std::fabs(hand.skewness) < 1e-12;
    verdict(3, ok, "zonal statistics match the brute-force scan",
            std::to_string(checked) + " random triples + hand case");
}

// ---------------------------------------------------------------- criterion 4
std::vector<double> power_iteration_scores(const std::vector<double>& x, std::size_t n,
                                           std::size_t p) {
    std::vector<double> mean(p, 0), sd(p, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) mean[j] += x[i * p + j];
    for (auto& m : mean) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            double d = x[i * p + j] - mean[j];
            sd[j] += d * d;
        }
    for (auto& s : sd) s = std::sqrt(s / static_cast<double>(n));
    std::vector<double> z(n * p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) z[i * p + j] = (x[i * p + j] - mean[j]) / sd[j];
    std::vector<double> corr(p * p, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t r = 0; r < p; ++r)
            for (std::size_t c = 0; c < p; ++c) corr[r * p + c] += z[i * p + r] * z[i * p + c];
    for (auto& v : corr) v /= static_cast<double>(n);

    std::vector<double> vec(p, 1.0 / std::sqrt(static_cast<double>(p)));
    for (int iter = 0; iter < 20000; ++iter) {
        std::vector<double> next(p, 0);
        for (std::size_t r = 0; r < p; ++r)
            for (std::size_t c = 0; c < p; ++c) next[r] += corr[r * p + c] * vec[c];
        double norm = 0;
        for (double v : next) norm += v * v;
        norm = std::sqrt(norm);
        for (auto& v : next) v /= norm;
        double delta = 0;
        for (std::size_t j = 0; j < p; ++j) delta = std::max(delta, std::fabs(next[j] - vec[j]));
        vec = next;
        if (delta < 1e-13) break;
    }
    std::vector<double> scores(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) scores[i] += z[i * p + j] * vec[j];
    return scores;
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(a.size());
    mb /= static_cast<double>(b.size());
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

void check_pca_oracle() {
    RngStream rng(777);
    bool ok = true;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t n = 40 + rng.below(60);
        std::size_t p = 3 + rng.below(6);
        std::vector<double> x(n * p);
        std::vector<double> latent(n);
        for (auto& w : latent) w = rng.normal();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < p; ++j)
                x[i * p + j] = 0.8 * latent[i] + rng.normal();
        PcaResult r = pca_first_component(x, n, p);
        std::vector<double> oracle = power_iteration_scores(x, n, p);
        double gap = std::fabs(std::fabs(correlation(r.scores, oracle)) - 1.0);
        worst = std::max(worst, gap);
        ok = ok && gap < 1e-9;
    }
    std::vector<double> twin = {1, 1, 2, 2, 3, 3, 5, 5};
    PcaResult t = pca_first_component(twin, 4, 2);
    ok = ok && std::fabs(t.explained_share - 1.0) < 1e-9;
    char detail[96];
    std::snprintf(detail, sizeof(detail), "20 matrices, max |1-|corr|| = %.3g", worst);
    verdict(4, ok, "pca_first_component matches the power-iteration oracle", detail);
}

// ---------------------------------------------------------------- criterion 5
void check_synthetic_benchmark() {
    auto start = std::chrono::steady_clock::now();
    SceneConfig sc;  // defaults, seed 42
    SyntheticScene scene = generate_scene(sc);
    FeatureMatrix matrix = assemble_features(scene.clusters, scene.rasters, scene.pois,
                                             scene.social);
    TargetTable table = derive_cluster_targets(scene.households);
    std::vector<double> y = align_target(table, matrix.row_ids, "wealth_index");

    unsigned hw = std::thread::hardware_concurrency();
    ModelSpec spec;
    spec.family = ModelFamily::RandomForest;
    spec.forest.seed = 42;
    spec.forest.n_threads = hw ? static_cast<int>(hw) : 1;

    double all_r2 = 0.0;
    std::vector<std::pair<std::string, double>> single;
    {
        CvReport report = k_fold_cv(matrix, y, spec, 5, 42);
        all_r2 = report.pooled_r2;
    }
    for (SourceGroup g : {SourceGroup::SM, SourceGroup::RS, SourceGroup::POI}) {
        CvReport report = k_fold_cv(matrix.filter_group(g), y, spec, 5, 42);
        single.push_back({source_group_name(g), report.pooled_r2});
    }
    double elapsed = seconds_since(start);
    bool ok = all_r2 >= 0.6 && elapsed < 120.0;
    std::ostringstream detail;
    detail.precision(3);
    detail << "All=" << all_r2;
    for (const auto& [name, r2] : single) {
        ok = ok && all_r2 > r2 && r2 > 0.0;
        detail << " " << name << "=" << r2;
    }
    detail << " " << std::fixed << elapsed << " s";
    verdict(5, ok, "random forest on the default scene: All >= 0.6 and beats each source",
            detail.str());
}

// ---------------------------------------------------------------- criterion 6
void check_model_sanity() {
    bool ok = true;

    Dataset d = random_dataset(6001, 80, 4);
    LinearModel ols = fit_linear_family(d, LinearKind::Ols, 0.0);
    LinearModel ridge = fit_linear_family(d, LinearKind::Ridge, 0.0);
    for (std::size_t j = 0; j < d.p; ++j)
        ok = ok && std::fabs(ridge.coefficients[j] - ols.coefficients[j]) <
                       1e-9 * std::max(1.0, std::fabs(ols.coefficients[j]));
    ok = ok && std::fabs(ridge.intercept - ols.intercept) < 1e-9;

    // analytic lasso kill threshold: max_j |z_j' (y - ybar)| / n
    {
        std::vector<double> mean(d.p, 0), sd(d.p, 0);
        double ymean = std::accumulate(d.y.begin(), d.y.end(), 0.0) / static_cast<double>(d.n);
        for (std::size_t i = 0; i < d.n; ++i)
            for (std::size_t j = 0; j < d.p; ++j) mean[j] += d.at(i, j);
        for (auto& m : mean) m /= static_cast<double>(d.n);
        for (std::size_t i = 0; i < d.n; ++i)
            for (std::size_t j = 0; j < d.p; ++j) {
                double diff = d.at(i, j) - mean[j];
                sd[j] += diff * diff;
            }
        for (auto& s : sd) s = std::sqrt(s / static_cast<double>(d.n));
        double lambda_max = 0;
        for (std::size_t j = 0; j < d.p; ++j) {
            double dot = 0;
            for (std::size_t i = 0; i < d.n; ++i)
                dot += (d.at(i, j) - mean[j]) / sd[j] * (d.y[i] - ymean);
            lambda_max = std::max(lambda_max, std::fabs(dot) / static_cast<double>(d.n));
        }
        LinearModel dead = fit_linear_family(d, LinearKind::Lasso, lambda_max * 1.001);
        for (double c : dead.coefficients) ok = ok && c == 0.0;
    }

    for (std::uint64_t seed = 6100; seed < 6110; ++seed) {
        Dataset g = random_dataset(seed, 120, 3);
        GbdtParams gp;
        gp.seed = seed;
        double prev = 1e300;
        for (int stages : {1, 10, 40, 120}) {
            gp.n_stages = stages;
            TreeEnsemble m = fit_gbdt(g, gp);
            double mse = 0;
            for (std::size_t i = 0; i < g.n; ++i) {
                double e = m.predict(&g.x[i * g.p]) - g.y[i];
                mse += e * e;
            }
            mse /= static_cast<double>(g.n);
            ok = ok && mse <= prev + 1e-12;
            prev = mse;
        }
    }
    verdict(6, ok, "Ridge(0) == OLS, lasso kill threshold, monotone boosting");
}

// ---------------------------------------------------------------- criterion 7
std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void check_determinism() {
    auto start = std::chrono::steady_clock::now();
    fs::path base = fs::temp_directory_path() / "wm_accept_bench";
    fs::remove_all(base);

    PipelineConfig config;
    config.data_dir = (base / "data").string();
    config.seed = 42;
    config.seed_set = true;
    config.scene.n_clusters = 150;
    config.scene.households_per_cluster = 15;
    config.scene.seed = 42;
    config.tune_iters = 8;
    run_synth(config);

    std::string metrics_a, metrics_b;
    for (int round = 0; round < 2; ++round) {
        config.out_dir = (base / ("out" + std::to_string(round))).string();
        run_features(config);
        run_targets(config);
        run_benchmark(config);
        (round == 0 ? metrics_a : metrics_b) = slurp(fs::path(config.out_dir) / "metrics.json");
    }
    bool ok = !metrics_a.empty() && metrics_a == metrics_b;

    Dataset d = random_dataset(7001, 150, 5);
    ForestParams fp;
    fp.n_trees = 24;
    fp.seed = 7;
    fp.n_threads = 1;
    std::string serial = ensemble_to_json(fit_random_forest(d, fp)).dump();
    fp.n_threads = 8;
    std::string parallel = ensemble_to_json(fit_random_forest(d, fp)).dump();
    ok = ok && serial == parallel;

    fs::remove_all(base);
    char detail[64];
    std::snprintf(detail, sizeof(detail), "%.1f s", seconds_since(start));
    verdict(7, ok, "byte-identical benchmark reruns and thread-count invariance", detail);
}

// ---------------------------------------------------------------- criterion 8
void check_rfe_property() {
    int good_seeds = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        RngStream rng(8000 + seed);
        std::size_t n = 250, p = 20;
        Dataset d;
        d.n = n;
        d.p = p;
        for (std::size_t j = 0; j < p; ++j)
            d.col_names.push_back((j < 5 ? "info_" : "noise_") + std::to_string(j));
        for (std::size_t i = 0; i < n; ++i) {
            d.row_ids.push_back(std::to_string(i));
            double y = 0.3 * rng.normal();
            for (std::size_t j = 0; j < p; ++j) {
                double v = rng.normal();
                d.x.push_back(v);
                if (j < 5) y += v * static_cast<double>(j + 2);
            }
            d.y.push_back(y);
        }
        ModelSpec spec;
        spec.family = ModelFamily::RandomForest;
        spec.forest.n_trees = 60;
        spec.forest.max_depth = 6;
        auto kept = recursive_feature_elimination(d, spec, 3, 5, seed);
        int informative = 0;
        for (const auto& name : kept)
            if (name.rfind("info_", 0) == 0) ++informative;
        if (informative >= 4) ++good_seeds;
    }
    verdict(8, good_seeds >= 9, "RFE keeps >= 4 of 5 informative features in >= 9/10 seeds",
            std::to_string(good_seeds) + "/10 seeds");
}

// ---------------------------------------------------------------- criterion 9
void check_cv_bookkeeping() {
    bool ok = fold_sizes(1249, 5) == std::vector<std::size_t>{250, 250, 250, 250, 249};

    // leakage: an outlier confined to a held-out fold must not move the
    // imputation means computed from the training folds
    std::size_t n = 50;
    FeatureMatrix m;
    for (std::size_t i = 0; i < n; ++i) m.row_ids.push_back("r" + std::to_string(i));
    m.col_names = {"x"};
    m.col_groups = {SourceGroup::RS};
    RngStream rng(909);
    std::vector<double> y(n);
    m.cells.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        m.cells[i] = rng.normal();
        y[i] = 2.0 * m.cells[i] + 0.1 * rng.normal();
    }
    ModelSpec spec;
    spec.family = ModelFamily::Ols;
    CvReport probe = k_fold_cv(m, y, spec, 5, 11);
    int victim_fold = probe.fold_of_row[0];
    std::vector<int> train_rows;
    for (std::size_t i = 0; i < n; ++i)
        if (probe.fold_of_row[i] != victim_fold) train_rows.push_back(static_cast<int>(i));
    std::vector<double> before = imputation_means(m, train_rows);
    m.cells[0] = 1e9;  // poison the held-out row
    std::vector<double> after = imputation_means(m, train_rows);
    ok = ok && before == after;

    verdict(9, ok, "fold sizes {250,250,250,250,249} and leakage-free imputation");
}

// --------------------------------------------------------------- criterion 10
void check_serialization() {
    bool ok = true;
    RngStream rng(1010);
    Dataset d = random_dataset(10001, 120, 4);

    ForestParams fp;
    fp.n_trees = 40;
    fp.seed = 10;
    TreeEnsemble forest = fit_random_forest(d, fp);
    GbdtParams gp;
    gp.n_stages = 40;
    gp.seed = 11;
    TreeEnsemble gbdt = fit_gbdt(d, gp);

    fs::path path = fs::temp_directory_path() / "wm_accept_model.json";
    for (const TreeEnsemble* model : {&forest, &gbdt}) {
        save_ensemble(path.string(), *model);
        TreeEnsemble back = load_ensemble(path.string());
        for (int probe = 0; probe < 1000; ++probe) {
            double x[4] = {rng.normal(), rng.normal(), rng.normal(), rng.normal()};
            ok = ok && back.predict(x) == model->predict(x);
        }
    }
    fs::remove(path);
    verdict(10, ok, "reloaded ensembles predict bit-exactly on 1000 probes");
}

}  // namespace

int main() {
    check_shap_oracle();

    // a few boosting explanations feed the local-accuracy accumulator too
    {
        Dataset d = random_dataset(42, 90, 5);
        GbdtParams gp;
        gp.n_stages = 40;
        gp.seed = 4;
        TreeEnsemble m = fit_gbdt(d, gp);
        RngStream rng(43);
        for (int probe = 0; probe < 50; ++probe) {
            std::vector<double> x(5);
            for (auto& v : x) v = rng.normal();
            track_local_accuracy(tree_shap(m, x, d.col_names));
        }
    }
    {
        char detail[64];
        std::snprintf(detail, sizeof(detail), "max relative gap = %.3g", g_worst_local_accuracy);
        verdict(2, g_worst_local_accuracy <= 1e-9,
                "base value plus contributions equals the prediction", detail);
    }

    check_zonal_oracle();
    check_pca_oracle();
    check_synthetic_benchmark();
    check_model_sanity();
    check_determinism();
    check_rfe_property();
    check_cv_bookkeeping();
    check_serialization();

    if (g_failures) {
        std::cout << g_failures << " criterion(s) failed" << std::endl;
        return 1;
    }
    std::cout << "all criteria passed" << std::endl;
    return 0;
}
