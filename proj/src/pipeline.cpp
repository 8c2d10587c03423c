#include "wealthmap/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <thread>

#include "wealthmap/explain.hpp"
#include "wealthmap/rng.hpp"
#include "wealthmap/select.hpp"
#include "wealthmap/serialize.hpp"

namespace fs = std::filesystem;

namespace wealthmap {

namespace {

constexpr const char* kVersion = "0.1.0";

void apply_model_json(PipelineConfig& config, const nlohmann::json& m) {
    if (m.is_string()) {
        config.family_name = m.get<std::string>();
        config.model.family = parse_model_family(config.family_name);
        return;
    }
    if (m.contains("family")) config.family_name = m["family"].get<std::string>();
    config.model.family = parse_model_family(config.family_name);
    if (m.contains("lambda")) config.model.lambda = m["lambda"].get<double>();
    if (m.contains("n_trees")) config.model.forest.n_trees = m["n_trees"].get<int>();
    if (m.contains("mtry")) config.model.forest.mtry = m["mtry"].get<int>();
    if (m.contains("max_depth")) {
        config.model.forest.max_depth = m["max_depth"].get<int>();
        config.model.gbdt.max_depth = m["max_depth"].get<int>();
    }
    if (m.contains("min_samples_leaf")) {
        config.model.forest.min_samples_leaf = m["min_samples_leaf"].get<int>();
        config.model.gbdt.min_samples_leaf = m["min_samples_leaf"].get<int>();
    }
    if (m.contains("bootstrap")) config.model.forest.bootstrap = m["bootstrap"].get<bool>();
    if (m.contains("n_threads")) config.model.forest.n_threads = m["n_threads"].get<int>();
    if (m.contains("n_stages")) config.model.gbdt.n_stages = m["n_stages"].get<int>();
    if (m.contains("learning_rate"))
        config.model.gbdt.learning_rate = m["learning_rate"].get<double>();
}

void apply_scene_json(SceneConfig& scene, const nlohmann::json& s) {
    if (s.contains("n_clusters")) scene.n_clusters = s["n_clusters"].get<int>();
    if (s.contains("households_per_cluster"))
        scene.households_per_cluster = s["households_per_cluster"].get<int>();
    if (s.contains("n_assets")) scene.n_assets = s["n_assets"].get<int>();
    if (s.contains("cell_deg")) scene.cell_deg = s["cell_deg"].get<double>();
    if (s.contains("noise_sd")) scene.noise_sd = s["noise_sd"].get<double>();
    if (s.contains("poi_intensity")) scene.poi_intensity = s["poi_intensity"].get<double>();
    if (s.contains("cloud_fraction")) scene.cloud_fraction = s["cloud_fraction"].get<double>();
}

}  // namespace

PipelineConfig PipelineConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw MalformedRecord(std::string("config is not valid JSON: ") + e.what());
    }

    PipelineConfig config;
    if (doc.contains("data_dir")) config.data_dir = doc["data_dir"].get<std::string>();
    if (doc.contains("out_dir")) config.out_dir = doc["out_dir"].get<std::string>();
    if (doc.contains("seed")) {
        config.seed = doc["seed"].get<std::uint64_t>();
        config.seed_set = true;
    }
    if (doc.contains("target")) config.target = doc["target"].get<std::string>();
    if (doc.contains("cv_k")) config.cv_k = doc["cv_k"].get<int>();
    if (doc.contains("tune_iters")) config.tune_iters = doc["tune_iters"].get<int>();
    if (doc.contains("model")) apply_model_json(config, doc["model"]);
    else config.model.family = parse_model_family(config.family_name);
    if (doc.contains("rfe")) {
        const auto& r = doc["rfe"];
        if (r.contains("enabled")) config.rfe_enabled = r["enabled"].get<bool>();
        if (r.contains("step")) config.rfe_step = r["step"].get<int>();
        if (r.contains("n_keep")) config.rfe_n_keep = r["n_keep"].get<int>();
        if (r.contains("per_group")) config.rfe_per_group = r["per_group"].get<bool>();
    }
    if (doc.contains("scene")) apply_scene_json(config.scene, doc["scene"]);
    return config;
}

void PipelineConfig::apply_overrides(bool has_seed, std::uint64_t seed_override,
                                     const std::string& out_override) {
    if (has_seed) {
        seed = seed_override;
        seed_set = true;
    }
    if (!out_override.empty()) out_dir = out_override;
    if (!seed_set) throw Error("seed is mandatory: set it in the config or pass --seed");
    scene.seed = seed;
    model.forest.seed = seed;
    model.gbdt.seed = seed;
}

void run_synth(const PipelineConfig& config) {
    SceneConfig scene_config = config.scene;
    scene_config.seed = config.seed;
    SyntheticScene scene = generate_scene(scene_config);
    write_scene(scene, config.data_dir);
    std::cout << "wrote scene with " << scene.clusters.size() << " clusters to "
              << config.data_dir << "\n";
}

namespace {

struct LoadedInputs {
    std::vector<ClusterSite> clusters;
    std::vector<std::pair<std::string, RasterGrid>> rasters;
    std::vector<PoiRecord> pois;
    std::vector<SocialRecord> social;
};

LoadedInputs load_inputs(const PipelineConfig& config) {
    LoadedInputs in;
    in.clusters = read_clusters((fs::path(config.data_dir) / "clusters.csv").string());
    for (const char* name : {"ntl", "lst", "ndvi"}) {
        fs::path p = fs::path(config.data_dir) / (std::string(name) + ".asc");
        if (fs::exists(p)) in.rasters.emplace_back(name, read_raster(p.string()));
    }
    fs::path pois_path = fs::path(config.data_dir) / "pois.csv";
    if (fs::exists(pois_path)) in.pois = read_pois(pois_path.string());
    fs::path social_path = fs::path(config.data_dir) / "social.csv";
    if (fs::exists(social_path)) in.social = read_social(social_path.string());
    return in;
}

std::string features_path(const PipelineConfig& config) {
    return (fs::path(config.out_dir) / "features.csv").string();
}
std::string targets_path(const PipelineConfig& config) {
    return (fs::path(config.out_dir) / "targets.csv").string();
}

}  // namespace

void run_features(const PipelineConfig& config) {
    LoadedInputs in = load_inputs(config);
    FeatureMatrix matrix = assemble_features(in.clusters, in.rasters, in.pois, in.social);
    fs::create_directories(config.out_dir);
    write_feature_matrix(features_path(config), matrix);
    std::cout << "wrote " << matrix.n_rows() << " x " << matrix.n_cols()
              << " feature matrix to " << features_path(config) << "\n";
}

void run_targets(const PipelineConfig& config) {
    auto households = read_households((fs::path(config.data_dir) / "households.csv").string());
    TargetTable table = derive_cluster_targets(households);
    fs::create_directories(config.out_dir);
    write_target_table(targets_path(config), table);
    std::cout << "wrote " << table.rows.size() << " cluster targets to "
              << targets_path(config) << "\n";
}

std::vector<double> align_target(const TargetTable& table, const std::vector<std::string>& row_ids,
                                 const std::string& target_name) {
    std::map<std::string, const TargetRow*> by_id;
    for (const auto& row : table.rows) by_id[row.cluster_id] = &row;
    std::vector<double> y;
    for (const auto& id : row_ids) {
        auto it = by_id.find(id);
        if (it == by_id.end()) throw UnknownCluster("no target row for cluster " + id);
        const TargetRow& r = *it->second;
        if (target_name == "wealth_index") y.push_back(r.wealth_index);
        else if (target_name == "toilet_access") y.push_back(r.toilet_access);
        else if (target_name == "clean_water") y.push_back(r.clean_water);
        else if (target_name == "educational_attainment") y.push_back(r.educational_attainment);
        else throw MalformedRecord("unknown target column: " + target_name);
    }
    return y;
}

void run_train(const PipelineConfig& config) {
    FeatureMatrix matrix = read_feature_matrix(features_path(config));
    TargetTable table = read_target_table(targets_path(config));
    std::vector<double> y = align_target(table, matrix.row_ids, config.target);

    FeatureMatrix imputed = impute_missing(matrix);
    Dataset data = make_dataset(imputed, y);

    ModelSpec spec = config.model;
    if (config.rfe_enabled) {
        auto kept = recursive_feature_elimination(data, spec, config.rfe_step,
                                                  config.rfe_n_keep, config.seed);
        std::map<std::string, bool> keep;
        for (const auto& name : kept) keep[name] = true;
        std::vector<int> cols;
        FeatureMatrix reduced;
        reduced.row_ids = imputed.row_ids;
        for (std::size_t c = 0; c < imputed.n_cols(); ++c)
            if (keep.count(imputed.col_names[c])) {
                cols.push_back(static_cast<int>(c));
                reduced.col_names.push_back(imputed.col_names[c]);
                reduced.col_groups.push_back(imputed.col_groups[c]);
            }
        reduced.cells.resize(reduced.n_rows() * reduced.n_cols());
        for (std::size_t r = 0; r < imputed.n_rows(); ++r)
            for (std::size_t k = 0; k < cols.size(); ++k)
                reduced.at(r, k) = imputed.at(r, static_cast<std::size_t>(cols[k]));
        imputed = std::move(reduced);
        data = make_dataset(imputed, y);
        std::ofstream out(fs::path(config.out_dir) / "selected_features.txt");
        for (const auto& name : kept) out << name << "\n";
    }

    CvReport report = k_fold_cv(imputed, y, spec, config.cv_k, config.seed);
    FittedModel model = fit_model(data, spec);

    fs::create_directories(config.out_dir);
    fs::path model_path = fs::path(config.out_dir) / "model.json";
    if (const auto* ensemble = std::get_if<TreeEnsemble>(&model.model)) {
        save_ensemble(model_path.string(), *ensemble);
    } else {
        const auto& linear = std::get<LinearModel>(model.model);
        nlohmann::json doc;
        doc["kind"] = "linear";
        doc["family"] = model_family_name(spec.family);
        doc["coefficients"] = linear.coefficients;
        doc["intercept"] = linear.intercept;
        doc["lambda"] = linear.lambda;
        doc["columns"] = data.col_names;
        std::ofstream out(model_path);
        out << doc.dump(2) << "\n";
    }
    {
        std::ofstream out(fs::path(config.out_dir) / "train_report.json");
        nlohmann::json doc;
        doc["target"] = config.target;
        doc["family"] = model_family_name(spec.family);
        doc["cv_pooled_r2"] = report.pooled_r2;
        doc["cv_fold_r2"] = report.fold_r2;
        doc["seed"] = config.seed;
        out << doc.dump(2) << "\n";
    }
    std::cout << "trained " << model_family_name(spec.family) << ": pooled out-of-fold R2 = "
              << report.pooled_r2 << "\n";
}

namespace {

ModelSpec spec_for_cell(const PipelineConfig& config, ModelFamily family,
                        const FeatureMatrix& cell_features, const std::vector<double>& y,
                        std::uint64_t cell_seed) {
    ModelSpec spec;
    spec.family = family;
    spec.forest = config.model.forest;
    spec.gbdt = config.model.gbdt;
    spec.forest.seed = cell_seed;
    spec.gbdt.seed = cell_seed;
    if (family == ModelFamily::Ridge || family == ModelFamily::Lasso) {
        SearchResult tuned = random_search(cell_features, y, family,
                                           default_search_space(family), config.tune_iters,
                                           config.cv_k, cell_seed);
        spec.lambda = tuned.best_spec.lambda;
    }
    return spec;
}

}  // namespace

BenchmarkGrid run_benchmark(const PipelineConfig& config) {
    FeatureMatrix matrix = read_feature_matrix(features_path(config));
    TargetTable table = read_target_table(targets_path(config));
    std::vector<double> y = align_target(table, matrix.row_ids, config.target);

    BenchmarkGrid grid;
    grid.models = {"ols", "lasso", "ridge", "gbdt", "random_forest"};
    grid.groups = {"SM", "RS", "POI", "All"};

    unsigned hw = std::thread::hardware_concurrency();
    int n_threads = hw ? static_cast<int>(hw) : 1;

    std::uint64_t cell_index = 0;
    for (const auto& model_name : grid.models) {
        ModelFamily family = parse_model_family(model_name);
        std::vector<double> row_r2;
        std::vector<std::vector<double>> row_folds;
        for (const auto& group_name : grid.groups) {
            FeatureMatrix cell = group_name == "All"
                                     ? matrix
                                     : matrix.filter_group(parse_source_group(group_name));
            std::uint64_t cell_seed = RngStream::derive(config.seed, cell_index++).next_u64();
            ModelSpec spec = spec_for_cell(config, family, cell, y, cell_seed);
            spec.forest.n_threads = n_threads;
            CvReport report = k_fold_cv(cell, y, spec, config.cv_k, cell_seed);
            row_r2.push_back(report.pooled_r2);
            row_folds.push_back(report.fold_r2);
        }
        grid.pooled_r2.push_back(std::move(row_r2));
        grid.fold_r2.push_back(std::move(row_folds));
    }

    fs::create_directories(config.out_dir);
    nlohmann::json doc = benchmark_to_json(grid, config.seed);
    {
        std::ofstream out(fs::path(config.out_dir) / "metrics.json");
        out << doc.dump(2) << "\n";
    }
    {
        std::ofstream out(fs::path(config.out_dir) / "benchmark_grid.csv");
        out << std::setprecision(17);
        out << "model";
        for (const auto& g : grid.groups) out << ',' << g;
        out << "\n";
        for (std::size_t m = 0; m < grid.models.size(); ++m) {
            out << grid.models[m];
            for (double r2 : grid.pooled_r2[m]) out << ',' << r2;
            out << "\n";
        }
    }
    return grid;
}

nlohmann::json benchmark_to_json(const BenchmarkGrid& grid, std::uint64_t seed) {
    nlohmann::json doc;
    for (std::size_t m = 0; m < grid.models.size(); ++m)
        for (std::size_t g = 0; g < grid.groups.size(); ++g) {
            doc["grid"][grid.models[m]][grid.groups[g]] = grid.pooled_r2[m][g];
            doc["folds"][grid.models[m]][grid.groups[g]] = grid.fold_r2[m][g];
        }
    doc["seed"] = seed;
    doc["versions"] = {{"wealthmap", kVersion}, {"metrics_format", 1}};
    return doc;
}

void run_explain(const PipelineConfig& config, const std::string& model_path,
                 const std::vector<std::string>& rows) {
    std::ifstream probe(model_path);
    if (!probe) throw Error("cannot open model file: " + model_path);
    nlohmann::json doc;
    probe >> doc;
    if (doc.contains("kind") && doc["kind"] == "linear")
        throw ModelNotTree("SHAP output is defined for tree ensembles only");
    TreeEnsemble ensemble = ensemble_from_json(doc);

    FeatureMatrix matrix = impute_missing(read_feature_matrix(features_path(config)));

    std::vector<std::size_t> wanted;
    if (rows.empty()) {
        for (std::size_t r = 0; r < matrix.n_rows(); ++r) wanted.push_back(r);
    } else {
        std::map<std::string, std::size_t> index;
        for (std::size_t r = 0; r < matrix.n_rows(); ++r) index[matrix.row_ids[r]] = r;
        for (const auto& id : rows) {
            auto it = index.find(id);
            if (it == index.end()) throw UnknownCluster("no feature row for cluster " + id);
            wanted.push_back(it->second);
        }
    }

    FeatureMatrix explained;
    explained.col_names = matrix.col_names;
    explained.col_groups = matrix.col_groups;
    std::vector<ShapExplanation> explanations;
    for (std::size_t r : wanted) {
        std::vector<double> x(matrix.n_cols());
        for (std::size_t c = 0; c < matrix.n_cols(); ++c) x[c] = matrix.at(r, c);
        explanations.push_back(tree_shap(ensemble, x, matrix.col_names));
        explained.row_ids.push_back(matrix.row_ids[r]);
        explained.cells.insert(explained.cells.end(), x.begin(), x.end());
    }

    fs::create_directories(config.out_dir);
    write_shap_csv((fs::path(config.out_dir) / "shap.csv").string(), explained.row_ids,
                   explanations, explained);
    write_global_importance_csv((fs::path(config.out_dir) / "global_importance.csv").string(),
                                global_importance(explanations, explained));
    for (std::size_t i = 0; i < explanations.size(); ++i) {
        std::vector<double> x(explained.n_cols());
        for (std::size_t c = 0; c < explained.n_cols(); ++c) x[c] = explained.at(i, c);
        ForcePlotData force = force_plot_data(explanations[i], x);
        std::ofstream out(fs::path(config.out_dir) /
                          ("force_" + explained.row_ids[i] + ".csv"));
        out << std::setprecision(17);
        out << "feature,feature_value,contribution\n";
        out << "__base_value__,," << force.base_value << "\n";
        out << "__prediction__,," << force.prediction << "\n";
        for (const auto& arrow : force.arrows)
            out << arrow.feature << ',' << arrow.feature_value << ',' << arrow.contribution
                << "\n";
    }
    std::cout << "explained " << explanations.size() << " rows into " << config.out_dir << "\n";
}

void run_predict(const PipelineConfig& config, const std::string& model_path) {
    std::ifstream probe(model_path);
    if (!probe) throw Error("cannot open model file: " + model_path);
    nlohmann::json doc;
    probe >> doc;

    FeatureMatrix matrix = impute_missing(read_feature_matrix(features_path(config)));
    std::vector<double> predictions(matrix.n_rows());

    if (doc.contains("kind") && doc["kind"] == "linear") {
        LinearModel linear;
        linear.coefficients = doc.at("coefficients").get<std::vector<double>>();
        linear.intercept = doc.at("intercept").get<double>();
        if (linear.coefficients.size() != matrix.n_cols())
            throw DimensionMismatch("model width != feature matrix width");
        for (std::size_t r = 0; r < matrix.n_rows(); ++r)
            predictions[r] = linear.predict(&matrix.cells[r * matrix.n_cols()]);
    } else {
        TreeEnsemble ensemble = ensemble_from_json(doc);
        for (std::size_t r = 0; r < matrix.n_rows(); ++r)
            predictions[r] = ensemble.predict(&matrix.cells[r * matrix.n_cols()]);
    }

    fs::create_directories(config.out_dir);
    std::ofstream out(fs::path(config.out_dir) / "predictions.csv");
    out << std::setprecision(17);
    out << "cluster_id,prediction\n";
    for (std::size_t r = 0; r < matrix.n_rows(); ++r)
        out << matrix.row_ids[r] << ',' << predictions[r] << "\n";
    std::cout << "wrote " << matrix.n_rows() << " predictions\n";
}

}  // namespace wealthmap
