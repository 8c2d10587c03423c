#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "wealthmap/cv.hpp"
#include "wealthmap/synth.hpp"

namespace wealthmap {

// One JSON config document drives every subcommand; CLI flags override the
// matching keys. All randomness flows from `seed` (mandatory, no wall-clock
// default).
struct PipelineConfig {
    std::string data_dir = "data";
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;

    std::string target = "wealth_index";
    int cv_k = 5;
    ModelSpec model;
    std::string family_name = "random_forest";
    int tune_iters = 20;  // lambda search for ridge/lasso

    bool rfe_enabled = false;
    int rfe_step = 1;
    int rfe_n_keep = 10;
    bool rfe_per_group = false;  // default: combined matrix only

    SceneConfig scene;

    static PipelineConfig load(const std::string& path);
    void apply_overrides(bool has_seed, std::uint64_t seed_override,
                         const std::string& out_override);
};

struct BenchmarkGrid {
    // rows: ols, lasso, ridge, gbdt, random_forest; cols: SM, RS, POI, All
    std::vector<std::string> models;
    std::vector<std::string> groups;
    std::vector<std::vector<double>> pooled_r2;
    std::vector<std::vector<std::vector<double>>> fold_r2;
};

void run_synth(const PipelineConfig& config);
void run_features(const PipelineConfig& config);
void run_targets(const PipelineConfig& config);
void run_train(const PipelineConfig& config);
BenchmarkGrid run_benchmark(const PipelineConfig& config);
void run_explain(const PipelineConfig& config, const std::string& model_path,
                 const std::vector<std::string>& rows);
void run_predict(const PipelineConfig& config, const std::string& model_path);

// Pull one target column out of the target table, aligned with matrix rows.
std::vector<double> align_target(const TargetTable& table, const std::vector<std::string>& row_ids,
                                 const std::string& target_name);

nlohmann::json benchmark_to_json(const BenchmarkGrid& grid, std::uint64_t seed);

}  // namespace wealthmap
