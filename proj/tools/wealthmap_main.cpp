#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wealthmap/pipeline.hpp"

using wealthmap::PipelineConfig;

namespace {

int dispatch(const std::string& command, const std::string& config_path, bool has_seed,
             std::uint64_t seed, const std::string& out_dir, const std::string& model_path,
             const std::vector<std::string>& rows) {
    PipelineConfig config = PipelineConfig::load(config_path);
    config.apply_overrides(has_seed, seed, out_dir);

    if (command == "synth") wealthmap::run_synth(config);
    else if (command == "features") wealthmap::run_features(config);
    else if (command == "targets") wealthmap::run_targets(config);
    else if (command == "train") wealthmap::run_train(config);
    else if (command == "benchmark") wealthmap::run_benchmark(config);
    else if (command == "explain")
        wealthmap::run_explain(config, model_path.empty() ? config.out_dir + "/model.json"
                                                          : model_path,
                               rows);
    else if (command == "predict")
        wealthmap::run_predict(config, model_path.empty() ? config.out_dir + "/model.json"
                                                          : model_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wealthmap: interpretable wealth estimation pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    bool has_seed = false;
    std::string out_dir;
    std::string model_path;
    std::vector<std::string> rows;

    std::vector<std::pair<std::string, std::string>> commands = {
        {"synth", "generate a synthetic scene into data_dir"},
        {"features", "assemble the per-cluster feature matrix"},
        {"targets", "build wealth index and indicator targets"},
        {"train", "cross-validate and fit one model, write model.json"},
        {"benchmark", "run the model x source-group R2 grid"},
        {"explain", "SHAP attributions for a trained tree ensemble"},
        {"predict", "score the feature matrix with a saved model"},
    };
    std::string chosen;
    for (auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--seed", seed, "override config seed")->each([&](const std::string&) {
            has_seed = true;
        });
        sub->add_option("--out", out_dir, "override output directory");
        if (name == "explain" || name == "predict")
            sub->add_option("--model", model_path, "model JSON path (default out_dir/model.json)");
        if (name == "explain")
            sub->add_option("--rows", rows, "cluster ids to explain (default: all)")
                ->delimiter(',');
        sub->callback([&, name = name] { chosen = name; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        return dispatch(chosen, config_path, has_seed, seed, out_dir, model_path, rows);
    } catch (const wealthmap::SingularSystem& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const wealthmap::ZeroVarianceTarget& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const wealthmap::DegenerateInput& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
