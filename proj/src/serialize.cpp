#include "wealthmap/serialize.hpp"

#include <fstream>

namespace wealthmap {

nlohmann::json ensemble_to_json(const TreeEnsemble& ensemble) {
    nlohmann::json doc;
    doc["combiner"] = ensemble.combiner == Combiner::Mean ? "mean" : "sum";
    doc["base_score"] = ensemble.base_score;
    doc["learning_rate"] = ensemble.learning_rate;
    doc["trees"] = nlohmann::json::array();
    for (const auto& tree : ensemble.trees) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& node : tree.nodes) {
            nodes.push_back({{"feature", node.feature},
                             {"threshold", node.threshold},
                             {"left", node.left},
                             {"right", node.right},
                             {"value", node.value},
                             {"cover", node.cover}});
        }
        doc["trees"].push_back({{"nodes", std::move(nodes)}});
    }
    return doc;
}

TreeEnsemble ensemble_from_json(const nlohmann::json& doc) {
    TreeEnsemble ensemble;
    std::string combiner = doc.at("combiner").get<std::string>();
    if (combiner == "mean") ensemble.combiner = Combiner::Mean;
    else if (combiner == "sum") ensemble.combiner = Combiner::Sum;
    else throw MalformedRecord("unknown combiner: " + combiner);
    ensemble.base_score = doc.at("base_score").get<double>();
    ensemble.learning_rate = doc.at("learning_rate").get<double>();
    for (const auto& tree_doc : doc.at("trees")) {
        RegressionTree tree;
        for (const auto& node_doc : tree_doc.at("nodes")) {
            TreeNode node;
            node.feature = node_doc.at("feature").get<int>();
            node.threshold = node_doc.at("threshold").get<double>();
            node.left = node_doc.at("left").get<int>();
            node.right = node_doc.at("right").get<int>();
            node.value = node_doc.at("value").get<double>();
            if (!node_doc.contains("cover")) throw MissingCover("node without cover");
            node.cover = node_doc.at("cover").get<double>();
            tree.nodes.push_back(node);
        }
        if (tree.nodes.empty()) throw MalformedRecord("tree with no nodes");
        for (const auto& node : tree.nodes) {
            if (node.cover < 1.0) throw MissingCover("node cover < 1");
            if (!node.is_leaf()) {
                int n = static_cast<int>(tree.nodes.size());
                if (node.left >= n || node.right < 0 || node.right >= n)
                    throw MalformedRecord("child index out of range");
            }
        }
        ensemble.trees.push_back(std::move(tree));
    }
    if (ensemble.trees.empty()) throw MalformedRecord("ensemble with no trees");
    return ensemble;
}

void save_ensemble(const std::string& path, const TreeEnsemble& ensemble) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write model file: " + path);
    out << ensemble_to_json(ensemble).dump(2) << "\n";
}

TreeEnsemble load_ensemble(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model file: " + path);
    nlohmann::json doc;
    in >> doc;
    return ensemble_from_json(doc);
}

}  // namespace wealthmap
