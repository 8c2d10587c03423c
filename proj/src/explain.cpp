#include "wealthmap/explain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>

#include <json.hpp>

namespace wealthmap {

namespace {

void check_covers(const TreeEnsemble& ensemble) {
    for (const auto& tree : ensemble.trees)
        for (const auto& node : tree.nodes)
            if (!(node.cover >= 1.0)) throw MissingCover("tree node without a valid cover");
}

double tree_expectation_rec(const RegressionTree& tree, int idx, const double* x,
                            const std::vector<bool>& in_set) {
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(idx)];
    if (node.is_leaf()) return node.value;
    if (in_set[static_cast<std::size_t>(node.feature)]) {
        int next = x[node.feature] <= node.threshold ? node.left : node.right;
        return tree_expectation_rec(tree, next, x, in_set);
    }
    double wl = tree.nodes[static_cast<std::size_t>(node.left)].cover;
    double wr = tree.nodes[static_cast<std::size_t>(node.right)].cover;
    return (wl * tree_expectation_rec(tree, node.left, x, in_set) +
            wr * tree_expectation_rec(tree, node.right, x, in_set)) /
           node.cover;
}

double ensemble_value(const TreeEnsemble& ensemble, const double* x,
                      const std::vector<bool>& in_set) {
    double sum = 0.0;
    for (const auto& tree : ensemble.trees) sum += tree_expectation_rec(tree, 0, x, in_set);
    if (ensemble.combiner == Combiner::Mean)
        return sum / static_cast<double>(ensemble.trees.size());
    return ensemble.base_score + ensemble.learning_rate * sum;
}

}  // namespace

double tree_conditional_expectation(const RegressionTree& tree, const double* x,
                                    const std::vector<bool>& in_set) {
    return tree_expectation_rec(tree, 0, x, in_set);
}

ShapExplanation brute_force_shapley(const TreeEnsemble& ensemble, const std::vector<double>& x,
                                    const std::vector<std::string>& names) {
    std::size_t p = x.size();
    if (p > 15) throw TooManyFeatures("brute force enumeration is limited to p <= 15");
    if (p == 0) throw Error("empty feature vector");
    check_covers(ensemble);

    // v(S) for every subset mask
    std::size_t n_masks = std::size_t{1} << p;
    std::vector<double> value(n_masks);
    std::vector<bool> in_set(p);
    for (std::size_t mask = 0; mask < n_masks; ++mask) {
        for (std::size_t j = 0; j < p; ++j) in_set[j] = (mask >> j) & 1;
        value[mask] = ensemble_value(ensemble, x.data(), in_set);
    }

    std::vector<double> factorial(p + 1, 1.0);
    for (std::size_t i = 1; i <= p; ++i) factorial[i] = factorial[i - 1] * static_cast<double>(i);

    ShapExplanation out;
    out.feature_names = names;
    out.base_value = value[0];
    out.contributions.assign(p, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        std::size_t bit = std::size_t{1} << i;
        for (std::size_t mask = 0; mask < n_masks; ++mask) {
            if (mask & bit) continue;
            std::size_t s = static_cast<std::size_t>(std::popcount(mask));
            double weight = factorial[s] * factorial[p - s - 1] / factorial[p];
            out.contributions[i] += weight * (value[mask | bit] - value[mask]);
        }
    }
    out.prediction = ensemble.predict(x.data());
    return out;
}

namespace {

struct PathElement {
    int feature = -1;
    double zero_fraction = 1.0;  // share of cover flowing down when excluded
    double one_fraction = 1.0;   // 1 when x follows this split, else 0
    double pweight = 0.0;
};

void extend_path(std::vector<PathElement>& path, double zero_fraction, double one_fraction,
                 int feature) {
    int len = static_cast<int>(path.size());
    path.push_back({feature, zero_fraction, one_fraction, len == 0 ? 1.0 : 0.0});
    for (int i = len - 1; i >= 0; --i) {
        path[static_cast<std::size_t>(i + 1)].pweight +=
            one_fraction * path[static_cast<std::size_t>(i)].pweight *
            static_cast<double>(i + 1) / static_cast<double>(len + 1);
        path[static_cast<std::size_t>(i)].pweight =
            zero_fraction * path[static_cast<std::size_t>(i)].pweight *
            static_cast<double>(len - i) / static_cast<double>(len + 1);
    }
}

void unwind_path(std::vector<PathElement>& path, int index) {
    int len = static_cast<int>(path.size()) - 1;
    double one_fraction = path[static_cast<std::size_t>(index)].one_fraction;
    double zero_fraction = path[static_cast<std::size_t>(index)].zero_fraction;
    double next = path[static_cast<std::size_t>(len)].pweight;
    for (int j = len - 1; j >= 0; --j) {
        if (one_fraction != 0.0) {
            double tmp = path[static_cast<std::size_t>(j)].pweight;
            path[static_cast<std::size_t>(j)].pweight =
                next * static_cast<double>(len + 1) /
                (static_cast<double>(j + 1) * one_fraction);
            next = tmp - path[static_cast<std::size_t>(j)].pweight * zero_fraction *
                             static_cast<double>(len - j) / static_cast<double>(len + 1);
        } else {
            path[static_cast<std::size_t>(j)].pweight =
                path[static_cast<std::size_t>(j)].pweight * static_cast<double>(len + 1) /
                (zero_fraction * static_cast<double>(len - j));
        }
    }
    for (int j = index; j < len; ++j) {
        path[static_cast<std::size_t>(j)].feature = path[static_cast<std::size_t>(j + 1)].feature;
        path[static_cast<std::size_t>(j)].zero_fraction =
            path[static_cast<std::size_t>(j + 1)].zero_fraction;
        path[static_cast<std::size_t>(j)].one_fraction =
            path[static_cast<std::size_t>(j + 1)].one_fraction;
    }
    path.pop_back();
}

double unwound_sum(const std::vector<PathElement>& path, int index) {
    int len = static_cast<int>(path.size()) - 1;
    double one_fraction = path[static_cast<std::size_t>(index)].one_fraction;
    double zero_fraction = path[static_cast<std::size_t>(index)].zero_fraction;
    double total = 0.0;
    double next = path[static_cast<std::size_t>(len)].pweight;
    for (int j = len - 1; j >= 0; --j) {
        if (one_fraction != 0.0) {
            double tmp = next * static_cast<double>(len + 1) /
                         (static_cast<double>(j + 1) * one_fraction);
            total += tmp;
            next = path[static_cast<std::size_t>(j)].pweight -
                   tmp * zero_fraction * static_cast<double>(len - j) /
                       static_cast<double>(len + 1);
        } else {
            total += path[static_cast<std::size_t>(j)].pweight * static_cast<double>(len + 1) /
                     (zero_fraction * static_cast<double>(len - j));
        }
    }
    return total;
}

void shap_recurse(const RegressionTree& tree, const double* x, std::vector<double>& phi,
                  int node_idx, std::vector<PathElement> path, double zero_fraction,
                  double one_fraction, int parent_feature) {
    extend_path(path, zero_fraction, one_fraction, parent_feature);
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(node_idx)];
    if (node.is_leaf()) {
        for (std::size_t i = 1; i < path.size(); ++i)
            phi[static_cast<std::size_t>(path[i].feature)] +=
                unwound_sum(path, static_cast<int>(i)) *
                (path[i].one_fraction - path[i].zero_fraction) * node.value;
        return;
    }
    int hot = x[node.feature] <= node.threshold ? node.left : node.right;
    int cold = hot == node.left ? node.right : node.left;
    double incoming_zero = 1.0, incoming_one = 1.0;
    for (std::size_t k = 1; k < path.size(); ++k) {
        if (path[k].feature == node.feature) {
            incoming_zero = path[k].zero_fraction;
            incoming_one = path[k].one_fraction;
            unwind_path(path, static_cast<int>(k));
            break;
        }
    }
    double hot_cover = tree.nodes[static_cast<std::size_t>(hot)].cover;
    double cold_cover = tree.nodes[static_cast<std::size_t>(cold)].cover;
    shap_recurse(tree, x, phi, hot, path, incoming_zero * hot_cover / node.cover, incoming_one,
                 node.feature);
    shap_recurse(tree, x, phi, cold, std::move(path), incoming_zero * cold_cover / node.cover,
                 0.0, node.feature);
}

}  // namespace

ShapExplanation tree_shap(const TreeEnsemble& ensemble, const std::vector<double>& x,
                          const std::vector<std::string>& names) {
    if (x.empty()) throw Error("empty feature vector");
    check_covers(ensemble);

    std::size_t p = x.size();
    ShapExplanation out;
    out.feature_names = names;
    out.contributions.assign(p, 0.0);

    double weight = ensemble.combiner == Combiner::Mean
                        ? 1.0 / static_cast<double>(ensemble.trees.size())
                        : ensemble.learning_rate;
    double base = ensemble.combiner == Combiner::Mean ? 0.0 : ensemble.base_score;

    std::vector<double> phi(p, 0.0);
    for (const auto& tree : ensemble.trees) {
        std::fill(phi.begin(), phi.end(), 0.0);
        shap_recurse(tree, x.data(), phi, 0, {}, 1.0, 1.0, -1);
        for (std::size_t j = 0; j < p; ++j) out.contributions[j] += weight * phi[j];

        // cover-weighted expectation of the tree = v(empty) for this tree
        double expectation = 0.0;
        for (const auto& node : tree.nodes)
            if (node.is_leaf()) expectation += node.cover * node.value;
        base += weight * expectation / tree.nodes[0].cover;
    }
    out.base_value = base;
    out.prediction = ensemble.predict(x.data());
    return out;
}

GlobalImportance global_importance(const std::vector<ShapExplanation>& explanations,
                                   const FeatureMatrix& features) {
    if (explanations.empty()) throw Error("no explanations to summarize");
    std::size_t p = explanations.front().contributions.size();
    if (explanations.size() != features.n_rows() || p != features.n_cols())
        throw DimensionMismatch("explanations do not align with the feature matrix");
    for (const auto& e : explanations)
        if (e.contributions.size() != p)
            throw DimensionMismatch("inconsistent feature sets across explanations");

    GlobalImportance out;
    for (std::size_t j = 0; j < p; ++j) {
        FeatureImportance fi;
        fi.feature = features.col_names[j];
        for (std::size_t r = 0; r < explanations.size(); ++r) {
            double shap = explanations[r].contributions[j];
            fi.mean_abs_shap += std::fabs(shap);
            fi.scatter.emplace_back(features.at(r, j), shap);
        }
        fi.mean_abs_shap /= static_cast<double>(explanations.size());
        out.features.push_back(std::move(fi));
    }
    std::stable_sort(out.features.begin(), out.features.end(),
                     [](const FeatureImportance& a, const FeatureImportance& b) {
                         return a.mean_abs_shap > b.mean_abs_shap;
                     });
    return out;
}

ForcePlotData force_plot_data(const ShapExplanation& explanation, const std::vector<double>& x) {
    if (x.size() != explanation.contributions.size())
        throw DimensionMismatch("feature vector does not match explanation");
    ForcePlotData out;
    out.base_value = explanation.base_value;
    out.prediction = explanation.prediction;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (explanation.contributions[j] == 0.0) continue;
        out.arrows.push_back(
            ForceArrow{explanation.feature_names[j], x[j], explanation.contributions[j]});
    }
    std::stable_sort(out.arrows.begin(), out.arrows.end(),
                     [](const ForceArrow& a, const ForceArrow& b) {
                         return std::fabs(a.contribution) > std::fabs(b.contribution);
                     });
    return out;
}

void write_shap_csv(const std::string& path, const std::vector<std::string>& row_ids,
                    const std::vector<ShapExplanation>& explanations,
                    const FeatureMatrix& features) {
    if (row_ids.size() != explanations.size())
        throw DimensionMismatch("row ids do not match explanations");
    std::ofstream out(path);
    if (!out) throw Error("cannot write: " + path);
    out << std::setprecision(17);
    out << "cluster_id,feature,feature_value,shap_value\n";
    for (std::size_t r = 0; r < explanations.size(); ++r) {
        const auto& e = explanations[r];
        for (std::size_t j = 0; j < e.contributions.size(); ++j)
            out << row_ids[r] << ',' << e.feature_names[j] << ',' << features.at(r, j) << ','
                << e.contributions[j] << "\n";
    }
    nlohmann::json sidecar;
    sidecar["base_value"] = explanations.front().base_value;
    std::ofstream side(path + ".base.json");
    side << sidecar.dump(2) << "\n";
}

void write_global_importance_csv(const std::string& path, const GlobalImportance& importance) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write: " + path);
    out << std::setprecision(17);
    out << "rank,feature,mean_abs_shap\n";
    for (std::size_t i = 0; i < importance.features.size(); ++i)
        out << (i + 1) << ',' << importance.features[i].feature << ','
            << importance.features[i].mean_abs_shap << "\n";
}

}  // namespace wealthmap
