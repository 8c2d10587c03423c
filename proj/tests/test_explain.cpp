#include <doctest.h>

#include <cmath>
#include <numeric>

#include "wealthmap/explain.hpp"
#include "wealthmap/rng.hpp"

using namespace wealthmap;

namespace {

// depth-1 stump: x0 <= thr ? lo : hi, with left/right covers
RegressionTree stump(double thr, double lo, double hi, double cover_left, double cover_right,
                     int feature = 0) {
    RegressionTree t;
    TreeNode root;
    root.feature = feature;
    root.threshold = thr;
    root.left = 1;
    root.right = 2;
    root.cover = cover_left + cover_right;
    TreeNode l, r;
    l.value = lo;
    l.cover = cover_left;
    r.value = hi;
    r.cover = cover_right;
    t.nodes = {root, l, r};
    return t;
}

TreeEnsemble single(const RegressionTree& t) {
    TreeEnsemble e;
    e.trees = {t};
    return e;
}

Dataset random_dataset(std::uint64_t seed, std::size_t n, std::size_t p) {
    RngStream rng(seed);
    Dataset d;
    d.n = n;
    d.p = p;
    for (std::size_t j = 0; j < p; ++j) d.col_names.push_back("f" + std::to_string(j));
    for (std::size_t i = 0; i < n; ++i) {
        d.row_ids.push_back(std::to_string(i));
        double y = 0.1 * rng.normal();
        for (std::size_t j = 0; j < p; ++j) {
            double v = rng.normal();
            d.x.push_back(v);
            y += v * static_cast<double>(j + 1);
        }
        d.y.push_back(y);
    }
    return d;
}

std::vector<std::string> names(std::size_t p) {
    std::vector<std::string> out;
    for (std::size_t j = 0; j < p; ++j) out.push_back("f" + std::to_string(j));
    return out;
}

}  // namespace

TEST_CASE("conditional expectation follows x or averages by cover") {
    RegressionTree t = stump(0.5, 1.0, 5.0, 3.0, 1.0);
    double x = 0.7;  // routes right
    CHECK(tree_conditional_expectation(t, &x, {true}) == 5.0);
    // feature excluded: cover-weighted mean (3*1 + 1*5)/4 = 2
    CHECK(tree_conditional_expectation(t, &x, {false}) == doctest::Approx(2.0));
    double x2 = 0.2;
    CHECK(tree_conditional_expectation(t, &x2, {true}) == 1.0);
}

TEST_CASE("hand-worked stump shap values") {
    // equal covers, leaves 0 and 1, x on the right: base 0.5, phi_0 = +0.5
    TreeEnsemble e = single(stump(0.5, 0.0, 1.0, 2.0, 2.0));
    ShapExplanation ex = tree_shap(e, {0.7}, names(1));
    CHECK(ex.base_value == doctest::Approx(0.5));
    CHECK(ex.contributions[0] == doctest::Approx(0.5));
    CHECK(ex.prediction == doctest::Approx(1.0));

    // skewed covers 3:1 toward the low leaf
    TreeEnsemble skew = single(stump(0.5, 0.0, 1.0, 3.0, 1.0));
    ShapExplanation sx = tree_shap(skew, {0.7}, names(1));
    CHECK(sx.base_value == doctest::Approx(0.25));
    CHECK(sx.contributions[0] == doctest::Approx(0.75));
}

TEST_CASE("single leaf contributes nothing") {
    RegressionTree leaf;
    TreeNode n;
    n.value = 4.25;
    n.cover = 10.0;
    leaf.nodes = {n};
    ShapExplanation ex = tree_shap(single(leaf), {1.0, 2.0}, names(2));
    CHECK(ex.base_value == 4.25);
    CHECK(ex.prediction == 4.25);
    CHECK(ex.contributions[0] == 0.0);
    CHECK(ex.contributions[1] == 0.0);
}

TEST_CASE("brute force shapley on one feature is prediction minus base") {
    TreeEnsemble e = single(stump(0.0, -2.0, 6.0, 1.0, 3.0));
    ShapExplanation ex = brute_force_shapley(e, {-1.0}, names(1));
    CHECK(ex.base_value == doctest::Approx(4.0));  // (1*-2 + 3*6)/4
    CHECK(ex.contributions[0] == doctest::Approx(-6.0));
    CHECK(ex.prediction == doctest::Approx(-2.0));
}

TEST_CASE("tree shap equals brute force on random forests") {
    RngStream rng(501);
    for (int trial = 0; trial < 12; ++trial) {
        std::size_t p = 2 + rng.below(4);  // 2..5 features
        Dataset d = random_dataset(600 + static_cast<std::uint64_t>(trial), 60, p);
        ForestParams fp;
        fp.n_trees = 5;
        fp.max_depth = 4;
        fp.min_samples_leaf = 2;
        fp.seed = 700 + static_cast<std::uint64_t>(trial);
        TreeEnsemble forest = fit_random_forest(d, fp);
        for (int probe = 0; probe < 5; ++probe) {
            std::vector<double> x(p);
            for (auto& v : x) v = rng.normal();
            ShapExplanation fast = tree_shap(forest, x, names(p));
            ShapExplanation slow = brute_force_shapley(forest, x, names(p));
            CHECK(std::fabs(fast.base_value - slow.base_value) < 1e-9);
            for (std::size_t j = 0; j < p; ++j)
                CHECK(std::fabs(fast.contributions[j] - slow.contributions[j]) < 1e-9);
        }
    }
}

TEST_CASE("local accuracy: contributions sum to prediction minus base") {
    Dataset d = random_dataset(801, 80, 4);
    GbdtParams gp;
    gp.n_stages = 30;
    gp.max_depth = 3;
    gp.seed = 9;
    TreeEnsemble m = fit_gbdt(d, gp);
    RngStream rng(802);
    for (int probe = 0; probe < 20; ++probe) {
        std::vector<double> x = {rng.normal(), rng.normal(), rng.normal(), rng.normal()};
        ShapExplanation ex = tree_shap(m, x, names(4));
        double total = std::accumulate(ex.contributions.begin(), ex.contributions.end(), 0.0);
        CHECK(ex.base_value + total == doctest::Approx(ex.prediction).epsilon(1e-9));
        CHECK(ex.prediction == doctest::Approx(m.predict(x.data())).epsilon(1e-12));
    }
}

TEST_CASE("symmetric duplicate features earn equal credit") {
    // two trees splitting identically on different features; any input sees
    // the same marginal contribution from both
    TreeEnsemble e;
    e.trees = {stump(0.0, -1.0, 1.0, 2.0, 2.0, 0), stump(0.0, -1.0, 1.0, 2.0, 2.0, 1)};
    ShapExplanation ex = brute_force_shapley(e, {0.5, 0.5}, names(2));
    CHECK(ex.contributions[0] == doctest::Approx(ex.contributions[1]).epsilon(1e-12));
    ShapExplanation fast = tree_shap(e, {0.5, 0.5}, names(2));
    CHECK(fast.contributions[0] == doctest::Approx(fast.contributions[1]).epsilon(1e-12));
}

TEST_CASE("a feature the model never splits on gets exactly zero") {
    Dataset d = random_dataset(901, 60, 2);
    // append a dummy third feature column the trees never see
    ForestParams fp;
    fp.n_trees = 8;
    fp.mtry = 2;
    fp.seed = 13;
    TreeEnsemble forest = fit_random_forest(d, fp);
    ShapExplanation ex = tree_shap(forest, {0.3, -0.8, 99.0}, names(3));
    CHECK(ex.contributions[2] == 0.0);
}

TEST_CASE("shap is additive across trees") {
    Dataset d = random_dataset(911, 70, 3);
    GbdtParams gp;
    gp.n_stages = 4;
    gp.learning_rate = 0.5;
    gp.seed = 3;
    TreeEnsemble m = fit_gbdt(d, gp);
    std::vector<double> x = {0.1, -0.4, 1.2};
    ShapExplanation whole = tree_shap(m, x, names(3));

    std::vector<double> summed(3, 0.0);
    for (const RegressionTree& t : m.trees) {
        TreeEnsemble one;
        one.trees = {t};
        one.combiner = Combiner::Sum;
        one.learning_rate = m.learning_rate;
        ShapExplanation part = tree_shap(one, x, names(3));
        for (std::size_t j = 0; j < 3; ++j) summed[j] += part.contributions[j];
    }
    for (std::size_t j = 0; j < 3; ++j)
        CHECK(whole.contributions[j] == doctest::Approx(summed[j]).epsilon(1e-9));
}

TEST_CASE("global importance ranks by mean absolute shap") {
    FeatureMatrix fm;
    fm.row_ids = {"a", "b"};
    fm.col_names = {"weak", "strong"};
    fm.col_groups = {SourceGroup::RS, SourceGroup::RS};
    fm.cells = {1.0, 2.0, 3.0, 4.0};
    ShapExplanation e1;
    e1.feature_names = fm.col_names;
    e1.contributions = {0.1, -2.0};
    ShapExplanation e2 = e1;
    e2.contributions = {-0.3, 1.0};
    GlobalImportance gi = global_importance({e1, e2}, fm);
    REQUIRE(gi.features.size() == 2);
    CHECK(gi.features[0].feature == "strong");
    CHECK(gi.features[0].mean_abs_shap == doctest::Approx(1.5));
    CHECK(gi.features[1].mean_abs_shap == doctest::Approx(0.2));
    REQUIRE(gi.features[0].scatter.size() == 2);
    CHECK(gi.features[0].scatter[0].first == 2.0);
    CHECK(gi.features[0].scatter[0].second == -2.0);
}

TEST_CASE("force plot arrows drop zeros and sort by magnitude") {
    ShapExplanation ex;
    ex.base_value = 1.0;
    ex.prediction = 1.4;
    ex.feature_names = {"a", "b", "c"};
    ex.contributions = {0.1, 0.0, -0.7};
    ForcePlotData fp = force_plot_data(ex, {5.0, 6.0, 7.0});
    CHECK(fp.base_value == 1.0);
    CHECK(fp.prediction == 1.4);
    REQUIRE(fp.arrows.size() == 2);
    CHECK(fp.arrows[0].feature == "c");
    CHECK(fp.arrows[0].feature_value == 7.0);
    CHECK(fp.arrows[0].contribution == -0.7);
    CHECK(fp.arrows[1].feature == "a");
}
