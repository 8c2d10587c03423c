#include "wealthmap/cv.hpp"

#include <cmath>
#include <numeric>

#include "wealthmap/rng.hpp"

namespace wealthmap {

std::string model_family_name(ModelFamily family) {
    switch (family) {
        case ModelFamily::Ols: return "ols";
        case ModelFamily::Ridge: return "ridge";
        case ModelFamily::Lasso: return "lasso";
        case ModelFamily::RandomForest: return "random_forest";
        case ModelFamily::Gbdt: return "gbdt";
    }
    return "?";
}

ModelFamily parse_model_family(const std::string& name) {
    if (name == "ols" || name == "linear") return ModelFamily::Ols;
    if (name == "ridge") return ModelFamily::Ridge;
    if (name == "lasso") return ModelFamily::Lasso;
    if (name == "random_forest" || name == "forest") return ModelFamily::RandomForest;
    if (name == "gbdt" || name == "lightgbm") return ModelFamily::Gbdt;
    throw MalformedRecord("unknown model family: " + name);
}

double FittedModel::predict(const double* row) const {
    return std::visit([&](const auto& m) { return m.predict(row); }, model);
}

std::vector<double> FittedModel::importance(std::size_t p) const {
    if (const auto* ensemble = std::get_if<TreeEnsemble>(&model))
        return ensemble->gain_importance(p);
    const auto& linear = std::get<LinearModel>(model);
    std::vector<double> imp(p, 0.0);
    for (std::size_t j = 0; j < p && j < linear.std_coefficients.size(); ++j)
        imp[j] = std::fabs(linear.std_coefficients[j]);
    return imp;
}

FittedModel fit_model(const Dataset& data, const ModelSpec& spec) {
    switch (spec.family) {
        case ModelFamily::Ols:
            return {fit_linear_family(data, LinearKind::Ols, 0.0)};
        case ModelFamily::Ridge:
            return {fit_linear_family(data, LinearKind::Ridge, spec.lambda)};
        case ModelFamily::Lasso:
            return {fit_linear_family(data, LinearKind::Lasso, spec.lambda)};
        case ModelFamily::RandomForest:
            return {fit_random_forest(data, spec.forest)};
        case ModelFamily::Gbdt:
            return {fit_gbdt(data, spec.gbdt)};
    }
    throw Error("unreachable model family");
}

double r_squared(const std::vector<double>& y, const std::vector<double>& yhat) {
    if (y.size() != yhat.size()) throw DimensionMismatch("y and yhat lengths differ");
    if (y.size() < 2) throw TooFewRows("r_squared needs >= 2 points");
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double r = y[i] - yhat[i];
        double d = y[i] - mean;
        ss_res += r * r;
        ss_tot += d * d;
    }
    if (ss_tot <= 0.0) throw ZeroVarianceTarget("target has zero variance");
    return 1.0 - ss_res / ss_tot;
}

std::vector<std::size_t> fold_sizes(std::size_t n, int k) {
    std::vector<std::size_t> sizes(static_cast<std::size_t>(k), n / static_cast<std::size_t>(k));
    for (std::size_t f = 0; f < n % static_cast<std::size_t>(k); ++f) ++sizes[f];
    return sizes;
}

std::vector<double> imputation_means(const FeatureMatrix& features,
                                     const std::vector<int>& train_rows) {
    std::vector<double> means(features.n_cols(), 0.0);
    for (std::size_t c = 0; c < features.n_cols(); ++c) {
        double sum = 0.0;
        std::size_t count = 0;
        for (int r : train_rows) {
            double v = features.at(static_cast<std::size_t>(r), c);
            if (!FeatureMatrix::is_missing(v)) {
                sum += v;
                ++count;
            }
        }
        if (count == 0)
            throw AllMissingColumn("training fold has no observed values in column " +
                                   features.col_names[c]);
        means[c] = sum / static_cast<double>(count);
    }
    return means;
}

namespace {

Dataset subset_dataset(const FeatureMatrix& features, const std::vector<double>& target,
                       const std::vector<int>& rows, const std::vector<double>& impute) {
    Dataset d;
    d.col_names = features.col_names;
    d.p = features.n_cols();
    d.n = rows.size();
    d.x.reserve(d.n * d.p);
    for (int r : rows) {
        d.row_ids.push_back(features.row_ids[static_cast<std::size_t>(r)]);
        d.y.push_back(target[static_cast<std::size_t>(r)]);
        for (std::size_t c = 0; c < d.p; ++c) {
            double v = features.at(static_cast<std::size_t>(r), c);
            d.x.push_back(FeatureMatrix::is_missing(v) ? impute[c] : v);
        }
    }
    return d;
}

}  // namespace

CvReport k_fold_cv(const FeatureMatrix& features, const std::vector<double>& target,
                   const ModelSpec& spec, int k, std::uint64_t seed) {
    std::size_t n = features.n_rows();
    if (target.size() != n) throw DimensionMismatch("target length != rows");
    if (k < 2) throw Error("k must be >= 2");
    if (n < static_cast<std::size_t>(k)) throw TooFewRows("need n >= k rows");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    RngStream rng(seed);
    rng.shuffle(order);

    auto sizes = fold_sizes(n, k);
    CvReport report;
    report.oof_predictions.assign(n, 0.0);
    report.fold_of_row.assign(n, -1);

    std::size_t cursor = 0;
    for (int fold = 0; fold < k; ++fold) {
        std::vector<int> test_rows(order.begin() + static_cast<std::ptrdiff_t>(cursor),
                                   order.begin() + static_cast<std::ptrdiff_t>(cursor + sizes[static_cast<std::size_t>(fold)]));
        cursor += sizes[static_cast<std::size_t>(fold)];
        std::vector<int> train_rows;
        train_rows.reserve(n - test_rows.size());
        for (int fold2 = 0, pos = 0; fold2 < k; ++fold2) {
            int len = static_cast<int>(sizes[static_cast<std::size_t>(fold2)]);
            if (fold2 != fold)
                train_rows.insert(train_rows.end(), order.begin() + pos, order.begin() + pos + len);
            pos += len;
        }

        auto impute = imputation_means(features, train_rows);
        Dataset train = subset_dataset(features, target, train_rows, impute);
        FittedModel model = fit_model(train, spec);

        Dataset test = subset_dataset(features, target, test_rows, impute);
        std::vector<double> yhat(test.n), ytrue(test.n);
        for (std::size_t i = 0; i < test.n; ++i) {
            yhat[i] = model.predict(test.row(i));
            ytrue[i] = test.y[i];
            report.oof_predictions[static_cast<std::size_t>(test_rows[i])] = yhat[i];
            report.fold_of_row[static_cast<std::size_t>(test_rows[i])] = fold;
        }
        report.fold_r2.push_back(r_squared(ytrue, yhat));
    }
    report.pooled_r2 = r_squared(target, report.oof_predictions);
    return report;
}

}  // namespace wealthmap
