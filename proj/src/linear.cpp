#include "wealthmap/linear.hpp"

#include <cmath>

namespace wealthmap {

void Dataset::validate() const {
    if (n < 2) throw TooFewRows("dataset needs n >= 2");
    if (x.size() != n * p) throw DimensionMismatch("x size != n*p");
    if (y.size() != n) throw DimensionMismatch("y size != n");
    if (col_names.size() != p) throw DimensionMismatch("col_names size != p");
    for (double v : x)
        if (std::isnan(v)) throw DimensionMismatch("dataset contains missing values");
}

Dataset make_dataset(const FeatureMatrix& features, const std::vector<double>& target) {
    if (features.n_rows() != target.size())
        throw DimensionMismatch("feature matrix rows != target length");
    Dataset d;
    d.row_ids = features.row_ids;
    d.col_names = features.col_names;
    d.x = features.cells;
    d.y = target;
    d.n = features.n_rows();
    d.p = features.n_cols();
    d.validate();
    return d;
}

double LinearModel::predict(const double* row) const {
    double s = intercept;
    for (std::size_t j = 0; j < coefficients.size(); ++j) s += coefficients[j] * row[j];
    return s;
}

namespace {

// Gaussian elimination with partial pivoting; a is q x q row-major.
std::vector<double> solve_linear_system(std::vector<double> a, std::vector<double> b,
                                        std::size_t q) {
    for (std::size_t col = 0; col < q; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < q; ++r)
            if (std::fabs(a[r * q + col]) > std::fabs(a[pivot * q + col])) pivot = r;
        if (std::fabs(a[pivot * q + col]) < 1e-10)
            throw SingularSystem("rank-deficient normal equations");
        if (pivot != col) {
            for (std::size_t c = 0; c < q; ++c) std::swap(a[col * q + c], a[pivot * q + c]);
            std::swap(b[col], b[pivot]);
        }
        double d = a[col * q + col];
        for (std::size_t r = col + 1; r < q; ++r) {
            double f = a[r * q + col] / d;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < q; ++c) a[r * q + c] -= f * a[col * q + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> beta(q, 0.0);
    for (std::size_t ri = q; ri-- > 0;) {
        double s = b[ri];
        for (std::size_t c = ri + 1; c < q; ++c) s -= a[ri * q + c] * beta[c];
        beta[ri] = s / a[ri * q + ri];
    }
    return beta;
}

}  // namespace

LinearModel fit_linear_family(const Dataset& data, LinearKind kind, double lambda) {
    data.validate();
    if (lambda < 0.0) throw Error("lambda must be >= 0");
    if (kind == LinearKind::Ols) lambda = 0.0;

    std::size_t n = data.n, p = data.p;
    std::vector<double> mean(p, 0.0), scale(p, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) mean[j] += data.at(i, j);
    for (std::size_t j = 0; j < p; ++j) mean[j] /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            double d = data.at(i, j) - mean[j];
            scale[j] += d * d;
        }
    std::vector<bool> constant(p, false);
    for (std::size_t j = 0; j < p; ++j) {
        scale[j] = std::sqrt(scale[j] / static_cast<double>(n));
        if (scale[j] < 1e-12) {
            constant[j] = true;
            scale[j] = 1.0;  // column becomes all-zero after centering
        }
    }

    double y_mean = 0.0;
    for (double v : data.y) y_mean += v;
    y_mean /= static_cast<double>(n);

    std::vector<double> z(n * p);
    std::vector<double> yc(n);
    for (std::size_t i = 0; i < n; ++i) {
        yc[i] = data.y[i] - y_mean;
        for (std::size_t j = 0; j < p; ++j)
            z[i * p + j] = constant[j] ? 0.0 : (data.at(i, j) - mean[j]) / scale[j];
    }

    std::vector<double> beta(p, 0.0);
    if (kind == LinearKind::Ols || kind == LinearKind::Ridge) {
        if (kind == LinearKind::Ols)
            for (std::size_t j = 0; j < p; ++j)
                if (constant[j]) throw SingularSystem("constant feature column under OLS");
        std::vector<double> gram(p * p, 0.0), zty(p, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double* zi = z.data() + i * p;
            for (std::size_t a = 0; a < p; ++a) {
                zty[a] += zi[a] * yc[i];
                for (std::size_t b = a; b < p; ++b) gram[a * p + b] += zi[a] * zi[b];
            }
        }
        for (std::size_t a = 0; a < p; ++a) {
            gram[a * p + a] += lambda;
            for (std::size_t b = a + 1; b < p; ++b) gram[b * p + a] = gram[a * p + b];
        }
        beta = solve_linear_system(std::move(gram), std::move(zty), p);
    } else {
        // cyclic coordinate descent with soft thresholding
        std::vector<double> col_sq(p, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < p; ++j) col_sq[j] += z[i * p + j] * z[i * p + j];
        std::vector<double> resid = yc;  // y - Z beta, beta starts at 0
        double dn = static_cast<double>(n);
        for (int sweep = 0; sweep < 10000; ++sweep) {
            double max_change = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                if (col_sq[j] < 1e-24) continue;
                double rho = 0.0;
                for (std::size_t i = 0; i < n; ++i) rho += z[i * p + j] * resid[i];
                rho = rho / dn + col_sq[j] / dn * beta[j];
                double updated;
                if (rho > lambda) updated = (rho - lambda) * dn / col_sq[j];
                else if (rho < -lambda) updated = (rho + lambda) * dn / col_sq[j];
                else updated = 0.0;
                double delta = updated - beta[j];
                if (delta != 0.0) {
                    for (std::size_t i = 0; i < n; ++i) resid[i] -= delta * z[i * p + j];
                    beta[j] = updated;
                    max_change = std::max(max_change, std::fabs(delta));
                }
            }
            if (max_change < 1e-8) break;
        }
    }

    LinearModel model;
    model.kind = kind;
    model.lambda = lambda;
    model.std_coefficients = beta;
    model.coefficients.assign(p, 0.0);
    model.intercept = y_mean;
    for (std::size_t j = 0; j < p; ++j) {
        if (constant[j]) continue;
        model.coefficients[j] = beta[j] / scale[j];
        model.intercept -= model.coefficients[j] * mean[j];
    }
    return model;
}

}  // namespace wealthmap
