#include "causalreg/deconfound.hpp"

#include "causalreg/error.hpp"

#include <cmath>

namespace causalreg {

TransformedData transform_data(const Matrix& X, const Vector& Y, const TransformKind& kind) {
    if (X.rows() != Y.size()) throw InvalidInput("transform_data: X and Y are not row-aligned");
    require_finite(X, "X");
    require_finite(Y, "Y");
    const Vector x_mean = column_means(X);
    const double y_mean = Y.mean();
    const Matrix Xc = X.rowwise() - x_mean.transpose();
    const Vector Yc = Y.array() - y_mean;
    SpectralTransform T = fit_transform(Xc, kind);
    Matrix Xt = T.apply(Xc);
    Vector Yt = T.apply(Yc);
    return TransformedData{std::move(Xt), std::move(Yt), x_mean, y_mean, std::move(T)};
}

namespace {

DeconfoundFit lasso_on_transformed(const TransformedData& td, const TransformKind& kind,
                                   const LambdaChoice& lambda, const LassoConfig& base,
                                   int threads) {
    DeconfoundFit fit;
    fit.transform_kind = kind;
    fit.transform_parameter = td.transform.resolved_parameter();

    LassoConfig cfg = base;
    if (lambda.is_cv()) {
        // The transform already used every row; CV runs on the transformed data as is.
        std::vector<double> grid = default_lambda_grid(td.X, td.Y, lambda.grid_size);
        CvResult cv = cv_lasso(td.X, td.Y, lambda.folds, std::move(grid), base, lambda.seed, threads);
        cfg.lambda = lambda.rule == LambdaChoice::Rule::Cv1se ? cv.lambda_1se : cv.lambda_min;
        fit.cv = std::move(cv);
    } else {
        cfg.lambda = lambda.value;
    }
    fit.lambda = cfg.lambda;
    fit.lasso_fit = lasso(td.X, td.Y, cfg);
    fit.beta = fit.lasso_fit.beta;
    fit.intercept = td.y_mean - td.x_mean.dot(fit.beta);
    return fit;
}

} // namespace

DeconfoundFit spectral_lasso(const Matrix& X, const Vector& Y, const TransformKind& kind,
                             const LambdaChoice& lambda, const LassoConfig& base, int threads) {
    return lasso_on_transformed(transform_data(X, Y, kind), kind, lambda, base, threads);
}

DeconfoundFit trim_lasso(const Matrix& X, const Vector& Y, TrimThreshold tau,
                         const LambdaChoice& lambda, int threads) {
    return spectral_lasso(X, Y, TrimKind{tau}, lambda, {}, threads);
}

DeconfoundFit pca_adjust_lasso(const Matrix& X, const Vector& Y, Index qhat,
                               const LambdaChoice& lambda, int threads) {
    if (qhat < 0 || qhat >= std::min(X.rows(), X.cols())) {
        throw InvalidInput("pca_adjust_lasso: qhat must lie in [0, min(n, p))");
    }
    return spectral_lasso(X, Y, PcaKind{qhat}, lambda, {}, threads);
}

DeconfoundFit lava(const Matrix& X, const Vector& Y, const LambdaChoice& lambda1,
                   LavaParameter lambda2, int threads) {
    if (!lambda2.median_rule && !(lambda2.value > 0.0)) {
        throw InvalidInput("lava: lambda2 must be positive");
    }
    if (!lambda1.is_cv() && !(lambda1.value >= 0.0)) {
        throw InvalidInput("lava: lambda1 must be >= 0");
    }
    const TransformedData td = transform_data(X, Y, LavaKind{lambda2});
    DeconfoundFit fit = lasso_on_transformed(td, LavaKind{lambda2}, lambda1, {}, threads);
    const double l2 = fit.transform_parameter;
    fit.lambda2 = l2;

    // Inner ridge minimiser on the centered data:
    // b = (X^T X / n + l2 I)^{-1} X^T r / n = V diag(d / (d^2 + n l2)) U^T r.
    const Vector& x_mean = td.x_mean;
    const Matrix Xc = X.rowwise() - x_mean.transpose();
    const Vector r = (Y.array() - Y.mean()).matrix() - Xc * fit.beta;
    const SvdFactors& f = td.transform.svd();
    const double n = static_cast<double>(X.rows());
    const Vector w = f.d.array() / (f.d.array().square() + n * l2);
    Vector b = f.V * (w.asDiagonal() * (f.U.transpose() * r));
    fit.intercept = Y.mean() - x_mean.dot(fit.beta + b);
    fit.dense_part = std::move(b);
    return fit;
}

double lava_objective(const Matrix& X, const Vector& Y, const Vector& beta, const Vector& b,
                      double intercept, double lambda1, double lambda2) {
    const Vector r = (Y - X * (beta + b)).array() - intercept;
    return r.squaredNorm() / static_cast<double>(Y.size()) + lambda1 * beta.lpNorm<1>() +
           lambda2 * b.squaredNorm();
}

Vector population_bias(const Matrix& sigma_x, const Matrix& sigma_xh, const Vector& delta) {
    const Index p = sigma_x.rows();
    if (sigma_x.cols() != p || sigma_xh.rows() != p || sigma_xh.cols() != delta.size()) {
        throw InvalidInput("population_bias: inconsistent shapes");
    }
    require_finite(sigma_x, "population_bias");
    Eigen::LLT<Matrix> llt(sigma_x);
    if (llt.info() != Eigen::Success) {
        throw DegenerateProblem("population_bias: Cov(X) is not positive definite");
    }
    const Vector rhs = sigma_xh * delta;
    const Vector b = llt.solve(rhs);
    if (!b.allFinite()) throw DegenerateProblem("population_bias: singular Cov(X)");
    return b;
}

Vector population_bias_one_factor(const Vector& gamma, double xi, double delta) {
    if (!(xi > 0.0)) throw InvalidInput("population_bias_one_factor: xi must be positive");
    // Sherman-Morrison: (g g^T + xi^2 I)^{-1} g = g / (xi^2 + |g|^2)
    return gamma * (delta / (xi * xi + gamma.squaredNorm()));
}

} // namespace causalreg
