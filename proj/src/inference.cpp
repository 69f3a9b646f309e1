#include "causalreg/inference.hpp"

#include "causalreg/error.hpp"
#include "causalreg/parallel.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>

namespace causalreg {

namespace {

void check_level(double level) {
    if (!(level > 0.0 && level < 1.0)) {
        throw InvalidInput("confidence level must lie in (0, 1)");
    }
}

Matrix drop_column(const Matrix& X, Index j) {
    Matrix out(X.rows(), X.cols() - 1);
    out.leftCols(j) = X.leftCols(j);
    out.rightCols(X.cols() - j - 1) = X.rightCols(X.cols() - j - 1);
    return out;
}

double choose_lambda(const Matrix& X, const Vector& y, const LambdaChoice& choice, int threads) {
    if (!choice.is_cv()) return choice.value;
    std::vector<double> grid = default_lambda_grid(X, y, choice.grid_size);
    const CvResult cv = cv_lasso(X, y, choice.folds, std::move(grid), {}, choice.seed, threads);
    return choice.rule == LambdaChoice::Rule::Cv1se ? cv.lambda_1se : cv.lambda_min;
}

DdLassoConfig identity_config(const LambdaChoice& ly, const LambdaChoice& lz, double level) {
    DdLassoConfig cfg;
    cfg.transform_y = IdentityKind{};
    cfg.transform_nodewise = IdentityKind{};
    cfg.lambda_y = ly;
    cfg.lambda_nodewise = lz;
    cfg.confidence_level = level;
    return cfg;
}

} // namespace

const char* method_name(InferenceMethod m) {
    return m == InferenceMethod::Debiased ? "debiased" : "doubly_debiased";
}

double two_sided_p_value(double z) {
    return std::erfc(std::abs(z) / std::sqrt(2.0));
}

double normal_quantile(double prob) {
    return boost::math::quantile(boost::math::normal_distribution<double>(), prob);
}

NodewiseFit nodewise_fit(const Matrix& X, Index j, const TransformKind& kind,
                         const LambdaChoice& lambda, int threads) {
    const Index p = X.cols();
    if (p < 2) throw InvalidInput("nodewise regression needs p >= 2");
    if (j < 0 || j >= p) throw InvalidInput("nodewise regression: coordinate out of range");
    require_finite(X, "X");

    const Vector x_mean = column_means(X);
    const Matrix Xc = X.rowwise() - x_mean.transpose();
    if (Xc.col(j).isZero(0.0)) {
        throw DegenerateProblem("nodewise regression: column " + std::to_string(j) + " is constant");
    }
    const Matrix X_rest = drop_column(Xc, j);
    SpectralTransform T = fit_transform(X_rest, kind);
    const Matrix Xt_rest = T.apply(X_rest);
    const Vector xt_j = T.apply(Vector(Xc.col(j)));

    LassoConfig cfg;
    cfg.lambda = choose_lambda(Xt_rest, xt_j, lambda, threads);
    const SparseFit fit = lasso(Xt_rest, xt_j, cfg);
    Vector z = (xt_j - Xt_rest * fit.beta).array() - fit.intercept;
    return NodewiseFit{std::move(z), std::move(T), cfg.lambda, x_mean};
}

Vector nodewise_residual(const Matrix& X, Index j, const TransformKind& kind,
                         const LambdaChoice& lambda) {
    return nodewise_fit(X, j, kind, lambda).z;
}

double debias_bias_estimate(const Vector& z, const Matrix& X_tilde, const Vector& beta_init,
                            Index j) {
    if (z.size() != X_tilde.rows() || beta_init.size() != X_tilde.cols()) {
        throw InvalidInput("debias_bias_estimate: inconsistent shapes");
    }
    const double n = static_cast<double>(z.size());
    const double denom = z.dot(X_tilde.col(j));
    if (!(std::abs(denom) >= 1e-10 * n)) {
        throw InstabilityError("debias: Z^T X_j is numerically zero for coordinate " +
                               std::to_string(j));
    }
    double num = 0.0;
    for (Index k = 0; k < X_tilde.cols(); ++k) {
        if (k == j || beta_init(k) == 0.0) continue;
        num += z.dot(X_tilde.col(k)) * beta_init(k);
    }
    return num / denom;
}

double noise_variance(const Matrix& X_tilde, const Vector& Y_tilde, const Vector& beta,
                      double intercept, double n_eff) {
    const double n = static_cast<double>(Y_tilde.size());
    const double eff = n_eff > 0.0 ? n_eff : n;
    const auto s = static_cast<double>((beta.array() != 0.0).count());
    if (s >= n) throw DegenerateProblem("noise_variance: support size >= n");
    const Vector r = (Y_tilde - X_tilde * beta).array() - intercept;
    const double denom = std::max(eff - s, eff / 2.0);
    return r.squaredNorm() / denom;
}

OutcomeFit fit_outcome(const Matrix& X, const Vector& Y, const TransformKind& kind,
                       const LambdaChoice& lambda, int threads) {
    TransformedData td = transform_data(X, Y, kind);
    LassoConfig cfg;
    cfg.lambda = choose_lambda(td.X, td.Y, lambda, threads);
    const SparseFit fit = lasso(td.X, td.Y, cfg);

    OutcomeFit out;
    out.beta = fit.beta;
    out.lambda = cfg.lambda;
    out.sigma2 = noise_variance(td.X, td.Y, fit.beta, fit.intercept, td.transform.trace_squared());
    out.Xc = X.rowwise() - td.x_mean.transpose();
    out.Yc = Y.array() - td.y_mean;
    return out;
}

InferenceResult infer_coordinate(const OutcomeFit& outcome, Index j, const DdLassoConfig& cfg,
                                 InferenceMethod method, int threads) {
    check_level(cfg.confidence_level);
    const NodewiseFit node =
        nodewise_fit(outcome.Xc, j, cfg.transform_nodewise, cfg.lambda_nodewise, threads);
    const Matrix Xt = node.transform.apply(outcome.Xc);
    const Vector Yt = node.transform.apply(outcome.Yc);
    const Vector& z = node.z;

    const double bias = debias_bias_estimate(z, Xt, outcome.beta, j);
    const double denom = z.dot(Xt.col(j));

    InferenceResult res;
    res.j = j;
    res.method = method;
    res.estimate = z.dot(Yt) / denom - bias;
    // Y enters through F_j, so the noise contribution is Z^T F_j eps.
    const double score_norm = node.transform.apply(z).norm();
    res.sigma = std::sqrt(outcome.sigma2);
    res.se = res.sigma * score_norm / std::abs(denom);
    if (!std::isfinite(res.se) || !(res.se > 0.0)) {
        throw DegenerateProblem("debiased estimate has zero or non-finite standard error");
    }
    const double q = normal_quantile(0.5 + cfg.confidence_level / 2.0);
    res.ci_low = res.estimate - q * res.se;
    res.ci_high = res.estimate + q * res.se;
    res.p_value = two_sided_p_value(res.estimate / res.se);
    res.lambda_y = outcome.lambda;
    res.lambda_nodewise = node.lambda;
    return res;
}

std::vector<InferenceResult> dd_lasso(const Matrix& X, const Vector& Y,
                                      const std::vector<Index>& coords, const DdLassoConfig& cfg,
                                      int threads) {
    check_level(cfg.confidence_level);
    if (X.rows() < 20) throw InvalidInput("dd_lasso: needs n >= 20");
    if (X.rows() != Y.size()) throw InvalidInput("dd_lasso: X and Y are not row-aligned");
    for (const Index j : coords) {
        if (j < 0 || j >= X.cols()) throw InvalidInput("dd_lasso: coordinate out of range");
    }
    const bool identity = std::holds_alternative<IdentityKind>(cfg.transform_y) &&
                          std::holds_alternative<IdentityKind>(cfg.transform_nodewise);
    const InferenceMethod method =
        identity ? InferenceMethod::Debiased : InferenceMethod::DoublyDebiased;

    const OutcomeFit outcome = fit_outcome(X, Y, cfg.transform_y, cfg.lambda_y, threads);
    std::vector<InferenceResult> out(coords.size());
    parallel_for(coords.size(), threads, [&](std::size_t k) {
        out[k] = infer_coordinate(outcome, coords[k], cfg, method, 1);
    });
    return out;
}

InferenceResult dd_lasso(const Matrix& X, const Vector& Y, Index j, const DdLassoConfig& cfg) {
    return dd_lasso(X, Y, std::vector<Index>{j}, cfg, 1).front();
}

InferenceResult debiased_lasso(const Matrix& X, const Vector& Y, Index j,
                               const LambdaChoice& lambda_y, const LambdaChoice& lambda_nodewise,
                               double level) {
    return dd_lasso(X, Y, j, identity_config(lambda_y, lambda_nodewise, level));
}

std::vector<InferenceResult> debiased_lasso(const Matrix& X, const Vector& Y,
                                            const std::vector<Index>& coords,
                                            const LambdaChoice& lambda_y,
                                            const LambdaChoice& lambda_nodewise, double level,
                                            int threads) {
    return dd_lasso(X, Y, coords, identity_config(lambda_y, lambda_nodewise, level), threads);
}

} // namespace causalreg
