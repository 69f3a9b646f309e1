#pragma once

#include "causalreg/lasso.hpp"
#include "causalreg/spectral.hpp"

#include <cstdint>
#include <optional>

namespace causalreg {

/// Either a fixed lambda or K-fold cross-validation on the transformed data.
struct LambdaChoice {
    enum class Rule { Fixed, CvMin, Cv1se };
    Rule rule = Rule::CvMin;
    double value = 0.0;
    int folds = 10;
    std::uint64_t seed = 0;
    int grid_size = 50;

    static LambdaChoice fixed(double lambda) { return {Rule::Fixed, lambda}; }
    static LambdaChoice cv(std::uint64_t seed = 0, int folds = 10) {
        return {Rule::CvMin, 0.0, folds, seed};
    }
    bool is_cv() const { return rule != Rule::Fixed; }
};

/// Centered data pushed through a spectral transform fitted on the centered X.
struct TransformedData {
    Matrix X;
    Vector Y;
    Vector x_mean;
    double y_mean = 0.0;
    SpectralTransform transform;
};

TransformedData transform_data(const Matrix& X, const Vector& Y, const TransformKind& kind);

struct DeconfoundFit {
    Vector beta;
    std::optional<Vector> dense_part;  // Lava only
    TransformKind transform_kind;
    double transform_parameter = 0.0;  // resolved tau / qhat / lambda2
    double lambda = 0.0;
    std::optional<double> lambda2;
    double intercept = 0.0;
    std::optional<CvResult> cv;
    SparseFit lasso_fit;
};

/// Fit the transform on X, apply it to X and Y, run the Lasso on the result.
DeconfoundFit spectral_lasso(const Matrix& X, const Vector& Y, const TransformKind& kind,
                             const LambdaChoice& lambda, const LassoConfig& base = {},
                             int threads = 1);

DeconfoundFit trim_lasso(const Matrix& X, const Vector& Y,
                         TrimThreshold tau = TrimThreshold::median(),
                         const LambdaChoice& lambda = LambdaChoice::cv(), int threads = 1);

/// Requires qhat < min(n, p).
DeconfoundFit pca_adjust_lasso(const Matrix& X, const Vector& Y, Index qhat,
                               const LambdaChoice& lambda = LambdaChoice::cv(), int threads = 1);

/// Lava via the transformed route; the dense part is the ridge minimiser of
/// the joint objective given the sparse part.
DeconfoundFit lava(const Matrix& X, const Vector& Y, const LambdaChoice& lambda1,
                   LavaParameter lambda2 = LavaParameter::median(), int threads = 1);

/// Joint Lava objective ||Y - X(beta + b) - c||^2/n + l1 ||beta||_1 + l2 ||b||^2.
double lava_objective(const Matrix& X, const Vector& Y, const Vector& beta, const Vector& b,
                      double intercept, double lambda1, double lambda2);

/// Population confounding bias b = Cov(X)^{-1} Cov(X, H) delta.
Vector population_bias(const Matrix& sigma_x, const Matrix& sigma_xh, const Vector& delta);

/// One-factor closed form: Cov(X) = gamma^T gamma + xi^2 I, Cov(X, H) = gamma^T.
Vector population_bias_one_factor(const Vector& gamma, double xi, double delta);

} // namespace causalreg
