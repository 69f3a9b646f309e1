#pragma once

#include "causalreg/deconfound.hpp"

#include <vector>

namespace causalreg {

struct DdLassoConfig {
    TransformKind transform_y = TrimKind{};
    TransformKind transform_nodewise = TrimKind{};
    LambdaChoice lambda_y = LambdaChoice::cv();
    LambdaChoice lambda_nodewise = LambdaChoice::cv();
    double confidence_level = 0.95;
};

enum class InferenceMethod { Debiased, DoublyDebiased };

const char* method_name(InferenceMethod m);

struct InferenceResult {
    Index j = 0;
    double estimate = 0.0;
    double se = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double p_value = 1.0;
    InferenceMethod method = InferenceMethod::DoublyDebiased;
    double sigma = 0.0;  // estimated noise standard deviation
    double lambda_y = 0.0;
    double lambda_nodewise = 0.0;
};

/// Nodewise regression of column j on the others after a transform fitted
/// on X^{(-j)} (both centered).
struct NodewiseFit {
    Vector z;                   // transformed-space residual Z^{(j)}
    SpectralTransform transform;
    double lambda = 0.0;
    Vector x_mean;              // column means of the full X
};

NodewiseFit nodewise_fit(const Matrix& X, Index j, const TransformKind& kind,
                         const LambdaChoice& lambda, int threads = 1);

Vector nodewise_residual(const Matrix& X, Index j, const TransformKind& kind,
                         const LambdaChoice& lambda);

/// sum_{k != j} Z^T X_k beta_k / (Z^T X_j). Throws InstabilityError when
/// |Z^T X_j| < 1e-10 * n.
double debias_bias_estimate(const Vector& z, const Matrix& X_tilde, const Vector& beta_init,
                            Index j);

/// RSS / max(n_eff - s, n_eff / 2), s = support size of beta. n_eff defaults
/// to the row count; transformed data pass trace(F^T F).
double noise_variance(const Matrix& X_tilde, const Vector& Y_tilde, const Vector& beta,
                      double intercept = 0.0, double n_eff = -1.0);

/// Outcome regression shared by every coordinate of one analysis.
struct OutcomeFit {
    Vector beta;
    double lambda = 0.0;
    double sigma2 = 0.0;
    Matrix Xc;  // centered data
    Vector Yc;
};

OutcomeFit fit_outcome(const Matrix& X, const Vector& Y, const TransformKind& kind,
                       const LambdaChoice& lambda, int threads = 1);

InferenceResult infer_coordinate(const OutcomeFit& outcome, Index j, const DdLassoConfig& cfg,
                                 InferenceMethod method, int threads = 1);

InferenceResult dd_lasso(const Matrix& X, const Vector& Y, Index j, const DdLassoConfig& cfg);

/// Several coordinates sharing one outcome regression; coordinates run in parallel.
std::vector<InferenceResult> dd_lasso(const Matrix& X, const Vector& Y,
                                      const std::vector<Index>& coords, const DdLassoConfig& cfg,
                                      int threads = 1);

/// Same pipeline with identity transforms.
InferenceResult debiased_lasso(const Matrix& X, const Vector& Y, Index j,
                               const LambdaChoice& lambda_y, const LambdaChoice& lambda_nodewise,
                               double level = 0.95);

std::vector<InferenceResult> debiased_lasso(const Matrix& X, const Vector& Y,
                                            const std::vector<Index>& coords,
                                            const LambdaChoice& lambda_y,
                                            const LambdaChoice& lambda_nodewise,
                                            double level = 0.95, int threads = 1);

/// Two-sided normal p-value and quantile helpers.
double two_sided_p_value(double z);
double normal_quantile(double prob);

} // namespace causalreg
