#pragma once

#include "causalreg/types.hpp"

#include <cstdint>
#include <vector>

namespace causalreg {

// Objective throughout: ||Y - X beta - intercept||^2 / n + lambda * ||beta||_1.
// Columns of X and Y are centered before solving; the intercept is recovered
// as mean(Y) - mean(X) beta.

struct LassoConfig {
    double lambda = 0.0;
    int max_iter = 100000;  // coordinate sweeps
    double tol = 1e-7;      // max KKT violation on the 2 X^T r / n scale
    bool standardize = false;
};

struct SparseFit {
    Vector beta;
    double intercept = 0.0;
    double lambda = 0.0;
    double objective = 0.0;
    int n_iter = 0;
    bool converged = false;
    double kkt_violation = 0.0;

    Index support_size() const;
    std::vector<Index> support() const;
};

/// lambda = 0 solves least squares directly and requires rank(centered X) = p.
SparseFit lasso(const Matrix& X, const Vector& Y, const LassoConfig& cfg);

/// Smallest lambda for which beta = 0: 2 ||X^T (Y - mean Y)||_inf / n
/// (columns centered).
double lambda_max(const Matrix& X, const Vector& Y);

/// `count` log-spaced values from lambda_max down to ratio * lambda_max.
std::vector<double> default_lambda_grid(const Matrix& X, const Vector& Y, int count = 50,
                                        double ratio = 0.01);

/// Warm-started fits along a strictly descending grid. With stop_at_support
/// > 0 the path ends at the first fit with at least that many non-zeros.
std::vector<SparseFit> lasso_path(const Matrix& X, const Vector& Y,
                                  const std::vector<double>& grid, const LassoConfig& cfg,
                                  Index stop_at_support = -1);

double lasso_objective(const Matrix& X, const Vector& Y, const Vector& beta, double intercept,
                       double lambda);

/// Maximum KKT violation at (beta, intercept), recomputed from the raw data.
double kkt_violation(const Matrix& X, const Vector& Y, const Vector& beta, double intercept,
                     double lambda);

struct CvResult {
    std::vector<double> lambda_grid;
    std::vector<double> mean_cv_error;
    std::vector<double> se;
    double lambda_min = 0.0;
    double lambda_1se = 0.0;
    Index index_min = 0;
    Index index_1se = 0;
    int folds = 0;
};

/// Seed-deterministic partition of n rows into `folds` groups (fold id per row).
std::vector<int> fold_assignment(Index n, int folds, std::uint64_t seed);

/// K-fold CV on the supplied (possibly already transformed) data. An empty
/// grid means the default grid of the full data.
CvResult cv_lasso(const Matrix& X, const Vector& Y, int folds, std::vector<double> grid,
                  const LassoConfig& cfg, std::uint64_t seed, int threads = 1);

struct StabilityResult {
    Vector frequencies;
    double threshold = 0.0;
    std::vector<Index> selected;
    int subsamples = 0;
};

/// Rows of subsample b: floor(n/2) draws without replacement, sorted.
std::vector<Index> stability_subsample(Index n, std::uint64_t seed, int b);

StabilityResult stability_selection(const Matrix& X, const Vector& Y,
                                    const std::vector<double>& grid, int subsamples,
                                    double threshold, std::uint64_t seed, int threads = 1);

} // namespace causalreg
