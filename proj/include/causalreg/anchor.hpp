#pragma once

#include "causalreg/linalg.hpp"

#include <limits>
#include <utility>

namespace causalreg {

inline constexpr double kInfiniteGamma = std::numeric_limits<double>::infinity();

// Anchors are centered before the projector is built; the centered projector
// annihilates constants, so W_gamma leaves intercepts alone.
//
// gamma semantics: 0 partials out A, 1 is ordinary least squares, infinity
// is two-stage least squares. gamma = k insures against shifts along span(M)
// sqrt(k) times as large as the anchor-driven variation seen in training.

struct AnchorConfig {
    double gamma = 1.0;      // >= 0, may be kInfiniteGamma
    double lambda = 0.0;     // 0 = unpenalised
    double rank_tol = -1.0;  // <= 0 selects default_rank_tol
};

struct AnchorFit {
    Vector beta;
    double intercept = 0.0;
    double gamma = 1.0;
    double lambda = 0.0;
    /// Two-term objective at (beta, intercept); for gamma = infinity only the
    /// projected term ||Pi_A r||^2 / n.
    double anchor_objective = 0.0;
    /// A_c^T r / n with A_c the centered anchors.
    Vector residual_anchor_correlation;
    /// Set when the unpenalised transformed design was rank deficient and the
    /// minimum-norm solution was returned.
    bool minimum_norm = false;
};

Projector anchor_projector(const Matrix& A, double rank_tol = -1.0);

/// (W X, W Y) with W = I - (1 - sqrt(gamma)) Pi_A.
std::pair<Matrix, Vector> anchor_transform(const Matrix& X, const Vector& Y, const Matrix& A,
                                           double gamma);

AnchorFit anchor_fit(const Matrix& X, const Vector& Y, const Matrix& A, const AnchorConfig& cfg);

/// Minimum-norm minimiser of ||Pi_A (Y - X beta)||^2.
Vector tsls(const Matrix& X, const Vector& Y, const Matrix& A, double rank_tol = -1.0);

struct DilutedCausal {
    Vector beta;
    Index null_dimension = 0;  // dimension of the first-stage solution set
    bool projectable = true;
};

/// gamma -> infinity limit as a lexicographic problem: among minimisers of
/// ||Pi_A (Y - X beta)||^2 take a minimiser of ||(I - Pi_A)(Y - X beta)||^2
/// (minimum norm if still not unique).
DilutedCausal diluted_causal(const Matrix& X, const Vector& Y, const Matrix& A,
                             double rank_tol = -1.0);

struct Projectability {
    bool holds = true;
    Index rank_ax = 0;
    Index rank_axy = 0;
};

/// rank Cov(A, X) vs rank [Cov(A, X), Cov(A, Y)] at tol * (top singular
/// value of the extended matrix).
Projectability projectability(const Matrix& A, const Matrix& X, const Vector& Y, double tol = 1e-8);
Projectability projectability_from_moments(const Matrix& cov_ax, const Vector& cov_ay,
                                           double tol = 1e-8);

/// ||(I - Pi_A) r||^2 / n + gamma ||Pi_A r||^2 / n, r = Y - X b - intercept.
double anchor_objective(const Vector& b, const Matrix& X, const Vector& Y, const Matrix& A,
                        double gamma, double intercept = 0.0);

/// Second moments of (X, Y) with the anchors A. With zero-mean noise the
/// linear projection onto A is the conditional expectation given A.
struct AnchorMoments {
    Matrix xx;  // E[X X^T]  p x p
    Vector xy;  // E[X Y]    p
    double yy = 0.0;
    Matrix xa;  // E[X A^T]  p x r
    Vector ya;  // E[Y A]    r
    Matrix aa;  // E[A A^T]  r x r
};

double anchor_objective(const Vector& b, const AnchorMoments& m, double gamma);

/// Solves (S_xx + (gamma - 1) G) beta = S_xy + (gamma - 1) g with
/// G = S_xa S_aa^{-1} S_ax, g = S_xa S_aa^{-1} S_ay (pseudo-solve if singular).
Vector anchor_coef(const AnchorMoments& m, double gamma);

DilutedCausal diluted_causal(const AnchorMoments& m, double rank_tol = 1e-10);

Projectability projectability(const AnchorMoments& m, double tol = 1e-8);

} // namespace causalreg
