#pragma once

#include "causalreg/anchor.hpp"
#include "causalreg/types.hpp"

#include <cstdint>
#include <vector>

namespace causalreg {

// ---------------------------------------------------------------------------
// Dense confounding:  X = H Gamma + E_X,  Y = X beta0 + H delta + e_Y,
// H ~ N(0, I_q) row-wise, E_X entries N(0, xi^2), e_Y entries N(0, sigma^2).
// ---------------------------------------------------------------------------

struct DenseConfoundSpec {
    Index n = 300;
    Index p = 600;
    Index q = 3;
    Index s0 = 5;
    Vector beta0;               // p, exactly s0 non-zeros
    Matrix confounder_loading;  // q x p (Gamma)
    Vector delta;               // q
    double noise_x_scale = 1.0; // xi
    double noise_y_scale = 1.0; // sigma
    std::uint64_t seed = 0;

    void validate() const;
};

/// Knobs for drawing a DenseConfoundSpec: beta0 has `signal` on the first s0
/// coordinates, Gamma entries are N(0, loading_scale^2), delta entries are
/// N(0, delta_scale^2). loading_scale = 0 and delta_scale = 0 give the
/// unconfounded sparse model.
struct DenseFamily {
    Index n = 300;
    Index p = 600;
    Index q = 3;
    Index s0 = 5;
    double signal = 1.0;
    double loading_scale = 1.0;
    double delta_scale = 1.0;
    double noise_x_scale = 1.0;
    double noise_y_scale = 1.0;
};

/// Draws Gamma and delta from `seed`; the returned DenseConfoundSpec's seed is set to
/// derive_seed(seed, 1) so data generation uses a separate stream.
DenseConfoundSpec make_dense_confound(const DenseFamily& family, std::uint64_t seed);

/// Same beta0 and sizes, fresh Gamma and delta: the second member of a
/// replication pair.
DenseConfoundSpec redraw_confounding(const DenseConfoundSpec& spec, const DenseFamily& family,
                                     std::uint64_t seed);

struct DenseConfoundData {
    Dataset data;
    Matrix H;
    Vector bias;  // population bias b = Cov(X)^{-1} Gamma^T delta
};

DenseConfoundData gen_dense_confounded(const DenseConfoundSpec& spec);
/// Same spec, different noise stream.
DenseConfoundData gen_dense_confounded(const DenseConfoundSpec& spec, std::uint64_t seed);

/// Cov(X) = Gamma^T Gamma + xi^2 I
Matrix dense_covariance_x(const DenseConfoundSpec& spec);
Vector dense_population_bias(const DenseConfoundSpec& spec);

// ---------------------------------------------------------------------------
// Anchor SEM over the joint vector Z = (X (p), Y, H (q)):
//     Z = B Z + eps + M A,    eps ~ N(0, noise_cov) independent of A.
// ---------------------------------------------------------------------------

struct AnchorSemSpec {
    Index p = 1;
    Index q = 0;
    Index r = 1;
    Matrix B;           // d x d, d = p + 1 + q
    Matrix M;           // d x r
    Matrix anchor_cov;  // r x r, E[A A^T]
    Matrix noise_cov;   // d x d
    bool acyclic = true;
    /// Non-empty: A is a one-hot environment indicator with these
    /// probabilities (r entries) and anchor_cov = diag(probs).
    std::vector<double> environment_probs;

    Index dim() const { return p + 1 + q; }
    Index y_index() const { return p; }
    bool environments() const { return !environment_probs.empty(); }
    /// Shapes, symmetry / PSD of covariances, invertibility of I - B, and
    /// acyclicity of B when the flag is set.
    void validate() const;
};

/// A -> X -> Y with hidden H -> (X, Y); A has no direct path to H or Y.
/// x_loading_a: p x r, x_loading_h: p x q, beta0: p, delta: q.
AnchorSemSpec iv_sem(const Matrix& x_loading_a, const Matrix& x_loading_h, const Vector& beta0,
                     const Vector& delta, double noise_scale = 1.0);

/// Random acyclic spec: H are sources, observed nodes follow a random causal
/// order, edge weights N(0, 0.5^2) with probability 1/2, M entries N(0, 1),
/// anchor_cov = L L^T + 0.5 I with L standard normal.
AnchorSemSpec random_anchor_sem(Index p, Index q, Index r, std::uint64_t seed);

/// Environment anchors: A one-hot over `probs.size()` environments.
AnchorSemSpec with_environments(AnchorSemSpec spec, std::vector<double> probs);

/// The dense-confounding model as an anchor SEM with r = 0 anchors.
AnchorSemSpec to_anchor_sem(const DenseConfoundSpec& spec);

struct AnchorSemData {
    Dataset data;  // X, Y, A
    Matrix H;
};

AnchorSemData gen_anchor_sem(const AnchorSemSpec& spec, Index n, std::uint64_t seed);

/// Shift perturbation v = M delta. `delta` is a fixed part; a non-empty
/// `cov` adds a fresh N(0, cov) draw per row.
struct Perturbation {
    Vector delta;
    Matrix cov;

    static Perturbation fixed(Vector d) { return {std::move(d), Matrix()}; }
    static Perturbation stochastic(Matrix c) { return {Vector::Zero(c.rows()), std::move(c)}; }

    bool is_stochastic() const { return cov.size() > 0; }
    /// E[delta delta^T] (deterministic parts contribute their outer product).
    Matrix second_moment(Index r) const;
};

/// Rows of (I - B)^{-1}(eps + M delta_i). The returned dataset's A holds the
/// realised delta_i.
AnchorSemData perturb(const AnchorSemSpec& spec, const Perturbation& pert, Index n,
                      std::uint64_t seed);

/// Uncentered second moments of the joint vector Z and of (Z, A).
struct PopulationMoments {
    Matrix zz;  // d x d
    Matrix za;  // d x r
    Matrix aa;  // r x r
    Vector z_mean;
};

PopulationMoments population_moments(const AnchorSemSpec& spec);
/// Moments of the perturbed system with delta as its anchor.
PopulationMoments perturbed_moments(const AnchorSemSpec& spec, const Perturbation& pert);

AnchorMoments to_anchor_moments(const PopulationMoments& m, Index p);

Vector population_anchor_coef(const AnchorSemSpec& spec, double gamma);
DilutedCausal population_diluted_causal(const AnchorSemSpec& spec);
double population_anchor_objective(const AnchorSemSpec& spec, const Vector& b, double gamma);

/// sup over E[delta delta^T] <= gamma E[A A^T] of E[(Y^v - X^v b)^2],
/// computed from the structural form: with w = (-b, 1, 0), u = (I - B)^{-T} w,
/// the risk is u^T noise_cov u + E[(u^T M delta)^2], maximised at
/// gamma * m^T E[A A^T] m, m = M^T u.
double worst_case_sup(const AnchorSemSpec& spec, const Vector& b, double gamma);

/// E[(Y^v - X^v b)^2] under a given perturbation.
double perturbed_risk(const AnchorSemSpec& spec, const Vector& b, const Perturbation& pert);

} // namespace causalreg
