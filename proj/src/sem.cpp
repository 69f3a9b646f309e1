#include "causalreg/sem.hpp"

#include "causalreg/deconfound.hpp"
#include "causalreg/error.hpp"
#include "causalreg/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>

namespace causalreg {

namespace {

void require_psd(const Matrix& S, const char* what) {
    if (S.rows() != S.cols()) throw InvalidInput(std::string(what) + " must be square");
    if (S.size() == 0) return;
    require_finite(S, what);
    if (!S.isApprox(S.transpose(), 1e-12) && (S - S.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw InvalidInput(std::string(what) + " must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -1e-10 * scale) {
        throw InvalidInput(std::string(what) + " must be positive semi-definite");
    }
}

// Square root factor L with L L^T = S for a PSD S.
Matrix psd_factor(const Matrix& S) {
    if (S.size() == 0) return S;
    Eigen::SelfAdjointEigenSolver<Matrix> es(S);
    const Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * root.asDiagonal();
}

bool is_acyclic(const Matrix& B) {
    const Index d = B.rows();
    std::vector<int> indegree(static_cast<std::size_t>(d), 0);
    for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j < d; ++j) {
            if (B(i, j) != 0.0) ++indegree[static_cast<std::size_t>(i)];
        }
    }
    std::vector<Index> ready;
    for (Index i = 0; i < d; ++i) {
        if (indegree[static_cast<std::size_t>(i)] == 0) ready.push_back(i);
    }
    Index visited = 0;
    while (!ready.empty()) {
        const Index j = ready.back();
        ready.pop_back();
        ++visited;
        for (Index i = 0; i < d; ++i) {
            if (B(i, j) != 0.0 && --indegree[static_cast<std::size_t>(i)] == 0) ready.push_back(i);
        }
    }
    return visited == d;
}

Matrix structural_inverse(const AnchorSemSpec& spec) {
    const Index d = spec.dim();
    const Matrix IB = Matrix::Identity(d, d) - spec.B;
    Eigen::FullPivLU<Matrix> lu(IB);
    if (!lu.isInvertible()) throw InvalidInput("anchor SEM: I - B is singular");
    return lu.inverse();
}

Vector anchor_mean(const AnchorSemSpec& spec) {
    Vector m = Vector::Zero(spec.r);
    for (Index k = 0; k < static_cast<Index>(spec.environment_probs.size()); ++k) {
        m(k) = spec.environment_probs[static_cast<std::size_t>(k)];
    }
    return m;
}

Vector residual_weights(const AnchorSemSpec& spec, const Vector& b) {
    if (b.size() != spec.p) throw InvalidInput("coefficient vector must have p entries");
    Vector w = Vector::Zero(spec.dim());
    w.head(spec.p) = -b;
    w(spec.y_index()) = 1.0;
    return w;
}

Matrix noise_draws(Rng& rng, const Matrix& factor, Index n) {
    if (factor.size() == 0) return Matrix::Zero(n, 0);
    return rng.normal_matrix(n, factor.cols()) * factor.transpose();
}

AnchorSemData assemble(const AnchorSemSpec& spec, const Matrix& Sinv, const Matrix& eps,
                       const Matrix& shift, Matrix anchors) {
    const Matrix Z = (eps + shift) * Sinv.transpose();
    AnchorSemData out;
    out.data.X = Z.leftCols(spec.p);
    out.data.Y = Z.col(spec.y_index());
    out.H = Z.rightCols(spec.q);
    out.data.A = std::move(anchors);
    for (Index j = 0; j < spec.p; ++j) out.data.x_names.push_back("x" + std::to_string(j + 1));
    for (Index k = 0; k < out.data.A.cols(); ++k) {
        out.data.a_names.push_back("a" + std::to_string(k + 1));
    }
    return out;
}

DenseConfoundSpec draw_confounding(DenseConfoundSpec spec, const DenseFamily& f, std::uint64_t seed) {
    Rng rng(seed);
    spec.confounder_loading = f.loading_scale * rng.normal_matrix(f.q, f.p);
    spec.delta = f.delta_scale * rng.normal_vector(f.q);
    spec.seed = derive_seed(seed, 1);
    return spec;
}

} // namespace

void DenseConfoundSpec::validate() const {
    if (n < 1 || p < 1 || q < 0) throw InvalidInput("dense spec: n, p must be >= 1 and q >= 0");
    if (s0 < 0 || s0 > p) throw InvalidInput("dense spec: s0 must lie in [0, p]");
    if (beta0.size() != p) throw InvalidInput("dense spec: beta0 must have p entries");
    if (confounder_loading.rows() != q || confounder_loading.cols() != p) {
        throw InvalidInput("dense spec: confounder_loading must be q x p");
    }
    if (delta.size() != q) throw InvalidInput("dense spec: delta must have q entries");
    if (!(noise_x_scale > 0.0)) throw InvalidInput("dense spec: noise_x_scale must be > 0");
    if (!(noise_y_scale >= 0.0)) throw InvalidInput("dense spec: noise_y_scale must be >= 0");
    const Index support = (beta0.array() != 0.0).count();
    if (support != s0) throw InvalidInput("dense spec: beta0 must have exactly s0 non-zeros");
    require_finite(beta0, "beta0");
    require_finite(confounder_loading, "confounder_loading");
    require_finite(delta, "delta");
}

DenseConfoundSpec make_dense_confound(const DenseFamily& f, std::uint64_t seed) {
    if (f.s0 > f.p) throw InvalidInput("dense family: s0 > p");
    DenseConfoundSpec spec;
    spec.n = f.n;
    spec.p = f.p;
    spec.q = f.q;
    spec.s0 = f.s0;
    spec.beta0 = Vector::Zero(f.p);
    if (f.signal != 0.0) spec.beta0.head(f.s0).setConstant(f.signal);
    else spec.s0 = 0;
    spec.noise_x_scale = f.noise_x_scale;
    spec.noise_y_scale = f.noise_y_scale;
    spec = draw_confounding(std::move(spec), f, seed);
    spec.validate();
    return spec;
}

DenseConfoundSpec redraw_confounding(const DenseConfoundSpec& spec, const DenseFamily& f,
                                     std::uint64_t seed) {
    DenseFamily g = f;
    g.q = spec.q;
    g.p = spec.p;
    DenseConfoundSpec out = draw_confounding(spec, g, seed);
    out.validate();
    return out;
}

DenseConfoundData gen_dense_confounded(const DenseConfoundSpec& spec) {
    return gen_dense_confounded(spec, spec.seed);
}

DenseConfoundData gen_dense_confounded(const DenseConfoundSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    DenseConfoundData out;
    out.H = rng.normal_matrix(spec.n, spec.q);
    Matrix X = spec.noise_x_scale * rng.normal_matrix(spec.n, spec.p);
    if (spec.q > 0) X.noalias() += out.H * spec.confounder_loading;
    Vector Y = X * spec.beta0 + spec.noise_y_scale * rng.normal_vector(spec.n);
    if (spec.q > 0) Y.noalias() += out.H * spec.delta;
    out.data.X = std::move(X);
    out.data.Y = std::move(Y);
    out.data.A = Matrix(spec.n, 0);
    for (Index j = 0; j < spec.p; ++j) out.data.x_names.push_back("x" + std::to_string(j + 1));
    out.bias = dense_population_bias(spec);
    return out;
}

Matrix dense_covariance_x(const DenseConfoundSpec& spec) {
    Matrix S = spec.confounder_loading.transpose() * spec.confounder_loading;
    S.diagonal().array() += spec.noise_x_scale * spec.noise_x_scale;
    return S;
}

Vector dense_population_bias(const DenseConfoundSpec& spec) {
    if (spec.q == 0) return Vector::Zero(spec.p);
    return population_bias(dense_covariance_x(spec), spec.confounder_loading.transpose(),
                           spec.delta);
}

void AnchorSemSpec::validate() const {
    const Index d = dim();
    if (p < 1 || q < 0 || r < 0) throw InvalidInput("anchor SEM: need p >= 1, q >= 0, r >= 0");
    if (B.rows() != d || B.cols() != d) throw InvalidInput("anchor SEM: B must be d x d");
    if (M.rows() != d || M.cols() != r) throw InvalidInput("anchor SEM: M must be d x r");
    if (anchor_cov.rows() != r || anchor_cov.cols() != r) {
        throw InvalidInput("anchor SEM: anchor_cov must be r x r");
    }
    if (noise_cov.rows() != d || noise_cov.cols() != d) {
        throw InvalidInput("anchor SEM: noise_cov must be d x d");
    }
    require_finite(B, "B");
    require_finite(M, "M");
    require_psd(anchor_cov, "anchor_cov");
    require_psd(noise_cov, "noise_cov");
    if (environments()) {
        if (static_cast<Index>(environment_probs.size()) != r) {
            throw InvalidInput("anchor SEM: environment_probs must have r entries");
        }
        double total = 0.0;
        for (double pr : environment_probs) {
            if (!(pr > 0.0)) throw InvalidInput("anchor SEM: environment probabilities must be > 0");
            total += pr;
        }
        if (std::abs(total - 1.0) > 1e-9) {
            throw InvalidInput("anchor SEM: environment probabilities must sum to 1");
        }
    }
    if (acyclic && !is_acyclic(B)) throw InvalidInput("anchor SEM: B is not acyclic");
    Eigen::FullPivLU<Matrix> lu(Matrix::Identity(d, d) - B);
    if (!lu.isInvertible()) throw InvalidInput("anchor SEM: I - B is singular");
}

AnchorSemSpec iv_sem(const Matrix& x_loading_a, const Matrix& x_loading_h, const Vector& beta0,
                     const Vector& delta, double noise_scale) {
    const Index p = beta0.size();
    const Index q = delta.size();
    const Index r = x_loading_a.cols();
    if (x_loading_a.rows() != p || x_loading_h.rows() != p || x_loading_h.cols() != q) {
        throw InvalidInput("iv_sem: loading shapes do not match beta0 / delta");
    }
    AnchorSemSpec s;
    s.p = p;
    s.q = q;
    s.r = r;
    const Index d = s.dim();
    s.B = Matrix::Zero(d, d);
    s.B.block(0, p + 1, p, q) = x_loading_h;
    s.B.block(p, 0, 1, p) = beta0.transpose();
    s.B.block(p, p + 1, 1, q) = delta.transpose();
    s.M = Matrix::Zero(d, r);
    s.M.topRows(p) = x_loading_a;
    s.anchor_cov = Matrix::Identity(r, r);
    s.noise_cov = Matrix::Identity(d, d);
    s.noise_cov.diagonal().head(p + 1).setConstant(noise_scale * noise_scale);
    s.validate();
    return s;
}

AnchorSemSpec random_anchor_sem(Index p, Index q, Index r, std::uint64_t seed) {
    Rng rng(seed);
    AnchorSemSpec s;
    s.p = p;
    s.q = q;
    s.r = r;
    const Index d = s.dim();
    const Index observed = p + 1;
    const std::vector<Index> order = rng.permutation(observed);
    s.B = Matrix::Zero(d, d);
    for (Index a = 0; a < observed; ++a) {
        for (Index b = a + 1; b < observed; ++b) {
            if (rng.uniform() < 0.5) s.B(order[b], order[a]) = 0.5 * rng.normal();
        }
    }
    for (Index i = 0; i < observed; ++i) {
        for (Index h = 0; h < q; ++h) {
            if (rng.uniform() < 0.5) s.B(i, observed + h) = 0.5 * rng.normal();
        }
    }
    s.M = rng.normal_matrix(d, r);
    const Matrix L = rng.normal_matrix(r, r);
    s.anchor_cov = L * L.transpose();
    s.anchor_cov.diagonal().array() += 0.5;
    s.noise_cov = Matrix::Zero(d, d);
    for (Index i = 0; i < d; ++i) s.noise_cov(i, i) = 0.5 + rng.uniform();
    s.validate();
    return s;
}

AnchorSemSpec with_environments(AnchorSemSpec spec, std::vector<double> probs) {
    const Index r = static_cast<Index>(probs.size());
    if (spec.M.cols() != r) throw InvalidInput("with_environments: M must have one column per environment");
    spec.r = r;
    spec.anchor_cov = Matrix::Zero(r, r);
    for (Index k = 0; k < r; ++k) spec.anchor_cov(k, k) = probs[static_cast<std::size_t>(k)];
    spec.environment_probs = std::move(probs);
    spec.validate();
    return spec;
}

AnchorSemSpec to_anchor_sem(const DenseConfoundSpec& spec) {
    spec.validate();
    AnchorSemSpec s;
    s.p = spec.p;
    s.q = spec.q;
    s.r = 0;
    const Index d = s.dim();
    s.B = Matrix::Zero(d, d);
    s.B.block(0, spec.p + 1, spec.p, spec.q) = spec.confounder_loading.transpose();
    s.B.block(spec.p, 0, 1, spec.p) = spec.beta0.transpose();
    s.B.block(spec.p, spec.p + 1, 1, spec.q) = spec.delta.transpose();
    s.M = Matrix::Zero(d, 0);
    s.anchor_cov = Matrix::Zero(0, 0);
    s.noise_cov = Matrix::Identity(d, d);
    s.noise_cov.diagonal().head(spec.p).setConstant(spec.noise_x_scale * spec.noise_x_scale);
    s.noise_cov(spec.p, spec.p) = spec.noise_y_scale * spec.noise_y_scale;
    s.validate();
    return s;
}

AnchorSemData gen_anchor_sem(const AnchorSemSpec& spec, Index n, std::uint64_t seed) {
    spec.validate();
    if (n < 1) throw InvalidInput("gen_anchor_sem: n must be >= 1");
    const Matrix Sinv = structural_inverse(spec);
    Rng rng(seed);
    Matrix A(n, spec.r);
    if (spec.environments()) {
        A.setZero();
        for (Index i = 0; i < n; ++i) {
            const double u = rng.uniform();
            double cum = 0.0;
            Index k = 0;
            for (; k + 1 < spec.r; ++k) {
                cum += spec.environment_probs[static_cast<std::size_t>(k)];
                if (u < cum) break;
            }
            A(i, k) = 1.0;
        }
    } else {
        A = noise_draws(rng, psd_factor(spec.anchor_cov), n);
    }
    const Matrix eps = noise_draws(rng, psd_factor(spec.noise_cov), n);
    const Matrix shift = A * spec.M.transpose();
    return assemble(spec, Sinv, eps, shift, std::move(A));
}

Matrix Perturbation::second_moment(Index r) const {
    Matrix S = Matrix::Zero(r, r);
    if (delta.size() == r) S += delta * delta.transpose();
    else if (delta.size() != 0) throw InvalidInput("perturbation: delta must have r entries");
    if (is_stochastic()) {
        if (cov.rows() != r || cov.cols() != r) throw InvalidInput("perturbation: cov must be r x r");
        S += cov;
    }
    return S;
}

AnchorSemData perturb(const AnchorSemSpec& spec, const Perturbation& pert, Index n,
                      std::uint64_t seed) {
    spec.validate();
    if (n < 1) throw InvalidInput("perturb: n must be >= 1");
    (void)pert.second_moment(spec.r);
    const Matrix Sinv = structural_inverse(spec);
    Rng rng(seed);
    Matrix D = Matrix::Zero(n, spec.r);
    if (pert.is_stochastic()) {
        require_psd(pert.cov, "perturbation cov");
        D = noise_draws(rng, psd_factor(pert.cov), n);
    }
    if (pert.delta.size() == spec.r) D.rowwise() += pert.delta.transpose();
    const Matrix eps = noise_draws(rng, psd_factor(spec.noise_cov), n);
    const Matrix shift = D * spec.M.transpose();
    return assemble(spec, Sinv, eps, shift, std::move(D));
}

PopulationMoments population_moments(const AnchorSemSpec& spec) {
    spec.validate();
    const Matrix S = structural_inverse(spec);
    PopulationMoments m;
    m.aa = spec.anchor_cov;
    m.zz = S * (spec.noise_cov + spec.M * m.aa * spec.M.transpose()) * S.transpose();
    m.za = S * spec.M * m.aa;
    m.z_mean = S * spec.M * anchor_mean(spec);
    return m;
}

PopulationMoments perturbed_moments(const AnchorSemSpec& spec, const Perturbation& pert) {
    spec.validate();
    const Matrix S = structural_inverse(spec);
    PopulationMoments m;
    m.aa = pert.second_moment(spec.r);
    m.zz = S * (spec.noise_cov + spec.M * m.aa * spec.M.transpose()) * S.transpose();
    m.za = S * spec.M * m.aa;
    m.z_mean = pert.delta.size() == spec.r ? Vector(S * spec.M * pert.delta)
                                           : Vector(Vector::Zero(spec.dim()));
    return m;
}

AnchorMoments to_anchor_moments(const PopulationMoments& m, Index p) {
    AnchorMoments a;
    a.xx = m.zz.topLeftCorner(p, p);
    a.xy = m.zz.block(0, p, p, 1);
    a.yy = m.zz(p, p);
    a.xa = m.za.topRows(p);
    a.ya = m.za.row(p).transpose();
    a.aa = m.aa;
    return a;
}

Vector population_anchor_coef(const AnchorSemSpec& spec, double gamma) {
    return anchor_coef(to_anchor_moments(population_moments(spec), spec.p), gamma);
}

DilutedCausal population_diluted_causal(const AnchorSemSpec& spec) {
    return diluted_causal(to_anchor_moments(population_moments(spec), spec.p));
}

double population_anchor_objective(const AnchorSemSpec& spec, const Vector& b, double gamma) {
    return anchor_objective(b, to_anchor_moments(population_moments(spec), spec.p), gamma);
}

double worst_case_sup(const AnchorSemSpec& spec, const Vector& b, double gamma) {
    spec.validate();
    if (!(gamma >= 0.0)) throw InvalidInput("worst_case_sup: gamma must be >= 0");
    const Vector u = structural_inverse(spec).transpose() * residual_weights(spec, b);
    const double c0 = u.dot(spec.noise_cov * u);
    if (gamma == 0.0 || spec.r == 0) return c0;
    const Vector m = spec.M.transpose() * u;
    return c0 + gamma * m.dot(spec.anchor_cov * m);
}

double perturbed_risk(const AnchorSemSpec& spec, const Vector& b, const Perturbation& pert) {
    spec.validate();
    const Vector u = structural_inverse(spec).transpose() * residual_weights(spec, b);
    const Vector m = spec.M.transpose() * u;
    return u.dot(spec.noise_cov * u) + m.dot(pert.second_moment(spec.r) * m);
}

} // namespace causalreg
