#include "causalreg/anchor.hpp"

#include "causalreg/error.hpp"
#include "causalreg/lasso.hpp"

#include <cmath>

namespace causalreg {

namespace {

double resolve_tol(double tol, Index rows, Index cols) {
    return tol > 0.0 ? tol : default_rank_tol(rows, cols);
}

void check_inputs(const Matrix& X, const Vector& Y, const Matrix& A) {
    if (X.rows() != Y.size() || A.rows() != X.rows()) {
        throw InvalidInput("anchor: X, Y and A must have the same number of rows");
    }
    if (A.cols() == 0) throw InvalidInput("anchor: no anchor columns");
    if (X.cols() == 0) throw InvalidInput("anchor: no covariates");
    require_finite(X, "X");
    require_finite(Y, "Y");
    require_finite(A, "A");
}

struct Centered {
    Matrix Xc;
    Vector Yc;
    Vector x_mean;
    double y_mean;
};

Centered center(const Matrix& X, const Vector& Y) {
    Centered c;
    c.x_mean = column_means(X);
    c.y_mean = Y.mean();
    c.Xc = X.rowwise() - c.x_mean.transpose();
    c.Yc = Y.array() - c.y_mean;
    return c;
}

// First stage shared by tsls and the lexicographic solve.
struct FirstStage {
    SvdFactors factors;
    Vector beta;
    Index rank = 0;
};

FirstStage first_stage(const Projector& P, const Matrix& Xc, const Vector& Yc, double tol) {
    const Matrix Xp = P.apply(Xc);
    const Vector Yp = P.apply(Yc);
    if (Xp.isZero(0.0)) throw DegenerateProblem("tsls: Pi_A X is zero");
    FirstStage fs{svd(Xp), Vector(), 0};
    fs.rank = fs.factors.rank(tol);
    if (fs.rank == 0) throw DegenerateProblem("tsls: rank(Pi_A X) = 0");
    fs.beta = pseudo_solve(fs.factors, Yp, tol).col(0);
    return fs;
}

// Null space of a p-column matrix from its thin factorisation plus the
// complement of the thin V when p exceeds the row count.
Matrix null_basis(const SvdFactors& f, Index rank) {
    const Index p = f.V.rows();
    const Matrix range = f.V.leftCols(rank);
    if (rank == p) return Matrix(p, 0);
    Eigen::HouseholderQR<Matrix> qr(range);
    const Matrix Q = qr.householderQ() * Matrix::Identity(p, p);
    return Q.rightCols(p - rank);
}

double rank_at(const Matrix& M, double cut) {
    if (M.size() == 0) return 0;
    Eigen::BDCSVD<Matrix> dec(M);
    const Vector& s = dec.singularValues();
    Index r = 0;
    while (r < s.size() && s(r) > cut) ++r;
    return static_cast<double>(r);
}

} // namespace

Projector anchor_projector(const Matrix& A, double rank_tol) {
    const Matrix Ac = center_columns(A);
    return projector_from(Ac, resolve_tol(rank_tol, A.rows(), A.cols()));
}

std::pair<Matrix, Vector> anchor_transform(const Matrix& X, const Vector& Y, const Matrix& A,
                                           double gamma) {
    check_inputs(X, Y, A);
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw InvalidInput("anchor_transform: gamma must be finite and >= 0");
    }
    const Projector P = anchor_projector(A);
    const double shrink = 1.0 - std::sqrt(gamma);
    Matrix Xt = X - shrink * P.apply(X);
    Vector Yt = Y - shrink * P.apply(Y);
    return {std::move(Xt), std::move(Yt)};
}

double anchor_objective(const Vector& b, const Matrix& X, const Vector& Y, const Matrix& A,
                        double gamma, double intercept) {
    check_inputs(X, Y, A);
    const Projector P = anchor_projector(A);
    const Vector r = (Y - X * b).array() - intercept;
    const Vector pr = P.apply(r);
    const double n = static_cast<double>(Y.size());
    return (r - pr).squaredNorm() / n + gamma * pr.squaredNorm() / n;
}

AnchorFit anchor_fit(const Matrix& X, const Vector& Y, const Matrix& A, const AnchorConfig& cfg) {
    check_inputs(X, Y, A);
    if (!(cfg.gamma >= 0.0)) throw InvalidInput("anchor_fit: gamma must be >= 0");
    if (!(cfg.lambda >= 0.0)) throw InvalidInput("anchor_fit: lambda must be >= 0");
    const Index n = X.rows();
    const double tol = resolve_tol(cfg.rank_tol, n, X.cols());
    const Projector P = anchor_projector(A, cfg.rank_tol);
    const Centered c = center(X, Y);

    AnchorFit fit;
    fit.gamma = cfg.gamma;
    fit.lambda = cfg.lambda;

    Matrix Xt;
    Vector Yt;
    if (std::isinf(cfg.gamma)) {
        Xt = P.apply(c.Xc);
        Yt = P.apply(c.Yc);
    } else {
        const double shrink = 1.0 - std::sqrt(cfg.gamma);
        Xt = c.Xc - shrink * P.apply(c.Xc);
        Yt = c.Yc - shrink * P.apply(c.Yc);
    }

    if (cfg.lambda > 0.0) {
        LassoConfig lc;
        lc.lambda = cfg.lambda;
        fit.beta = lasso(Xt, Yt, lc).beta;
    } else if (std::isinf(cfg.gamma)) {
        fit.beta = tsls(X, Y, A, cfg.rank_tol);
    } else {
        const SvdFactors f = svd(Xt);
        fit.minimum_norm = f.rank(tol) < X.cols();
        fit.beta = pseudo_solve(f, Yt, tol).col(0);
    }
    fit.intercept = c.y_mean - c.x_mean.dot(fit.beta);

    const Vector r = (Y - X * fit.beta).array() - fit.intercept;
    const Vector pr = P.apply(r);
    const double nd = static_cast<double>(n);
    fit.anchor_objective = std::isinf(cfg.gamma)
                               ? pr.squaredNorm() / nd
                               : (r - pr).squaredNorm() / nd + cfg.gamma * pr.squaredNorm() / nd;
    fit.residual_anchor_correlation = center_columns(A).transpose() * r / nd;
    return fit;
}

Vector tsls(const Matrix& X, const Vector& Y, const Matrix& A, double rank_tol) {
    check_inputs(X, Y, A);
    const double tol = resolve_tol(rank_tol, X.rows(), X.cols());
    const Projector P = anchor_projector(A, rank_tol);
    const Centered c = center(X, Y);
    return first_stage(P, c.Xc, c.Yc, tol).beta;
}

DilutedCausal diluted_causal(const Matrix& X, const Vector& Y, const Matrix& A, double rank_tol) {
    check_inputs(X, Y, A);
    const double tol = resolve_tol(rank_tol, X.rows(), X.cols());
    const Projector P = anchor_projector(A, rank_tol);
    const Centered c = center(X, Y);
    const FirstStage fs = first_stage(P, c.Xc, c.Yc, tol);

    DilutedCausal out;
    out.projectable = projectability(A, X, Y).holds;
    const Matrix N = null_basis(fs.factors, fs.rank);
    out.null_dimension = N.cols();
    if (N.cols() == 0) {
        out.beta = fs.beta;
        return out;
    }
    const Matrix Xr = P.residualize(c.Xc) * N;
    const Vector yr = P.residualize(c.Yc - c.Xc * fs.beta);
    const Vector z = pseudo_solve(Xr, yr, tol).col(0);
    out.beta = fs.beta + N * z;
    return out;
}

Projectability projectability_from_moments(const Matrix& cov_ax, const Vector& cov_ay, double tol) {
    Matrix ext(cov_ax.rows(), cov_ax.cols() + 1);
    ext << cov_ax, cov_ay;
    Projectability out;
    if (ext.isZero(0.0)) return out;
    Eigen::BDCSVD<Matrix> dec(ext);
    const double cut = tol * dec.singularValues()(0);
    out.rank_ax = static_cast<Index>(rank_at(cov_ax, cut));
    out.rank_axy = static_cast<Index>(rank_at(ext, cut));
    out.holds = out.rank_ax == out.rank_axy;
    return out;
}

Projectability projectability(const Matrix& A, const Matrix& X, const Vector& Y, double tol) {
    if (A.rows() != X.rows() || X.rows() != Y.size()) {
        throw InvalidInput("projectability: row mismatch");
    }
    const double n = static_cast<double>(A.rows());
    const Matrix Ac = center_columns(A);
    const Matrix cov_ax = Ac.transpose() * center_columns(X) / n;
    const Vector cov_ay = Ac.transpose() * (Y.array() - Y.mean()).matrix() / n;
    return projectability_from_moments(cov_ax, cov_ay, tol);
}

Projectability projectability(const AnchorMoments& m, double tol) {
    return projectability_from_moments(m.xa.transpose(), m.ya, tol);
}

double anchor_objective(const Vector& b, const AnchorMoments& m, double gamma) {
    const double second = m.yy - 2.0 * b.dot(m.xy) + b.dot(m.xx * b);
    const Vector ra = m.ya - m.xa.transpose() * b;  // E[R A]
    const double projected = ra.dot(m.aa.ldlt().solve(ra));
    return (second - projected) + gamma * projected;
}

Vector anchor_coef(const AnchorMoments& m, double gamma) {
    if (std::isinf(gamma)) return diluted_causal(m).beta;
    const Eigen::LDLT<Matrix> aa(m.aa);
    const Matrix G = m.xa * aa.solve(m.xa.transpose());
    const Vector g = m.xa * aa.solve(m.ya);
    const Matrix lhs = m.xx + (gamma - 1.0) * G;
    const Vector rhs = m.xy + (gamma - 1.0) * g;
    return pseudo_solve(lhs, rhs, 1e-14).col(0);
}

DilutedCausal diluted_causal(const AnchorMoments& m, double rank_tol) {
    // Whitened first stage: C beta ~ c with C = L^{-1} S_ax, c = L^{-1} S_ay,
    // S_aa = L L^T, so ||C beta - c||^2 = E[(P_A R)^2] up to a constant.
    const Eigen::LLT<Matrix> llt(m.aa);
    if (llt.info() != Eigen::Success) {
        throw DegenerateProblem("diluted_causal: E[A A^T] is not positive definite");
    }
    const Matrix C = llt.matrixL().solve(m.xa.transpose());
    const Vector cvec = llt.matrixL().solve(m.ya);

    DilutedCausal out;
    out.projectable = projectability(m).holds;
    const SvdFactors f = svd(C);
    const Index rank = f.rank(rank_tol);
    if (rank == 0) throw DegenerateProblem("diluted_causal: E[X A^T] is zero");
    const Vector beta1 = pseudo_solve(f, cvec, rank_tol).col(0);
    const Matrix N = null_basis(f, rank);
    out.null_dimension = N.cols();
    if (N.cols() == 0) {
        out.beta = beta1;
        return out;
    }
    // Second stage on E[((I - P_A) R)^2]: quadratic form S_xx - C^T C.
    const Matrix G2 = m.xx - C.transpose() * C;
    const Vector g2 = m.xy - C.transpose() * cvec;
    const Matrix lhs = N.transpose() * G2 * N;
    const Vector rhs = N.transpose() * (g2 - G2 * beta1);
    const Vector z = pseudo_solve(lhs, rhs, rank_tol).col(0);
    out.beta = beta1 + N * z;
    return out;
}

} // namespace causalreg
