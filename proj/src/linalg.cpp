#include "causalreg/linalg.hpp"

#include "causalreg/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace causalreg {

bool all_finite(const Matrix& M) {
    return M.allFinite();
}

void require_finite(const Matrix& M, const char* what) {
    if (!M.allFinite()) {
        throw InvalidInput(std::string(what) + ": non-finite entries");
    }
}

Vector column_means(const Matrix& M) {
    if (M.rows() == 0) return Vector::Zero(M.cols());
    return M.colwise().mean().transpose();
}

Matrix center_columns(const Matrix& M) {
    if (M.rows() == 0) return M;
    return M.rowwise() - M.colwise().mean();
}

double default_rank_tol(Index rows, Index cols) {
    return 1e-10 * static_cast<double>(std::max<Index>({rows, cols, 1}));
}

SvdFactors svd(const Matrix& M) {
    if (M.rows() == 0 || M.cols() == 0) {
        throw InvalidInput("svd: empty matrix");
    }
    require_finite(M, "svd");

    Eigen::BDCSVD<Matrix> dec(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SvdFactors f{dec.matrixU(), dec.singularValues(), dec.matrixV()};

    // Sign convention: largest |entry| of each U column is positive. Ties
    // resolve to the first index so the choice is deterministic.
    for (Index k = 0; k < f.U.cols(); ++k) {
        Index arg = 0;
        f.U.col(k).cwiseAbs().maxCoeff(&arg);
        if (f.U(arg, k) < 0.0) {
            f.U.col(k) *= -1.0;
            f.V.col(k) *= -1.0;
        }
    }
    return f;
}

Index SvdFactors::rank(double rel_tol) const {
    if (d.size() == 0 || d(0) <= 0.0) return 0;
    const double cut = rel_tol * d(0);
    Index r = 0;
    while (r < d.size() && d(r) > cut) ++r;
    return r;
}

Matrix SvdFactors::reconstruct() const {
    return U * d.asDiagonal() * V.transpose();
}

Projector::Projector(Matrix basis, double rank_tolerance)
    : basis_(std::move(basis)), rank_tol_(rank_tolerance) {}

Matrix Projector::apply(const Matrix& M) const {
    if (M.rows() != rows()) {
        throw InvalidInput("projector: row count mismatch (" + std::to_string(M.rows()) +
                           " vs " + std::to_string(rows()) + ")");
    }
    if (rank() == 0) return Matrix::Zero(M.rows(), M.cols());
    return basis_ * (basis_.transpose() * M);
}

Matrix Projector::residualize(const Matrix& M) const {
    return M - apply(M);
}

Matrix Projector::dense() const {
    return apply(Matrix::Identity(rows(), rows()));
}

Projector projector_from(const Matrix& A, double tol) {
    if (A.rows() == 0) throw InvalidInput("projector_from: A has no rows");
    if (!(tol > 0.0)) throw InvalidInput("projector_from: tolerance must be positive");
    require_finite(A, "projector_from");
    if (A.cols() == 0 || A.isZero(0.0)) {
        return Projector(Matrix(A.rows(), 0), tol);
    }
    const SvdFactors f = svd(A);
    const Index k = f.rank(tol);
    return Projector(f.U.leftCols(k), tol);
}

Projector projector_from(const Matrix& A) {
    return projector_from(A, default_rank_tol(A.rows(), A.cols()));
}

Matrix apply_proj(const Projector& P, const Matrix& M) {
    return P.apply(M);
}

Matrix residualize(const Projector& P, const Matrix& M) {
    return P.residualize(M);
}

Matrix pseudo_solve(const SvdFactors& f, const Matrix& b, double tol) {
    if (b.rows() != f.U.rows()) {
        throw InvalidInput("pseudo_solve: right-hand side has " + std::to_string(b.rows()) +
                           " rows, expected " + std::to_string(f.U.rows()));
    }
    const Index k = f.rank(tol);
    if (k == 0) return Matrix::Zero(f.V.rows(), b.cols());
    const Matrix coef = f.U.leftCols(k).transpose() * b;
    return f.V.leftCols(k) * (f.d.head(k).cwiseInverse().asDiagonal() * coef);
}

Matrix pseudo_solve(const Matrix& M, const Matrix& b, double tol) {
    if (M.rows() != b.rows()) {
        throw InvalidInput("pseudo_solve: row mismatch");
    }
    require_finite(b, "pseudo_solve");
    if (M.isZero(0.0)) return Matrix::Zero(M.cols(), b.cols());
    return pseudo_solve(svd(M), b, tol);
}

Matrix pseudo_solve(const Matrix& M, const Matrix& b) {
    return pseudo_solve(M, b, default_rank_tol(M.rows(), M.cols()));
}

Matrix null_space(const Matrix& M, double tol) {
    const Index p = M.cols();
    if (p == 0) return Matrix(0, 0);
    if (M.rows() == 0 || M.isZero(0.0)) return Matrix::Identity(p, p);
    Eigen::BDCSVD<Matrix> dec(M, Eigen::ComputeFullV);
    const Vector& d = dec.singularValues();
    Index k = 0;
    while (k < d.size() && d(k) > tol * d(0)) ++k;
    return dec.matrixV().rightCols(p - k);
}

} // namespace causalreg
