#pragma once

#include "causalreg/types.hpp"

namespace causalreg {

/// Thin SVD M = U diag(d) V^T with m = min(n, p) columns, d descending.
/// Columns are sign-normalised: the largest-magnitude entry of every U column
/// is positive (V columns flipped to match), so results are reproducible.
struct SvdFactors {
    Matrix U;
    Vector d;
    Matrix V;

    Index rank(double rel_tol) const;
    Matrix reconstruct() const;
};

SvdFactors svd(const Matrix& M);

/// Default relative rank tolerance for an n x p matrix: 1e-10 * max(n, p).
double default_rank_tol(Index rows, Index cols);

/// Orthogonal projector onto col(A), stored through an orthonormal basis.
class Projector {
public:
    Projector() = default;
    Projector(Matrix basis, double rank_tolerance);

    Index rows() const { return basis_.rows(); }
    Index rank() const { return basis_.cols(); }
    double rank_tolerance() const { return rank_tol_; }
    const Matrix& basis() const { return basis_; }

    /// Pi * M
    Matrix apply(const Matrix& M) const;
    /// (I - Pi) * M
    Matrix residualize(const Matrix& M) const;
    /// Dense n x n matrix, only for tests and small problems.
    Matrix dense() const;

private:
    Matrix basis_;
    double rank_tol_ = 0.0;
};

/// Rank = number of singular values of A above tol * d_1. An all-zero A
/// gives the rank-0 projector. A with zero rows is rejected.
Projector projector_from(const Matrix& A, double tol);
Projector projector_from(const Matrix& A);

Matrix apply_proj(const Projector& P, const Matrix& M);
Matrix residualize(const Projector& P, const Matrix& M);

/// Minimum-norm least-squares solution of M x = b; singular values below
/// tol * d_1 are treated as zero.
Matrix pseudo_solve(const Matrix& M, const Matrix& b, double tol);
Matrix pseudo_solve(const Matrix& M, const Matrix& b);

/// Same, reusing an existing factorisation of M.
Matrix pseudo_solve(const SvdFactors& f, const Matrix& b, double tol);

/// Orthonormal basis of the null space of M (columns), using tol * d_1.
Matrix null_space(const Matrix& M, double tol);

Matrix center_columns(const Matrix& M);
Vector column_means(const Matrix& M);

bool all_finite(const Matrix& M);
void require_finite(const Matrix& M, const char* what);

} // namespace causalreg
