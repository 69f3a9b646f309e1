#include "causalreg/lasso.hpp"

#include "causalreg/error.hpp"
#include "causalreg/linalg.hpp"
#include "causalreg/parallel.hpp"
#include "causalreg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace causalreg {

namespace {

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

void check_shapes(const Matrix& X, const Vector& Y) {
    if (X.rows() != Y.size()) {
        throw InvalidInput("lasso: X has " + std::to_string(X.rows()) + " rows but Y has " +
                           std::to_string(Y.size()));
    }
    if (X.rows() < 2 || X.cols() < 1) throw InvalidInput("lasso: need n >= 2 and p >= 1");
    require_finite(X, "lasso X");
    require_finite(Y, "lasso Y");
}

// Centered (optionally scaled) copy of the data shared by all fits of a path.
class CenteredProblem {
public:
    CenteredProblem(const Matrix& X, const Vector& Y, bool standardize)
        : x_mean_(column_means(X)), y_mean_(Y.mean()) {
        Xc_ = X.rowwise() - x_mean_.transpose();
        yc_ = Y.array() - y_mean_;
        const double n = static_cast<double>(X.rows());
        scale_ = Vector::Ones(X.cols());
        if (standardize) {
            for (Index j = 0; j < Xc_.cols(); ++j) {
                const double sd = std::sqrt(Xc_.col(j).squaredNorm() / n);
                if (sd > 0.0) {
                    scale_(j) = sd;
                    Xc_.col(j) /= sd;
                }
            }
        }
        colsq_ = Xc_.colwise().squaredNorm().transpose() / n;
    }

    Index n() const { return Xc_.rows(); }
    Index p() const { return Xc_.cols(); }

    // Warm-startable coordinate descent on the centered problem. beta and r
    // (= yc - Xc beta) are updated in place.
    void solve(double lambda, const LassoConfig& cfg, Vector& beta, Vector& r, SparseFit& out) const {
        const double n = static_cast<double>(Xc_.rows());
        const Index p = Xc_.cols();
        const double half = lambda / 2.0;

        Vector grad = 2.0 * (Xc_.transpose() * r) / n;
        int sweeps = 1;
        std::vector<char> in_set(static_cast<std::size_t>(p), 0);
        std::vector<Index> working;
        auto add = [&](Index j) {
            if (!in_set[static_cast<std::size_t>(j)] && colsq_(j) > 0.0) {
                in_set[static_cast<std::size_t>(j)] = 1;
                working.push_back(j);
            }
        };
        for (Index j = 0; j < p; ++j) {
            if (beta(j) != 0.0 || std::abs(grad(j)) > lambda) add(j);
        }

        double inner_tol = 0.5 * cfg.tol;
        double violation = std::numeric_limits<double>::infinity();
        bool converged = false;
        while (sweeps < cfg.max_iter) {
            std::sort(working.begin(), working.end());
            // Cycle on the working set.
            // Sweeps since the active signs last changed.
            int stable = 0;
            while (sweeps < cfg.max_iter) {
                ++sweeps;
                double max_move = 0.0;
                bool changed = false;
                for (const Index j : working) {
                    const auto xj = Xc_.col(j);
                    const double rho = xj.dot(r) / n + colsq_(j) * beta(j);
                    const double next = soft_threshold(rho, half) / colsq_(j);
                    const double delta = next - beta(j);
                    if (delta != 0.0) {
                        if ((next > 0.0) != (beta(j) > 0.0) || (next < 0.0) != (beta(j) < 0.0)) {
                            changed = true;
                        }
                        r.noalias() -= delta * xj;
                        beta(j) = next;
                        max_move = std::max(max_move, 2.0 * colsq_(j) * std::abs(delta));
                    }
                }
                if (max_move <= inner_tol) break;
                stable = changed ? 0 : stable + 1;
                if (stable == 3 && polish(lambda, beta, r)) break;
            }

            // Full KKT certificate.
            ++sweeps;
            grad.noalias() = 2.0 * (Xc_.transpose() * r) / n;
            violation = 0.0;
            bool grew = false;
            for (Index j = 0; j < p; ++j) {
                if (colsq_(j) <= 0.0) continue;
                const double v = beta(j) == 0.0 ? std::max(0.0, std::abs(grad(j)) - lambda)
                                                : std::abs(grad(j) - lambda * (beta(j) > 0 ? 1.0 : -1.0));
                violation = std::max(violation, v);
                if (v > cfg.tol && !in_set[static_cast<std::size_t>(j)]) {
                    add(j);
                    grew = true;
                }
            }
            if (violation <= cfg.tol) {
                converged = true;
                break;
            }
            if (!grew) inner_tol *= 0.1;
        }
        out.n_iter = sweeps;
        out.converged = converged;
        out.kkt_violation = violation;
    }

    // Solves the stationarity equations on the current active set with its
    // signs held fixed. Accepted only if no sign flips; the caller still runs
    // the full KKT check. Slow CD tails on near-singular designs end here.
    bool polish(double lambda, Vector& beta, Vector& r) const {
        std::vector<Index> active;
        for (Index j = 0; j < beta.size(); ++j) {
            if (beta(j) != 0.0) active.push_back(j);
        }
        const Index k = static_cast<Index>(active.size());
        if (k == 0 || k >= Xc_.rows() - 1) return false;
        const double n = static_cast<double>(Xc_.rows());
        if (gram_cols_.empty()) {
            gram_cols_.resize(static_cast<std::size_t>(p()));
            xty_ = Xc_.transpose() * yc_ / n;
        }
        Matrix G(k, k);
        Vector rhs(k);
        for (Index a = 0; a < k; ++a) {
            const Index j = active[static_cast<std::size_t>(a)];
            Vector& col = gram_cols_[static_cast<std::size_t>(j)];
            if (col.size() == 0) col = Xc_.transpose() * Xc_.col(j) / n;
            for (Index b = 0; b < k; ++b) G(b, a) = col(active[static_cast<std::size_t>(b)]);
            rhs(a) = xty_(j) - 0.5 * lambda * (beta(j) > 0.0 ? 1.0 : -1.0);
        }
        const Eigen::LLT<Matrix> llt(G);
        if (llt.info() != Eigen::Success) return false;
        const Vector b = llt.solve(rhs);
        if (!b.allFinite()) return false;
        for (Index a = 0; a < k; ++a) {
            if (b(a) * beta(active[static_cast<std::size_t>(a)]) <= 0.0) return false;
        }
        r = yc_;
        for (Index a = 0; a < k; ++a) {
            const Index j = active[static_cast<std::size_t>(a)];
            beta(j) = b(a);
            r.noalias() -= b(a) * Xc_.col(j);
        }
        return true;
    }

    SparseFit finish(const Vector& beta_scaled, double lambda, const SparseFit& stats,
                     const Matrix& X, const Vector& Y) const {
        SparseFit fit = stats;
        fit.lambda = lambda;
        fit.beta = beta_scaled.cwiseQuotient(scale_);
        fit.intercept = y_mean_ - x_mean_.dot(fit.beta);
        fit.objective = lasso_objective(X, Y, fit.beta, fit.intercept, lambda);
        return fit;
    }

    const Matrix& Xc() const { return Xc_; }
    const Vector& yc() const { return yc_; }

private:
    Vector x_mean_;
    double y_mean_;
    Matrix Xc_;
    Vector yc_;
    Vector scale_;
    Vector colsq_;
    // Lazily filled Gram columns X_c^T x_j / n used by polish().
    mutable std::vector<Vector> gram_cols_;
    mutable Vector xty_;
};

SparseFit least_squares_fit(const CenteredProblem& prob, const Matrix& X, const Vector& Y) {
    const SvdFactors f = svd(prob.Xc());
    const double tol = default_rank_tol(prob.n(), prob.p());
    if (f.rank(tol) < prob.p()) {
        throw DegenerateProblem("lasso: lambda = 0 needs rank(X) = p after centering");
    }
    const Vector beta = pseudo_solve(f, prob.yc(), tol).col(0);
    SparseFit stats;
    stats.converged = true;
    SparseFit fit = prob.finish(beta, 0.0, stats, X, Y);
    fit.kkt_violation = kkt_violation(X, Y, fit.beta, fit.intercept, 0.0);
    return fit;
}

void check_config(const LassoConfig& cfg) {
    if (!(cfg.lambda >= 0.0)) throw InvalidInput("lasso: lambda must be >= 0");
    if (!(cfg.tol > 0.0)) throw InvalidInput("lasso: tol must be positive");
    if (cfg.max_iter < 1) throw InvalidInput("lasso: max_iter must be >= 1");
}

} // namespace

Index SparseFit::support_size() const {
    return (beta.array() != 0.0).count();
}

std::vector<Index> SparseFit::support() const {
    std::vector<Index> s;
    for (Index j = 0; j < beta.size(); ++j)
        if (beta(j) != 0.0) s.push_back(j);
    return s;
}

double lasso_objective(const Matrix& X, const Vector& Y, const Vector& beta, double intercept,
                       double lambda) {
    const Vector r = (Y - X * beta).array() - intercept;
    return r.squaredNorm() / static_cast<double>(Y.size()) + lambda * beta.lpNorm<1>();
}

double kkt_violation(const Matrix& X, const Vector& Y, const Vector& beta, double intercept,
                     double lambda) {
    const double n = static_cast<double>(Y.size());
    const Vector r = (Y - X * beta).array() - intercept;
    const Vector g = 2.0 * (X.transpose() * r) / n;
    double worst = std::abs(2.0 * r.sum() / n);  // intercept stationarity
    for (Index j = 0; j < beta.size(); ++j) {
        const double v = beta(j) == 0.0 ? std::max(0.0, std::abs(g(j)) - lambda)
                                        : std::abs(g(j) - lambda * (beta(j) > 0 ? 1.0 : -1.0));
        worst = std::max(worst, v);
    }
    return worst;
}

double lambda_max(const Matrix& X, const Vector& Y) {
    check_shapes(X, Y);
    const Vector yc = Y.array() - Y.mean();
    const Matrix Xc = center_columns(X);
    return 2.0 * (Xc.transpose() * yc).cwiseAbs().maxCoeff() / static_cast<double>(X.rows());
}

std::vector<double> default_lambda_grid(const Matrix& X, const Vector& Y, int count, double ratio) {
    if (count < 1) throw InvalidInput("lambda grid: count must be >= 1");
    if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidInput("lambda grid: ratio must be in (0, 1)");
    double top = lambda_max(X, Y);
    if (!(top > 0.0)) top = 1e-8;
    std::vector<double> grid(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const double t = count == 1 ? 0.0 : static_cast<double>(k) / (count - 1);
        grid[static_cast<std::size_t>(k)] = top * std::pow(ratio, t);
    }
    return grid;
}

SparseFit lasso(const Matrix& X, const Vector& Y, const LassoConfig& cfg) {
    check_shapes(X, Y);
    check_config(cfg);
    const CenteredProblem prob(X, Y, cfg.standardize);
    if (cfg.lambda == 0.0) return least_squares_fit(prob, X, Y);
    Vector beta = Vector::Zero(prob.p());
    Vector r = prob.yc();
    SparseFit stats;
    prob.solve(cfg.lambda, cfg, beta, r, stats);
    return prob.finish(beta, cfg.lambda, stats, X, Y);
}

std::vector<SparseFit> lasso_path(const Matrix& X, const Vector& Y,
                                  const std::vector<double>& grid, const LassoConfig& cfg,
                                  Index stop_at_support) {
    check_shapes(X, Y);
    check_config(cfg);
    if (grid.empty()) throw InvalidInput("lasso_path: empty grid");
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!(grid[k] >= 0.0)) throw InvalidInput("lasso_path: lambda must be >= 0");
        if (k > 0 && !(grid[k] < grid[k - 1])) {
            throw InvalidInput("lasso_path: grid must be strictly descending");
        }
    }
    const CenteredProblem prob(X, Y, cfg.standardize);
    std::vector<SparseFit> out;
    out.reserve(grid.size());
    Vector beta = Vector::Zero(prob.p());
    Vector r = prob.yc();
    for (const double lambda : grid) {
        if (lambda == 0.0) {
            out.push_back(least_squares_fit(prob, X, Y));
            continue;
        }
        SparseFit stats;
        prob.solve(lambda, cfg, beta, r, stats);
        out.push_back(prob.finish(beta, lambda, stats, X, Y));
        if (stop_at_support > 0 && out.back().support_size() >= stop_at_support) break;
    }
    return out;
}

std::vector<int> fold_assignment(Index n, int folds, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0));
    const std::vector<Index> perm = rng.permutation(n);
    std::vector<int> fold(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        fold[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] =
            static_cast<int>(i % folds);
    }
    return fold;
}

CvResult cv_lasso(const Matrix& X, const Vector& Y, int folds, std::vector<double> grid,
                  const LassoConfig& cfg, std::uint64_t seed, int threads) {
    check_shapes(X, Y);
    const Index n = X.rows();
    if (folds < 2) throw InvalidInput("cv_lasso: folds must be >= 2");
    if (n < folds) throw InvalidInput("cv_lasso: fewer rows than folds");
    if (grid.empty()) grid = default_lambda_grid(X, Y);

    const std::vector<int> fold = fold_assignment(n, folds, seed);
    const std::size_t L = grid.size();
    std::vector<std::vector<double>> fold_mse(static_cast<std::size_t>(folds));

    parallel_for(static_cast<std::size_t>(folds), threads, [&](std::size_t k) {
        std::vector<Index> train, test;
        for (Index i = 0; i < n; ++i) {
            (fold[static_cast<std::size_t>(i)] == static_cast<int>(k) ? test : train).push_back(i);
        }
        if (test.empty()) throw InvalidInput("cv_lasso: empty fold");
        const Matrix Xtr = X(train, Eigen::all);
        const Vector Ytr = Y(train);
        const Matrix Xte = X(test, Eigen::all);
        const Vector Yte = Y(test);
        const std::vector<SparseFit> path = lasso_path(Xtr, Ytr, grid, cfg);
        std::vector<double>& mse = fold_mse[k];
        mse.resize(L);
        for (std::size_t l = 0; l < L; ++l) {
            const Vector res = (Yte - Xte * path[l].beta).array() - path[l].intercept;
            mse[l] = res.squaredNorm() / static_cast<double>(test.size());
        }
    });

    CvResult out;
    out.lambda_grid = grid;
    out.folds = folds;
    out.mean_cv_error.assign(L, 0.0);
    out.se.assign(L, 0.0);
    const double K = static_cast<double>(folds);
    for (std::size_t l = 0; l < L; ++l) {
        double mean = 0.0;
        for (int k = 0; k < folds; ++k) mean += fold_mse[static_cast<std::size_t>(k)][l];
        mean /= K;
        double ss = 0.0;
        for (int k = 0; k < folds; ++k) {
            const double d = fold_mse[static_cast<std::size_t>(k)][l] - mean;
            ss += d * d;
        }
        out.mean_cv_error[l] = mean;
        out.se[l] = std::sqrt(ss / (K - 1.0) / K);
    }
    // First minimum in grid order, i.e. the largest lambda among ties.
    std::size_t best = 0;
    for (std::size_t l = 1; l < L; ++l)
        if (out.mean_cv_error[l] < out.mean_cv_error[best]) best = l;
    const double bound = out.mean_cv_error[best] + out.se[best];
    std::size_t one_se = best;
    for (std::size_t l = 0; l <= best; ++l) {
        if (out.mean_cv_error[l] <= bound) {
            one_se = l;
            break;
        }
    }
    out.index_min = static_cast<Index>(best);
    out.index_1se = static_cast<Index>(one_se);
    out.lambda_min = grid[best];
    out.lambda_1se = grid[one_se];
    return out;
}

std::vector<Index> stability_subsample(Index n, std::uint64_t seed, int b) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(b) + 1));
    std::vector<Index> rows = rng.sample_without_replacement(n, n / 2);
    std::sort(rows.begin(), rows.end());
    return rows;
}

StabilityResult stability_selection(const Matrix& X, const Vector& Y,
                                    const std::vector<double>& grid, int subsamples,
                                    double threshold, std::uint64_t seed, int threads) {
    check_shapes(X, Y);
    if (subsamples < 2) throw InvalidInput("stability_selection: subsamples must be >= 2");
    if (!(threshold > 0.5 && threshold <= 1.0)) {
        throw InvalidInput("stability_selection: threshold must lie in (0.5, 1]");
    }
    if (grid.empty()) throw InvalidInput("stability_selection: empty grid");
    const Index p = X.cols();
    std::vector<std::vector<char>> hit(static_cast<std::size_t>(subsamples));

    parallel_for(static_cast<std::size_t>(subsamples), threads, [&](std::size_t b) {
        const std::vector<Index> rows = stability_subsample(X.rows(), seed, static_cast<int>(b));
        const std::vector<SparseFit> path =
            lasso_path(X(rows, Eigen::all), Y(rows), grid, LassoConfig{});
        std::vector<char>& h = hit[b];
        h.assign(static_cast<std::size_t>(p), 0);
        for (const auto& fit : path)
            for (Index j = 0; j < p; ++j)
                if (fit.beta(j) != 0.0) h[static_cast<std::size_t>(j)] = 1;
    });

    StabilityResult out;
    out.threshold = threshold;
    out.subsamples = subsamples;
    out.frequencies = Vector::Zero(p);
    for (const auto& h : hit)
        for (Index j = 0; j < p; ++j) out.frequencies(j) += h[static_cast<std::size_t>(j)];
    out.frequencies /= static_cast<double>(subsamples);
    for (Index j = 0; j < p; ++j)
        if (out.frequencies(j) >= threshold) out.selected.push_back(j);
    return out;
}

} // namespace causalreg
