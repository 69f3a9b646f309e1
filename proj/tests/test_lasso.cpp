#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"

#include "causalreg/deconfound.hpp"
#include "causalreg/error.hpp"
#include "causalreg/lasso.hpp"
#include "causalreg/sem.hpp"

#include <algorithm>
#include <set>

using namespace causalreg;
using testutil::gaussian;
using testutil::max_abs_diff;

namespace {

LassoConfig with_lambda(double lambda) {
    LassoConfig cfg;
    cfg.lambda = lambda;
    return cfg;
}

// Independent KKT check from the raw data.
double kkt_from_scratch(const Matrix& X, const Vector& y, const SparseFit& fit) {
    const double n = static_cast<double>(X.rows());
    const Vector r = (y - X * fit.beta).array() - fit.intercept;
    double worst = std::abs(r.mean()) * 2.0;
    for (Index j = 0; j < X.cols(); ++j) {
        const double g = 2.0 * X.col(j).dot(r) / n;
        if (fit.beta(j) == 0.0) {
            worst = std::max(worst, std::abs(g) - fit.lambda);
        } else {
            worst = std::max(worst, std::abs(g - fit.lambda * (fit.beta(j) > 0 ? 1.0 : -1.0)));
        }
    }
    return worst;
}

} // namespace

TEST_SUITE("lasso") {

TEST_CASE("lambda at lambda_max gives the null model") {
    const auto d = testutil::sparse_linear(60, 10, 1);
    const double lmax = lambda_max(d.X, d.y);
    const Vector yc = oracle::centered(d.y);
    const Matrix Xc = oracle::centered(d.X);
    CHECK(lmax == doctest::Approx(2.0 * (Xc.transpose() * yc).cwiseAbs().maxCoeff() / 60.0));
    const SparseFit fit = lasso(d.X, d.y, with_lambda(lmax));
    CHECK(fit.support_size() == 0);
    CHECK(fit.intercept == doctest::Approx(d.y.mean()));
    CHECK(lasso(d.X, d.y, with_lambda(0.99 * lmax)).support_size() >= 1);
}

TEST_CASE("single predictor matches the soft-threshold closed form") {
    const Matrix x = oracle::centered(Matrix(gaussian(50, 1, 3)));
    const Vector y = 2.0 * x.col(0) + 0.3 * testutil::gaussian_vector(50, 4);
    const Vector yc = oracle::centered(y);
    for (double lambda : {0.05, 0.5, 2.0, 10.0}) {
        const double n = 50.0;
        const double expected =
            oracle::soft_threshold(x.col(0).dot(yc) / n, lambda / 2.0) / (x.col(0).squaredNorm() / n);
        const SparseFit fit = lasso(x, y, with_lambda(lambda));
        CHECK(fit.beta(0) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("orthonormal design with lambda 0 reproduces OLS") {
    const Matrix Q = oracle::centered(Matrix(gaussian(40, 5, 5))).householderQr().householderQ() *
                     Matrix::Identity(40, 5);
    const Vector y = testutil::gaussian_vector(40, 6);
    const SparseFit fit = lasso(Q, y, with_lambda(0.0));
    const oracle::LinearFit ref = oracle::ols(Q, y);
    CHECK(max_abs_diff(fit.beta, ref.beta) < 1e-8);
    CHECK(fit.intercept == doctest::Approx(ref.intercept).epsilon(1e-10));
}

TEST_CASE("lambda 0 with a rank-deficient design is degenerate") {
    Matrix X = gaussian(20, 3, 1);
    X.col(2) = X.col(1);
    CHECK_THROWS_AS(lasso(X, testutil::gaussian_vector(20, 2), with_lambda(0.0)), DegenerateProblem);
    CHECK_THROWS_AS(lasso(X, testutil::gaussian_vector(20, 2), with_lambda(-1.0)), InvalidInput);
    CHECK_THROWS_AS(lasso(X, testutil::gaussian_vector(19, 2), with_lambda(1.0)), InvalidInput);
}

TEST_CASE("solver agrees with plain cyclic coordinate descent") {
    for (auto [n, p, seed] : {std::tuple<Index, Index, int>{80, 20, 1}, {40, 120, 2}, {100, 300, 3}}) {
        const auto d = testutil::sparse_linear(n, p, static_cast<std::uint64_t>(seed));
        const double lmax = lambda_max(d.X, d.y);
        for (double frac : {0.5, 0.1, 0.02}) {
            const SparseFit fit = lasso(d.X, d.y, with_lambda(frac * lmax));
            const oracle::LinearFit ref = oracle::lasso_cd(d.X, d.y, frac * lmax);
            CHECK(fit.converged);
            CHECK(max_abs_diff(fit.beta, ref.beta) < 1e-6);
            const double obj_ref = lasso_objective(d.X, d.y, ref.beta, ref.intercept, frac * lmax);
            CHECK(fit.objective <= obj_ref + 1e-9);
        }
    }
}

TEST_CASE("returned fits carry a valid KKT certificate and objective") {
    const auto d = testutil::sparse_linear(60, 150, 9);
    const double lmax = lambda_max(d.X, d.y);
    for (double frac : {0.7, 0.2, 0.05, 0.01}) {
        const SparseFit fit = lasso(d.X, d.y, with_lambda(frac * lmax));
        CHECK(fit.converged);
        CHECK(kkt_from_scratch(d.X, d.y, fit) <= 1e-7 * 1.0001);
        CHECK(kkt_violation(d.X, d.y, fit.beta, fit.intercept, fit.lambda) <= 1e-7 * 1.0001);
        const Vector r = (d.y - d.X * fit.beta).array() - fit.intercept;
        const double obj = r.squaredNorm() / 60.0 + fit.lambda * fit.beta.lpNorm<1>();
        CHECK(fit.objective == doctest::Approx(obj).epsilon(1e-12));
    }
}

TEST_CASE("scaling the response scales the solution") {
    const auto d = testutil::sparse_linear(70, 30, 4);
    const double lambda = 0.1 * lambda_max(d.X, d.y);
    const double c = 3.5;
    const SparseFit a = lasso(d.X, d.y, with_lambda(lambda));
    const SparseFit b = lasso(d.X, Vector(c * d.y), with_lambda(c * lambda));
    CHECK(max_abs_diff(b.beta, c * a.beta) < 1e-6 * c);
    const LassoConfig tight{c * lambda, 100000, 1e-12, false};
    const LassoConfig tight1{lambda, 100000, 1e-12, false};
    CHECK(max_abs_diff(lasso(d.X, Vector(c * d.y), tight).beta, c * lasso(d.X, d.y, tight1).beta) <
          1e-8);
}

TEST_CASE("standardised fits report coefficients on the original scale") {
    auto d = testutil::sparse_linear(80, 6, 12);
    d.X.col(0) *= 10.0;
    LassoConfig cfg;
    cfg.lambda = 0.0;
    cfg.standardize = true;
    const SparseFit fit = lasso(d.X, d.y, cfg);
    CHECK(max_abs_diff(fit.beta, oracle::ols(d.X, d.y).beta) < 1e-8);
}

TEST_CASE("lasso path basics") {
    const auto d = testutil::sparse_linear(100, 40, 5);
    const double lmax = lambda_max(d.X, d.y);
    const auto single = lasso_path(d.X, d.y, {lmax}, LassoConfig{});
    REQUIRE(single.size() == 1);
    CHECK(single[0].support_size() == 0);
    CHECK_THROWS_AS(lasso_path(d.X, d.y, {}, LassoConfig{}), InvalidInput);
    CHECK_THROWS_AS(lasso_path(d.X, d.y, {0.1, 0.2}, LassoConfig{}), InvalidInput);

    const auto grid = default_lambda_grid(d.X, d.y);
    REQUIRE(grid.size() == 50);
    CHECK(grid.front() == doctest::Approx(lmax));
    CHECK(grid.back() == doctest::Approx(0.01 * lmax));
    for (std::size_t i = 1; i < grid.size(); ++i) {
        CHECK(std::log(grid[i - 1] / grid[i]) == doctest::Approx(std::log(100.0) / 49.0));
    }
    const auto path = lasso_path(d.X, d.y, grid, LassoConfig{});
    int monotone = 0;
    for (std::size_t i = 1; i < path.size(); ++i) {
        monotone += path[i].support_size() >= path[i - 1].support_size() ? 1 : 0;
    }
    CHECK(monotone >= static_cast<int>(0.9 * 49));
    const SparseFit cold = lasso(d.X, d.y, with_lambda(grid.back()));
    CHECK(max_abs_diff(path.back().beta, cold.beta) < 1e-6);

    const auto stopped = lasso_path(d.X, d.y, grid, LassoConfig{}, 3);
    CHECK(stopped.back().support_size() >= 3);
    for (std::size_t i = 0; i + 1 < stopped.size(); ++i) CHECK(stopped[i].support_size() < 3);
}

TEST_CASE("fold assignment is a seed-deterministic balanced partition") {
    const auto a = fold_assignment(23, 5, 7);
    CHECK(a == fold_assignment(23, 5, 7));
    CHECK(a != fold_assignment(23, 5, 8));
    std::vector<int> counts(5, 0);
    for (int f : a) counts[static_cast<std::size_t>(f)] += 1;
    CHECK(*std::min_element(counts.begin(), counts.end()) >= 4);
    CHECK(*std::max_element(counts.begin(), counts.end()) <= 5);
}

TEST_CASE("cross-validation recovers a noiseless model") {
    causalreg::Rng rng(3);
    const Matrix X = rng.normal_matrix(60, 3);
    const Vector y = X * Vector::LinSpaced(3, 1.0, 3.0);
    // The grid reaches 1e-4 lambda_max so the last fit carries almost no shrinkage.
    const CvResult cv = cv_lasso(X, y, 5, default_lambda_grid(X, y, 50, 1e-4), LassoConfig{}, 1);
    CHECK(cv.index_min == static_cast<Index>(cv.lambda_grid.size()) - 1);
    CHECK(cv.mean_cv_error[static_cast<std::size_t>(cv.index_min)] < 1e-3);
}

TEST_CASE("cv bookkeeping invariants and seed determinism") {
    const auto d = testutil::sparse_linear(80, 30, 2);
    const CvResult a = cv_lasso(d.X, d.y, 10, {}, LassoConfig{}, 5, 1);
    const CvResult b = cv_lasso(d.X, d.y, 10, {}, LassoConfig{}, 5, 3);
    CHECK(a.mean_cv_error == b.mean_cv_error);
    CHECK(a.se == b.se);
    const auto best = std::min_element(a.mean_cv_error.begin(), a.mean_cv_error.end());
    CHECK(a.lambda_min == a.lambda_grid[static_cast<std::size_t>(best - a.mean_cv_error.begin())]);
    const double bound = *best + a.se[static_cast<std::size_t>(a.index_min)];
    CHECK(a.mean_cv_error[static_cast<std::size_t>(a.index_1se)] <= bound);
    for (Index l = 0; l < a.index_1se; ++l) CHECK(a.mean_cv_error[static_cast<std::size_t>(l)] > bound);
    CHECK(a.lambda_1se >= a.lambda_min);
    CHECK_THROWS_AS(cv_lasso(d.X, d.y, 1, {}, LassoConfig{}, 1), InvalidInput);
    CHECK_THROWS_AS(cv_lasso(d.X.topRows(3), d.y.head(3), 5, {}, LassoConfig{}, 1), InvalidInput);
}

TEST_CASE("leave-one-out cv matches an explicit loop") {
    const auto d = testutil::sparse_linear(20, 6, 8);
    const std::vector<double> grid = default_lambda_grid(d.X, d.y, 12);
    const CvResult cv = cv_lasso(d.X, d.y, 20, grid, LassoConfig{}, 1);
    std::vector<double> expected(grid.size(), 0.0);
    for (Index i = 0; i < 20; ++i) {
        std::vector<Index> keep;
        for (Index k = 0; k < 20; ++k) {
            if (k != i) keep.push_back(k);
        }
        const Matrix Xtr = d.X(keep, Eigen::all);
        const Vector ytr = d.y(keep);
        const auto path = lasso_path(Xtr, ytr, grid, LassoConfig{});
        for (std::size_t l = 0; l < grid.size(); ++l) {
            const double r = d.y(i) - d.X.row(i).dot(path[l].beta) - path[l].intercept;
            expected[l] += r * r / 20.0;
        }
    }
    for (std::size_t l = 0; l < grid.size(); ++l) {
        CHECK(cv.mean_cv_error[l] == doctest::Approx(expected[l]).epsilon(1e-10));
    }
}

TEST_CASE("pure noise responses mostly pick the null model at lambda_1se") {
    int null_picks = 0;
    for (int s = 0; s < 20; ++s) {
        causalreg::Rng rng(static_cast<std::uint64_t>(100 + s));
        const Matrix X = rng.normal_matrix(80, 20);
        const Vector y = rng.normal_vector(80);
        const CvResult cv = cv_lasso(X, y, 5, {}, LassoConfig{}, static_cast<std::uint64_t>(s));
        null_picks += cv.index_1se == 0 ? 1 : 0;
    }
    CHECK(null_picks > 10);
}

TEST_CASE("stability selection finds a strong signal and rejects noise") {
    causalreg::Rng rng(4);
    const Matrix X = rng.normal_matrix(100, 20);
    const Vector y = 10.0 * X.col(0) + 0.01 * rng.normal_vector(100);
    const auto grid = default_lambda_grid(X, y, 20, 0.3);
    const StabilityResult st = stability_selection(X, y, grid, 20, 0.9, 3);
    CHECK(st.frequencies(0) == 1.0);
    CHECK(std::find(st.selected.begin(), st.selected.end(), 0) != st.selected.end());
    for (Index j : st.selected) CHECK(st.frequencies(j) >= 0.9);
    CHECK(st.subsamples == 20);
    const StabilityResult again = stability_selection(X, y, grid, 20, 0.9, 3, 4);
    CHECK(again.frequencies == st.frequencies);

    int empty = 0;
    for (int s = 0; s < 20; ++s) {
        causalreg::Rng r2(static_cast<std::uint64_t>(500 + s));
        const Matrix Xn = r2.normal_matrix(100, 20);
        const Vector yn = r2.normal_vector(100);
        // Stability selection explores the high-lambda end of the path.
        const auto g = default_lambda_grid(Xn, yn, 10, 0.8);
        empty += stability_selection(Xn, yn, g, 20, 0.9, static_cast<std::uint64_t>(s)).selected.empty();
    }
    CHECK(empty >= 19);
}

TEST_CASE("stability subsamples are distinct half-size draws") {
    const auto a = stability_subsample(40, 9, 0);
    const auto b = stability_subsample(40, 9, 1);
    CHECK(a.size() == 20);
    CHECK(std::set<Index>(a.begin(), a.end()).size() == 20);
    CHECK(a != b);
    CHECK(a == stability_subsample(40, 9, 0));
}

} // TEST_SUITE lasso

TEST_SUITE("deconfound") {

TEST_CASE("positive shrink profiles leave least squares unchanged") {
    causalreg::Rng rng(10);
    const Matrix X = rng.normal_matrix(40, 6);
    const Vector y = X * Vector::LinSpaced(6, -1.0, 1.0) + rng.normal_vector(40);
    const Matrix Xc = oracle::centered(X);
    const Vector yc = oracle::centered(y);
    SvdFactors f = svd(Xc);
    Vector shrink(6);
    for (Index i = 0; i < 6; ++i) shrink(i) = 0.05 + rng.uniform();
    const SpectralTransform T(f, shrink, TransformKind{TrimKind{}}, 0.0);
    const SparseFit raw = lasso(X, y, with_lambda(0.0));
    const SparseFit tr = lasso(T.apply(Xc), T.apply(yc), with_lambda(0.0));
    CHECK(max_abs_diff(raw.beta, tr.beta) < 1e-8);
}

TEST_CASE("trim lasso with lambda 0 on an unconfounded orthonormal design is OLS") {
    causalreg::Rng rng(2);
    const Matrix Q = oracle::centered(rng.normal_matrix(50, 4)).householderQr().householderQ() *
                     Matrix::Identity(50, 4);
    const Vector y = Q * Vector::Ones(4) + 0.1 * rng.normal_vector(50);
    const DeconfoundFit fit = trim_lasso(Q, y, TrimThreshold::median(), LambdaChoice::fixed(0.0));
    CHECK(max_abs_diff(fit.beta, oracle::ols(Q, y).beta) < 1e-8);
}

TEST_CASE("pca adjustment with zero components is the plain lasso") {
    const auto d = testutil::sparse_linear(60, 80, 3);
    const double lambda = 0.1 * lambda_max(d.X, d.y);
    const DeconfoundFit pca = pca_adjust_lasso(d.X, d.y, 0, LambdaChoice::fixed(lambda));
    const SparseFit plain = lasso(d.X, d.y, with_lambda(lambda));
    CHECK(max_abs_diff(pca.beta, plain.beta) < 1e-12);
    CHECK_THROWS_AS(pca_adjust_lasso(d.X, d.y, 60, LambdaChoice::fixed(lambda)), InvalidInput);
}

TEST_CASE("pca adjustment with the true factor count recovers the support") {
    DenseFamily fam;
    fam.n = 200;
    fam.p = 100;
    fam.q = 1;
    fam.s0 = 5;
    fam.signal = 1.0;
    fam.loading_scale = 2.0;
    fam.delta_scale = 3.0;
    const DenseConfoundSpec spec = make_dense_confound(fam, 2);
    const Dataset d = gen_dense_confounded(spec).data;
    // lambda = 2 sigma sqrt(2 log(p^2) / n) with the known sigma = 1: the noise
    // score 2 |X^T eps|_inf / n stays below it with probability >= 1 - 2/p.
    const double lambda = 2.0 * std::sqrt(2.0 * std::log(100.0 * 100.0) / 200.0);
    const DeconfoundFit fit = pca_adjust_lasso(d.X, d.Y, 1, LambdaChoice::fixed(lambda));
    std::vector<Index> truth = {0, 1, 2, 3, 4};
    CHECK(fit.lasso_fit.support() == truth);
    const Matrix Xt = transform_data(d.X, d.Y, PcaKind{1}).X;
    const SvdFactors f = svd(center_columns(d.X));
    CHECK((f.U.col(0).transpose() * Xt).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("lava transformed route agrees with alternating minimisation") {
    causalreg::Rng rng(4);
    const Matrix X = rng.normal_matrix(50, 20);
    const Vector y = X.col(0) * 2.0 + X * Vector::Constant(20, 0.1) + rng.normal_vector(50);
    const double l1 = 0.1 * lambda_max(X, y);
    const DeconfoundFit fit = lava(X, y, LambdaChoice::fixed(l1));
    REQUIRE(fit.dense_part.has_value());
    REQUIRE(fit.lambda2.has_value());
    const oracle::LavaSolution ref = oracle::lava_alternating(X, y, l1, *fit.lambda2);
    CHECK(max_abs_diff(fit.beta, ref.beta) < 1e-6);
    CHECK(max_abs_diff(*fit.dense_part, ref.dense) < 1e-6);
    const double obj = lava_objective(X, y, fit.beta, *fit.dense_part, fit.intercept, l1, *fit.lambda2);
    const double obj_ref = lava_objective(X, y, ref.beta, ref.dense, ref.intercept, l1, *fit.lambda2);
    CHECK(obj <= obj_ref + 1e-8);
    // Median rule.
    const Vector d = svd(center_columns(X)).d;
    const double dm = d(median_position(d.size()));
    CHECK(*fit.lambda2 == doctest::Approx(dm * dm / 50.0).epsilon(1e-12));
}

TEST_CASE("lava with a huge ridge penalty is the plain lasso") {
    const auto d = testutil::sparse_linear(60, 30, 6);
    const double d1 = svd(center_columns(d.X)).d(0);
    const double l1 = 0.05 * lambda_max(d.X, d.y);
    const DeconfoundFit fit = lava(d.X, d.y, LambdaChoice::fixed(l1),
                                   LavaParameter::fixed(1e6 * d1 * d1 / 60.0));
    CHECK(fit.dense_part->cwiseAbs().maxCoeff() < 1e-3);
    CHECK(max_abs_diff(fit.beta, lasso(d.X, d.y, with_lambda(l1)).beta) < 1e-3);
    CHECK_THROWS_AS(lava(d.X, d.y, LambdaChoice::fixed(l1), LavaParameter::fixed(-1.0)), InvalidInput);
}

TEST_CASE("population bias closed forms") {
    CHECK(population_bias(Matrix::Identity(3, 3), Matrix::Ones(3, 2), Vector::Zero(2)).norm() == 0.0);
    Vector g(2);
    g << 1.0, 1.0;
    const Vector b2 = population_bias_one_factor(g, 1.0, 1.0);
    CHECK(b2(0) == doctest::Approx(1.0 / 3.0));
    CHECK(b2(1) == doctest::Approx(1.0 / 3.0));
    const Vector b100 = population_bias_one_factor(Vector::Ones(100), 0.1, 1.0);
    CHECK(b100.norm() >= 0.095);
    CHECK(b100.norm() <= 0.1);
    CHECK_THROWS_AS(population_bias(Matrix::Zero(2, 2), Matrix::Ones(2, 1), Vector::Ones(1)),
                    DegenerateProblem);
}

TEST_CASE("dense confounding bias matches the explicit inverse") {
    DenseFamily fam;
    fam.p = 50;
    const DenseConfoundSpec spec = make_dense_confound(fam, 3);
    CHECK(max_abs_diff(dense_population_bias(spec),
                       oracle::dense_bias(spec.confounder_loading, spec.noise_x_scale, spec.delta)) <
          1e-12);
}

TEST_CASE("trim lasso is close to the lasso without confounding") {
    std::vector<double> rel;
    for (int s = 0; s < 20; ++s) {
        DenseFamily fam;
        fam.n = 100;
        fam.p = 200;
        fam.loading_scale = 0.0;
        fam.delta_scale = 0.0;
        const DenseConfoundSpec spec = make_dense_confound(fam, static_cast<std::uint64_t>(s));
        const Dataset d = gen_dense_confounded(spec).data;
        const LambdaChoice cv = LambdaChoice::cv(static_cast<std::uint64_t>(s), 5);
        const DeconfoundFit trim = trim_lasso(d.X, d.Y, TrimThreshold::median(), cv);
        const DeconfoundFit plain = spectral_lasso(d.X, d.Y, IdentityKind{}, cv);
        rel.push_back((trim.beta - plain.beta).lpNorm<1>() / plain.beta.lpNorm<1>());
    }
    std::nth_element(rel.begin(), rel.begin() + 10, rel.end());
    CHECK(rel[10] <= 0.5);
}

} // TEST_SUITE deconfound

TEST_SUITE("montecarlo") {

TEST_CASE("trim lasso beats the lasso under dense confounding in most seeds") {
    int wins = 0;
    for (int s = 0; s < 20; ++s) {
        DenseFamily fam;  // n = 300, p = 600, q = 3, s0 = 5
        fam.delta_scale = 2.0;
        const DenseConfoundSpec spec = make_dense_confound(fam, static_cast<std::uint64_t>(1000 + s));
        const Dataset d = gen_dense_confounded(spec).data;
        const LambdaChoice cv = LambdaChoice::cv(static_cast<std::uint64_t>(s), 5);
        const double e_trim = (trim_lasso(d.X, d.Y, TrimThreshold::median(), cv).beta - spec.beta0).lpNorm<1>();
        const double e_plain = (spectral_lasso(d.X, d.Y, IdentityKind{}, cv).beta - spec.beta0).lpNorm<1>();
        wins += e_trim < e_plain ? 1 : 0;
    }
    CHECK(wins >= 18);
}

} // TEST_SUITE montecarlo
