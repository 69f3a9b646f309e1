#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"

#include "causalreg/error.hpp"
#include "causalreg/inference.hpp"
#include "causalreg/sem.hpp"

#include <algorithm>

using namespace causalreg;
using testutil::gaussian;
using testutil::max_abs_diff;

namespace {

// Kolmogorov-Smirnov distance between a sample and Uniform(0, 1).
double ks_uniform(std::vector<double> u) {
    std::sort(u.begin(), u.end());
    const double n = static_cast<double>(u.size());
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        d = std::max(d, std::max(static_cast<double>(i + 1) / n - u[i], u[i] - static_cast<double>(i) / n));
    }
    return d;
}

LambdaChoice cv5(std::uint64_t seed) {
    LambdaChoice c = LambdaChoice::cv(seed, 5);
    c.grid_size = 20;
    return c;
}

} // namespace

TEST_SUITE("inference") {

TEST_CASE("nodewise residual of independent columns under a huge lambda is the centered column") {
    const Matrix X = gaussian(50, 6, 2);
    const Vector z = nodewise_residual(X, 3, IdentityKind{}, LambdaChoice::fixed(1e6));
    CHECK(max_abs_diff(z, oracle::centered(Vector(X.col(3)))) < 1e-12);
}

TEST_CASE("nodewise residual with two columns and lambda 0 is the OLS residual") {
    const Matrix X = gaussian(40, 2, 3);
    const Vector z = nodewise_residual(X, 0, IdentityKind{}, LambdaChoice::fixed(0.0));
    const oracle::LinearFit f = oracle::ols(X.col(1), X.col(0));
    const Vector expected = (X.col(0) - X.col(1) * f.beta(0)).array() - f.intercept;
    CHECK(max_abs_diff(z, expected) < 1e-10);
}

TEST_CASE("nodewise residual satisfies the KKT orthogonality bound") {
    const Matrix X = gaussian(60, 30, 4);
    const double lambda = 0.1;
    for (const TransformKind& kind : {TransformKind{IdentityKind{}}, TransformKind{TrimKind{}}}) {
        const NodewiseFit nf = nodewise_fit(X, 2, kind, LambdaChoice::fixed(lambda));
        const Matrix Xc = center_columns(X);
        const Matrix Xt = nf.transform.apply(Xc);
        for (Index k = 0; k < 30; ++k) {
            if (k == 2) continue;
            CHECK(std::abs(nf.z.dot(Xt.col(k))) / 60.0 <= lambda / 2.0 + 1e-7);
        }
    }
}

TEST_CASE("nodewise regression rejects constant columns") {
    Matrix X = gaussian(20, 4, 1);
    X.col(1).setConstant(3.0);
    CHECK_THROWS_AS(nodewise_residual(X, 1, IdentityKind{}, LambdaChoice::fixed(0.1)), DegenerateProblem);
    CHECK_THROWS_AS(nodewise_residual(X, 7, IdentityKind{}, LambdaChoice::fixed(0.1)), InvalidInput);
}

TEST_CASE("bias estimate trivial cases") {
    const Matrix X = gaussian(30, 5, 6);
    const Vector z = testutil::gaussian_vector(30, 7);
    Vector beta = Vector::Zero(5);
    beta(2) = 4.0;
    CHECK(debias_bias_estimate(z, X, beta, 2) == 0.0);

    const Matrix Q = gaussian(30, 5, 8).householderQr().householderQ() * Matrix::Identity(30, 5);
    CHECK(std::abs(debias_bias_estimate(Q.col(1), Q, Vector::Ones(5), 1)) < 1e-12);

    CHECK_THROWS_AS(debias_bias_estimate(Q.col(0), Q, Vector::Ones(5), 1), InstabilityError);
}

TEST_CASE("bias estimate matches a term-by-term summation") {
    const Matrix X = gaussian(100, 150, 9);
    const Vector z = testutil::gaussian_vector(100, 10);
    Vector beta = Vector::Zero(150);
    for (Index k = 0; k < 150; k += 7) beta(k) = 0.1 * static_cast<double>(k % 5) - 0.2;
    for (Index j : {0, 7, 33}) {
        CHECK(debias_bias_estimate(z, X, beta, j) ==
              doctest::Approx(oracle::bias_sum(z, X, beta, j)).epsilon(1e-12));
    }
}

TEST_CASE("noise variance estimator") {
    const auto d = testutil::sparse_linear(100, 10, 3, 0.0);
    const SparseFit fit = lasso(d.X, d.y, LassoConfig{1e-8});
    CHECK(noise_variance(d.X, d.y, fit.beta, fit.intercept) < 1e-6);

    causalreg::Rng rng(5);
    const Matrix X = rng.normal_matrix(500, 3);
    const Vector eps = rng.normal_vector(500);
    CHECK(noise_variance(X, eps, Vector::Zero(3)) >= 0.8);
    CHECK(noise_variance(X, eps, Vector::Zero(3)) <= 1.2);

    Vector beta(3);
    beta << 0.5, 0.0, -0.2;
    const double mse = (eps - X * beta).squaredNorm() / 500.0;
    CHECK(noise_variance(X, eps, beta) == doctest::Approx(mse * 500.0 / 498.0).epsilon(1e-14));
    CHECK_THROWS_AS(noise_variance(X.topRows(2), eps.head(2), beta), DegenerateProblem);
}

TEST_CASE("identity transforms with lambda 0 reproduce the OLS coefficient") {
    causalreg::Rng rng(11);
    const Matrix X = rng.normal_matrix(200, 5);
    const Vector y = X * Vector::LinSpaced(5, 1.0, -1.0) + rng.normal_vector(200);
    DdLassoConfig cfg;
    cfg.transform_y = IdentityKind{};
    cfg.transform_nodewise = IdentityKind{};
    cfg.lambda_y = LambdaChoice::fixed(0.0);
    cfg.lambda_nodewise = LambdaChoice::fixed(0.0);
    const oracle::LinearFit ref = oracle::ols(X, y);
    for (Index j = 0; j < 5; ++j) {
        const InferenceResult r = dd_lasso(X, y, j, cfg);
        CHECK(r.estimate == doctest::Approx(ref.beta(j)).epsilon(1e-8));
        CHECK(r.method == InferenceMethod::Debiased);
    }
}

TEST_CASE("debiased lasso is dd_lasso with identity transforms") {
    const auto d = testutil::sparse_linear(80, 120, 12);
    const LambdaChoice ly = LambdaChoice::fixed(0.2), lz = LambdaChoice::fixed(0.3);
    DdLassoConfig cfg;
    cfg.transform_y = IdentityKind{};
    cfg.transform_nodewise = IdentityKind{};
    cfg.lambda_y = ly;
    cfg.lambda_nodewise = lz;
    const InferenceResult a = debiased_lasso(d.X, d.y, 1, ly, lz);
    const InferenceResult b = dd_lasso(d.X, d.y, 1, cfg);
    CHECK(a.estimate == b.estimate);
    CHECK(a.se == b.se);
    CHECK(a.p_value == b.p_value);
}

TEST_CASE("results are well formed and invariant to flipping the response sign") {
    const auto d = testutil::sparse_linear(80, 100, 13);
    DdLassoConfig cfg;
    cfg.lambda_y = cv5(3);
    cfg.lambda_nodewise = cv5(4);
    const std::vector<Index> coords = {0, 5, 50};
    const auto pos = dd_lasso(d.X, d.y, coords, cfg);
    const auto neg = dd_lasso(d.X, Vector(-d.y), coords, cfg);
    const auto par = dd_lasso(d.X, d.y, coords, cfg, 3);
    for (std::size_t k = 0; k < coords.size(); ++k) {
        CHECK(pos[k].se > 0.0);
        CHECK(std::isfinite(pos[k].se));
        CHECK(pos[k].ci_low < pos[k].estimate);
        CHECK(pos[k].ci_high > pos[k].estimate);
        CHECK(pos[k].ci_high - pos[k].estimate ==
              doctest::Approx(normal_quantile(0.975) * pos[k].se).epsilon(1e-12));
        CHECK(pos[k].p_value >= 0.0);
        CHECK(pos[k].p_value <= 1.0);
        CHECK(std::abs(pos[k].p_value - neg[k].p_value) <= 1e-12);
        CHECK(pos[k].estimate == doctest::Approx(-neg[k].estimate).epsilon(1e-9));
        CHECK(pos[k].estimate == par[k].estimate);
        CHECK(pos[k].method == InferenceMethod::DoublyDebiased);
    }
}

TEST_CASE("input validation") {
    const auto d = testutil::sparse_linear(30, 10, 1);
    DdLassoConfig cfg;
    cfg.lambda_y = LambdaChoice::fixed(0.1);
    cfg.lambda_nodewise = LambdaChoice::fixed(0.1);
    CHECK_THROWS_AS(dd_lasso(d.X.topRows(10), d.y.head(10), 0, cfg), InvalidInput);
    CHECK_THROWS_AS(dd_lasso(d.X, d.y, 10, cfg), InvalidInput);
    cfg.confidence_level = 1.0;
    CHECK_THROWS_AS(dd_lasso(d.X, d.y, 0, cfg), InvalidInput);
}

TEST_CASE("normal helpers") {
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(two_sided_p_value(1.959963984540054) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(two_sided_p_value(0.0) == 1.0);
}

} // TEST_SUITE inference

TEST_SUITE("montecarlo") {

TEST_CASE("dd_lasso p-values at a null coordinate are close to uniform under confounding") {
    DenseFamily fam;
    fam.n = 200;
    fam.p = 300;
    fam.delta_scale = 2.0;
    const DenseConfoundSpec spec = make_dense_confound(fam, 21);
    const Index j = spec.s0;  // first null coordinate
    std::vector<double> pvals;
    for (int rep = 0; rep < 200; ++rep) {
        const std::uint64_t rs = derive_seed(21, static_cast<std::uint64_t>(rep) + 2);
        const Dataset d = gen_dense_confounded(spec, rs).data;
        DdLassoConfig cfg;
        cfg.lambda_y = cv5(rs);
        cfg.lambda_nodewise = cv5(rs);
        pvals.push_back(dd_lasso(d.X, d.Y, j, cfg).p_value);
    }
    CHECK(ks_uniform(pvals) <= 0.12);
}

TEST_CASE("debiased lasso covers at the nominal level without confounding") {
    DenseFamily fam;
    fam.n = 200;
    fam.p = 100;
    fam.loading_scale = 0.0;
    fam.delta_scale = 0.0;
    const DenseConfoundSpec spec = make_dense_confound(fam, 22);
    int covered = 0;
    for (int rep = 0; rep < 200; ++rep) {
        const std::uint64_t rs = derive_seed(22, static_cast<std::uint64_t>(rep) + 2);
        const Dataset d = gen_dense_confounded(spec, rs).data;
        const InferenceResult r = debiased_lasso(d.X, d.Y, 0, cv5(rs), cv5(rs));
        covered += (r.ci_low <= spec.beta0(0) && spec.beta0(0) <= r.ci_high) ? 1 : 0;
    }
    const double coverage = covered / 200.0;
    CHECK(coverage >= 0.90);
    CHECK(coverage <= 0.99);
}

} // TEST_SUITE montecarlo
