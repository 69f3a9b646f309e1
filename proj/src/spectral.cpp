#include "causalreg/spectral.hpp"

#include "causalreg/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace causalreg {

namespace {

template <class... Fs>
struct overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

double resolve_trim_tau(const TrimThreshold& t, const Vector& d) {
    const Index m = d.size();
    switch (t.rule) {
    case TrimThreshold::Rule::Value:
        if (!(t.value >= 0.0)) throw InvalidInput("trim: tau must be >= 0");
        return t.value;
    case TrimThreshold::Rule::Median:
        return d(median_position(m));
    case TrimThreshold::Rule::Fraction: {
        if (!(t.value > 0.0 && t.value <= 1.0)) {
            throw InvalidInput("trim: fraction must lie in (0, 1]");
        }
        const auto k = static_cast<Index>(std::floor(t.value * static_cast<double>(m)));
        return d(std::clamp<Index>(k, 1, m) - 1);
    }
    }
    return 0.0;
}

} // namespace

std::string kind_name(const TransformKind& kind) {
    return std::visit(overloaded{[](const IdentityKind&) { return std::string("identity"); },
                                 [](const TrimKind&) { return std::string("trim"); },
                                 [](const PcaKind&) { return std::string("pca"); },
                                 [](const LavaKind&) { return std::string("lava"); }},
                      kind);
}

Index median_position(Index m) {
    // d_{ceil(m/2)} with 1-based subscripts: d_{m/2} for even m, the middle value for odd m.
    return (m + 1) / 2 - 1;
}

SpectralTransform::SpectralTransform(SvdFactors svd, Vector shrink, TransformKind kind,
                                     double resolved_param)
    : svd_(std::move(svd)), shrink_(std::move(shrink)), kind_(kind), param_(resolved_param) {}

Matrix SpectralTransform::apply(const Matrix& M) const {
    if (M.rows() != n()) {
        throw InvalidInput("spectral apply: expected " + std::to_string(n()) + " rows, got " +
                           std::to_string(M.rows()));
    }
    // F M = M + U diag(rho - 1) U^T M; columns of M outside col(U) pass through.
    const Vector delta = shrink_.array() - 1.0;
    if (delta.isZero(0.0)) return M;
    const Matrix coef = svd_.U.transpose() * M;
    return M + svd_.U * (delta.asDiagonal() * coef);
}

Vector SpectralTransform::apply(const Vector& v) const {
    return apply(Matrix(v)).col(0);
}

Vector SpectralTransform::transformed_singular_values() const {
    return shrink_.cwiseProduct(svd_.d);
}

double SpectralTransform::trace_squared() const {
    return shrink_.squaredNorm() + static_cast<double>(n() - shrink_.size());
}

SpectralTransform fit_transform(SvdFactors f, const TransformKind& kind) {
    const Vector& d = f.d;
    const Index m = d.size();
    const double n = static_cast<double>(f.U.rows());
    const double zero_cut = d(0) > 0.0 ? default_rank_tol(f.U.rows(), f.V.rows()) * d(0) : 0.0;
    Vector rho = Vector::Ones(m);
    double param = 0.0;

    std::visit(
        overloaded{
            [&](const IdentityKind&) {},
            [&](const TrimKind& k) {
                const double tau = resolve_trim_tau(k.threshold, d);
                param = tau;
                for (Index i = 0; i < m; ++i) {
                    if (d(i) > zero_cut) rho(i) = std::min(d(i), tau) / d(i);
                }
            },
            [&](const PcaKind& k) {
                if (k.qhat < 0 || k.qhat > m) {
                    throw InvalidInput("pca: qhat must lie in [0, min(n, p)]");
                }
                param = static_cast<double>(k.qhat);
                rho.head(k.qhat).setZero();
            },
            [&](const LavaKind& k) {
                double lambda2 = k.lambda2.value;
                if (k.lambda2.median_rule) {
                    const double dm = d(median_position(m));
                    lambda2 = dm * dm / n;
                }
                if (!(lambda2 > 0.0) || !std::isfinite(lambda2)) {
                    throw InvalidInput("lava: lambda2 must be positive and finite");
                }
                param = lambda2;
                for (Index i = 0; i < m; ++i) {
                    if (d(i) > zero_cut) {
                        rho(i) = std::sqrt(n * lambda2 / (n * lambda2 + d(i) * d(i)));
                    }
                }
            }},
        kind);

    return SpectralTransform(std::move(f), std::move(rho), kind, param);
}

SpectralTransform fit_transform(const Matrix& X, const TransformKind& kind) {
    return fit_transform(svd(X), kind);
}

Matrix apply(const SpectralTransform& T, const Matrix& M) {
    return T.apply(M);
}

std::vector<SpectrumPoint> singular_spectrum(const SpectralTransform& T) {
    const Vector dt = T.transformed_singular_values();
    std::vector<SpectrumPoint> out;
    out.reserve(static_cast<std::size_t>(dt.size()));
    for (Index i = 0; i < dt.size(); ++i) out.push_back({i + 1, T.svd().d(i), dt(i)});
    return out;
}

std::string spectrum_csv(const SpectralTransform& T) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "index,d,d_tilde\n";
    for (const auto& pt : singular_spectrum(T)) {
        os << pt.index << ',' << pt.d << ',' << pt.d_tilde << '\n';
    }
    return os.str();
}

} // namespace causalreg
