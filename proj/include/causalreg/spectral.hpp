#pragma once

#include "causalreg/linalg.hpp"

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace causalreg {

/// Trim threshold: a fixed value, the median singular value, or the
/// singular value at a given fraction of the spectrum (fraction 0.5 is the
/// median; smaller fractions trim fewer directions).
struct TrimThreshold {
    enum class Rule { Value, Median, Fraction };
    Rule rule = Rule::Median;
    double value = 0.0;  // tau for Value, fraction in (0, 1] for Fraction

    static TrimThreshold fixed(double tau) { return {Rule::Value, tau}; }
    static TrimThreshold median() { return {Rule::Median, 0.0}; }
    static TrimThreshold fraction(double f) { return {Rule::Fraction, f}; }
};

/// Lava ridge parameter: fixed value or d_med^2 / n (see median_position).
struct LavaParameter {
    bool median_rule = true;
    double value = 0.0;

    static LavaParameter fixed(double lambda2) { return {false, lambda2}; }
    static LavaParameter median() { return {true, 0.0}; }
};

struct IdentityKind {};
struct TrimKind {
    TrimThreshold threshold = TrimThreshold::median();
};
struct PcaKind {
    Index qhat = 0;
};
struct LavaKind {
    LavaParameter lambda2 = LavaParameter::median();
};

using TransformKind = std::variant<IdentityKind, TrimKind, PcaKind, LavaKind>;

std::string kind_name(const TransformKind& kind);

/// Index (0-based) of the median singular value d_{ceil(m/2)} (1-based
/// subscripts) in a descending spectrum of length m: d_{m/2} for even m, the
/// middle value for odd m.
Index median_position(Index m);

/// F = U diag(rho) U^T + (I - U U^T), fitted on a design X.
class SpectralTransform {
public:
    SpectralTransform(SvdFactors svd, Vector shrink, TransformKind kind, double resolved_param);

    const SvdFactors& svd() const { return svd_; }
    const Vector& shrink() const { return shrink_; }
    const TransformKind& kind() const { return kind_; }
    Index n() const { return svd_.U.rows(); }
    Index p() const { return svd_.V.rows(); }

    /// tau for Trim, lambda2 for Lava, qhat for Pca, 0 for Identity.
    double resolved_parameter() const { return param_; }

    Matrix apply(const Matrix& M) const;
    Vector apply(const Vector& v) const;

    /// Transformed singular values rho_i * d_i.
    Vector transformed_singular_values() const;

    /// trace(F^T F) = sum rho_i^2 + (n - m).
    double trace_squared() const;

private:
    SvdFactors svd_;
    Vector shrink_;
    TransformKind kind_;
    double param_;
};

SpectralTransform fit_transform(const Matrix& X, const TransformKind& kind);
/// Same, from an existing factorisation of X.
SpectralTransform fit_transform(SvdFactors factors, const TransformKind& kind);

Matrix apply(const SpectralTransform& T, const Matrix& M);

struct SpectrumPoint {
    Index index;  // 1-based
    double d;
    double d_tilde;
};

std::vector<SpectrumPoint> singular_spectrum(const SpectralTransform& T);

/// CSV rows "index,d,d_tilde" with a header line.
std::string spectrum_csv(const SpectralTransform& T);

} // namespace causalreg
