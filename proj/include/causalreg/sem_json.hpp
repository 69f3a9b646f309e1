#pragma once

#include "causalreg/sem.hpp"

#include <json.hpp>

#include <string>
#include <variant>

namespace causalreg {

using Json = nlohmann::json;

/// A SemSpec document. "type" is "dense" or "anchor"; matrices are arrays of
/// rows. Dense documents may omit beta0 / confounder_loading / delta, which are
/// then drawn from "seed" with the DenseFamily knobs (signal, loading_scale,
/// delta_scale). Anchor documents may omit B / M / covariances and give
/// "seed" to get random_anchor_sem(p, q, r, seed). Unknown keys are rejected.
struct SemDocument {
    std::variant<DenseConfoundSpec, AnchorSemSpec> spec;
    Index n = 1000;  // sample size for anchor documents; dense specs carry their own
    std::uint64_t seed = 0;

    bool is_dense() const { return spec.index() == 0; }
    const DenseConfoundSpec& dense() const { return std::get<0>(spec); }
    const AnchorSemSpec& anchor() const { return std::get<1>(spec); }
};

Json matrix_to_json(const Matrix& M);
Json vector_to_json(const Vector& v);
Matrix matrix_from_json(const Json& j, const char* what);
Vector vector_from_json(const Json& j, const char* what);

Json to_json(const DenseConfoundSpec& spec);
Json to_json(const AnchorSemSpec& spec);
Json to_json(const SemDocument& doc);
Json to_json(const Perturbation& pert);

DenseConfoundSpec dense_spec_from_json(const Json& j);
AnchorSemSpec anchor_spec_from_json(const Json& j);
SemDocument sem_document_from_json(const Json& j);
Perturbation perturbation_from_json(const Json& j);

/// Parses text; malformed JSON raises ParseError, bad fields ConfigError.
SemDocument parse_sem_document(const std::string& text);
SemDocument load_sem_document(const std::string& path);

} // namespace causalreg
