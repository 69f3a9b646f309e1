#include "causalreg/sem_json.hpp"

#include "causalreg/error.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace causalreg {

namespace {

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const char* what) {
    if (!j.is_object()) throw ConfigError(std::string(what) + ": expected a JSON object");
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key())) {
            throw ConfigError(std::string(what) + ": unknown key '" + item.key() + "'");
        }
    }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
}

Index get_count(const Json& j, const char* key, Index fallback) {
    const long long v = get_or<long long>(j, key, fallback);
    if (v < 0) throw ConfigError(std::string("field '") + key + "' must be >= 0");
    return static_cast<Index>(v);
}

std::uint64_t get_seed(const Json& j) {
    if (!j.contains("seed")) return 0;
    const Json& s = j.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
        throw ConfigError("field 'seed' must be a non-negative integer");
    }
    return s.get<std::uint64_t>();
}

} // namespace

Json matrix_to_json(const Matrix& M) {
    Json rows = Json::array();
    for (Index i = 0; i < M.rows(); ++i) {
        Json row = Json::array();
        for (Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json vector_to_json(const Vector& v) {
    Json out = Json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Matrix matrix_from_json(const Json& j, const char* what) {
    if (!j.is_array()) throw ConfigError(std::string(what) + ": expected an array of rows");
    const Index rows = static_cast<Index>(j.size());
    Index cols = -1;
    Matrix M;
    for (Index i = 0; i < rows; ++i) {
        const Json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array()) throw ConfigError(std::string(what) + ": rows must be arrays");
        if (cols < 0) {
            cols = static_cast<Index>(row.size());
            M.resize(rows, cols);
        } else if (static_cast<Index>(row.size()) != cols) {
            throw ConfigError(std::string(what) + ": ragged rows");
        }
        for (Index k = 0; k < cols; ++k) {
            const Json& v = row[static_cast<std::size_t>(k)];
            if (!v.is_number()) throw ConfigError(std::string(what) + ": non-numeric entry");
            M(i, k) = v.get<double>();
        }
    }
    if (rows == 0) M.resize(0, 0);
    return M;
}

Vector vector_from_json(const Json& j, const char* what) {
    if (!j.is_array()) throw ConfigError(std::string(what) + ": expected an array");
    Vector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ConfigError(std::string(what) + ": non-numeric entry");
        v(static_cast<Index>(i)) = j[i].get<double>();
    }
    return v;
}

Json to_json(const DenseConfoundSpec& s) {
    Json j;
    j["type"] = "dense";
    j["n"] = s.n;
    j["p"] = s.p;
    j["q"] = s.q;
    j["s0"] = s.s0;
    j["beta0"] = vector_to_json(s.beta0);
    j["confounder_loading"] = matrix_to_json(s.confounder_loading);
    j["delta"] = vector_to_json(s.delta);
    j["noise_x_scale"] = s.noise_x_scale;
    j["noise_y_scale"] = s.noise_y_scale;
    j["seed"] = s.seed;
    return j;
}

Json to_json(const AnchorSemSpec& s) {
    Json j;
    j["type"] = "anchor";
    j["p"] = s.p;
    j["q"] = s.q;
    j["r"] = s.r;
    j["B"] = matrix_to_json(s.B);
    j["M"] = matrix_to_json(s.M);
    j["anchor_cov"] = matrix_to_json(s.anchor_cov);
    j["noise_cov"] = matrix_to_json(s.noise_cov);
    j["acyclic"] = s.acyclic;
    if (s.environments()) j["environment_probs"] = s.environment_probs;
    return j;
}

Json to_json(const SemDocument& doc) {
    if (doc.is_dense()) return to_json(doc.dense());
    Json j = to_json(doc.anchor());
    j["n"] = doc.n;
    j["seed"] = doc.seed;
    return j;
}

Json to_json(const Perturbation& pert) {
    Json j;
    j["delta"] = vector_to_json(pert.delta);
    if (pert.is_stochastic()) j["cov"] = matrix_to_json(pert.cov);
    return j;
}

DenseConfoundSpec dense_spec_from_json(const Json& j) {
    reject_unknown(j, {"type", "n", "p", "q", "s0", "beta0", "confounder_loading", "delta",
                       "noise_x_scale", "noise_y_scale", "seed", "signal", "loading_scale",
                       "delta_scale"},
                   "dense spec");
    DenseFamily f;
    f.n = get_count(j, "n", f.n);
    f.p = get_count(j, "p", f.p);
    f.q = get_count(j, "q", f.q);
    f.s0 = get_count(j, "s0", f.s0);
    f.signal = get_or<double>(j, "signal", f.signal);
    f.loading_scale = get_or<double>(j, "loading_scale", f.loading_scale);
    f.delta_scale = get_or<double>(j, "delta_scale", f.delta_scale);
    f.noise_x_scale = get_or<double>(j, "noise_x_scale", f.noise_x_scale);
    f.noise_y_scale = get_or<double>(j, "noise_y_scale", f.noise_y_scale);
    const std::uint64_t seed = get_seed(j);
    try {
        DenseConfoundSpec s = make_dense_confound(f, seed);
        if (j.contains("beta0")) {
            s.beta0 = vector_from_json(j.at("beta0"), "beta0");
            s.s0 = j.contains("s0") ? f.s0 : (s.beta0.array() != 0.0).count();
        }
        if (j.contains("confounder_loading")) {
            s.confounder_loading = matrix_from_json(j.at("confounder_loading"), "confounder_loading");
            if (s.confounder_loading.size() == 0) s.confounder_loading.resize(s.q, s.p);
        }
        if (j.contains("delta")) s.delta = vector_from_json(j.at("delta"), "delta");
        if (j.contains("confounder_loading") || j.contains("delta") || j.contains("beta0")) {
            // Fully specified documents keep the recorded data seed.
            s.seed = j.contains("seed") ? seed : s.seed;
        }
        s.validate();
        return s;
    } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
    }
}

AnchorSemSpec anchor_spec_from_json(const Json& j) {
    reject_unknown(j, {"type", "p", "q", "r", "B", "M", "anchor_cov", "noise_cov", "acyclic",
                       "environment_probs", "n", "seed"},
                   "anchor spec");
    const Index p = get_count(j, "p", 1);
    const Index q = get_count(j, "q", 0);
    const Index r = get_count(j, "r", 1);
    try {
        AnchorSemSpec s;
        if (!j.contains("B")) {
            s = random_anchor_sem(p, q, r, get_seed(j));
        } else {
            s.p = p;
            s.q = q;
            s.r = r;
            const Index d = s.dim();
            s.B = matrix_from_json(j.at("B"), "B");
            s.M = j.contains("M") ? matrix_from_json(j.at("M"), "M") : Matrix(Matrix::Zero(d, r));
            if (r == 0) s.M.resize(d, 0);
            s.anchor_cov = j.contains("anchor_cov") ? matrix_from_json(j.at("anchor_cov"), "anchor_cov")
                                                    : Matrix(Matrix::Identity(r, r));
            s.noise_cov = j.contains("noise_cov") ? matrix_from_json(j.at("noise_cov"), "noise_cov")
                                                  : Matrix(Matrix::Identity(d, d));
            s.acyclic = get_or<bool>(j, "acyclic", true);
        }
        if (j.contains("environment_probs")) {
            s = with_environments(std::move(s), get_or<std::vector<double>>(j, "environment_probs", {}));
        }
        s.validate();
        return s;
    } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
    }
}

SemDocument sem_document_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
        throw ConfigError("SemSpec: missing string field 'type'");
    }
    const std::string type = j.at("type").get<std::string>();
    SemDocument doc;
    doc.seed = get_seed(j);
    if (type == "dense") {
        doc.spec = dense_spec_from_json(j);
        doc.n = doc.dense().n;
    } else if (type == "anchor") {
        doc.spec = anchor_spec_from_json(j);
        doc.n = get_count(j, "n", doc.n);
        if (doc.n < 1) throw ConfigError("anchor spec: n must be >= 1");
    } else {
        throw ConfigError("SemSpec: unknown type '" + type + "'");
    }
    return doc;
}

Perturbation perturbation_from_json(const Json& j) {
    reject_unknown(j, {"delta", "cov"}, "perturbation");
    Perturbation pert;
    if (j.contains("delta")) pert.delta = vector_from_json(j.at("delta"), "delta");
    if (j.contains("cov")) pert.cov = matrix_from_json(j.at("cov"), "cov");
    return pert;
}

SemDocument parse_sem_document(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(std::string("SemSpec JSON: ") + e.what());
    }
    return sem_document_from_json(j);
}

SemDocument load_sem_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open spec file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_sem_document(ss.str());
}

} // namespace causalreg
