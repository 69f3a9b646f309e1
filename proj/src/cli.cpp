#include "causalreg/cli.hpp"

#include "causalreg/anchor.hpp"
#include "causalreg/dataset_io.hpp"
#include "causalreg/deconfound.hpp"
#include "causalreg/error.hpp"
#include "causalreg/harness.hpp"
#include "causalreg/inference.hpp"
#include "causalreg/sem_json.hpp"
#include "causalreg/spectral.hpp"
#include "causalreg/version.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace causalreg {

namespace {

const std::map<std::string, std::set<std::string>>& command_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"transform", {"input", "response", "anchors", "kind", "tau", "qhat", "lambda2"}},
        {"deconfound",
         {"input", "response", "anchors", "kind", "tau", "qhat", "lambda2", "lambda", "folds"}},
        {"ddlasso",
         {"input", "response", "anchors", "kind", "tau", "qhat", "lambda2", "lambda", "folds",
          "level", "coords"}},
        {"anchor", {"input", "response", "anchors", "gamma", "lambda", "folds"}},
        {"simulate", {"spec"}},
        {"replicate", {"spec", "replicates"}},
        {"coverage", {"spec", "replicates", "level", "coords", "folds"}},
        {"robustness", {"spec", "replicates", "gamma", "lambda"}},
    };
    return keys;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    if (*b == '+') ++b;
    const auto res = std::from_chars(b, e, out);
    return res.ec == std::errc() && res.ptr == e && std::isfinite(out);
}

double require_double(const RunConfig& cfg, const std::string& key) {
    double v = 0.0;
    if (!parse_double(cfg.params.at(key), v)) {
        throw ConfigError("--" + key + ": expected a number, got '" + cfg.params.at(key) + "'");
    }
    return v;
}

long long require_int(const std::string& key, const std::string& text, long long lo) {
    long long v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || v < lo) {
        throw ConfigError("--" + key + ": expected an integer >= " + std::to_string(lo) + ", got '" +
                          text + "'");
    }
    return v;
}

bool has(const RunConfig& cfg, const std::string& key) { return cfg.params.count(key) > 0; }

std::string get(const RunConfig& cfg, const std::string& key, const std::string& fallback = {}) {
    const auto it = cfg.params.find(key);
    return it == cfg.params.end() ? fallback : it->second;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

bool is_infinity_word(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s == "inf" || s == "infinity" || s == "+inf";
}

double parse_gamma_value(const std::string& s) {
    if (is_infinity_word(s)) return kInfiniteGamma;
    double v = 0.0;
    if (!parse_double(s, v) || v < 0.0) throw ConfigError("--gamma: bad value '" + s + "'");
    return v;
}

std::vector<double> parse_gammas(const std::string& text) {
    if (text.rfind("grid:", 0) == 0) {
        std::vector<double> out;
        for (const std::string& item : split_list(text.substr(5))) out.push_back(parse_gamma_value(item));
        if (out.empty()) throw ConfigError("--gamma: empty grid");
        return out;
    }
    return {parse_gamma_value(text)};
}

std::string gamma_text(double g) { return std::isinf(g) ? "inf" : format_double(g); }

// Canonical echo value: numbers as numbers, so "1" and "1.0" echo alike.
Json echo_value(const std::string& key, const std::string& v) {
    double d = 0.0;
    if (key == "gamma") {
        Json arr = Json::array();
        for (double g : parse_gammas(v)) arr.push_back(std::isinf(g) ? Json("inf") : Json(g));
        return v.rfind("grid:", 0) == 0 ? arr : arr[0];
    }
    if (key == "input" || key == "spec" || key == "response" || key == "anchors" || key == "coords") {
        return v;
    }
    if (parse_double(v, d)) return d;
    return v;
}

Json config_echo(const RunConfig& cfg) {
    Json j = Json::object();
    j["command"] = cfg.command;
    j["seed"] = cfg.seed;
    for (const auto& [k, v] : cfg.params) j[k] = echo_value(k, v);
    return j;
}

std::string header_comments(const RunConfig& cfg) {
    return "# causalreg " + std::string(kVersion) + "\n# config: " + config_echo(cfg).dump() + "\n";
}

void emit(const RunConfig& cfg, const std::string& content, std::ostream& out) {
    if (cfg.output.empty()) {
        out << content;
        out.flush();
        return;
    }
    std::ofstream f(cfg.output, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write output file: " + cfg.output);
    f << content;
    if (!f) throw ConfigError("failed writing output file: " + cfg.output);
}

bool wants_csv(const RunConfig& cfg) {
    const std::string& o = cfg.output;
    return o.size() >= 4 && o.compare(o.size() - 4, 4, ".csv") == 0;
}

Dataset load_dataset(const RunConfig& cfg, bool need_response, bool need_anchors) {
    if (!has(cfg, "input")) throw ConfigError(cfg.command + ": --input is required");
    if (need_response && !has(cfg, "response")) throw ConfigError(cfg.command + ": --response is required");
    const std::vector<std::string> anchors = split_list(get(cfg, "anchors"));
    if (need_anchors && anchors.empty()) throw ConfigError(cfg.command + ": --anchors is required");
    Dataset d = parse_dataset(get(cfg, "input"), get(cfg, "response"), anchors);
    if (d.p() == 0) throw ConfigError(cfg.command + ": no covariate columns left");
    return d;
}

TransformKind parse_kind(const RunConfig& cfg) {
    const std::string kind = get(cfg, "kind", "trim");
    auto forbid = [&](const char* key) {
        if (has(cfg, key)) throw ConfigError(std::string("--") + key + " does not apply to --kind " + kind);
    };
    if (kind == "identity") {
        forbid("tau");
        forbid("qhat");
        forbid("lambda2");
        return IdentityKind{};
    }
    if (kind == "trim") {
        forbid("qhat");
        forbid("lambda2");
        const std::string tau = get(cfg, "tau", "median");
        if (tau == "median") return TrimKind{TrimThreshold::median()};
        const double v = require_double(cfg, "tau");
        if (v < 0.0) throw ConfigError("--tau must be >= 0");
        return TrimKind{TrimThreshold::fixed(v)};
    }
    if (kind == "pca") {
        forbid("tau");
        forbid("lambda2");
        if (!has(cfg, "qhat")) throw ConfigError("--kind pca requires --qhat");
        return PcaKind{static_cast<Index>(require_int("qhat", get(cfg, "qhat"), 0))};
    }
    if (kind == "lava") {
        forbid("tau");
        forbid("qhat");
        const std::string l2 = get(cfg, "lambda2", "median");
        if (l2 == "median") return LavaKind{LavaParameter::median()};
        const double v = require_double(cfg, "lambda2");
        if (!(v > 0.0)) throw ConfigError("--lambda2 must be > 0");
        return LavaKind{LavaParameter::fixed(v)};
    }
    throw ConfigError("--kind must be one of trim, pca, lava, identity");
}

int folds_of(const RunConfig& cfg) {
    return static_cast<int>(require_int("folds", get(cfg, "folds", "10"), 2));
}

LambdaChoice parse_lambda(const RunConfig& cfg, const std::string& fallback) {
    const std::string text = get(cfg, "lambda", fallback);
    if (text == "cv") return LambdaChoice::cv(cfg.seed, folds_of(cfg));
    double v = 0.0;
    if (!parse_double(text, v) || v < 0.0) throw ConfigError("--lambda: expected a number >= 0 or 'cv'");
    if (has(cfg, "folds")) throw ConfigError("--folds only applies with --lambda cv");
    return LambdaChoice::fixed(v);
}

double parse_level(const RunConfig& cfg) {
    const double level = has(cfg, "level") ? require_double(cfg, "level") : 0.95;
    if (!(level > 0.0 && level < 1.0)) throw ConfigError("--level must lie in (0, 1)");
    return level;
}

std::vector<Index> parse_coords(const RunConfig& cfg, const std::vector<std::string>& names, Index p) {
    std::vector<Index> out;
    if (!has(cfg, "coords")) return out;
    for (const std::string& item : split_list(get(cfg, "coords"))) {
        const auto it = std::find(names.begin(), names.end(), item);
        if (it != names.end()) {
            out.push_back(static_cast<Index>(it - names.begin()));
            continue;
        }
        const long long j = require_int("coords", item, 1);
        if (j > p) throw ConfigError("--coords: coordinate " + item + " exceeds p");
        out.push_back(static_cast<Index>(j - 1));
    }
    if (out.empty()) throw ConfigError("--coords: empty list");
    return out;
}

// ---------------------------------------------------------------------------

std::string cmd_transform(const RunConfig& cfg) {
    const Dataset d = load_dataset(cfg, false, false);
    const SpectralTransform T = fit_transform(center_columns(d.X), parse_kind(cfg));
    return header_comments(cfg) + spectrum_csv(T);
}

std::string cmd_deconfound(const RunConfig& cfg, int threads) {
    const Dataset d = load_dataset(cfg, true, false);
    const TransformKind kind = parse_kind(cfg);
    const LambdaChoice lambda = parse_lambda(cfg, "cv");
    DeconfoundFit fit;
    if (std::holds_alternative<LavaKind>(kind)) {
        fit = lava(d.X, d.Y, lambda, std::get<LavaKind>(kind).lambda2, threads);
    } else {
        fit = spectral_lasso(d.X, d.Y, kind, lambda, {}, threads);
    }
    std::ostringstream out;
    out << header_comments(cfg);
    out << "# transform: " << kind_name(kind) << " parameter=" << format_double(fit.transform_parameter)
        << "\n";
    out << "# lambda: " << format_double(fit.lambda) << "\n";
    out << "# intercept: " << format_double(fit.intercept) << "\n";
    const bool dense = fit.dense_part.has_value();
    out << "j,name,estimate" << (dense ? ",dense" : "") << "\n";
    for (Index j = 0; j < d.p(); ++j) {
        out << j + 1 << ',' << d.x_names[static_cast<std::size_t>(j)] << ','
            << format_double(fit.beta(j));
        if (dense) out << ',' << format_double((*fit.dense_part)(j));
        out << "\n";
    }
    return out.str();
}

std::string cmd_ddlasso(const RunConfig& cfg, int threads) {
    const Dataset d = load_dataset(cfg, true, false);
    DdLassoConfig dd;
    dd.transform_y = parse_kind(cfg);
    dd.transform_nodewise = dd.transform_y;
    dd.lambda_y = parse_lambda(cfg, "cv");
    dd.lambda_nodewise = dd.lambda_y;
    dd.confidence_level = parse_level(cfg);
    std::vector<Index> coords = parse_coords(cfg, d.x_names, d.p());
    if (coords.empty()) {
        for (Index j = 0; j < d.p(); ++j) coords.push_back(j);
    }
    const std::vector<InferenceResult> res = dd_lasso(d.X, d.Y, coords, dd, threads);
    std::ostringstream out;
    out << header_comments(cfg);
    if (!res.empty()) {
        out << "# method: " << method_name(res[0].method) << " sigma=" << format_double(res[0].sigma)
            << " lambda_y=" << format_double(res[0].lambda_y) << "\n";
    }
    out << "j,estimate,se,ci_low,ci_high,p_value\n";
    for (const InferenceResult& r : res) {
        out << r.j + 1 << ',' << format_double(r.estimate) << ',' << format_double(r.se) << ','
            << format_double(r.ci_low) << ',' << format_double(r.ci_high) << ','
            << format_double(r.p_value) << "\n";
    }
    return out.str();
}

std::string cmd_anchor(const RunConfig& cfg, int threads) {
    const Dataset d = load_dataset(cfg, true, true);
    const std::vector<double> gammas = parse_gammas(get(cfg, "gamma", "1"));
    const LambdaChoice lambda = parse_lambda(cfg, "0");
    std::ostringstream out;
    out << header_comments(cfg);
    out << "gamma,lambda,j,name,estimate\n";
    for (double g : gammas) {
        AnchorConfig ac;
        ac.gamma = g;
        if (lambda.is_cv()) {
            const Projector P = anchor_projector(d.A);
            const Matrix Xc = center_columns(d.X);
            const Vector Yc = d.Y.array() - d.Y.mean();
            Matrix Xt;
            Vector Yt;
            if (std::isinf(g)) {
                Xt = P.apply(Xc);
                Yt = P.apply(Yc);
            } else {
                Xt = Xc - (1.0 - std::sqrt(g)) * P.apply(Xc);
                Yt = Yc - (1.0 - std::sqrt(g)) * P.apply(Yc);
            }
            ac.lambda = cv_lasso(Xt, Yt, lambda.folds, {}, LassoConfig{}, lambda.seed, threads).lambda_min;
        } else {
            ac.lambda = lambda.value;
        }
        const AnchorFit fit = anchor_fit(d.X, d.Y, d.A, ac);
        const std::string gt = gamma_text(g);
        const std::string lt = format_double(ac.lambda);
        out << gt << ',' << lt << ",0,(intercept)," << format_double(fit.intercept) << "\n";
        for (Index j = 0; j < d.p(); ++j) {
            out << gt << ',' << lt << ',' << j + 1 << ',' << d.x_names[static_cast<std::size_t>(j)] << ','
                << format_double(fit.beta(j)) << "\n";
        }
    }
    return out.str();
}

std::string cmd_simulate(const RunConfig& cfg) {
    if (!has(cfg, "spec")) throw ConfigError("simulate: --spec is required");
    const SemDocument doc = load_sem_document(get(cfg, "spec"));
    Dataset d;
    try {
        d = doc.is_dense() ? gen_dense_confounded(doc.dense(), cfg.seed).data
                           : gen_anchor_sem(doc.anchor(), doc.n, cfg.seed).data;
    } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
    }
    return dataset_to_csv(d, {"causalreg " + std::string(kVersion), "config: " + config_echo(cfg).dump()});
}

DenseFamily family_from(const RunConfig& cfg, DenseFamily f) {
    if (!has(cfg, "spec")) return f;
    const Json j = Json::parse(read_text_file(get(cfg, "spec")), nullptr, false);
    if (j.is_discarded()) throw ParseError("spec file is not valid JSON");
    if (!j.is_object()) throw ConfigError("spec must be a JSON object");
    const std::set<std::string> allowed = {"type", "n", "p", "q", "s0", "signal", "loading_scale",
                                           "delta_scale", "noise_x_scale", "noise_y_scale", "seed"};
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key())) {
            throw ConfigError("family spec: unsupported key '" + item.key() +
                              "' (experiments draw their own loadings)");
        }
    }
    if (j.contains("type") && j.at("type") != "dense") throw ConfigError("family spec must have type 'dense'");
    try {
        auto count = [&](const char* k, Index& dst) {
            if (j.contains(k)) dst = j.at(k).get<Index>();
        };
        auto real = [&](const char* k, double& dst) {
            if (j.contains(k)) dst = j.at(k).get<double>();
        };
        count("n", f.n);
        count("p", f.p);
        count("q", f.q);
        count("s0", f.s0);
        real("signal", f.signal);
        real("loading_scale", f.loading_scale);
        real("delta_scale", f.delta_scale);
        real("noise_x_scale", f.noise_x_scale);
        real("noise_y_scale", f.noise_y_scale);
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("family spec: ") + e.what());
    }
    if (f.n < 2 || f.p < 1 || f.q < 0 || f.s0 < 0 || f.s0 > f.p) {
        throw ConfigError("family spec: need n >= 2, p >= 1, q >= 0, 0 <= s0 <= p");
    }
    return f;
}

int replicates_of(const RunConfig& cfg, int fallback) {
    return static_cast<int>(require_int("replicates", get(cfg, "replicates", std::to_string(fallback)), 1));
}

std::string render(const RunConfig& cfg, ExperimentReport report) {
    report.config["cli"] = config_echo(cfg);
    if (wants_csv(cfg)) return report_to_csv(report);
    return report_to_json(report).dump(2) + "\n";
}

std::string cmd_replicate(const RunConfig& cfg, int threads) {
    ReplicabilityConfig rc;
    rc.family = family_from(cfg, rc.family);
    rc.replicates = replicates_of(cfg, rc.replicates);
    rc.seed = cfg.seed;
    rc.threads = threads;
    rc.support_sizes.erase(std::remove_if(rc.support_sizes.begin(), rc.support_sizes.end(),
                                          [&](Index K) { return K > rc.family.p; }),
                           rc.support_sizes.end());
    return render(cfg, replicability_experiment(rc));
}

std::string cmd_coverage(const RunConfig& cfg, int threads) {
    CoverageConfig cc;
    cc.family.n = 200;
    cc.family.p = 300;
    cc.family = family_from(cfg, cc.family);
    cc.replicates = replicates_of(cfg, cc.replicates);
    cc.level = parse_level(cfg);
    cc.cv_folds = folds_of(cfg);
    std::vector<std::string> names;
    for (Index j = 0; j < cc.family.p; ++j) names.push_back("x" + std::to_string(j + 1));
    cc.coords = parse_coords(cfg, names, cc.family.p);
    cc.seed = cfg.seed;
    cc.threads = threads;
    return render(cfg, coverage_experiment(cc));
}

std::string cmd_robustness(const RunConfig& cfg, int threads) {
    if (!has(cfg, "spec")) throw ConfigError("robustness: --spec (anchor SemSpec) is required");
    const SemDocument doc = load_sem_document(get(cfg, "spec"));
    if (doc.is_dense()) throw ConfigError("robustness: spec must have type 'anchor'");
    RobustnessConfig rc;
    rc.spec = doc.anchor();
    rc.n_train = doc.n;
    rc.n_test = doc.n;
    if (has(cfg, "gamma")) rc.gammas = parse_gammas(get(cfg, "gamma"));
    rc.replicates = replicates_of(cfg, rc.replicates);
    const LambdaChoice lambda = parse_lambda(cfg, "0");
    if (lambda.is_cv()) throw ConfigError("robustness: --lambda must be a number");
    rc.lambda = lambda.value;
    rc.seed = cfg.seed;
    rc.threads = threads;
    return render(cfg, robustness_curve(rc));
}

void load_config_file(const std::string& path, std::map<std::string, std::string>& params,
                      std::string& seed, std::string& threads, std::string& output) {
    const Json j = Json::parse(read_text_file(path), nullptr, false);
    if (j.is_discarded()) throw ParseError("config file is not valid JSON: " + path);
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    const auto& keys = config_keys();
    for (const auto& item : j.items()) {
        if (std::find(keys.begin(), keys.end(), item.key()) == keys.end()) {
            throw ConfigError("config file: unknown key '" + item.key() + "'");
        }
        const Json& v = item.value();
        std::string text;
        if (v.is_string()) text = v.get<std::string>();
        else if (v.is_number_integer() || v.is_number_unsigned()) text = v.dump();
        else if (v.is_number_float()) text = format_double(v.get<double>());
        else throw ConfigError("config file: key '" + item.key() + "' must be a string or number");
        if (item.key() == "seed") seed = text;
        else if (item.key() == "threads") threads = text;
        else if (item.key() == "output") output = text;
        else params[item.key()] = text;
    }
}

} // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"transform", "deconfound", "ddlasso",   "anchor",
                                                   "simulate",  "replicate",  "coverage", "robustness"};
    return names;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "input",  "response", "anchors", "output",     "seed",  "threads", "kind",   "tau",
        "qhat",   "lambda2",  "lambda",  "gamma",      "spec",  "replicates", "level", "coords",
        "folds"};
    return keys;
}

RunConfig parse_command_line(int argc, const char* const* argv) {
    CLI::App app{"causalreg: spectral deconfounding, doubly debiased Lasso and anchor regression"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON file with default settings");
    std::map<std::string, std::string> values;
    for (const std::string& key : config_keys()) values[key];
    for (const std::string& key : config_keys()) app.add_option("--" + key, values[key]);
    for (const std::string& cmd : command_names()) app.add_subcommand(cmd)->fallthrough();
    app.parse(argc, argv);

    RunConfig cfg;
    cfg.command = app.get_subcommands().front()->get_name();
    std::map<std::string, std::string> params;
    std::string seed = "0", threads = "1", output;
    if (!config_path.empty()) load_config_file(config_path, params, seed, threads, output);
    for (const std::string& key : config_keys()) {
        if (app.count("--" + key) == 0) continue;
        if (key == "seed") seed = values[key];
        else if (key == "threads") threads = values[key];
        else if (key == "output") output = values[key];
        else params[key] = values[key];
    }
    const auto& allowed = command_keys().at(cfg.command);
    for (const auto& [k, v] : params) {
        if (!allowed.count(k)) throw ConfigError("--" + k + " is not accepted by '" + cfg.command + "'");
    }
    std::uint64_t s = 0;
    const auto res = std::from_chars(seed.data(), seed.data() + seed.size(), s);
    if (res.ec != std::errc() || res.ptr != seed.data() + seed.size()) {
        throw ConfigError("--seed must be an unsigned 64-bit integer");
    }
    cfg.seed = s;
    cfg.threads = static_cast<int>(require_int("threads", threads, 1));
    cfg.output = output;
    cfg.params = std::move(params);
    return cfg;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        std::string content;
        const int t = cfg.threads;
        if (cfg.command == "transform") content = cmd_transform(cfg);
        else if (cfg.command == "deconfound") content = cmd_deconfound(cfg, t);
        else if (cfg.command == "ddlasso") content = cmd_ddlasso(cfg, t);
        else if (cfg.command == "anchor") content = cmd_anchor(cfg, t);
        else if (cfg.command == "simulate") content = cmd_simulate(cfg);
        else if (cfg.command == "replicate") content = cmd_replicate(cfg, t);
        else if (cfg.command == "coverage") content = cmd_coverage(cfg, t);
        else if (cfg.command == "robustness") content = cmd_robustness(cfg, t);
        else throw ConfigError("unknown command '" + cfg.command + "'");
        emit(cfg, content, out);
        return kExitOk;
    } catch (const ParseError& e) {
        err << "parse error";
        if (e.row() >= 0) err << " at row " << e.row();
        if (e.col() >= 0) err << ", column " << e.col();
        err << ": " << e.what() << "\n";
        return kExitParse;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InvalidInput& e) {
        err << "invalid input: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DegenerateProblem& e) {
        err << "numerical degeneracy: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        cfg = parse_command_line(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << "usage: causalreg <command> [--flag value ...]\n\ncommands:";
        for (const std::string& c : command_names()) out << ' ' << c;
        out << "\n\nflags:";
        for (const std::string& k : config_keys()) out << " --" << k;
        out << " --config\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const Error& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    return run(cfg, out, err);
}

} // namespace causalreg
