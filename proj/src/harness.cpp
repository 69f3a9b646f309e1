#include "causalreg/harness.hpp"

#include "causalreg/deconfound.hpp"
#include "causalreg/error.hpp"
#include "causalreg/inference.hpp"
#include "causalreg/parallel.hpp"
#include "causalreg/rng.hpp"
#include "causalreg/version.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

namespace causalreg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Json gamma_json(double g) {
    if (std::isinf(g)) return "inf";
    return g;
}

Json gammas_json(const std::vector<double>& gs) {
    Json out = Json::array();
    for (double g : gs) out.push_back(gamma_json(g));
    return out;
}

Json family_json(const DenseFamily& f) {
    return Json{{"n", f.n},
                {"p", f.p},
                {"q", f.q},
                {"s0", f.s0},
                {"signal", f.signal},
                {"loading_scale", f.loading_scale},
                {"delta_scale", f.delta_scale},
                {"noise_x_scale", f.noise_x_scale},
                {"noise_y_scale", f.noise_y_scale}};
}

std::string cell_text(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

TransformKind selection_kind(SelectionMethod m) {
    switch (m) {
    case SelectionMethod::Lasso: return IdentityKind{};
    case SelectionMethod::TrimLasso: return TrimKind{};
    case SelectionMethod::Lava: return LavaKind{};
    }
    return IdentityKind{};
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double test_mse(const Dataset& d, const Vector& beta, double intercept) {
    const Vector r = (d.Y - d.X * beta).array() - intercept;
    return r.squaredNorm() / static_cast<double>(d.n());
}

} // namespace

SelectionSet make_selection(std::vector<Index> indices, std::string source) {
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    return {std::move(indices), std::move(source)};
}

double jaccard(const SelectionSet& a, const SelectionSet& b) {
    const SelectionSet x = make_selection(a.indices);
    const SelectionSet y = make_selection(b.indices);
    if (x.indices.empty() && y.indices.empty()) return 0.0;
    std::vector<Index> both;
    std::set_intersection(x.indices.begin(), x.indices.end(), y.indices.begin(), y.indices.end(),
                          std::back_inserter(both));
    const double inter = static_cast<double>(both.size());
    const double uni = static_cast<double>(x.indices.size() + y.indices.size()) - inter;
    return 1.0 - inter / uni;
}

std::vector<Index> topk(const Vector& coef, Index K) {
    const Index p = coef.size();
    if (K < 1 || K > p) throw InvalidInput("topk: K must lie in [1, p]");
    std::vector<Index> idx(static_cast<std::size_t>(p));
    std::iota(idx.begin(), idx.end(), Index{0});
    std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) {
        return std::abs(coef(a)) > std::abs(coef(b));
    });
    idx.resize(static_cast<std::size_t>(K));
    std::sort(idx.begin(), idx.end());
    return idx;
}

Index topk_overlap(const Vector& coef1, const Vector& coef2, Index K) {
    if (coef1.size() != coef2.size()) throw InvalidInput("topk_overlap: length mismatch");
    const std::vector<Index> a = topk(coef1, K);
    const std::vector<Index> b = topk(coef2, K);
    std::vector<Index> both;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
    return static_cast<Index>(both.size());
}

SelectionSet select_fixed_size(const std::vector<SparseFit>& path, Index K, std::string source) {
    if (path.empty()) throw InvalidInput("select_fixed_size: empty path");
    if (K < 1) throw InvalidInput("select_fixed_size: K must be >= 1");
    for (const SparseFit& fit : path) {
        if (fit.support_size() >= K) return make_selection(topk(fit.beta, K), std::move(source));
    }
    return make_selection(path.back().support(), std::move(source));
}

const ReportTable& ExperimentReport::table(const std::string& name) const {
    for (const ReportTable& t : tables) {
        if (t.name == name) return t;
    }
    throw InvalidInput("report has no table '" + name + "'");
}

bool ExperimentReport::has_flag(const std::string& flag) const {
    return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

Json report_to_json(const ExperimentReport& report) {
    Json j;
    j["tool"] = "causalreg";
    j["version"] = kVersion;
    j["experiment"] = report.experiment;
    j["config"] = report.config;
    j["seed"] = report.seed;
    j["replicates"] = report.replicates;
    j["flags"] = report.flags;
    j["summary"] = report.summary;
    Json tables = Json::array();
    for (const ReportTable& t : report.tables) {
        tables.push_back(Json{{"name", t.name}, {"columns", t.columns}, {"rows", t.rows}});
    }
    j["tables"] = std::move(tables);
    return j;
}

std::string report_to_csv(const ExperimentReport& report) {
    std::ostringstream out;
    out << "# causalreg " << kVersion << "\n";
    out << "# experiment: " << report.experiment << "\n";
    out << "# config: " << report.config.dump() << "\n";
    out << "# seed: " << report.seed << "\n";
    out << "# replicates: " << report.replicates << "\n";
    out << "# summary: " << report.summary.dump() << "\n";
    if (!report.flags.empty()) {
        out << "# flags:";
        for (const std::string& f : report.flags) out << ' ' << f;
        out << "\n";
    }
    for (const ReportTable& t : report.tables) {
        out << "# table: " << t.name << "\n";
        for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
        out << "\n";
        for (const auto& row : t.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << cell_text(row[c]);
            out << "\n";
        }
    }
    return out.str();
}

const char* selection_method_name(SelectionMethod m) {
    switch (m) {
    case SelectionMethod::Lasso: return "lasso";
    case SelectionMethod::TrimLasso: return "trim_lasso";
    case SelectionMethod::Lava: return "lava";
    }
    return "?";
}

// ---------------------------------------------------------------------------

ExperimentReport replicability_experiment(const ReplicabilityConfig& cfg) {
    const auto start = Clock::now();
    if (cfg.replicates < 1) throw InvalidInput("replicability: replicates must be >= 1");
    if (cfg.support_sizes.empty()) throw InvalidInput("replicability: no support sizes");
    if (cfg.methods.empty()) throw InvalidInput("replicability: no methods");
    for (Index K : cfg.support_sizes) {
        if (K < 1 || K > cfg.family.p) throw InvalidInput("replicability: support size out of range");
    }
    const Index max_k = *std::max_element(cfg.support_sizes.begin(), cfg.support_sizes.end());
    const std::size_t M = cfg.methods.size();
    const std::size_t KK = cfg.support_sizes.size();
    const std::size_t R = static_cast<std::size_t>(cfg.replicates);

    // dist[rep][method][k]
    std::vector<std::vector<std::vector<double>>> dist(
        R, std::vector<std::vector<double>>(M, std::vector<double>(KK, 0.0)));
    std::vector<std::vector<std::vector<Index>>> reached(
        R, std::vector<std::vector<Index>>(M, std::vector<Index>(KK, 0)));

    parallel_for(R, cfg.threads, [&](std::size_t rep) {
        const std::uint64_t rs = derive_seed(cfg.seed, rep + 1);
        const DenseConfoundSpec s1 = make_dense_confound(cfg.family, derive_seed(rs, 1));
        const DenseConfoundSpec s2 = redraw_confounding(s1, cfg.family, derive_seed(rs, 2));
        const Dataset d1 = gen_dense_confounded(s1).data;
        const Dataset d2 = gen_dense_confounded(s2).data;
        for (std::size_t m = 0; m < M; ++m) {
            const TransformKind kind = selection_kind(cfg.methods[m]);
            std::vector<SelectionSet> sets[2];
            const Dataset* ds[2] = {&d1, &d2};
            for (int k = 0; k < 2; ++k) {
                const TransformedData td = transform_data(ds[k]->X, ds[k]->Y, kind);
                const std::vector<double> grid =
                    default_lambda_grid(td.X, td.Y, cfg.path_length, cfg.path_ratio);
                const std::vector<SparseFit> path = lasso_path(td.X, td.Y, grid, LassoConfig{}, max_k);
                for (Index K : cfg.support_sizes) sets[k].push_back(select_fixed_size(path, K));
            }
            for (std::size_t k = 0; k < KK; ++k) {
                dist[rep][m][k] = jaccard(sets[0][k], sets[1][k]);
                reached[rep][m][k] = static_cast<Index>(
                    std::min(sets[0][k].indices.size(), sets[1][k].indices.size()));
            }
        }
    });

    ExperimentReport report;
    report.experiment = "replicate";
    report.seed = cfg.seed;
    report.replicates = cfg.replicates;
    Json methods = Json::array();
    for (SelectionMethod m : cfg.methods) methods.push_back(selection_method_name(m));
    report.config = Json{{"family", family_json(cfg.family)},
                         {"support_sizes", cfg.support_sizes},
                         {"methods", methods},
                         {"replicates", cfg.replicates},
                         {"path_length", cfg.path_length},
                         {"path_ratio", cfg.path_ratio},
                         {"seed", cfg.seed}};

    ReportTable per{"per_replicate", {"method", "K", "replicate", "jaccard_distance", "selected"}, {}};
    ReportTable mean{"mean", {"method", "K", "mean_jaccard_distance", "replicates"}, {}};
    Json means = Json::object();
    for (std::size_t m = 0; m < M; ++m) {
        Json curve = Json::array();
        for (std::size_t k = 0; k < KK; ++k) {
            double total = 0.0;
            for (std::size_t rep = 0; rep < R; ++rep) {
                total += dist[rep][m][k];
                per.rows.push_back({selection_method_name(cfg.methods[m]), cfg.support_sizes[k],
                                    static_cast<long long>(rep), dist[rep][m][k],
                                    reached[rep][m][k]});
            }
            const double avg = total / static_cast<double>(R);
            mean.rows.push_back(
                {selection_method_name(cfg.methods[m]), cfg.support_sizes[k], avg, cfg.replicates});
            curve.push_back(avg);
        }
        means[selection_method_name(cfg.methods[m])] = curve;
    }
    report.summary["mean_jaccard_distance"] = means;
    report.tables = {std::move(mean), std::move(per)};
    report.wall_clock_seconds = seconds_since(start);
    return report;
}

ExperimentReport coverage_experiment(const CoverageConfig& cfg) {
    const auto start = Clock::now();
    if (cfg.replicates < 1) throw InvalidInput("coverage: replicates must be >= 1");
    if (cfg.cv_folds < 2 || cfg.cv_grid_size < 2) throw InvalidInput("coverage: cv needs >= 2 folds and grid points");
    if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw InvalidInput("coverage: level must lie in (0, 1)");
    const DenseConfoundSpec spec = make_dense_confound(cfg.family, cfg.seed);
    std::vector<Index> coords = cfg.coords;
    if (coords.empty()) {
        coords.push_back(0);
        if (spec.s0 < spec.p) coords.push_back(spec.s0);
    }
    for (Index j : coords) {
        if (j < 0 || j >= spec.p) throw InvalidInput("coverage: coordinate out of range");
    }
    const std::size_t R = static_cast<std::size_t>(cfg.replicates);
    const std::size_t C = coords.size();
    const InferenceMethod methods[2] = {InferenceMethod::DoublyDebiased, InferenceMethod::Debiased};

    // res[rep][method][coord]
    std::vector<std::array<std::vector<InferenceResult>, 2>> res(R);
    parallel_for(R, cfg.threads, [&](std::size_t rep) {
        const std::uint64_t rs = derive_seed(cfg.seed, rep + 2);
        const Dataset d = gen_dense_confounded(spec, rs).data;
        LambdaChoice lc = LambdaChoice::cv(derive_seed(rs, 7), cfg.cv_folds);
        lc.grid_size = cfg.cv_grid_size;
        DdLassoConfig dd;
        dd.lambda_y = lc;
        dd.lambda_nodewise = lc;
        dd.confidence_level = cfg.level;
        res[rep][0] = dd_lasso(d.X, d.Y, coords, dd);
        res[rep][1] = debiased_lasso(d.X, d.Y, coords, lc, lc, cfg.level);
    });

    ExperimentReport report;
    report.experiment = "coverage";
    report.seed = cfg.seed;
    report.replicates = cfg.replicates;
    Json coords_echo = Json::array();  // 1-based, as in the tables and the CLI
    for (Index j : coords) coords_echo.push_back(j + 1);
    report.config = Json{{"family", family_json(cfg.family)},
                         {"coords", coords_echo},
                         {"replicates", cfg.replicates},
                         {"level", cfg.level},
                         {"cv_folds", cfg.cv_folds},
                         {"cv_grid_size", cfg.cv_grid_size},
                         {"seed", cfg.seed}};
    if (R < 2) report.flags.push_back("wide_uncertainty");

    ReportTable per{"per_replicate",
                    {"method", "j", "replicate", "estimate", "se", "ci_low", "ci_high", "p_value",
                     "covered"},
                    {}};
    ReportTable sum{"summary",
                    {"method", "j", "truth", "coverage", "rejection_rate", "mean_se", "mean_width",
                     "mc_se"},
                    {}};
    const double alpha = 1.0 - cfg.level;
    Json summary = Json::object();
    for (int m = 0; m < 2; ++m) {
        Json per_method = Json::object();
        for (std::size_t c = 0; c < C; ++c) {
            const double truth = spec.beta0(coords[c]);
            double covered = 0.0, rejected = 0.0, se_sum = 0.0, width_sum = 0.0;
            for (std::size_t rep = 0; rep < R; ++rep) {
                const InferenceResult& r = res[rep][static_cast<std::size_t>(m)][c];
                const bool cov = r.ci_low <= truth && truth <= r.ci_high;
                covered += cov ? 1.0 : 0.0;
                rejected += r.p_value < alpha ? 1.0 : 0.0;
                se_sum += r.se;
                width_sum += r.ci_high - r.ci_low;
                per.rows.push_back({method_name(methods[m]), coords[c] + 1,
                                    static_cast<long long>(rep), r.estimate, r.se, r.ci_low,
                                    r.ci_high, r.p_value, cov});
            }
            const double Rd = static_cast<double>(R);
            const double coverage = covered / Rd;
            const double mc_se = R > 1 ? std::sqrt(coverage * (1.0 - coverage) / (Rd - 1.0))
                                       : std::numeric_limits<double>::quiet_NaN();
            sum.rows.push_back({method_name(methods[m]), coords[c] + 1, truth, coverage,
                                rejected / Rd, se_sum / Rd, width_sum / Rd,
                                R > 1 ? Json(mc_se) : Json(nullptr)});
            per_method[std::to_string(coords[c] + 1)] =
                Json{{"coverage", coverage}, {"rejection_rate", rejected / Rd}, {"truth", truth}};
        }
        summary[method_name(methods[m])] = per_method;
    }
    report.summary = summary;
    report.tables = {std::move(sum), std::move(per)};
    report.wall_clock_seconds = seconds_since(start);
    return report;
}

ExperimentReport robustness_curve(const RobustnessConfig& cfg) {
    const auto start = Clock::now();
    cfg.spec.validate();
    if (cfg.spec.r < 1) throw InvalidInput("robustness: the SEM needs at least one anchor");
    if (cfg.gammas.empty() || cfg.strengths.empty()) throw InvalidInput("robustness: empty grid");
    if (cfg.replicates < 1 || cfg.directions < 1) {
        throw InvalidInput("robustness: replicates and directions must be >= 1");
    }
    for (double s : cfg.strengths) {
        if (!(s >= 0.0) || std::isinf(s)) throw InvalidInput("robustness: strengths must be finite and >= 0");
    }
    const std::size_t G = cfg.gammas.size();
    const std::size_t S = cfg.strengths.size();
    const std::size_t R = static_cast<std::size_t>(cfg.replicates);
    Eigen::SelfAdjointEigenSolver<Matrix> es(cfg.spec.anchor_cov);
    const Matrix root = es.eigenvectors() *
                        es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                        es.eigenvectors().transpose();

    struct Cell {
        double worst = 0.0;
        double mean = 0.0;
        double population_sup = 0.0;
    };
    // cells[rep][gamma][strength], objective[rep][gamma]
    std::vector<std::vector<std::vector<Cell>>> cells(
        R, std::vector<std::vector<Cell>>(G, std::vector<Cell>(S)));
    std::vector<std::vector<double>> objective(R, std::vector<double>(G, 0.0));

    parallel_for(R, cfg.threads, [&](std::size_t rep) {
        const std::uint64_t rs = derive_seed(cfg.seed, rep + 1);
        const Dataset train = gen_anchor_sem(cfg.spec, cfg.n_train, derive_seed(rs, 0)).data;
        std::vector<AnchorFit> fits;
        for (double g : cfg.gammas) {
            AnchorConfig ac;
            ac.gamma = g;
            ac.lambda = cfg.lambda;
            fits.push_back(anchor_fit(train.X, train.Y, train.A, ac));
        }
        for (std::size_t g = 0; g < G; ++g) objective[rep][g] = fits[g].anchor_objective;
        for (std::size_t s = 0; s < S; ++s) {
            const double strength = cfg.strengths[s];
            std::vector<Dataset> tests;
            if (strength == 0.0) {
                tests.push_back(gen_anchor_sem(cfg.spec, cfg.n_test, derive_seed(rs, 1000 + s)).data);
            } else {
                Rng dir_rng(derive_seed(rs, 2000 + s));
                for (int k = 0; k < cfg.directions; ++k) {
                    Vector u = dir_rng.normal_vector(cfg.spec.r);
                    u /= u.norm();
                    const Vector delta = std::sqrt(strength) * root * u;
                    tests.push_back(perturb(cfg.spec, Perturbation::fixed(delta), cfg.n_test,
                                            derive_seed(rs, 3000 + 100 * s + k))
                                        .data);
                }
            }
            for (std::size_t g = 0; g < G; ++g) {
                std::vector<double> mses;
                for (const Dataset& t : tests) mses.push_back(test_mse(t, fits[g].beta, fits[g].intercept));
                Cell& c = cells[rep][g][s];
                c.worst = *std::max_element(mses.begin(), mses.end());
                c.mean = mean_of(mses);
                c.population_sup = strength == 0.0
                                       ? worst_case_sup(cfg.spec, fits[g].beta, 1.0)
                                       : worst_case_sup(cfg.spec, fits[g].beta, strength);
            }
        }
    });

    ExperimentReport report;
    report.experiment = "robustness";
    report.seed = cfg.seed;
    report.replicates = cfg.replicates;
    report.config = Json{{"spec", to_json(cfg.spec)},
                         {"n_train", cfg.n_train},
                         {"n_test", cfg.n_test},
                         {"gammas", gammas_json(cfg.gammas)},
                         {"strengths", cfg.strengths},
                         {"directions", cfg.directions},
                         {"replicates", cfg.replicates},
                         {"lambda", cfg.lambda},
                         {"seed", cfg.seed}};
    ReportTable curve{"curve",
                      {"replicate", "strength", "gamma", "worst_mse", "mean_mse", "population_sup",
                       "objective"},
                      {}};
    for (std::size_t rep = 0; rep < R; ++rep) {
        for (std::size_t s = 0; s < S; ++s) {
            for (std::size_t g = 0; g < G; ++g) {
                const Cell& c = cells[rep][g][s];
                curve.rows.push_back({static_cast<long long>(rep), cfg.strengths[s],
                                      gamma_json(cfg.gammas[g]), c.worst, c.mean, c.population_sup,
                                      objective[rep][g]});
            }
        }
    }
    ReportTable sel{"selection", {"strength", "best_gamma", "best_worst_mse", "matched_gamma"}, {}};
    Json best = Json::array();
    for (std::size_t s = 0; s < S; ++s) {
        std::size_t best_g = 0;
        double best_v = 0.0;
        for (std::size_t g = 0; g < G; ++g) {
            double v = 0.0;
            for (std::size_t rep = 0; rep < R; ++rep) v += cells[rep][g][s].worst;
            v /= static_cast<double>(R);
            if (g == 0 || v < best_v) {
                best_v = v;
                best_g = g;
            }
        }
        Json matched = nullptr;
        double matched_g = kInfiniteGamma;
        for (double g : cfg.gammas) {
            if (g >= cfg.strengths[s] && g < matched_g) matched_g = g;
        }
        if (std::any_of(cfg.gammas.begin(), cfg.gammas.end(),
                        [&](double g) { return g >= cfg.strengths[s]; })) {
            matched = gamma_json(matched_g);
        }
        sel.rows.push_back({cfg.strengths[s], gamma_json(cfg.gammas[best_g]), best_v, matched});
        best.push_back(gamma_json(cfg.gammas[best_g]));
    }
    report.summary["best_gamma_per_strength"] = best;
    report.tables = {std::move(sel), std::move(curve)};
    report.wall_clock_seconds = seconds_since(start);
    return report;
}

LoeoResult loeo_gamma(const std::vector<Dataset>& envs, const std::vector<double>& gammas,
                      double lambda, int threads) {
    const std::size_t E = envs.size();
    if (E < 2) throw InvalidInput("loeo_gamma: need at least two environments");
    if (gammas.empty()) throw InvalidInput("loeo_gamma: empty gamma grid");
    const Index p = envs[0].p();
    for (const Dataset& d : envs) {
        if (d.p() != p || d.n() < 1 || d.Y.size() != d.n()) {
            throw InvalidInput("loeo_gamma: environments must share p and be non-empty");
        }
    }
    const std::size_t G = gammas.size();
    LoeoResult out;
    out.gammas = gammas;
    out.left_out_mse = Matrix::Zero(static_cast<Index>(G), static_cast<Index>(E));
    out.degenerate_grid = G == 1;

    parallel_for(E, threads, [&](std::size_t e) {
        Index n = 0;
        for (std::size_t k = 0; k < E; ++k) n += k == e ? 0 : envs[k].n();
        Matrix X(n, p);
        Vector Y(n);
        Matrix A = Matrix::Zero(n, static_cast<Index>(E - 1));
        Index row = 0, col = 0;
        for (std::size_t k = 0; k < E; ++k) {
            if (k == e) continue;
            const Index m = envs[k].n();
            X.middleRows(row, m) = envs[k].X;
            Y.segment(row, m) = envs[k].Y;
            A.block(row, col, m, 1).setOnes();
            row += m;
            ++col;
        }
        for (std::size_t g = 0; g < G; ++g) {
            AnchorConfig ac;
            ac.gamma = gammas[g];
            ac.lambda = lambda;
            const AnchorFit fit = anchor_fit(X, Y, A, ac);
            out.left_out_mse(static_cast<Index>(g), static_cast<Index>(e)) =
                test_mse(envs[e], fit.beta, fit.intercept);
        }
    });

    out.worst_mse.resize(G);
    for (std::size_t g = 0; g < G; ++g) out.worst_mse[g] = out.left_out_mse.row(static_cast<Index>(g)).maxCoeff();
    std::size_t best = 0;
    for (std::size_t g = 1; g < G; ++g) {
        const double a = out.worst_mse[g];
        const double b = out.worst_mse[best];
        const bool tie = std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
        if ((tie && gammas[g] > gammas[best]) || (!tie && a < b)) best = g;
    }
    out.selected_gamma = gammas[best];
    return out;
}

ExperimentReport loeo_report(const LoeoResult& result) {
    ExperimentReport report;
    report.experiment = "loeo_gamma";
    report.config = Json{{"gammas", gammas_json(result.gammas)},
                         {"environments", result.left_out_mse.cols()}};
    if (result.degenerate_grid) report.flags.push_back("degenerate_grid");
    ReportTable t{"profile", {"gamma", "environment", "left_out_mse"}, {}};
    for (Index g = 0; g < result.left_out_mse.rows(); ++g) {
        for (Index e = 0; e < result.left_out_mse.cols(); ++e) {
            t.rows.push_back({gamma_json(result.gammas[static_cast<std::size_t>(g)]), e + 1,
                              result.left_out_mse(g, e)});
        }
    }
    report.summary = Json{{"selected_gamma", gamma_json(result.selected_gamma)},
                          {"worst_mse", result.worst_mse}};
    report.tables = {std::move(t)};
    return report;
}

} // namespace causalreg
