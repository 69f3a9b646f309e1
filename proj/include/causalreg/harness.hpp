#pragma once

#include "causalreg/anchor.hpp"
#include "causalreg/lasso.hpp"
#include "causalreg/sem.hpp"
#include "causalreg/sem_json.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace causalreg {

/// Selected coordinates (0-based, sorted, distinct) with the producing method.
struct SelectionSet {
    std::vector<Index> indices;
    std::string source;
};

SelectionSet make_selection(std::vector<Index> indices, std::string source = {});

/// Jaccard distance 1 - |S1 n S2| / |S1 u S2|; two empty sets give 0.
double jaccard(const SelectionSet& a, const SelectionSet& b);

/// Indices of the K largest |coef|, ties to the smaller index, sorted.
std::vector<Index> topk(const Vector& coef, Index K);

/// |topK(|coef1|) n topK(|coef2|)|. Requires 1 <= K <= p.
Index topk_overlap(const Vector& coef1, const Vector& coef2, Index K);

/// Fixed-cardinality selection from a path: the first fit whose support
/// reaches K, reduced to its K largest coefficients. If the path never
/// reaches K the last fit's support is returned (fewer than K indices).
SelectionSet select_fixed_size(const std::vector<SparseFit>& path, Index K, std::string source = {});

/// A table of one experiment: string header plus rows of JSON scalars.
struct ReportTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Json>> rows;
};

struct ExperimentReport {
    std::string experiment;
    Json config;  // echo of every input that determines the output
    std::uint64_t seed = 0;
    int replicates = 0;
    std::vector<ReportTable> tables;
    Json summary = Json::object();
    std::vector<std::string> flags;
    /// Measured but never serialised, so reports stay byte-reproducible.
    double wall_clock_seconds = 0.0;

    const ReportTable& table(const std::string& name) const;
    bool has_flag(const std::string& flag) const;
};

/// JSON document with version, config echo, summary, flags and tables.
Json report_to_json(const ExperimentReport& report);
/// '#'-prefixed header lines (version, config, summary) followed by each
/// table as "# table: name", a header row and data rows.
std::string report_to_csv(const ExperimentReport& report);

// ---------------------------------------------------------------------------

enum class SelectionMethod { Lasso, TrimLasso, Lava };
const char* selection_method_name(SelectionMethod m);

struct ReplicabilityConfig {
    DenseFamily family;
    std::vector<Index> support_sizes = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 14, 16, 18, 20};
    std::vector<SelectionMethod> methods = {SelectionMethod::Lasso, SelectionMethod::TrimLasso,
                                            SelectionMethod::Lava};
    int replicates = 20;
    int path_length = 100;
    double path_ratio = 0.001;
    std::uint64_t seed = 0;
    int threads = 1;
};

/// Per replicate: one beta0, two datasets with independently drawn
/// confounding (same family), selected sets of size K on each, Jaccard
/// distance between them. Tables: "per_replicate" (method, K, replicate,
/// distance) and "mean" (method, K, mean_distance, replicates).
ExperimentReport replicability_experiment(const ReplicabilityConfig& cfg);

struct CoverageConfig {
    DenseFamily family;
    /// 0-based coordinates; empty means {0, s0} (one signal, one null).
    std::vector<Index> coords;
    int replicates = 200;
    double level = 0.95;
    int cv_folds = 10;
    int cv_grid_size = 50;
    std::uint64_t seed = 0;
    int threads = 1;
};

/// The SEM parameters are drawn once from `seed`; replicates redraw H and
/// noise. Tables: "per_replicate" and "summary" (method, j, truth, coverage,
/// rejection_rate, mean_se, mean_width, mc_se). Flag "wide_uncertainty" when
/// fewer than two replicates are available.
ExperimentReport coverage_experiment(const CoverageConfig& cfg);

struct RobustnessConfig {
    AnchorSemSpec spec;
    Index n_train = 1000;
    Index n_test = 1000;
    std::vector<double> gammas = {0.0, 1.0, 2.0, 4.0, 8.0, 16.0, kInfiniteGamma};
    /// Strength s: shifts delta with delta delta^T <= s E[A A^T]. Strength 0
    /// is the unperturbed training distribution.
    std::vector<double> strengths = {0.0, 1.0, 4.0, 16.0, 64.0};
    int directions = 10;
    int replicates = 1;
    double lambda = 0.0;
    std::uint64_t seed = 0;
    int threads = 1;
};

/// Table "curve": (replicate, strength, gamma, worst_mse, mean_mse,
/// objective) with objective = training anchor objective at that gamma.
/// Table "selection": per strength, the empirically best gamma and the
/// matched gamma (smallest grid gamma >= strength).
ExperimentReport robustness_curve(const RobustnessConfig& cfg);

struct LoeoResult {
    std::vector<double> gammas;
    Matrix left_out_mse;  // gammas x environments
    std::vector<double> worst_mse;
    double selected_gamma = 1.0;
    bool degenerate_grid = false;
};

/// Leave-one-environment-out selection of gamma. Each fit uses the remaining
/// environments as dummy anchors; the selected gamma minimises the worst
/// left-out MSE, ties (relative 1e-12) going to the larger gamma.
LoeoResult loeo_gamma(const std::vector<Dataset>& environments, const std::vector<double>& gammas,
                      double lambda = 0.0, int threads = 1);

ExperimentReport loeo_report(const LoeoResult& result);

} // namespace causalreg
