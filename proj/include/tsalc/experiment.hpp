#pragma once

// End-to-end Thompson-sampling runs over a finite controller grid.
//
// Row t (1..T) of a run records the t-th posterior update: the cost observed
// for the controller chosen at t-1, the posterior F^t, and the hypothesis and
// controller drawn from F^t. The initial draw from the prior is kept in the
// summary.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "tsalc/config.hpp"
#include "tsalc/metrics.hpp"
#include "tsalc/plots.hpp"
#include "tsalc/posterior.hpp"

namespace tsalc {

/// Everything a run derives from the config before the first segment.
struct Setup {
    PlantModel plant;
    BasisSet basis;
    CostSpec cost;
    CandidateGrid grid;
    HypothesisSet set;
    std::optional<Vector> true_costs;  // realizable table, when injected
};

Setup build_setup(const ExperimentConfig& config);

struct SegmentRow {
    std::size_t t = 0;
    std::size_t observed_g = 0;
    double cost = 0.0;
    bool saturated = false;
    double entropy = 0.0;
    double mass_true = std::numeric_limits<double>::quiet_NaN();
    std::size_t hypothesis = 0;
    std::size_t selected_g = 0;
    Vector posterior;
};

struct DiagnosticRow {
    std::size_t t = 0;
    double mass_outside_h = 0.0;
    double mass_outside_kl = 0.0;
    double log_mass_outside = 0.0;  // configured metric, log space
    double t_d = std::numeric_limits<double>::quiet_NaN();
    double m_t = std::numeric_limits<double>::quiet_NaN();
    double distance = 0.0;          // d(predictive, truth)
    double regret = 0.0;
    double bound_term3 = 0.0;
    double bound_total = 0.0;
};

struct RunDiagnostics {
    std::size_t true_index = 0;
    std::size_t g_star = 0;
    double eps_j = 0.0;
    double j_min = 0.0;
    double m_g = 0.0;
    std::vector<double> channel_norms;
    double lipschitz = 0.0;          // L_J used by the bound
    std::string lipschitz_source;    // config | estimated
    std::size_t ball_count = 0;
    DecayFit mass_fit;  // log mass outside the ball against t
    DecayFit l_fit;     // log L_t of the ball complement against t
    RegretBound final_bound;
    double average_regret = 0.0;
    bool bound_holds = false;
    bool term3_decreasing = false;
    std::vector<std::string> warnings;
    std::vector<DiagnosticRow> rows;
};

struct RunRecord {
    ExperimentConfig config;
    std::string status = "completed";  // completed | failed
    std::string failure;
    std::size_t initial_hypothesis = 0;
    std::size_t initial_g = 0;
    std::vector<SegmentRow> rows;
    std::optional<RunDiagnostics> diagnostics;
    CandidateGrid grid;
    HypothesisSet set;

    bool failed() const { return status != "completed"; }
};

/// Plant blowups do not throw: the record comes back with status "failed"
/// and the rows completed so far. Config problems throw ConfigError.
RunRecord run_experiment(const ExperimentConfig& config);

/// Seed of replicate r: the master seed for r = 0, a labeled substream otherwise.
std::uint64_t replicate_seed(std::uint64_t master, std::size_t r);

struct ReplicateSummary {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    std::string status;
    double final_mass_outside = std::numeric_limits<double>::quiet_NaN();
    double slope = std::numeric_limits<double>::quiet_NaN();
    double r_squared = std::numeric_limits<double>::quiet_NaN();
    double eps_l = std::numeric_limits<double>::quiet_NaN();
    double p0 = std::numeric_limits<double>::quiet_NaN();
    double final_term3 = std::numeric_limits<double>::quiet_NaN();
    bool bound_holds = false;
    bool term3_decreasing = false;
    bool converged = false;  // final mass < 0.05, slope < 0, R^2 >= 0.7
};

struct AggregateReport {
    ExperimentConfig config;
    std::vector<RunRecord> runs;
    std::vector<ReplicateSummary> replicates;
    std::size_t completed = 0;
    std::size_t converged = 0;
    std::size_t negative_slope = 0;
    std::vector<double> regret_mean;  // per t over completed runs with diagnostics
    std::vector<double> regret_sd;
    std::optional<VarianceProbe> variance_probe;
    std::string variance_probe_note;
};

/// Independent replicates run in parallel; a failing replicate does not stop the others.
AggregateReport run_replicates(const ExperimentConfig& config);

// --- persistence -------------------------------------------------------------

nlohmann::json grid_to_json(const CandidateGrid& grid);
nlohmann::json hypotheses_to_json(const HypothesisSet& set);
nlohmann::json run_summary_json(const RunRecord& record);
nlohmann::json aggregate_json(const AggregateReport& report);

/// Writes config.json, segments.csv, diagnostics.csv (when available),
/// summary.json, grid.json, hypotheses.json and plots/. Throws IoError.
void write_run(const RunRecord& record, const std::filesystem::path& dir);

PlotData plot_data(const RunRecord& record);

/// Rebuilds plot inputs from a directory written by write_run. Throws IoError.
PlotData load_plot_data(const std::filesystem::path& dir);

/// Writes aggregate.json, aggregate.csv, plots/ and one subdirectory per replicate.
void write_aggregate(const AggregateReport& report, const std::filesystem::path& dir);

}  // namespace tsalc
