#include "tsalc/experiment.hpp"

#include <fstream>
#include <future>

#include "tsalc/approximation.hpp"
#include "tsalc/plots.hpp"

namespace tsalc {

namespace fs = std::filesystem;
using nlohmann::json;

Setup build_setup(const ExperimentConfig& config) {
    validate_config(config);
    PlantModel plant = build_plant(config.plant);
    BasisSet basis = build_basis(config, plant);
    CostSpec cost = build_cost(config, plant.state_dim(), plant.input_dim());

    Rng grid_rng = make_rng(stream_seed(config.seed, "grid"));
    CandidateGrid grid = make_grid(basis, config.grid.vertices, config.grid.samples, grid_rng);

    const auto& hc = config.hypotheses;
    Rng hyp_rng = make_rng(stream_seed(config.seed, "hypotheses"));
    const std::size_t generated = hc.realizable ? hc.count - 1 : hc.count;
    std::vector<Hypothesis> hyps;
    for (std::size_t h = 0; h < generated; ++h) {
        if (hc.generator == "rbf")
            hyps.push_back(rbf_hypothesis(grid, {hc.rbf_centers, hc.rbf_length_scale, hc.rbf_amplitude, 1.0}, hyp_rng));
        else
            hyps.push_back(quadratic_hypothesis(grid, {1.0, hc.quadratic_curvature}, hyp_rng));
    }
    std::optional<std::size_t> true_index;
    std::optional<Vector> true_costs;
    if (hc.realizable) {
        Hypothesis truth = build_realizable_hypothesis(plant, basis, grid, cost, hc.rollouts,
                                                       stream_seed(config.seed, "oracle"));
        const auto at = static_cast<std::size_t>(uniform01(hyp_rng) * static_cast<double>(hc.count));
        true_costs = truth.costs;
        hyps.insert(hyps.begin() + static_cast<std::ptrdiff_t>(at), std::move(truth));
        true_index = at;
    }
    HypothesisSet set(std::move(hyps), true_index);
    return Setup{std::move(plant), std::move(basis), std::move(cost), std::move(grid), std::move(set), std::move(true_costs)};
}

namespace {

struct RawDiagnostics {
    std::vector<bool> outside_h;
    std::vector<bool> outside_kl;
    std::vector<bool> omega;  // complement of the ball under the configured metric
    std::vector<double> log_l;  // t = 0..T
    std::vector<double> dist;   // t = 1..T
};

void finish_diagnostics(const ExperimentConfig& config, const Setup& s, const RawDiagnostics& raw, RunDiagnostics& d) {
    const Metric metric = metric_from_string(config.metric.metric);
    const std::size_t rows = d.rows.size();

    const bool omega_empty = std::none_of(raw.omega.begin(), raw.omega.end(), [](bool b) { return b; });
    if (!omega_empty && rows >= 1) {
        const MartingaleSeries ms = martingale_series(raw.log_l, raw.dist, metric);
        for (std::size_t i = 0; i < rows; ++i) {
            d.rows[i].t_d = ms.t_d[i];
            d.rows[i].m_t = ms.m[i];
        }
        d.l_fit = ms.fit;
    }

    std::vector<double> ts;
    std::vector<double> ys;
    for (const auto& r : d.rows) {
        ts.push_back(static_cast<double>(r.t));
        ys.push_back(r.log_mass_outside);
    }
    d.mass_fit = fit_log_linear(ts, ys);

    double p0 = 0.0;
    double eps_l = 0.0;
    if (d.mass_fit.valid) {
        p0 = d.mass_fit.prefactor();
        eps_l = d.mass_fit.rate;
    } else if (!omega_empty) {
        for (const auto& r : d.rows) p0 = std::max(p0, std::exp(r.log_mass_outside));
        if (rows == 0) p0 = 1.0;
    }

    RegretBoundInputs in;
    in.density_hi = s.set.density_hi();
    in.ball_measure = static_cast<double>(d.ball_count);
    in.set_measure = s.set.measure();
    in.p0 = p0;
    in.eps_l = eps_l;
    in.eps_j = d.eps_j;
    in.lipschitz = d.lipschitz;
    in.m = s.basis.input_dim();
    in.m_g = d.m_g;
    in.channel_norms = d.channel_norms;
    in.j_min = d.j_min;
    in.n = s.basis.state_dim();

    d.bound_holds = true;
    d.term3_decreasing = true;
    double sum_regret = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        in.t = static_cast<double>(d.rows[i].t);
        const RegretBound b = regret_bound(in);
        d.rows[i].bound_term3 = b.transient;
        d.rows[i].bound_total = b.total;
        if (!(d.rows[i].regret <= b.total)) d.bound_holds = false;
        if (i > 0 && !(b.transient <= d.rows[i - 1].bound_term3)) d.term3_decreasing = false;
        sum_regret += d.rows[i].regret;
        d.final_bound = b;
    }
    if (rows >= 2 && !(d.rows.back().bound_term3 < d.rows.front().bound_term3)) d.term3_decreasing = false;
    d.average_regret = rows ? std::abs(sum_regret) / static_cast<double>(rows) : 0.0;
}

}  // namespace

static double estimate_lipschitz(const CandidateGrid& grid, const std::vector<HullProjector>& projectors,
                          const Vector& costs) {
    double best = 0.0;
    for (std::size_t a = 0; a < grid.size(); ++a) {
        for (std::size_t b = a + 1; b < grid.size(); ++b) {
            double sq = 0.0;
            for (std::size_t i = 0; i < projectors.size(); ++i) {
                const Vector diff = (grid.points[a].alpha.row(static_cast<Eigen::Index>(i)) -
                                     grid.points[b].alpha.row(static_cast<Eigen::Index>(i)))
                                        .transpose();
                const double nrm = projectors[i].norm_of(diff);
                sq += nrm * nrm;
            }
            if (sq <= 0.0) continue;
            const double dj = std::abs(costs(static_cast<Eigen::Index>(a)) - costs(static_cast<Eigen::Index>(b)));
            best = std::max(best, dj / std::sqrt(sq));
        }
    }
    return best;
}

RunRecord run_experiment(const ExperimentConfig& config) {
    Setup s = build_setup(config);
    RunRecord rec;
    rec.config = config;
    rec.grid = s.grid;
    rec.set = s.set;

    const Metric metric = metric_from_string(config.metric.metric);
    const bool by_density = config.selection == "density";
    const std::uint64_t noise_seed = stream_seed(config.seed, "noise");
    Rng ts_rng = make_rng(stream_seed(config.seed, "ts"));

    std::optional<Vector> truth;
    RawDiagnostics raw;
    RunDiagnostics diag;
    if (auto ti = s.set.true_index()) {
        truth = s.set[*ti].density;
        diag.true_index = *ti;
        Eigen::Index g_star = 0;
        truth->maxCoeff(&g_star);
        diag.g_star = static_cast<std::size_t>(g_star);
        diag.eps_j = 1.0 / s.true_costs->cwiseInverse().sum();
        diag.j_min = std::max(s.cost.floor, s.true_costs->minCoeff());
        QuadratureSpec quad;
        quad.nodes_per_axis = config.quadrature_nodes;
        diag.m_g = compute_M_g(s.basis, quad);
        std::vector<HullProjector> projectors;
        for (int i = 0; i < s.basis.input_dim(); ++i) projectors.emplace_back(s.basis, i, quad);
        const ControllerWeights& best = s.grid.points[diag.g_star];
        for (int i = 0; i < s.basis.input_dim(); ++i)
            diag.channel_norms.push_back(projectors[i].norm_of(best.alpha.row(i).transpose()));
        if (s.cost.lipschitz) {
            diag.lipschitz = *s.cost.lipschitz;
            diag.lipschitz_source = "config";
        } else {
            diag.lipschitz = estimate_lipschitz(s.grid, projectors, *s.true_costs);
            diag.lipschitz_source = "estimated";
        }
        raw.outside_h = outside_ball(s.set, *truth, {Metric::hellinger, config.metric.delta});
        raw.outside_kl = outside_ball(s.set, *truth, {Metric::kl, config.metric.delta});
        raw.omega = metric == Metric::hellinger ? raw.outside_h : raw.outside_kl;
        diag.ball_count = static_cast<std::size_t>(std::count(raw.omega.begin(), raw.omega.end(), false));
    }

    PosteriorState post = uniform_posterior(s.set.size());
    auto choose = [&](const PosteriorState& p, std::size_t& h, std::size_t& g) {
        h = ts_sample(p, ts_rng);
        if (by_density) {
            const std::vector<double> probs = to_std(*truth);
            g = sample_categorical(probs, ts_rng);
        } else {
            g = select_controller(s.set[h]);
        }
    };
    choose(post, rec.initial_hypothesis, rec.initial_g);
    if (truth) raw.log_l.push_back(log_prob_in_set(post, raw.omega));

    std::size_t g_prev = rec.initial_g;
    for (std::size_t t = 1; t <= config.segments; ++t) {
        Segment seg;
        try {
            seg = rollout_segment(s.plant, s.basis, s.grid.points[g_prev], config.horizon, noise_seed, t - 1);
        } catch (const PlantBlowup& e) {
            rec.status = "failed";
            rec.failure = e.what();
            break;
        }
        const double cost = segment_cost(s.cost, seg);
        post = observe_and_update(std::move(post), s.set, g_prev, cost);

        SegmentRow row;
        row.t = t;
        row.observed_g = g_prev;
        row.cost = cost;
        row.saturated = seg.saturated;
        row.entropy = post.entropy();
        row.posterior = post.weights();
        if (truth) row.mass_true = row.posterior(static_cast<Eigen::Index>(diag.true_index));
        choose(post, row.hypothesis, row.selected_g);

        if (truth) {
            DiagnosticRow dr;
            dr.t = t;
            dr.mass_outside_h = prob_in_set(post, raw.outside_h);
            dr.mass_outside_kl = prob_in_set(post, raw.outside_kl);
            dr.log_mass_outside = log_prob_in_set(post, raw.omega);
            dr.distance = distance(predictive_density(post, s.set), *truth, metric);
            dr.regret = regret_estimate(post, s.set, row.selected_g, *truth, diag.g_star);
            raw.log_l.push_back(log_unnormalized_mass(post, raw.omega) - static_cast<double>(t) * std::log(diag.eps_j));
            raw.dist.push_back(dr.distance);
            diag.rows.push_back(dr);
        }
        g_prev = row.selected_g;
        rec.rows.push_back(std::move(row));
    }

    if (truth) {
        finish_diagnostics(config, s, raw, diag);
        rec.diagnostics = std::move(diag);
    }
    return rec;
}

std::uint64_t replicate_seed(std::uint64_t master, std::size_t r) {
    return r == 0 ? master : substream_seed(stream_seed(master, "replicate"), r);
}

AggregateReport run_replicates(const ExperimentConfig& config) {
    validate_config(config);
    AggregateReport rep;
    rep.config = config;

    std::vector<std::future<RunRecord>> jobs;
    for (std::size_t r = 0; r < config.replicates; ++r) {
        ExperimentConfig c = config;
        c.seed = replicate_seed(config.seed, r);
        c.replicates = 1;
        jobs.push_back(std::async(std::launch::async, [c] { return run_experiment(c); }));
    }
    for (auto& j : jobs) rep.runs.push_back(j.get());

    std::vector<std::vector<double>> regrets;
    std::vector<std::vector<double>> td;
    for (std::size_t r = 0; r < rep.runs.size(); ++r) {
        const RunRecord& run = rep.runs[r];
        ReplicateSummary s;
        s.index = r;
        s.seed = run.config.seed;
        s.status = run.status;
        if (!run.failed()) ++rep.completed;
        if (run.diagnostics && !run.diagnostics->rows.empty()) {
            const auto& d = *run.diagnostics;
            s.final_mass_outside = run.config.metric.metric == "hellinger" ? d.rows.back().mass_outside_h
                                                                           : d.rows.back().mass_outside_kl;
            if (d.mass_fit.valid) {
                s.slope = d.mass_fit.slope();
                s.r_squared = d.mass_fit.r_squared;
                s.eps_l = d.mass_fit.rate;
                s.p0 = d.mass_fit.prefactor();
            }
            s.final_term3 = d.rows.back().bound_term3;
            s.bound_holds = d.bound_holds;
            s.term3_decreasing = d.term3_decreasing;
            s.converged = !run.failed() && s.final_mass_outside < 0.05 && d.mass_fit.valid && s.slope < 0.0 &&
                          s.r_squared >= 0.7;
            if (d.mass_fit.valid && s.slope < 0.0) ++rep.negative_slope;
            if (!run.failed()) {
                std::vector<double> reg;
                std::vector<double> tds;
                bool finite_td = true;
                for (const auto& row : d.rows) {
                    reg.push_back(row.regret);
                    tds.push_back(row.t_d);
                    finite_td = finite_td && std::isfinite(row.t_d);
                }
                regrets.push_back(std::move(reg));
                if (finite_td) td.push_back(std::move(tds));
            }
        }
        if (s.converged) ++rep.converged;
        rep.replicates.push_back(s);
    }

    if (!regrets.empty()) {
        const std::size_t horizon = regrets.front().size();
        for (std::size_t t = 0; t < horizon; ++t) {
            double mean = 0.0;
            for (const auto& r : regrets) mean += r[t];
            mean /= static_cast<double>(regrets.size());
            double var = 0.0;
            for (const auto& r : regrets) var += (r[t] - mean) * (r[t] - mean);
            var = regrets.size() > 1 ? var / static_cast<double>(regrets.size() - 1) : 0.0;
            rep.regret_mean.push_back(mean);
            rep.regret_sd.push_back(std::sqrt(var));
        }
    }
    if (td.size() >= 5) {
        rep.variance_probe = variance_summability_probe(td);
    } else {
        rep.variance_probe_note = "needs at least 5 completed replicates with a nonempty neighborhood complement";
    }
    return rep;
}

// --- persistence -------------------------------------------------------------

json grid_to_json(const CandidateGrid& grid) {
    json points = json::array();
    for (std::size_t g = 0; g < grid.size(); ++g) {
        json alpha = json::array();
        const Matrix& a = grid.points[g].alpha;
        for (Eigen::Index i = 0; i < a.rows(); ++i) alpha.push_back(to_std(a.row(i).transpose()));
        points.push_back({{"index", g}, {"origin", to_string(grid.origins[g])}, {"alpha", std::move(alpha)}});
    }
    return {{"size", grid.size()}, {"points", std::move(points)}};
}

json hypotheses_to_json(const HypothesisSet& set) {
    json hs = json::array();
    for (std::size_t h = 0; h < set.size(); ++h)
        hs.push_back({{"index", h}, {"origin", set[h].origin}, {"costs", to_std(set[h].costs)},
                      {"density", to_std(set[h].density)}});
    json j = {{"size", set.size()}, {"grid_size", set.grid_size()}, {"hypotheses", std::move(hs)}};
    j["true_index"] = set.true_index() ? json(*set.true_index()) : json(nullptr);
    return j;
}

namespace {

json fit_json(const DecayFit& f, const char* prefactor_name) {
    return {{"valid", f.valid},         {"points", f.points},          {"eps_L_hat", f.rate},
            {"slope", f.slope()},       {prefactor_name, f.prefactor()}, {"r_squared", f.r_squared}};
}

}  // namespace

json run_summary_json(const RunRecord& rec) {
    json j;
    j["name"] = rec.config.name;
    j["status"] = rec.status;
    j["failure"] = rec.failure;
    j["seed"] = rec.config.seed;
    j["selection"] = rec.config.selection;
    j["segments_requested"] = rec.config.segments;
    j["segments_completed"] = rec.rows.size();
    j["initial_hypothesis"] = rec.initial_hypothesis;
    j["initial_g"] = rec.initial_g;
    j["final_entropy"] = rec.rows.empty() ? json(nullptr) : json(rec.rows.back().entropy);
    j["true_index"] = rec.set.true_index() ? json(*rec.set.true_index()) : json(nullptr);
    if (!rec.diagnostics) {
        j["diagnostics"] = nullptr;
        return j;
    }
    const auto& d = *rec.diagnostics;
    json dj;
    dj["metric"] = rec.config.metric.metric;
    dj["delta"] = rec.config.metric.delta;
    dj["g_star"] = d.g_star;
    dj["eps_J"] = d.eps_j;
    dj["J_m"] = d.j_min;
    dj["M_g"] = d.m_g;
    dj["channel_norms"] = d.channel_norms;
    dj["L_J"] = d.lipschitz;
    dj["L_J_source"] = d.lipschitz_source;
    dj["ball_count"] = d.ball_count;
    dj["set_measure"] = rec.set.measure();
    dj["density_hi"] = rec.set.density_hi();
    dj["mass_fit"] = fit_json(d.mass_fit, "P0_hat");
    dj["likelihood_fit"] = fit_json(d.l_fit, "L0_hat");
    dj["bound_components"] = {{"term1", d.final_bound.neighborhood},
                              {"term2", d.final_bound.parameterization},
                              {"term3_final", d.final_bound.transient},
                              {"total_final", d.final_bound.total}};
    dj["average_regret"] = d.average_regret;
    dj["bound_holds"] = d.bound_holds;
    dj["term3_decreasing"] = d.term3_decreasing;
    if (!d.rows.empty()) {
        dj["final_mass_outside_H"] = d.rows.back().mass_outside_h;
        dj["final_mass_outside_KL"] = d.rows.back().mass_outside_kl;
        dj["final_mass_true"] = rec.rows.back().mass_true;
    }
    dj["warnings"] = d.warnings;
    j["diagnostics"] = std::move(dj);
    return j;
}

json aggregate_json(const AggregateReport& rep) {
    json j;
    j["name"] = rep.config.name;
    j["master_seed"] = rep.config.seed;
    j["replicates"] = rep.runs.size();
    j["completed"] = rep.completed;
    j["converged"] = rep.converged;
    j["negative_slope"] = rep.negative_slope;
    json rs = json::array();
    for (const auto& s : rep.replicates)
        rs.push_back({{"index", s.index},
                      {"seed", s.seed},
                      {"status", s.status},
                      {"final_mass_outside", s.final_mass_outside},
                      {"slope", s.slope},
                      {"r_squared", s.r_squared},
                      {"eps_L_hat", s.eps_l},
                      {"P0_hat", s.p0},
                      {"final_term3", s.final_term3},
                      {"bound_holds", s.bound_holds},
                      {"term3_decreasing", s.term3_decreasing},
                      {"converged", s.converged}});
    j["replicate_summaries"] = std::move(rs);
    if (rep.variance_probe) {
        j["variance_probe"] = {{"total", rep.variance_probe->total},
                               {"tail_ratio", rep.variance_probe->tail_ratio},
                               {"plateau", rep.variance_probe->plateau}};
    } else {
        j["variance_probe"] = {{"note", rep.variance_probe_note}};
    }
    return j;
}

PlotData plot_data(const RunRecord& rec) {
    PlotData p;
    for (const auto& r : rec.rows) {
        p.t.push_back(static_cast<double>(r.t));
        p.cost.push_back(r.cost);
    }
    if (rec.diagnostics) {
        const bool hellinger = rec.config.metric.metric == "hellinger";
        for (std::size_t i = 0; i < rec.rows.size(); ++i) {
            const auto& d = rec.diagnostics->rows[i];
            p.mass_true.push_back(rec.rows[i].mass_true);
            p.mass_outside.push_back(hellinger ? d.mass_outside_h : d.mass_outside_kl);
            p.regret.push_back(d.regret);
            p.bound.push_back(d.bound_total);
        }
    }
    return p;
}

PlotData load_plot_data(const fs::path& dir) {
    const CsvTable seg = read_csv(dir / "segments.csv");
    PlotData p;
    p.t = seg.column("t");
    p.cost = seg.column("cost");
    if (!fs::exists(dir / "diagnostics.csv")) return p;

    std::ifstream in(dir / "summary.json");
    if (!in) throw IoError("cannot open " + (dir / "summary.json").string());
    json summary;
    try {
        in >> summary;
    } catch (const json::exception& e) {
        throw IoError(std::string("summary.json is not valid JSON: ") + e.what());
    }
    const json& d = summary.at("diagnostics");
    const CsvTable diag = read_csv(dir / "diagnostics.csv");
    const bool hellinger = d.at("metric").get<std::string>() == "hellinger";
    const double constant = d.at("bound_components").at("term1").get<double>() +
                            d.at("bound_components").at("term2").get<double>();
    p.mass_true = seg.column("mass_true");
    p.mass_outside = diag.column(hellinger ? "mass_outside_H" : "mass_outside_KL");
    p.regret = diag.column("regret_est");
    for (double term3 : diag.column("bound_term3")) p.bound.push_back(constant + term3);
    return p;
}

void write_run(const RunRecord& rec, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());

    write_text(dir / "config.json", serialize_config(rec.config).dump(2) + "\n");

    std::vector<std::string> header{"t", "observed_g", "cost", "saturated", "entropy", "mass_true", "hypothesis", "selected_g"};
    for (std::size_t h = 0; h < rec.set.size(); ++h) header.push_back("F_" + std::to_string(h));
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : rec.rows) {
        std::vector<std::string> row{std::to_string(r.t),      std::to_string(r.observed_g), format_number(r.cost),
                                     r.saturated ? "1" : "0",  format_number(r.entropy),     format_number(r.mass_true),
                                     std::to_string(r.hypothesis), std::to_string(r.selected_g)};
        for (Eigen::Index h = 0; h < r.posterior.size(); ++h) row.push_back(format_number(r.posterior(h)));
        rows.push_back(std::move(row));
    }
    write_csv(dir / "segments.csv", header, rows);

    if (rec.diagnostics) {
        std::vector<std::vector<std::string>> drows;
        for (const auto& d : rec.diagnostics->rows)
            drows.push_back({std::to_string(d.t), format_number(d.mass_outside_h), format_number(d.mass_outside_kl),
                             format_number(d.t_d), format_number(d.m_t), format_number(d.regret),
                             format_number(d.bound_term3)});
        write_csv(dir / "diagnostics.csv",
                  {"t", "mass_outside_H", "mass_outside_KL", "T_d_t", "M_T", "regret_est", "bound_term3"}, drows);
    }

    write_text(dir / "summary.json", run_summary_json(rec).dump(2) + "\n");
    write_text(dir / "grid.json", grid_to_json(rec.grid).dump(2) + "\n");
    write_text(dir / "hypotheses.json", hypotheses_to_json(rec.set).dump(2) + "\n");
    emit_plots(plot_data(rec), dir / "plots");
}

void write_aggregate(const AggregateReport& rep, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
    for (std::size_t r = 0; r < rep.runs.size(); ++r) {
        char name[32];
        std::snprintf(name, sizeof name, "replicate_%02zu", r);
        write_run(rep.runs[r], dir / name);
    }
    write_text(dir / "config.json", serialize_config(rep.config).dump(2) + "\n");
    write_text(dir / "aggregate.json", aggregate_json(rep).dump(2) + "\n");

    std::vector<std::string> header{"t", "regret_mean", "regret_sd"};
    if (rep.variance_probe) header.insert(header.end(), {"td_variance", "variance_partial_sum"});
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < rep.regret_mean.size(); ++i) {
        std::vector<std::string> row{std::to_string(i + 1), format_number(rep.regret_mean[i]), format_number(rep.regret_sd[i])};
        if (rep.variance_probe) {
            row.push_back(format_number(rep.variance_probe->variance[i]));
            row.push_back(format_number(rep.variance_probe->partial_sums[i]));
        }
        rows.push_back(std::move(row));
    }
    write_csv(dir / "aggregate.csv", header, rows);

    if (!rep.regret_mean.empty()) {
        std::vector<double> t, lo, hi;
        for (std::size_t i = 0; i < rep.regret_mean.size(); ++i) {
            t.push_back(static_cast<double>(i + 1));
            lo.push_back(rep.regret_mean[i] - rep.regret_sd[i]);
            hi.push_back(rep.regret_mean[i] + rep.regret_sd[i]);
        }
        ChartSpec regret{"Regret across replicates", "t", "regret", false,
                         {{"mean", t, rep.regret_mean},
                          {"mean - sd", t, lo, "#7f7f7f", true},
                          {"mean + sd", t, hi, "#7f7f7f", true}}};
        write_text(dir / "plots" / "regret_mean.svg", render_svg(regret));
    }
    ChartSpec mass{"Posterior mass outside the neighborhood", "t", "P(outside)", true, {}};
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    for (std::size_t r = 0; r < rep.runs.size(); ++r) {
        const auto& run = rep.runs[r];
        if (!run.diagnostics) continue;
        Series s{"replicate " + std::to_string(r), {}, {}, palette[r % 10]};
        const bool hellinger = run.config.metric.metric == "hellinger";
        for (const auto& d : run.diagnostics->rows) {
            s.x.push_back(static_cast<double>(d.t));
            s.y.push_back(hellinger ? d.mass_outside_h : d.mass_outside_kl);
        }
        mass.series.push_back(std::move(s));
    }
    if (!mass.series.empty()) write_text(dir / "plots" / "mass_outside_replicates.svg", render_svg(mass));
}

}  // namespace tsalc
