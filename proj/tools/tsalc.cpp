// Command-line driver. Exit codes: 0 success, 1 failed check, 2 config error,
// 3 plant blowup, 4 I/O error.

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "tsalc/approximation.hpp"
#include "tsalc/experiment.hpp"

namespace {

using nlohmann::json;
using namespace tsalc;

constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBlowup = 3;
constexpr int kExitIo = 4;

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "experiment config (JSON)")->required();
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--out-dir", o.out_dir, "output directory");
    cmd->add_option("--override", o.overrides, "key=value, dotted keys reach nested sections");
}

ExperimentConfig resolve(const CommonOptions& o) {
    std::ifstream in(o.config_path);
    if (!in) throw IoError("cannot open config " + o.config_path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    for (const auto& ov : o.overrides) apply_override(doc, ov);
    ExperimentConfig c = parse_config(doc);
    if (o.seed) c.seed = *o.seed;
    if (!o.out_dir.empty()) c.output_dir = o.out_dir;
    validate_config(c);
    return c;
}

int cmd_run(const CommonOptions& o) {
    const ExperimentConfig c = resolve(o);
    const RunRecord rec = run_experiment(c);
    write_run(rec, c.output_dir);
    std::printf("status=%s segments=%zu out=%s\n", rec.status.c_str(), rec.rows.size(), c.output_dir.c_str());
    if (rec.diagnostics && !rec.diagnostics->rows.empty()) {
        const auto& d = *rec.diagnostics;
        const auto& last = d.rows.back();
        const double outside = rec.config.metric.metric == "hellinger" ? last.mass_outside_h : last.mass_outside_kl;
        std::printf("final_mass_outside=%.6g eps_L_hat=%.6g r_squared=%.4f average_regret=%.6g bound_holds=%s\n",
                    outside, d.mass_fit.rate, d.mass_fit.r_squared, d.average_regret, d.bound_holds ? "true" : "false");
    }
    if (rec.failed()) {
        std::fprintf(stderr, "%s\n", rec.failure.c_str());
        return kExitBlowup;
    }
    return 0;
}

int cmd_replicates(const CommonOptions& o) {
    const ExperimentConfig c = resolve(o);
    const AggregateReport rep = run_replicates(c);
    write_aggregate(rep, c.output_dir);
    std::printf("replicates=%zu completed=%zu converged=%zu negative_slope=%zu out=%s\n", rep.runs.size(), rep.completed,
                rep.converged, rep.negative_slope, c.output_dir.c_str());
    if (rep.variance_probe)
        std::printf("variance_probe total=%.6g tail_ratio=%.4f plateau=%s\n", rep.variance_probe->total,
                    rep.variance_probe->tail_ratio, rep.variance_probe->plateau ? "true" : "false");
    return rep.completed == 0 ? kExitBlowup : 0;
}

Vector random_state(const StateBox& box, Rng& rng) {
    Vector x(box.dim());
    for (int i = 0; i < box.dim(); ++i) x(i) = box.lower(i) + uniform01(rng) * (box.upper(i) - box.lower(i));
    return x;
}

int cmd_verify_basis(const CommonOptions& o, std::size_t states) {
    const ExperimentConfig c = resolve(o);
    const PlantModel plant = build_plant(c.plant);
    const BasisSet basis = build_basis(c, plant);
    Rng rng = make_rng(stream_seed(c.seed, "verify"));
    const int n = basis.state_dim();
    const int m = basis.input_dim();
    double closed = 0.0, anchor = 0.0, recon = 0.0, uniform = 0.0;
    const ControllerWeights w = ControllerWeights::uniform(m, n);
    const double scale = basis.gamma() / BasisSet::default_gamma(n);
    for (std::size_t k = 0; k < states; ++k) {
        const Vector x = random_state(basis.box(), rng);
        const Vector u0 = basis.law()(x);
        const Matrix all = basis.eval_all(x);
        for (int i = 0; i < m; ++i) {
            for (SubsetMask s = 0; s < basis.basis_count(); ++s) {
                const double r = basis.eval_recursive(i, s, x);
                const double cf = basis.eval_closed(i, s, x);
                closed = std::max(closed, std::abs(r - cf) / std::max(1.0, std::abs(cf)));
                if (s != 0) anchor = std::max(anchor, std::abs(basis.eval_recursive(i, s, basis.anchor())));
            }
            recon = std::max(recon, std::abs(all.row(i).sum() - u0(i)) / std::max(1.0, std::abs(u0(i))));
        }
        const Vector u = controller_eval(basis, w, x);
        uniform = std::max(uniform, ((u - scale * u0).cwiseAbs().array() / u0.cwiseAbs().array().max(1.0)).maxCoeff());
    }
    const bool ok = closed <= 1e-9 && anchor <= 1e-12 && recon <= 1e-9 && uniform <= 1e-9;
    json j = {{"states", states},
              {"recursive_vs_closed", closed},
              {"anchor_annihilation", anchor},
              {"reconstruction", recon},
              {"uniform_reproduction", uniform},
              {"gamma", basis.gamma()},
              {"pass", ok}};
    std::cout << j.dump(2) << "\n";
    return ok ? 0 : kExitCheckFailed;
}

int cmd_approx_bound(const CommonOptions& o, std::size_t targets) {
    const ExperimentConfig c = resolve(o);
    const PlantModel plant = build_plant(c.plant);
    const BasisSet basis = build_basis(c, plant);
    QuadratureSpec quad;
    quad.nodes_per_axis = c.quadrature_nodes;
    const double m_g = compute_M_g(basis, quad);
    Rng rng = make_rng(stream_seed(c.seed, "oracle"));
    json rows = json::array();
    std::vector<std::vector<std::string>> trace;
    bool ok = true;
    for (int ch = 0; ch < basis.input_dim(); ++ch) {
        const HullProjector proj(basis, ch, quad);
        for (std::size_t k = 0; k < targets; ++k) {
            const Vector alpha = sample_uniform_simplex(static_cast<Eigen::Index>(basis.basis_count()), rng);
            const Vector target = proj.samples() * alpha;
            const double norm = proj.norm_of(alpha);
            const ProjectionResult res = proj.project_samples(target);
            const double thm1 = theorem1_bound(m_g, norm, basis.state_dim());
            const BoundReport rep = make_bound_report(res.residual, thm1, thm1);
            ok = ok && rep.satisfied;
            for (std::size_t i = 0; i < res.objective_trace.size(); ++i)
                trace.push_back({std::to_string(ch), std::to_string(k), std::to_string(i),
                                 format_number(res.objective_trace[i])});
            rows.push_back({{"channel", ch},
                            {"target_norm", norm},
                            {"residual", res.residual},
                            {"bound", thm1},
                            {"iterations", res.iterations},
                            {"satisfied", rep.satisfied}});
        }
    }
    const json out{{"M_g", m_g}, {"targets", rows}, {"pass", ok}};
    if (!o.out_dir.empty()) {
        const std::filesystem::path dir(o.out_dir);
        write_csv(dir / "objective_trace.csv", {"channel", "target", "iteration", "objective"}, trace);
        write_text(dir / "approx_bound.json", out.dump(2) + "\n");
    }
    std::cout << out.dump(2) << "\n";
    return ok ? 0 : kExitCheckFailed;
}

int cmd_report(const std::string& run_dir, const std::string& out_dir) {
    namespace fs = std::filesystem;
    const fs::path dir(run_dir);
    const PlotData data = load_plot_data(dir);
    const fs::path target = out_dir.empty() ? dir / "plots" : fs::path(out_dir);
    const auto files = emit_plots(data, target);
    std::ifstream in(dir / "summary.json");
    if (!in) throw IoError("cannot open " + (dir / "summary.json").string());
    json summary;
    try {
        in >> summary;
    } catch (const json::exception& e) {
        throw IoError(std::string("summary.json is not valid JSON: ") + e.what());
    }
    std::printf("status=%s segments=%zu\n", summary.value("status", std::string("?")).c_str(), data.t.size());
    if (summary.contains("diagnostics") && summary["diagnostics"].is_object()) {
        const json& d = summary["diagnostics"];
        const json& fit = d["mass_fit"];
        std::printf("eps_L_hat=%s P0_hat=%s r_squared=%s average_regret=%s\n", fit["eps_L_hat"].dump().c_str(),
                    fit["P0_hat"].dump().c_str(), fit["r_squared"].dump().c_str(), d["average_regret"].dump().c_str());
    }
    for (const auto& f : files) std::printf("wrote %s\n", (target / f).string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Thompson-sampling adaptive learning control experiments"};
    app.require_subcommand(1);

    CommonOptions run_opts, rep_opts, basis_opts, bound_opts;
    auto* run = app.add_subcommand("run", "single experiment");
    add_common(run, run_opts);
    auto* reps = app.add_subcommand("replicates", "independent replicates with aggregate report");
    add_common(reps, rep_opts);
    auto* vb = app.add_subcommand("verify-basis", "check the basis identities on random states");
    add_common(vb, basis_opts);
    std::size_t states = 100;
    vb->add_option("--states", states, "random states");
    auto* ab = app.add_subcommand("approx-bound", "project random hull targets and compare with the error bound");
    add_common(ab, bound_opts);
    std::size_t targets = 20;
    ab->add_option("--targets", targets, "targets per channel");
    auto* report = app.add_subcommand("report", "regenerate plots and a summary from a run directory");
    std::string run_dir, report_out;
    report->add_option("run_dir", run_dir, "directory written by `run`")->required();
    report->add_option("--out-dir", report_out, "plot directory (default RUN_DIR/plots)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) return cmd_run(run_opts);
        if (*reps) return cmd_replicates(rep_opts);
        if (*vb) return cmd_verify_basis(basis_opts, states);
        if (*ab) return cmd_approx_bound(bound_opts, targets);
        if (*report) return cmd_report(run_dir, report_out);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const InvalidInput& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return kExitConfig;
    } catch (const PlantBlowup& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitBlowup;
    } catch (const IoError& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitCheckFailed;
    }
    return 0;
}
