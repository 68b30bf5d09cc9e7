// One PASS/FAIL line per acceptance criterion. Tolerances are fixed here.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "support.hpp"
#include "tsalc/approximation.hpp"
#include "tsalc/experiment.hpp"

using namespace tsalc;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

constexpr double kBasisRelTol = 1e-9;
constexpr double kAnchorTol = 1e-12;
constexpr double kReconTol = 1e-9;
constexpr double kUniformTol = 1e-9;
constexpr double kBasisSeconds = 10.0;

constexpr double kBoundSlack = 1e-6;
constexpr double kResidualTol = 1e-4;
constexpr double kProjectionSeconds = 30.0;

constexpr double kNormTol = 1e-12;
constexpr double kBayesTol = 1e-12;

constexpr double kMassOutsideMax = 0.05;
constexpr double kMinRSquared = 0.7;
constexpr std::size_t kMinConverged = 9;
constexpr double kReplicateSeconds = 60.0;

constexpr double kRegretSlackFactor = 1.0;
constexpr double kTerm3Max = 0.01;

constexpr double kDensityTol = 1e-12;
constexpr double kMetricTol = 1e-12;

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

StateBox cube(int n, double lo, double hi) { return StateBox(Vector::Constant(n, lo), Vector::Constant(n, hi)); }

ExperimentConfig realizable_config() {
    return load_config((fs::path(TSALC_SOURCE_DIR) / "configs" / "logistic_realizable.json").string());
}

Outcome basis_correctness() {
    const auto start = Clock::now();
    Rng rng = make_rng(101);
    double closed = 0.0, anchor = 0.0, recon = 0.0, uniform = 0.0;
    for (int kind = 0; kind < 2; ++kind) {
        for (int n = 1; n <= 4; ++n) {
            for (int m = 1; m <= 2; ++m) {
                const StateBox box = cube(n, -1.5, 1.5);
                const Vector a = random_point(rng, box);
                const InitialLaw law = kind == 0 ? random_cubic_law(rng, n, m) : random_trig_law(rng, n, m);
                const BasisSet basis(law, a, BasisSet::default_gamma(n), box);
                const ControllerWeights w = ControllerWeights::uniform(m, n);
                for (SubsetMask s = 1; s < basis.basis_count(); ++s)
                    for (int i = 0; i < m; ++i) {
                        anchor = std::max(anchor, std::abs(basis.eval_recursive(i, s, a)));
                        anchor = std::max(anchor, std::abs(basis.eval_closed(i, s, a)));
                    }
                for (int k = 0; k < 100; ++k) {
                    const Vector x = random_point(rng, box);
                    const Vector u0 = law(x);
                    for (int i = 0; i < m; ++i) {
                        double sum = 0.0;
                        for (SubsetMask s = 0; s < basis.basis_count(); ++s) {
                            const double r = basis.eval_recursive(i, s, x);
                            const double c = basis.eval_closed(i, s, x);
                            closed = std::max(closed, std::abs(r - c) / std::max(1.0, std::abs(c)));
                            sum += r;
                        }
                        recon = std::max(recon, std::abs(sum - u0(i)) / std::max(1.0, std::abs(u0(i))));
                    }
                    const Vector u = controller_eval(basis, w, x);
                    uniform = std::max(uniform, ((u - u0).cwiseAbs().array() / u0.cwiseAbs().array().max(1.0)).maxCoeff());
                }
            }
        }
    }
    const double secs = seconds_since(start);
    const bool ok = closed <= kBasisRelTol && anchor <= kAnchorTol && recon <= kReconTol && uniform <= kUniformTol &&
                    secs < kBasisSeconds;
    return {ok, fmt("recursive_vs_closed=%.2e anchor=%.2e reconstruction=%.2e uniform=%.2e time=%.2fs", closed, anchor,
                    recon, uniform, secs)};
}

Outcome approximation_bound() {
    const auto start = Clock::now();
    Rng rng = make_rng(202);
    double worst_residual = 0.0, worst_margin = -std::numeric_limits<double>::infinity();
    bool ok = true;
    for (int n = 1; n <= 3; ++n) {
        const StateBox box = cube(n, -1, 1);
        const BasisSet basis(random_trig_law(rng, n, 1), random_point(rng, box), BasisSet::default_gamma(n), box);
        const HullProjector proj(basis, 0);
        const double mg = compute_M_g(basis);
        for (int k = 0; k < 20; ++k) {
            const Vector alpha = sample_uniform_simplex(static_cast<Eigen::Index>(basis.basis_count()), rng);
            const ProjectionResult r = proj.project_samples(proj.samples() * alpha);
            const double bound = theorem1_bound(mg, proj.norm_of(alpha), n);
            worst_residual = std::max(worst_residual, r.residual);
            worst_margin = std::max(worst_margin, r.residual - bound);
            ok = ok && r.residual <= bound + kBoundSlack && r.residual <= kResidualTol;
        }
    }
    const double secs = seconds_since(start);
    ok = ok && secs < kProjectionSeconds;
    return {ok, fmt("max_residual=%.2e max(residual-bound)=%.2e time=%.2fs", worst_residual, worst_margin, secs)};
}

Outcome posterior_laws() {
    Rng rng = make_rng(303);
    const int grid = 9;
    std::vector<Hypothesis> hs;
    for (int h = 0; h < 20; ++h) hs.push_back(Hypothesis::from_costs(uniform_vector(rng, grid, 0.2, 5.0), "synthetic"));
    const HypothesisSet set(std::move(hs));
    PosteriorState pa = uniform_posterior(set.size()), pb = uniform_posterior(set.size());
    double norm_dev = 0.0;
    bool identical = true;
    for (std::size_t t = 0; t < 500; ++t) {
        const std::size_t g = rng() % grid;
        const double j = uniform(rng, 0.2, 5.0);
        pa = observe_and_update(std::move(pa), set, g, j);
        pb = observe_and_update(std::move(pb), set, g, 3.0 * j);
        const Vector wa = pa.weights();
        norm_dev = std::max(norm_dev, std::abs(wa.sum() - 1.0));
        identical = identical && wa == pb.weights();
    }
    Vector p0(2), p1(2);
    p0 << 0.75, 0.25;
    p1 << 0.25, 0.75;
    const HypothesisSet two({Hypothesis::from_costs(p0.cwiseInverse(), "h0"), Hypothesis::from_costs(p1.cwiseInverse(), "h1")});
    const Vector w = observe_and_update(uniform_posterior(2), two, 0, 1.0).weights();
    const double bayes = std::max(std::abs(w(0) - 0.75), std::abs(w(1) - 0.25));
    const bool ok = norm_dev <= kNormTol && identical && bayes <= kBayesTol;
    return {ok, fmt("normalization=%.2e scale_invariant=%s bayes_err=%.2e", norm_dev, identical ? "bit-identical" : "no",
                    bayes)};
}

struct ReplicateRun {
    AggregateReport report;
    double seconds = 0.0;
};

Outcome posterior_concentration(const ReplicateRun& run) {
    const AggregateReport& rep = run.report;
    const auto& c = rep.config;
    const bool setup_ok = c.plant.kind == "logistic" && c.plant.noise.family == "none" && c.hypotheses.count == 20 &&
                          c.hypotheses.realizable && c.metric.metric == "hellinger" && c.metric.delta == 0.05 &&
                          c.segments == 200 && rep.runs.size() == 10 && !rep.runs.empty() &&
                          rep.runs.front().grid.size() == 9;
    std::size_t ok_count = 0;
    for (const auto& s : rep.replicates)
        if (s.final_mass_outside < kMassOutsideMax && s.slope < 0.0 && s.r_squared >= kMinRSquared) ++ok_count;
    const bool ok = setup_ok && ok_count >= kMinConverged && run.seconds < kReplicateSeconds;
    return {ok, fmt("converged=%zu/%zu (mass<%.2f, slope<0, R2>=%.1f) setup=%s time=%.2fs", ok_count, rep.replicates.size(),
                    kMassOutsideMax, kMinRSquared, setup_ok ? "ok" : "mismatch", run.seconds)};
}

Outcome regret_accounting(const ReplicateRun& run) {
    std::size_t holds = 0, decreasing = 0, small = 0, total = 0;
    double worst_ratio = 0.0, worst_term3 = 0.0;
    for (const auto& rec : run.report.runs) {
        if (!rec.diagnostics) continue;
        ++total;
        const RunDiagnostics& d = *rec.diagnostics;
        bool h = true;
        for (const auto& row : d.rows) {
            h = h && row.regret <= kRegretSlackFactor * row.bound_total;
            worst_ratio = std::max(worst_ratio, row.regret / row.bound_total);
        }
        holds += h ? 1 : 0;
        decreasing += d.term3_decreasing ? 1 : 0;
        const double term3 = d.rows.back().bound_term3;
        worst_term3 = std::max(worst_term3, term3);
        small += term3 < kTerm3Max ? 1 : 0;
    }
    const bool ok = total == run.report.runs.size() && total > 0 && holds == total && decreasing == total && small == total;
    return {ok, fmt("bound_holds=%zu/%zu max(R_e/bound)=%.3f term3_decreasing=%zu/%zu max_term3(T)=%.2e", holds, total,
                    worst_ratio, decreasing, total, worst_term3)};
}

Outcome oracle_equivalence() {
    Rng rng = make_rng(606);
    std::size_t select_mismatch = 0;
    double density_err = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const int grid = 2 + static_cast<int>(rng() % 40);
        Vector c = uniform_vector(rng, grid, 0.01, 100.0);
        if (k % 7 == 0) c(static_cast<Eigen::Index>(rng() % grid)) = c.minCoeff();
        std::size_t best = 0;
        for (int i = 1; i < grid; ++i)
            if (c(i) < c(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(i);
        if (select_controller(Hypothesis::from_costs(c, "oracle")) != best) ++select_mismatch;
        double z = 0.0;
        for (int i = 0; i < grid; ++i) z += 1.0 / c(i);
        const Vector p = density_from_costs(c);
        for (int i = 0; i < grid; ++i) density_err = std::max(density_err, std::abs(p(i) - 1.0 / c(i) / z));
    }
    const bool ok = select_mismatch == 0 && density_err <= kDensityTol;
    return {ok, fmt("select_mismatches=%zu/1000 density_err=%.2e", select_mismatch, density_err)};
}

Outcome metric_cases() {
    auto v2 = [](double a, double b) {
        Vector v(2);
        v << a, b;
        return v;
    };
    double err = 0.0;
    const Vector half = v2(0.5, 0.5);
    err = std::max(err, hellinger(half, half));
    err = std::max(err, std::abs(hellinger(v2(1, 0), v2(0, 1)) - 1.0));
    const double direct =
        std::sqrt(std::pow(std::sqrt(0.5) - 0.5, 2) + std::pow(std::sqrt(0.5) - std::sqrt(0.75), 2)) / std::sqrt(2.0);
    err = std::max(err, std::abs(hellinger(half, v2(0.25, 0.75)) - direct));
    err = std::max(err, kl(half, half));
    err = std::max(err, std::abs(kl(v2(1, 0), half) - std::log(2.0)));
    const bool inf_ok = std::isinf(kl(half, v2(1, 0)));
    err = std::max(err, std::abs(t_d(1.0, Metric::kl)) + std::abs(t_d(1.0, Metric::hellinger)));
    err = std::max(err, std::abs(t_d(std::exp(1.0), Metric::kl) - 1.0));
    err = std::max(err, std::abs(t_d(4.0, Metric::hellinger) - 1.0));

    Rng rng = make_rng(707);
    std::size_t violations = 0;
    for (int k = 0; k < 1000; ++k) {
        const int n = 2 + k % 20;
        const Vector p = random_mass(rng, n), q = random_mass(rng, n);
        const double h = hellinger(p, q);
        if (0.5 * h * h > kl(p, q)) ++violations;
    }
    const bool ok = err <= kMetricTol && inf_ok && violations == 0;
    return {ok, fmt("max_case_err=%.2e kl_inf=%s pinsker_violations=%zu/1000", err, inf_ok ? "yes" : "no", violations)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism(const ExperimentConfig& config) {
    const fs::path root = fs::temp_directory_path() / "tsalc_acceptance_determinism";
    fs::remove_all(root);
    write_aggregate(run_replicates(config), root / "a");
    write_aggregate(run_replicates(config), root / "b");
    std::size_t compared = 0, differing = 0;
    for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
        if (!entry.is_regular_file()) continue;
        const auto ext = entry.path().extension();
        if (ext != ".csv" && ext != ".json") continue;
        const fs::path other = root / "b" / fs::relative(entry.path(), root / "a");
        ++compared;
        if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) ++differing;
    }
    fs::remove_all(root);
    return {compared > 0 && differing == 0, fmt("files_compared=%zu differing=%zu", compared, differing)};
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
        std::fflush(stdout);
    };

    report(1, "basis correctness", basis_correctness);
    report(2, "approximation bound", approximation_bound);
    report(3, "posterior laws", posterior_laws);

    std::optional<ReplicateRun> density_run;
    std::optional<ExperimentConfig> config;
    try {
        config = realizable_config();
        const auto start = Clock::now();
        density_run = ReplicateRun{run_replicates(*config), 0.0};
        density_run->seconds = seconds_since(start);
    } catch (const std::exception& e) {
        std::printf("note: realizable replicate run failed: %s\n", e.what());
    }
    auto need_run = [&](auto fn) {
        return [&, fn]() -> Outcome {
            if (!density_run) return {false, "replicate run unavailable"};
            return fn(*density_run);
        };
    };
    report(4, "posterior concentration", need_run(posterior_concentration));
    report(5, "regret accounting", need_run(regret_accounting));
    report(6, "oracle equivalence", oracle_equivalence);
    report(7, "metrics", metric_cases);
    report(8, "determinism", [&]() -> Outcome {
        if (!config) return {false, "config unavailable"};
        return determinism(*config);
    });

    if (config) {
        ExperimentConfig argmax = *config;
        argmax.selection = "argmax";
        try {
            const AggregateReport rep = run_replicates(argmax);
            std::printf("INFO argmax selection (not gating): converged=%zu/%zu negative_slope=%zu/%zu\n", rep.converged,
                        rep.replicates.size(), rep.negative_slope, rep.replicates.size());
        } catch (const std::exception& e) {
            std::printf("INFO argmax selection (not gating): exception: %s\n", e.what());
        }
    }
    std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
    return failures == 0 ? 0 : 1;
}
