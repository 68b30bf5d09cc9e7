#include "tsalc/metrics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace tsalc {

std::string to_string(Metric m) { return m == Metric::hellinger ? "hellinger" : "kl"; }

Metric metric_from_string(const std::string& s) {
    if (s == "hellinger") return Metric::hellinger;
    if (s == "kl") return Metric::kl;
    throw InvalidInput("unknown metric: " + s);
}

namespace {

void check_mass(const Vector& p, const Vector& q) {
    require(p.size() == q.size() && p.size() >= 1, "distance: mass vectors must be nonempty and of equal length");
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        require(std::isfinite(p(i)) && std::isfinite(q(i)), "distance: non-finite mass");
        require(p(i) >= 0.0 && q(i) >= 0.0, "distance: negative mass");
    }
    require(std::abs(p.sum() - 1.0) <= 1e-9 && std::abs(q.sum() - 1.0) <= 1e-9, "distance: masses must sum to 1");
}

}  // namespace

double hellinger(const Vector& p, const Vector& q) {
    check_mass(p, q);
    const double s = (p.cwiseSqrt() - q.cwiseSqrt()).squaredNorm();
    return std::min(1.0, std::sqrt(s) / std::numbers::sqrt2);
}

double kl(const Vector& p, const Vector& q) {
    check_mass(p, q);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p(i) == 0.0) continue;
        if (q(i) == 0.0) return std::numeric_limits<double>::infinity();
        acc += p(i) * std::log(p(i) / q(i));
    }
    return std::max(0.0, acc);
}

double distance(const Vector& p, const Vector& center, Metric metric) {
    if (metric == Metric::kl) return kl(p, center);
    const double h = hellinger(p, center);
    return 0.5 * h * h;
}

std::vector<bool> outside_ball(const HypothesisSet& set, const Vector& center, const MetricConfig& cfg) {
    require(cfg.delta > 0.0, "outside_ball: delta must be positive");
    std::vector<bool> out(set.size());
    for (std::size_t h = 0; h < set.size(); ++h) out[h] = distance(set[h].density, center, cfg.metric) >= cfg.delta;
    return out;
}

double neighborhood_mass(const PosteriorState& posterior, const HypothesisSet& set, const Vector& center,
                         const MetricConfig& cfg) {
    return prob_in_set(posterior, outside_ball(set, center, cfg));
}

double t_d(double x, Metric metric) {
    require(std::isfinite(x) && x > 0.0, "t_d: argument must be positive");
    return metric == Metric::kl ? std::log(x) : std::sqrt(x) - 1.0;
}

DecayFit fit_log_linear(const std::vector<double>& t, const std::vector<double>& log_y) {
    require(t.size() == log_y.size(), "fit_log_linear: length mismatch");
    DecayFit fit;
    double st = 0.0, sy = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(log_y[i])) continue;
        st += t[i];
        sy += log_y[i];
        ++k;
    }
    fit.points = k;
    if (k < 2) return fit;
    const double mt = st / static_cast<double>(k);
    const double my = sy / static_cast<double>(k);
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(log_y[i])) continue;
        stt += (t[i] - mt) * (t[i] - mt);
        sty += (t[i] - mt) * (log_y[i] - my);
        syy += (log_y[i] - my) * (log_y[i] - my);
    }
    if (stt <= 0.0) return fit;
    const double slope = sty / stt;
    fit.valid = true;
    fit.rate = -slope;
    fit.log_intercept = my - slope * mt;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(log_y[i])) continue;
        const double r = log_y[i] - (fit.log_intercept + slope * t[i]);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

MartingaleSeries martingale_series(const std::vector<double>& log_l, const std::vector<double>& dist, Metric metric) {
    require(!log_l.empty(), "martingale_series: need L_0");
    require(dist.size() + 1 == log_l.size(), "martingale_series: need one distance per segment");
    for (double v : log_l) require(std::isfinite(v), "martingale_series: L_t must be positive");
    MartingaleSeries out;
    double m = 0.0;
    std::vector<double> ts;
    std::vector<double> ys;
    for (std::size_t t = 1; t < log_l.size(); ++t) {
        const double td = t_d(std::exp(log_l[t] - log_l[t - 1]), metric);
        m += td + dist[t - 1];
        out.t_d.push_back(td);
        out.m.push_back(m);
        ts.push_back(static_cast<double>(t));
        ys.push_back(log_l[t]);
    }
    out.fit = fit_log_linear(ts, ys);
    return out;
}

double regret_estimate(const PosteriorState& posterior, const HypothesisSet& set, std::size_t g_t,
                       const Vector& true_density, std::size_t g_star) {
    require(g_t < set.grid_size() && g_star < set.grid_size(), "regret_estimate: grid index out of range");
    require(true_density.size() == static_cast<Eigen::Index>(set.grid_size()), "regret_estimate: density size mismatch");
    require(std::abs(true_density.sum() - 1.0) <= 1e-9, "regret_estimate: true density must be normalized");
    const double chosen = posterior.weights().dot(set.densities().col(static_cast<Eigen::Index>(g_t)));
    return std::abs(true_density(static_cast<Eigen::Index>(g_star)) - chosen);
}

RegretBound regret_bound(const RegretBoundInputs& in) {
    require(in.density_hi > 0.0 && in.ball_measure >= 0.0 && in.set_measure > 0.0, "regret_bound: invalid measures");
    require(in.p0 >= 0.0 && in.t >= 0.0, "regret_bound: invalid decay inputs");
    require(in.m >= 1 && in.n >= 0 && in.n <= kMaxStateDim, "regret_bound: invalid dimensions");
    RegretBound b;
    b.neighborhood = in.density_hi * in.ball_measure;
    if (in.lipschitz > 0.0) {
        require(in.j_min > 0.0 && in.eps_j > 0.0, "regret_bound: J_m and eps_J must be positive");
        require(static_cast<int>(in.channel_norms.size()) == in.m, "regret_bound: need one norm per channel");
        double sum_sq = 0.0;
        for (double v : in.channel_norms) sum_sq += v * v;
        const double radicand = in.m * in.m_g * in.m_g - sum_sq;
        if (radicand < -1e-12 * std::max(1.0, in.m * in.m_g * in.m_g)) throw InvalidInput("regret_bound: negative radicand");
        b.parameterization = in.eps_j * in.lipschitz * std::sqrt(std::max(0.0, radicand)) /
                             (std::sqrt(static_cast<double>(subset_count(in.n))) * in.j_min * in.j_min);
    }
    b.transient = std::max(0.0, 2.0 * in.set_measure - b.neighborhood) * in.p0 * std::exp(-in.t * in.eps_l);
    b.total = b.neighborhood + b.parameterization + b.transient;
    return b;
}

double average_regret(const std::vector<double>& series) {
    require(!series.empty(), "average_regret: empty series");
    double s = 0.0;
    for (double v : series) s += v;
    return std::abs(s) / static_cast<double>(series.size());
}

VarianceProbe variance_summability_probe(const std::vector<std::vector<double>>& replicate_td) {
    require(replicate_td.size() >= 5, "variance_summability_probe: need at least 5 replicates");
    const std::size_t horizon = replicate_td.front().size();
    for (const auto& r : replicate_td) require(r.size() == horizon, "variance_summability_probe: ragged replicates");
    const double reps = static_cast<double>(replicate_td.size());
    VarianceProbe probe;
    double acc = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
        double mean = 0.0;
        for (const auto& r : replicate_td) mean += r[t];
        mean /= reps;
        double var = 0.0;
        for (const auto& r : replicate_td) var += (r[t] - mean) * (r[t] - mean);
        var /= reps - 1.0;
        const double tt = static_cast<double>(t + 1);
        acc += var / (tt * tt);
        probe.variance.push_back(var);
        probe.partial_sums.push_back(acc);
    }
    probe.total = acc;
    if (horizon == 0 || acc <= 0.0) {
        probe.tail_ratio = 0.0;
        probe.plateau = true;
        return probe;
    }
    const std::size_t quarter = (3 * horizon) / 4;
    const double before = quarter == 0 ? 0.0 : probe.partial_sums[quarter - 1];
    probe.tail_ratio = (acc - before) / acc;
    probe.plateau = probe.tail_ratio < 0.05;
    return probe;
}

}  // namespace tsalc
