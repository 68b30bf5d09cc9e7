#pragma once

// Density distances, posterior convergence diagnostics and regret accounting.

#include <string>
#include <vector>

#include "tsalc/posterior.hpp"

namespace tsalc {

enum class Metric { hellinger, kl };

std::string to_string(Metric m);
Metric metric_from_string(const std::string& s);

struct MetricConfig {
    Metric metric = Metric::hellinger;
    double delta = 0.05;  // neighborhood radius in the units of distance()
};

/// (1/sqrt 2) * sqrt(sum (sqrt p - sqrt q)^2).
double hellinger(const Vector& p, const Vector& q);

/// sum p log(p/q), 0 log 0 = 0, +inf when p > 0 where q = 0.
double kl(const Vector& p, const Vector& q);

/// Neighborhood functional: 0.5 * hellinger^2 or KL(p || center).
double distance(const Vector& p, const Vector& center, Metric metric);

/// Flags hypotheses whose distance to `center` is >= delta (the complement of the ball).
std::vector<bool> outside_ball(const HypothesisSet& set, const Vector& center, const MetricConfig& cfg);

/// Posterior mass outside the ball around `center`.
double neighborhood_mass(const PosteriorState& posterior, const HypothesisSet& set, const Vector& center,
                         const MetricConfig& cfg);

/// log x (KL) or sqrt(x) - 1 (Hellinger).
double t_d(double x, Metric metric);

struct DecayFit {
    bool valid = false;
    std::size_t points = 0;
    double rate = 0.0;           // eps_L: log y ~ intercept - rate * t
    double log_intercept = 0.0;
    double r_squared = 0.0;

    double prefactor() const { return std::exp(log_intercept); }
    double slope() const { return -rate; }
};

/// Least-squares line through (t, log_y); non-finite log values are skipped.
/// Needs at least two usable points.
DecayFit fit_log_linear(const std::vector<double>& t, const std::vector<double>& log_y);

struct MartingaleSeries {
    std::vector<double> t_d;  // T_d^t for t = 1..T
    std::vector<double> m;    // running M_t
    DecayFit fit;             // log L_t against t over t = 1..T
};

/// `log_l` holds log L_t(Omega) for t = 0..T, `dist` holds d(J^t, J*) for t = 1..T.
MartingaleSeries martingale_series(const std::vector<double>& log_l, const std::vector<double>& dist, Metric metric);

/// |p*(g*) - sum_h F^t(h) p_h(g_t)|.
double regret_estimate(const PosteriorState& posterior, const HypothesisSet& set, std::size_t g_t,
                       const Vector& true_density, std::size_t g_star);

struct RegretBoundInputs {
    double density_hi = 0.0;   // upper density bound over the set
    double ball_measure = 0.0; // counting measure of the ball around the truth
    double set_measure = 0.0;  // counting measure of the whole set
    double p0 = 0.0;
    double eps_l = 0.0;
    double t = 0.0;
    double eps_j = 0.0;
    double lipschitz = 0.0;    // L_J; zero drops the parameterization term
    int m = 1;
    double m_g = 0.0;
    std::vector<double> channel_norms;
    double j_min = 0.0;        // J_m
    int n = 1;
};

struct RegretBound {
    double neighborhood = 0.0;      // J_b * v(B)
    double parameterization = 0.0;  // eps_J L_J sqrt(m M_g^2 - sum |g*_i|^2) / (sqrt(2^n) J_m^2)
    double transient = 0.0;         // (2 M - J_b v(B)) P0 exp(-t eps_L)
    double total = 0.0;
};

RegretBound regret_bound(const RegretBoundInputs& in);

/// (1/T) |sum_t R_e(g_t)|.
double average_regret(const std::vector<double>& series);

struct VarianceProbe {
    std::vector<double> variance;      // per-t sample variance across replicates
    std::vector<double> partial_sums;  // sum_{s<=t} s^-2 V(T_d^s)
    double total = 0.0;
    double tail_ratio = 0.0;           // last-quarter increment / total
    bool plateau = false;
};

/// rows = replicates, columns = t = 1..T. Needs at least 5 replicates.
VarianceProbe variance_summability_probe(const std::vector<std::vector<double>>& replicate_td);

}  // namespace tsalc
