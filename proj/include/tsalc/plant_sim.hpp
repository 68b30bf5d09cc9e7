#pragma once

// Discrete-time plants x' = f(x, u, v) simulated in closed loop with a
// controller from the convex-hull space, one fixed-length segment at a time.
// Only the simulator sees the noise model; the learner sees states and costs.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tsalc/function_space.hpp"

namespace tsalc {

struct NoiseSpec {
    std::string family = "truncated_gaussian";  // or "none"
    double scale = 0.0;                         // standard deviation per state coordinate
    double truncation = 3.0;                    // in units of scale

    double bound() const { return family == "none" ? 0.0 : scale * truncation; }
};

class PlantModel {
public:
    using Dynamics = std::function<Vector(const Vector& x, const Vector& u, const Vector& v)>;

    PlantModel(std::string name, int n, int m, Dynamics f, NoiseSpec noise, StateBox box, Vector x0);

    const std::string& name() const { return name_; }
    int state_dim() const { return n_; }
    int input_dim() const { return m_; }
    const NoiseSpec& noise() const { return noise_; }
    const StateBox& box() const { return box_; }
    const Vector& initial_state() const { return x0_; }

    Vector dynamics(const Vector& x, const Vector& u, const Vector& v) const { return f_(x, u, v); }

    /// One noise vector, each coordinate a Gaussian truncated at +-truncation*scale.
    Vector draw_noise(Rng& rng) const;

    /// Half-width of the divergence guard around the box center.
    double guard_radius() const;

    /// x' = a x (1 - x) + u + v.
    static PlantModel logistic(double a, NoiseSpec noise, StateBox box, Vector x0);
    /// Euler-discretized damped pendulum, state (angle, rate), torque input.
    static PlantModel pendulum(double g_over_l, double damping, double dt, NoiseSpec noise, StateBox box, Vector x0);
    /// Euler-discretized forced Van der Pol oscillator.
    static PlantModel vanderpol(double mu, double dt, NoiseSpec noise, StateBox box, Vector x0);

    struct Term {
        double coef = 0.0;
        std::vector<int> powers;  // over the concatenation (x, u), length n + m
    };
    /// x'_j = sum of monomials in (x, u) + v_j.
    static PlantModel polynomial(int n, int m, std::vector<std::vector<Term>> rows, NoiseSpec noise, StateBox box,
                                 Vector x0);

private:
    std::string name_;
    int n_;
    int m_;
    Dynamics f_;
    NoiseSpec noise_;
    StateBox box_;
    Vector x0_;
};

struct StepOutcome {
    Vector state;
    Vector noise;
    bool saturated = false;
};

/// Advance one step with a fresh noise draw. States leaving the divergence
/// guard are clipped and flagged; a non-finite f output throws PlantBlowup.
StepOutcome step(const PlantModel& plant, const Vector& x, const Vector& u, Rng& rng, std::size_t segment = 0);

struct Segment {
    std::size_t index = 0;
    std::vector<Vector> states;  // x(0..K)
    std::vector<Vector> inputs;  // u(0..K-1)
    std::vector<Vector> noise;   // v(1..K)
    double cost = 0.0;           // filled in by the cost module
    bool saturated = false;

    std::size_t horizon() const { return inputs.size(); }
};

/// Closed-loop rollout of K steps from the plant's initial state. The noise
/// stream is derived from (noise_seed, segment index) only.
Segment rollout_segment(const PlantModel& plant, const BasisSet& basis, const ControllerWeights& weights,
                        std::size_t horizon, std::uint64_t noise_seed, std::size_t segment_index);

}  // namespace tsalc
