#include "tsalc/plant_sim.hpp"

#include <cmath>

namespace tsalc {

PlantModel::PlantModel(std::string name, int n, int m, Dynamics f, NoiseSpec noise, StateBox box, Vector x0)
    : name_(std::move(name)), n_(n), m_(m), f_(std::move(f)), noise_(std::move(noise)), box_(std::move(box)),
      x0_(std::move(x0)) {
    require(n_ >= 1 && m_ >= 1, "PlantModel: dimensions must be positive");
    require(static_cast<bool>(f_), "PlantModel: missing dynamics");
    require(box_.dim() == n_, "PlantModel: box dimension must equal n");
    require(x0_.size() == n_, "PlantModel: initial state must have length n");
    require(x0_.allFinite(), "PlantModel: initial state must be finite");
    require(noise_.family == "truncated_gaussian" || noise_.family == "none", "PlantModel: unknown noise family");
    require(noise_.scale >= 0.0 && std::isfinite(noise_.scale), "PlantModel: noise scale must be >= 0");
    require(noise_.truncation > 0.0, "PlantModel: truncation must be positive");
}

Vector PlantModel::draw_noise(Rng& rng) const {
    Vector v = Vector::Zero(n_);
    if (noise_.family == "none" || noise_.scale == 0.0) return v;
    for (int i = 0; i < n_; ++i) {
        double z = standard_normal(rng);
        while (std::abs(z) > noise_.truncation) z = standard_normal(rng);
        v(i) = noise_.scale * z;
    }
    return v;
}

double PlantModel::guard_radius() const {
    const double diag = (box_.upper - box_.lower).norm();
    return 10.0 * std::max(diag, 1e-12);
}

PlantModel PlantModel::logistic(double a, NoiseSpec noise, StateBox box, Vector x0) {
    return PlantModel(
        "logistic", 1, 1,
        [a](const Vector& x, const Vector& u, const Vector& v) -> Vector {
            Vector out(1);
            out(0) = a * x(0) * (1.0 - x(0)) + u(0) + v(0);
            return out;
        },
        std::move(noise), std::move(box), std::move(x0));
}

PlantModel PlantModel::pendulum(double g_over_l, double damping, double dt, NoiseSpec noise, StateBox box, Vector x0) {
    require(dt > 0.0, "pendulum: dt must be positive");
    return PlantModel(
        "pendulum", 2, 1,
        [=](const Vector& x, const Vector& u, const Vector& v) -> Vector {
            Vector out(2);
            out(0) = x(0) + dt * x(1) + v(0);
            out(1) = x(1) + dt * (-g_over_l * std::sin(x(0)) - damping * x(1) + u(0)) + v(1);
            return out;
        },
        std::move(noise), std::move(box), std::move(x0));
}

PlantModel PlantModel::vanderpol(double mu, double dt, NoiseSpec noise, StateBox box, Vector x0) {
    require(dt > 0.0, "vanderpol: dt must be positive");
    return PlantModel(
        "vanderpol", 2, 1,
        [=](const Vector& x, const Vector& u, const Vector& v) -> Vector {
            Vector out(2);
            out(0) = x(0) + dt * x(1) + v(0);
            out(1) = x(1) + dt * (mu * (1.0 - x(0) * x(0)) * x(1) - x(0) + u(0)) + v(1);
            return out;
        },
        std::move(noise), std::move(box), std::move(x0));
}

PlantModel PlantModel::polynomial(int n, int m, std::vector<std::vector<Term>> rows, NoiseSpec noise, StateBox box,
                                  Vector x0) {
    require(static_cast<int>(rows.size()) == n, "polynomial plant: need one row per state coordinate");
    for (const auto& row : rows)
        for (const auto& t : row)
            require(static_cast<int>(t.powers.size()) == n + m, "polynomial plant: powers must have length n + m");
    return PlantModel(
        "polynomial", n, m,
        [rows = std::move(rows), n](const Vector& x, const Vector& u, const Vector& v) -> Vector {
            Vector out = v;
            for (std::size_t j = 0; j < rows.size(); ++j) {
                for (const auto& t : rows[j]) {
                    double val = t.coef;
                    for (std::size_t k = 0; k < t.powers.size(); ++k) {
                        if (t.powers[k] == 0) continue;
                        const int idx = static_cast<int>(k);
                        const double base = idx < n ? x(idx) : u(idx - n);
                        val *= std::pow(base, t.powers[k]);
                    }
                    out(static_cast<Eigen::Index>(j)) += val;
                }
            }
            return out;
        },
        std::move(noise), std::move(box), std::move(x0));
}

StepOutcome step(const PlantModel& plant, const Vector& x, const Vector& u, Rng& rng, std::size_t segment) {
    require(x.size() == plant.state_dim(), "step: state dimension mismatch");
    require(u.size() == plant.input_dim(), "step: input dimension mismatch");
    require(x.allFinite() && u.allFinite(), "step: non-finite state or input");
    StepOutcome out;
    out.noise = plant.draw_noise(rng);
    out.state = plant.dynamics(x, u, out.noise);
    if (out.state.size() != plant.state_dim() || !out.state.allFinite())
        throw PlantBlowup(segment, "dynamics returned a non-finite state");
    const Vector c = plant.box().center();
    const double r = plant.guard_radius();
    for (Eigen::Index i = 0; i < out.state.size(); ++i) {
        const double clipped = std::clamp(out.state(i), c(i) - r, c(i) + r);
        if (clipped != out.state(i)) {
            out.state(i) = clipped;
            out.saturated = true;
        }
    }
    return out;
}

Segment rollout_segment(const PlantModel& plant, const BasisSet& basis, const ControllerWeights& weights,
                        std::size_t horizon, std::uint64_t noise_seed, std::size_t segment_index) {
    require(horizon >= 1, "rollout_segment: horizon must be at least 1");
    require(basis.state_dim() == plant.state_dim() && basis.input_dim() == plant.input_dim(),
            "rollout_segment: basis and plant dimensions differ");
    weights.validate();
    require(weights.channels() == basis.input_dim() && weights.basis_count() == basis.basis_count(),
            "rollout_segment: weight shape does not match the basis");
    Rng rng = make_rng(substream_seed(noise_seed, segment_index));
    Segment seg;
    seg.index = segment_index;
    seg.states.reserve(horizon + 1);
    seg.inputs.reserve(horizon);
    seg.noise.reserve(horizon);
    seg.states.push_back(plant.initial_state());
    for (std::size_t k = 0; k < horizon; ++k) {
        const Vector& x = seg.states.back();
        Vector u = controller_eval_unchecked(basis, weights, x);
        if (!u.allFinite()) throw PlantBlowup(segment_index, "controller produced a non-finite input");
        StepOutcome next = step(plant, x, u, rng, segment_index);
        seg.saturated = seg.saturated || next.saturated;
        seg.inputs.push_back(std::move(u));
        seg.noise.push_back(std::move(next.noise));
        seg.states.push_back(std::move(next.state));
    }
    return seg;
}

}  // namespace tsalc
