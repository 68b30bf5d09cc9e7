#pragma once

// Thompson-sampling core: a finite set of candidate cost densities over a
// finite controller grid, with likelihood-ratio posterior updates kept in log
// space.
//
// A hypothesis is a surrogate cost table J_h over the grid; its density is
// p_h(g) = (1/J_h(g)) / sum_g' (1/J_h(g')). After observing cost J at grid
// point g, every hypothesis is reweighted by p_h(g) / p*(g) with
// p*(g) = eps_J / J. The denominator is shared by all hypotheses, so it only
// moves the common offset and never the normalized posterior.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tsalc/cost.hpp"
#include "tsalc/function_space.hpp"
#include "tsalc/plant_sim.hpp"

namespace tsalc {

enum class GridOrigin { vertex, uniform, dirichlet_sample, user };

std::string to_string(GridOrigin origin);
GridOrigin grid_origin_from_string(const std::string& s);

struct CandidateGrid {
    std::vector<ControllerWeights> points;
    std::vector<GridOrigin> origins;

    std::size_t size() const { return points.size(); }
    void add(ControllerWeights w, GridOrigin origin);
};

/// Vertex combinations first (channel i takes digit i of the combination
/// index in base 2^n), capped at n_vertices; then the uniform controller; then
/// n_samples uniform-Dirichlet controllers. Duplicates are skipped.
CandidateGrid make_grid(const BasisSet& basis, std::size_t n_vertices, std::size_t n_samples, Rng& rng);

/// p(g) proportional to 1/cost(g), normalized.
Vector density_from_costs(const Vector& costs);

struct Hypothesis {
    Vector costs;    // surrogate cost per grid point
    Vector density;  // normalized inverse cost
    std::string origin;

    static Hypothesis from_costs(Vector costs, std::string origin);
};

class HypothesisSet {
public:
    HypothesisSet() = default;
    explicit HypothesisSet(std::vector<Hypothesis> hypotheses, std::optional<std::size_t> true_index = std::nullopt);

    std::size_t size() const { return hypotheses_.size(); }
    std::size_t grid_size() const { return static_cast<std::size_t>(densities_.cols()); }
    const Hypothesis& operator[](std::size_t h) const { return hypotheses_[h]; }
    const std::vector<Hypothesis>& hypotheses() const { return hypotheses_; }

    /// Row h = density of hypothesis h.
    const Matrix& densities() const { return densities_; }
    double density_lo() const { return densities_.minCoeff(); }
    double density_hi() const { return densities_.maxCoeff(); }
    /// Counting measure of the whole set.
    double measure() const { return static_cast<double>(size()); }

    std::optional<std::size_t> true_index() const { return true_index_; }

private:
    std::vector<Hypothesis> hypotheses_;
    Matrix densities_;
    std::optional<std::size_t> true_index_;
};

// --- hypothesis generators -------------------------------------------------

struct RbfParams {
    int centers = 3;
    double length_scale = 0.3;
    double amplitude = 1.0;
    double base_cost = 1.0;
};

/// base * (1 + sum_j c_j exp(-|a(g) - mu_j|^2 / (2 l^2))), a(g) the flattened weights.
Hypothesis rbf_hypothesis(const CandidateGrid& grid, const RbfParams& p, Rng& rng);

struct QuadraticParams {
    double base_cost = 1.0;
    double curvature = 1.0;
};

/// base * (1 + curvature * |A (a(g) - mu)|^2) with random A and mu.
Hypothesis quadratic_hypothesis(const CandidateGrid& grid, const QuadraticParams& p, Rng& rng);

/// Mean observed cost per grid point over `rollouts` segments each. Segment
/// indices 0..rollouts-1 of the given noise stream are used for every grid point.
Hypothesis build_realizable_hypothesis(const PlantModel& plant, const BasisSet& basis, const CandidateGrid& grid,
                                       const CostSpec& cost, std::size_t rollouts, std::uint64_t noise_seed);

// --- posterior -------------------------------------------------------------

struct Observation {
    std::size_t grid_index = 0;
    double cost = 0.0;
};

struct PosteriorState {
    Vector log_prior;
    Vector log_ratio;         // cumulative log R per hypothesis, recentered to max 0
    double log_offset = 0.0;  // shift removed by recentering plus the shared -log(1/J) terms
    std::size_t t = 0;
    std::vector<Observation> history;

    std::size_t size() const { return static_cast<std::size_t>(log_prior.size()); }

    /// Normalized posterior F^t.
    Vector weights() const;
    /// log F^t, normalized.
    Vector log_weights() const;
    double entropy() const;
};

PosteriorState make_posterior(const Vector& prior);
PosteriorState uniform_posterior(std::size_t n);

/// Draw a hypothesis index with probability F^t(h).
std::size_t ts_sample(const PosteriorState& posterior, Rng& rng);

/// Grid index of the largest density; ties go to the lowest index.
std::size_t select_controller(const Hypothesis& h);

/// Bayes step after observing `observed_cost` at grid point `g_index`.
PosteriorState observe_and_update(PosteriorState posterior, const HypothesisSet& set, std::size_t g_index,
                                  double observed_cost);

/// J^t(g) = sum_h F^t(h) p_h(g).
Vector predictive_density(const PosteriorState& posterior, const HypothesisSet& set);

/// P(J in Omega) = sum over members of F^t(h). `members` flags each hypothesis.
double prob_in_set(const PosteriorState& posterior, const std::vector<bool>& members);
/// Same in log space; -inf for an empty or zero-mass set.
double log_prob_in_set(const PosteriorState& posterior, const std::vector<bool>& members);

/// log L_t(Omega) = log sum_{h in Omega} R_t(h) F^0(h), with the eps_J factor of
/// each update omitted (callers add -t log eps_J when they know it).
double log_unnormalized_mass(const PosteriorState& posterior, const std::vector<bool>& members);

}  // namespace tsalc
