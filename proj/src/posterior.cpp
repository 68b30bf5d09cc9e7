#include "tsalc/posterior.hpp"

#include <cmath>
#include <limits>

namespace tsalc {

std::string to_string(GridOrigin origin) {
    switch (origin) {
        case GridOrigin::vertex: return "vertex";
        case GridOrigin::uniform: return "uniform";
        case GridOrigin::dirichlet_sample: return "dirichlet-sample";
        case GridOrigin::user: return "user";
    }
    return "user";
}

GridOrigin grid_origin_from_string(const std::string& s) {
    if (s == "vertex") return GridOrigin::vertex;
    if (s == "uniform") return GridOrigin::uniform;
    if (s == "dirichlet-sample") return GridOrigin::dirichlet_sample;
    if (s == "user") return GridOrigin::user;
    throw InvalidInput("unknown grid origin: " + s);
}

void CandidateGrid::add(ControllerWeights w, GridOrigin origin) {
    w.validate();
    if (!points.empty())
        require(w.alpha.rows() == points.front().alpha.rows() && w.alpha.cols() == points.front().alpha.cols(),
                "CandidateGrid: inconsistent weight shapes");
    points.push_back(std::move(w));
    origins.push_back(origin);
}

CandidateGrid make_grid(const BasisSet& basis, std::size_t n_vertices, std::size_t n_samples, Rng& rng) {
    require(n_vertices + n_samples >= 2, "make_grid: need n_vertices + n_samples >= 2");
    const int n = basis.state_dim();
    const int m = basis.input_dim();
    const std::size_t per_channel = basis.basis_count();
    CandidateGrid grid;
    auto contains = [&](const ControllerWeights& w) {
        for (const auto& p : grid.points)
            if (p == w) return true;
        return false;
    };

    // Total vertex combinations, saturating to avoid overflow.
    std::size_t combos = 1;
    for (int i = 0; i < m && combos <= n_vertices; ++i) combos *= per_channel;
    const std::size_t n_vert = std::min(n_vertices, combos);
    for (std::size_t c = 0; c < n_vert; ++c) {
        std::vector<SubsetMask> verts(static_cast<std::size_t>(m));
        std::size_t rem = c;
        for (int i = 0; i < m; ++i) {
            verts[static_cast<std::size_t>(i)] = static_cast<SubsetMask>(rem % per_channel);
            rem /= per_channel;
        }
        grid.add(ControllerWeights::vertex(n, verts), GridOrigin::vertex);
    }
    auto uniform = ControllerWeights::uniform(m, n);
    if (!contains(uniform)) grid.add(std::move(uniform), GridOrigin::uniform);
    for (std::size_t s = 0; s < n_samples; ++s) {
        ControllerWeights w;
        do {
            Matrix a(m, static_cast<Eigen::Index>(per_channel));
            for (int i = 0; i < m; ++i) a.row(i) = sample_uniform_simplex(a.cols(), rng).transpose();
            w = ControllerWeights(std::move(a));
        } while (contains(w));
        grid.add(std::move(w), GridOrigin::dirichlet_sample);
    }
    return grid;
}

Vector density_from_costs(const Vector& costs) {
    require(costs.size() >= 1, "density_from_costs: empty cost table");
    for (Eigen::Index i = 0; i < costs.size(); ++i)
        require(std::isfinite(costs(i)) && costs(i) > 0.0, "density_from_costs: costs must be positive and finite");
    const Vector inv = costs.cwiseInverse();
    return inv / inv.sum();
}

Hypothesis Hypothesis::from_costs(Vector costs, std::string origin) {
    Hypothesis h;
    h.density = density_from_costs(costs);
    h.costs = std::move(costs);
    h.origin = std::move(origin);
    return h;
}

HypothesisSet::HypothesisSet(std::vector<Hypothesis> hypotheses, std::optional<std::size_t> true_index)
    : hypotheses_(std::move(hypotheses)), true_index_(true_index) {
    require(hypotheses_.size() >= 2, "HypothesisSet: need at least two hypotheses");
    const auto grid = hypotheses_.front().density.size();
    require(grid >= 1, "HypothesisSet: empty grid");
    densities_.resize(static_cast<Eigen::Index>(hypotheses_.size()), grid);
    for (std::size_t h = 0; h < hypotheses_.size(); ++h) {
        const auto& hyp = hypotheses_[h];
        require(hyp.density.size() == grid && hyp.costs.size() == grid, "HypothesisSet: hypotheses must share the grid");
        require((hyp.density.array() > 0.0).all(), "HypothesisSet: densities must be strictly positive");
        require(std::abs(hyp.density.sum() - 1.0) <= 1e-12, "HypothesisSet: densities must be normalized");
        densities_.row(static_cast<Eigen::Index>(h)) = hyp.density.transpose();
    }
    if (true_index_) require(*true_index_ < hypotheses_.size(), "HypothesisSet: true index out of range");
}

// ---------------------------------------------------------------------------

Hypothesis rbf_hypothesis(const CandidateGrid& grid, const RbfParams& p, Rng& rng) {
    require(grid.size() >= 1, "rbf_hypothesis: empty grid");
    require(p.centers >= 1 && p.length_scale > 0.0 && p.amplitude >= 0.0 && p.base_cost > 0.0,
            "rbf_hypothesis: invalid parameters");
    const auto& shape = grid.points.front().alpha;
    std::vector<Vector> mu;
    std::vector<double> c;
    for (int j = 0; j < p.centers; ++j) {
        Matrix a(shape.rows(), shape.cols());
        for (Eigen::Index i = 0; i < a.rows(); ++i) a.row(i) = sample_uniform_simplex(a.cols(), rng).transpose();
        mu.push_back(ControllerWeights(std::move(a)).flattened());
        c.push_back(p.amplitude * uniform01(rng));
    }
    Vector costs(static_cast<Eigen::Index>(grid.size()));
    const double denom = 2.0 * p.length_scale * p.length_scale;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const Vector a = grid.points[g].flattened();
        double bump = 0.0;
        for (std::size_t j = 0; j < mu.size(); ++j) bump += c[j] * std::exp(-(a - mu[j]).squaredNorm() / denom);
        costs(static_cast<Eigen::Index>(g)) = p.base_cost * (1.0 + bump);
    }
    return Hypothesis::from_costs(std::move(costs), "rbf");
}

Hypothesis quadratic_hypothesis(const CandidateGrid& grid, const QuadraticParams& p, Rng& rng) {
    require(grid.size() >= 1, "quadratic_hypothesis: empty grid");
    require(p.base_cost > 0.0 && p.curvature >= 0.0, "quadratic_hypothesis: invalid parameters");
    const auto& shape = grid.points.front().alpha;
    const Eigen::Index dim = shape.size();
    Matrix a(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = standard_normal(rng) / std::sqrt(static_cast<double>(dim));
    Matrix centre(shape.rows(), shape.cols());
    for (Eigen::Index i = 0; i < centre.rows(); ++i)
        centre.row(i) = sample_uniform_simplex(centre.cols(), rng).transpose();
    const Vector mu = ControllerWeights(std::move(centre)).flattened();
    Vector costs(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const Vector d = grid.points[g].flattened() - mu;
        costs(static_cast<Eigen::Index>(g)) = p.base_cost * (1.0 + p.curvature * (a * d).squaredNorm());
    }
    return Hypothesis::from_costs(std::move(costs), "quadratic");
}

Hypothesis build_realizable_hypothesis(const PlantModel& plant, const BasisSet& basis, const CandidateGrid& grid,
                                       const CostSpec& cost, std::size_t rollouts, std::uint64_t noise_seed) {
    require(rollouts >= 1, "build_realizable_hypothesis: rollouts must be at least 1");
    require(grid.size() >= 1, "build_realizable_hypothesis: empty grid");
    Vector costs(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double sum = 0.0;
        for (std::size_t r = 0; r < rollouts; ++r) {
            const Segment seg = rollout_segment(plant, basis, grid.points[g], cost.horizon, noise_seed, r);
            sum += segment_cost(cost, seg);
        }
        costs(static_cast<Eigen::Index>(g)) = sum / static_cast<double>(rollouts);
    }
    return Hypothesis::from_costs(std::move(costs), "realizable");
}

// ---------------------------------------------------------------------------

Vector PosteriorState::log_weights() const {
    const Vector joint = log_prior + log_ratio;
    const double z = log_sum_exp(std::span<const double>(joint.data(), static_cast<std::size_t>(joint.size())));
    return joint.array() - z;
}

Vector PosteriorState::weights() const {
    const Vector joint = log_prior + log_ratio;
    const double mx = joint.maxCoeff();
    Vector w = (joint.array() - mx).exp();
    return w / w.sum();
}

double PosteriorState::entropy() const {
    const Vector w = weights();
    double h = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i)
        if (w(i) > 0.0) h -= w(i) * std::log(w(i));
    return h;
}

PosteriorState make_posterior(const Vector& prior) {
    require(prior.size() >= 1, "make_posterior: empty prior");
    for (Eigen::Index i = 0; i < prior.size(); ++i)
        require(std::isfinite(prior(i)) && prior(i) >= 0.0, "make_posterior: prior must be nonnegative");
    require(std::abs(prior.sum() - 1.0) <= 1e-12, "make_posterior: prior must sum to 1");
    PosteriorState s;
    s.log_prior = prior.array().log();
    s.log_ratio = Vector::Zero(prior.size());
    return s;
}

PosteriorState uniform_posterior(std::size_t n) {
    require(n >= 1, "uniform_posterior: need at least one hypothesis");
    return make_posterior(Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n)));
}

std::size_t ts_sample(const PosteriorState& posterior, Rng& rng) {
    const Vector w = posterior.weights();
    return sample_categorical(std::span<const double>(w.data(), static_cast<std::size_t>(w.size())), rng);
}

std::size_t select_controller(const Hypothesis& h) {
    require(h.density.size() >= 1, "select_controller: empty hypothesis");
    std::size_t best = 0;
    for (Eigen::Index g = 1; g < h.density.size(); ++g)
        if (h.density(g) > h.density(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(g);
    return best;
}

PosteriorState observe_and_update(PosteriorState posterior, const HypothesisSet& set, std::size_t g_index,
                                  double observed_cost) {
    require(posterior.size() == set.size(), "observe_and_update: posterior and hypothesis set sizes differ");
    require(g_index < set.grid_size(), "observe_and_update: grid index out of range");
    require(std::isfinite(observed_cost) && observed_cost > 0.0, "observe_and_update: observed cost must be positive");
    posterior.log_ratio += set.densities().col(static_cast<Eigen::Index>(g_index)).array().log().matrix();
    // -log(1/J) is common to every hypothesis: it goes to the shared offset only.
    posterior.log_offset += std::log(observed_cost);
    const double mx = posterior.log_ratio.maxCoeff();
    posterior.log_ratio.array() -= mx;
    posterior.log_offset += mx;
    posterior.t += 1;
    posterior.history.push_back({g_index, observed_cost});
    return posterior;
}

Vector predictive_density(const PosteriorState& posterior, const HypothesisSet& set) {
    require(posterior.size() == set.size(), "predictive_density: size mismatch");
    return set.densities().transpose() * posterior.weights();
}

double prob_in_set(const PosteriorState& posterior, const std::vector<bool>& members) {
    require(members.size() == posterior.size(), "prob_in_set: membership size mismatch");
    const Vector w = posterior.weights();
    double p = 0.0;
    for (std::size_t h = 0; h < members.size(); ++h)
        if (members[h]) p += w(static_cast<Eigen::Index>(h));
    return std::min(1.0, p);
}

double log_prob_in_set(const PosteriorState& posterior, const std::vector<bool>& members) {
    require(members.size() == posterior.size(), "log_prob_in_set: membership size mismatch");
    const Vector lw = posterior.log_weights();
    std::vector<double> xs;
    for (std::size_t h = 0; h < members.size(); ++h)
        if (members[h]) xs.push_back(lw(static_cast<Eigen::Index>(h)));
    if (xs.empty()) return -std::numeric_limits<double>::infinity();
    return std::min(0.0, log_sum_exp(xs));
}

double log_unnormalized_mass(const PosteriorState& posterior, const std::vector<bool>& members) {
    require(members.size() == posterior.size(), "log_unnormalized_mass: membership size mismatch");
    std::vector<double> xs;
    for (std::size_t h = 0; h < members.size(); ++h) {
        const auto i = static_cast<Eigen::Index>(h);
        if (members[h]) xs.push_back(posterior.log_prior(i) + posterior.log_ratio(i));
    }
    if (xs.empty()) return -std::numeric_limits<double>::infinity();
    return log_sum_exp(xs) + posterior.log_offset;
}

}  // namespace tsalc
