#pragma once

// L2 projection onto the convex hull of one output channel's scaled basis
// functions, and the approximation-error bounds for that hull.

#include <vector>

#include "tsalc/function_space.hpp"
#include "tsalc/quadrature.hpp"

namespace tsalc {

struct ProjectionResult {
    Vector weights;                       // one simplex over the 2^n subsets
    double residual = 0.0;                // L2 distance to the target
    std::size_t iterations = 0;
    double duality_gap = 0.0;
    std::vector<double> objective_trace;  // squared residual, one entry per iterate
};

struct ProjectionOptions {
    std::size_t max_iters = 10000;
    double tol = 1e-8;       // Frank-Wolfe duality gap
    bool away_steps = true;  // away-step variant; plain Frank-Wolfe when false
    bool fully_corrective = true;  // re-minimize over the active vertices after every step
};

/// Quadrature samples of one channel's scaled basis functions plus their Gram
/// matrix. Reusable across many targets.
class HullProjector {
public:
    HullProjector(const BasisSet& basis, int channel, const QuadratureSpec& quad = {});

    const Matrix& gram() const { return gram_; }
    const QuadratureRule& rule() const { return rule_; }
    /// Column w = Gamma * g_w sampled at the quadrature nodes.
    const Matrix& samples() const { return samples_; }

    /// Target sampled at the quadrature nodes.
    Vector sample(const ScalarFn& target) const;

    /// L2 norm of the hull element with the given weights.
    double norm_of(const Vector& alpha) const;

    ProjectionResult project(const ScalarFn& target, const ProjectionOptions& opts = {}) const;
    ProjectionResult project_samples(const Vector& target_values, const ProjectionOptions& opts = {}) const;

private:
    QuadratureRule rule_;
    Matrix samples_;
    Matrix gram_;
};

/// Frank-Wolfe minimization of |sum_w alpha(w) Gamma g_w - target|^2 over the simplex.
ProjectionResult project_to_hull(const ScalarFn& target, const BasisSet& basis, int channel,
                                 const QuadratureSpec& quad = {}, const ProjectionOptions& opts = {});

/// sqrt((M_g^2 - |g*|^2) / 2^n).
double theorem1_bound(double m_g, double target_norm, int n);

/// sqrt((m M_g^2 - sum_i |g*_i|^2) / 2^n), the error bound for the vector-valued controller.
double corollary1_bound(int m, double m_g, const std::vector<double>& channel_norms, int n);

/// Largest L2 norm of a scaled basis function over all channels and subsets.
double compute_M_g(const BasisSet& basis, const QuadratureSpec& quad = {});

struct BoundReport {
    double achieved_error = 0.0;
    double theorem1_bound = 0.0;
    double corollary1_bound = 0.0;
    double tolerance = 1e-6;
    bool satisfied = false;
};

BoundReport make_bound_report(double achieved_error, double thm1, double cor1, double tolerance = 1e-6);

}  // namespace tsalc
