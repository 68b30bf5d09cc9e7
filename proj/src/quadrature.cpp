#include "tsalc/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace tsalc {

void gauss_legendre(int count, Vector& nodes, Vector& weights) {
    require(count >= 2, "gauss_legendre: need at least 2 nodes");
    nodes.resize(count);
    weights.resize(count);
    const int half = (count + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Newton iteration on P_count from the Chebyshev-like initial guess.
        double z = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = z;
            for (int k = 2; k <= count; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = count * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // Recompute the derivative at the converged root for the weight.
        double p0 = 1.0;
        double p1 = z;
        for (int k = 2; k <= count; ++k) {
            const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = count * (z * p1 - p0) / (z * z - 1.0);
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes(i) = -z;
        nodes(count - 1 - i) = z;
        weights(i) = w;
        weights(count - 1 - i) = w;
    }
}

QuadratureRule make_rule(const StateBox& box, const QuadratureSpec& spec) {
    const int n = box.dim();
    require(n >= 1, "make_rule: empty box");
    require(spec.nodes_per_axis >= 2, "make_rule: need at least 2 nodes per axis");
    QuadratureRule rule;
    if (n <= spec.max_tensor_dim) {
        Vector x1, w1;
        gauss_legendre(spec.nodes_per_axis, x1, w1);
        const auto per = static_cast<std::size_t>(spec.nodes_per_axis);
        std::size_t total = 1;
        for (int d = 0; d < n; ++d) total *= per;
        rule.points.resize(n, static_cast<Eigen::Index>(total));
        rule.weights.resize(static_cast<Eigen::Index>(total));
        const Vector half = 0.5 * (box.upper - box.lower);
        const Vector mid = box.center();
        for (std::size_t k = 0; k < total; ++k) {
            std::size_t rem = k;
            double w = 1.0;
            for (int d = 0; d < n; ++d) {
                const auto idx = static_cast<Eigen::Index>(rem % per);
                rem /= per;
                rule.points(d, static_cast<Eigen::Index>(k)) = mid(d) + half(d) * x1(idx);
                w *= half(d) * w1(idx);
            }
            rule.weights(static_cast<Eigen::Index>(k)) = w;
        }
        return rule;
    }
    require(spec.mc_points >= 1, "make_rule: Monte Carlo needs at least one point");
    Rng rng = make_rng(spec.mc_seed);
    const auto count = static_cast<Eigen::Index>(spec.mc_points);
    rule.points.resize(n, count);
    rule.weights = Vector::Constant(count, box.volume() / static_cast<double>(count));
    for (Eigen::Index k = 0; k < count; ++k)
        for (int d = 0; d < n; ++d)
            rule.points(d, k) = box.lower(d) + (box.upper(d) - box.lower(d)) * uniform01(rng);
    return rule;
}

double l2_inner(const ScalarFn& f, const ScalarFn& g, const StateBox& box, const QuadratureSpec& spec) {
    require(box.dim() >= 1, "l2_inner: empty box");
    const QuadratureRule rule = make_rule(box, spec);
    double acc = 0.0;
    for (Eigen::Index k = 0; k < rule.points.cols(); ++k) {
        const Vector x = rule.points.col(k);
        acc += rule.weights(k) * f(x) * g(x);
    }
    return acc;
}

}  // namespace tsalc
