#pragma once

#include <cstdint>
#include <functional>

#include "tsalc/function_space.hpp"

namespace tsalc {

struct QuadratureSpec {
    int nodes_per_axis = 16;          // tensor Gauss-Legendre, used for n <= 4
    int max_tensor_dim = 4;
    std::size_t mc_points = 20000;    // fixed-seed uniform Monte Carlo beyond that
    std::uint64_t mc_seed = 0x5eed;
};

/// Nodes (columns of `points`) and weights approximating integrals over a box.
struct QuadratureRule {
    Matrix points;
    Vector weights;

    std::size_t size() const { return static_cast<std::size_t>(weights.size()); }
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int count, Vector& nodes, Vector& weights);

QuadratureRule make_rule(const StateBox& box, const QuadratureSpec& spec = {});

using ScalarFn = std::function<double(const Vector&)>;

/// Approximates the integral of f*g over the box.
double l2_inner(const ScalarFn& f, const ScalarFn& g, const StateBox& box, const QuadratureSpec& spec = {});

inline double l2_norm(const ScalarFn& f, const StateBox& box, const QuadratureSpec& spec = {}) {
    return std::sqrt(std::max(0.0, l2_inner(f, f, box, spec)));
}

}  // namespace tsalc
