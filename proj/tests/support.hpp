#pragma once

// Shared generators for property tests.

#include <cmath>
#include <vector>

#include "tsalc/function_space.hpp"

namespace testing_support {

using tsalc::Matrix;
using tsalc::Rng;
using tsalc::Vector;

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * tsalc::uniform01(rng); }

inline Vector uniform_vector(Rng& rng, int n, double lo, double hi) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = uniform(rng, lo, hi);
    return v;
}

inline Vector random_point(Rng& rng, const tsalc::StateBox& box) {
    Vector v(box.dim());
    for (int i = 0; i < box.dim(); ++i) v(i) = uniform(rng, box.lower(i), box.upper(i));
    return v;
}

inline Vector random_mass(Rng& rng, int n) {
    Vector v = uniform_vector(rng, n, 0.05, 1.0);
    return v / v.sum();
}

/// Random cubic polynomial law: every monomial of total degree <= 3 in up to
/// two coordinates, with uniform coefficients.
inline tsalc::InitialLaw random_cubic_law(Rng& rng, int n, int m) {
    std::vector<std::vector<tsalc::InitialLaw::Term>> channels(m);
    for (int i = 0; i < m; ++i) {
        for (int a = 0; a < n; ++a) {
            for (int b = a; b < n; ++b) {
                for (int pa = 0; pa <= 3; ++pa) {
                    for (int pb = 0; pa + pb <= 3; ++pb) {
                        if (a == b && pb > 0) continue;
                        std::vector<int> powers(n, 0);
                        powers[a] += pa;
                        powers[b] += pb;
                        channels[i].push_back({uniform(rng, -1.0, 1.0), powers});
                    }
                }
            }
        }
    }
    return tsalc::InitialLaw::polynomial(n, std::move(channels));
}

/// sum_j a_j sin(b_j . x + c_j) + d_j cos(e_j . x) per channel.
inline tsalc::InitialLaw random_trig_law(Rng& rng, int n, int m) {
    struct Wave {
        Vector b, e;
        double a, c, d;
    };
    std::vector<std::vector<Wave>> waves(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < 3; ++j)
            waves[i].push_back({uniform_vector(rng, n, -2.0, 2.0), uniform_vector(rng, n, -2.0, 2.0),
                                uniform(rng, -1.0, 1.0), uniform(rng, -3.0, 3.0), uniform(rng, -1.0, 1.0)});
    return tsalc::InitialLaw(
        n, m,
        [waves](const Vector& x) {
            Vector u = Vector::Zero(static_cast<Eigen::Index>(waves.size()));
            for (std::size_t i = 0; i < waves.size(); ++i)
                for (const auto& w : waves[i]) u(i) += w.a * std::sin(w.b.dot(x) + w.c) + w.d * std::cos(w.e.dot(x));
            return u;
        },
        "trig");
}

/// Independent inclusion-exclusion oracle: builds each mixed vector
/// coordinate by coordinate from explicit index lists.
inline double inclusion_exclusion(const tsalc::InitialLaw& law, int channel, const std::vector<int>& subset,
                                  const Vector& x, const Vector& anchor) {
    const std::size_t k = subset.size();
    double total = 0.0;
    for (std::size_t pick = 0; pick < (std::size_t{1} << k); ++pick) {
        Vector mixed = anchor;
        int chosen = 0;
        for (std::size_t j = 0; j < k; ++j) {
            if ((pick >> j) & 1U) {
                mixed(subset[j]) = x(subset[j]);
                ++chosen;
            }
        }
        const double sign = ((static_cast<int>(k) - chosen) % 2 == 0) ? 1.0 : -1.0;
        total += sign * law(mixed)(channel);
    }
    return total;
}

/// Two-point density (a, 1-a), a >= 1/2, at the given Hellinger distance from
/// (1/2, 1/2), found by bisection on the Bhattacharyya form.
inline Vector density_at_hellinger(double target) {
    auto dist = [](double a) {
        const double bc = std::sqrt(0.5 * a) + std::sqrt(0.5 * (1.0 - a));
        return std::sqrt(std::max(0.0, 1.0 - bc));
    };
    double lo = 0.5, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (dist(mid) < target ? lo : hi) = mid;
    }
    Vector p(2);
    p << lo, 1.0 - lo;
    return p;
}

inline std::vector<int> members(tsalc::SubsetMask w, int n) {
    std::vector<int> out;
    for (int i = 0; i < n; ++i)
        if ((w >> i) & 1U) out.push_back(i);
    return out;
}

}  // namespace testing_support
