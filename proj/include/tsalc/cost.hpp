#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tsalc/plant_sim.hpp"

namespace tsalc {

enum class CostKind { quadratic, risk_sensitive };

struct CostSpec {
    CostKind kind = CostKind::quadratic;
    Matrix Q;
    Matrix R;
    double alpha_risk = 0.0;          // discount rate, risk_sensitive only
    std::size_t horizon = 1;          // K
    double floor = 0.0;               // lower bound J_m on every reported cost
    std::optional<double> lipschitz;  // L_J estimate, config-supplied

    /// 1e-6 * trace(Q).
    static double default_floor(const Matrix& q) { return 1e-6 * q.trace(); }
};

struct CostDiagnostics {
    std::vector<std::string> warnings;
};

/// Throws InvalidInput when Q or R is not symmetric positive definite or the
/// floor is not positive. Missing L_J is only a warning.
CostDiagnostics validate_spec(const CostSpec& spec);

/// sum_{k=0..K} discount(k) (x'Qx + u'Ru) with u(K) = 0, clamped below at the floor.
double segment_cost(const CostSpec& spec, const Segment& seg);

}  // namespace tsalc
