#include "tsalc/cost.hpp"

#include <cmath>

namespace tsalc {

namespace {

void require_spd(const Matrix& m, const char* name) {
    require(m.rows() >= 1 && m.rows() == m.cols(), std::string(name) + " must be a nonempty square matrix");
    require(m.allFinite(), std::string(name) + " has non-finite entries");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    require((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale, std::string(name) + " must be symmetric");
    Eigen::LLT<Matrix> llt(m);
    require(llt.info() == Eigen::Success, std::string(name) + " must be positive definite");
}

}  // namespace

CostDiagnostics validate_spec(const CostSpec& spec) {
    require_spd(spec.Q, "Q");
    require_spd(spec.R, "R");
    require(std::isfinite(spec.floor) && spec.floor > 0.0, "cost floor must be positive");
    if (spec.kind == CostKind::risk_sensitive)
        require(std::isfinite(spec.alpha_risk) && spec.alpha_risk > 0.0, "alpha_risk must be positive");
    CostDiagnostics d;
    if (!spec.lipschitz) d.warnings.emplace_back("L_J estimate not set; regret bound term 2 will be omitted");
    else require(*spec.lipschitz > 0.0, "L_J estimate must be positive");
    return d;
}

double segment_cost(const CostSpec& spec, const Segment& seg) {
    require(seg.states.size() == spec.horizon + 1, "segment_cost: segment state count must be K + 1");
    require(seg.inputs.size() == spec.horizon, "segment_cost: segment input count must be K");
    double total = 0.0;
    for (std::size_t k = 0; k <= spec.horizon; ++k) {
        const Vector& x = seg.states[k];
        require(x.size() == spec.Q.rows(), "segment_cost: state dimension does not match Q");
        double stage = x.dot(spec.Q * x);
        if (k < spec.horizon) {
            const Vector& u = seg.inputs[k];
            require(u.size() == spec.R.rows(), "segment_cost: input dimension does not match R");
            stage += u.dot(spec.R * u);
        }
        if (spec.kind == CostKind::risk_sensitive) stage *= std::exp(-spec.alpha_risk * static_cast<double>(k));
        total += stage;
    }
    return std::max(total, spec.floor);
}

}  // namespace tsalc
