#include "tsalc/approximation.hpp"

#include <cmath>
#include <limits>

namespace tsalc {

namespace {

double radicand_sqrt(double radicand, double scale, const char* who) {
    // Quadrature round-off may push a boundary case a hair below zero.
    if (radicand < 0.0) {
        if (radicand < -1e-12 * std::max(1.0, scale)) throw InvalidInput(std::string(who) + ": negative radicand");
        return 0.0;
    }
    return std::sqrt(radicand);
}

// Minimizes a' G a - 2 b' a over the face of the simplex spanned by the support
// of alpha: solve on the affine hull, walk back to the face boundary, drop the
// blocking coordinate, repeat. The objective never increases.
void correct_on_support(const Matrix& gram, const Vector& b, Vector& alpha) {
    auto value = [&](const Vector& a) { return a.dot(gram * a) - 2.0 * b.dot(a); };
    for (Eigen::Index round = 0; round <= alpha.size(); ++round) {
        std::vector<Eigen::Index> support;
        for (Eigen::Index j = 0; j < alpha.size(); ++j)
            if (alpha(j) > 0.0) support.push_back(j);
        const auto k = static_cast<Eigen::Index>(support.size());
        if (k <= 1) return;
        Matrix kkt = Matrix::Zero(k + 1, k + 1);
        Vector rhs(k + 1);
        for (Eigen::Index i = 0; i < k; ++i) {
            for (Eigen::Index j = 0; j < k; ++j) kkt(i, j) = gram(support[i], support[j]);
            kkt(i, k) = kkt(k, i) = 1.0;
            rhs(i) = b(support[i]);
        }
        rhs(k) = 1.0;
        const Vector sol = kkt.completeOrthogonalDecomposition().solve(rhs);
        if (!sol.allFinite()) return;
        Vector x = Vector::Zero(alpha.size());
        for (Eigen::Index i = 0; i < k; ++i) x(support[i]) = sol(i);

        double theta = 1.0;
        Eigen::Index blocking = -1;
        for (Eigen::Index j : support) {
            if (x(j) >= 0.0) continue;
            const double t = alpha(j) / (alpha(j) - x(j));
            if (t < theta) {
                theta = t;
                blocking = j;
            }
        }
        Vector next = alpha + theta * (x - alpha);
        if (blocking >= 0) next(blocking) = 0.0;
        next = next.cwiseMax(0.0);
        next /= next.sum();
        if (value(next) > value(alpha)) return;
        alpha = next;
        if (blocking < 0) return;
    }
}

}  // namespace

HullProjector::HullProjector(const BasisSet& basis, int channel, const QuadratureSpec& quad)
    : rule_(make_rule(basis.box(), quad)) {
    require(channel >= 0 && channel < basis.input_dim(), "HullProjector: channel out of range");
    const auto nodes = rule_.points.cols();
    const auto count = static_cast<Eigen::Index>(basis.basis_count());
    samples_.resize(nodes, count);
    for (Eigen::Index k = 0; k < nodes; ++k) {
        const Vector x = rule_.points.col(k);
        samples_.row(k) = basis.gamma() * basis.eval_all(x).row(channel);
    }
    if (!samples_.allFinite()) throw NumericError("HullProjector: non-finite basis values at quadrature nodes");
    gram_ = samples_.transpose() * rule_.weights.asDiagonal() * samples_;
}

Vector HullProjector::sample(const ScalarFn& target) const {
    Vector t(rule_.points.cols());
    for (Eigen::Index k = 0; k < t.size(); ++k) t(k) = target(rule_.points.col(k));
    return t;
}

double HullProjector::norm_of(const Vector& alpha) const {
    const Vector v = samples_ * alpha;
    return std::sqrt(rule_.weights.dot(v.cwiseAbs2()));
}

ProjectionResult HullProjector::project(const ScalarFn& target, const ProjectionOptions& opts) const {
    return project_samples(sample(target), opts);
}

ProjectionResult HullProjector::project_samples(const Vector& target, const ProjectionOptions& opts) const {
    require(opts.max_iters >= 1, "project_to_hull: max_iters must be at least 1");
    require(target.size() == samples_.rows(), "project_to_hull: target sample count mismatch");
    if (!target.allFinite()) throw NumericError("project_to_hull: non-finite target values");

    const Vector& w = rule_.weights;
    const Eigen::Index count = samples_.cols();
    const Vector b = samples_.transpose() * (w.asDiagonal() * target);

    // Start at the best vertex.
    Vector alpha = Vector::Zero(count);
    {
        Eigen::Index best = 0;
        double best_val = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < count; ++j) {
            const double val = gram_(j, j) - 2.0 * b(j);
            if (val < best_val) {
                best_val = val;
                best = j;
            }
        }
        alpha(best) = 1.0;
    }
    Vector residual = samples_ * alpha - target;  // hull element minus target, at the nodes
    Vector g_alpha = gram_ * alpha;
    auto objective = [&] { return w.dot(residual.cwiseAbs2()); };

    ProjectionResult out;
    out.objective_trace.push_back(objective());
    std::size_t it = 0;
    double gap = std::numeric_limits<double>::infinity();
    for (; it < opts.max_iters; ++it) {
        const Vector grad = 2.0 * (g_alpha - b);
        Eigen::Index fw = 0;
        grad.minCoeff(&fw);
        gap = grad.dot(alpha) - grad(fw);
        if (gap <= opts.tol) break;

        Eigen::Index away = -1;
        if (opts.away_steps) {
            double worst = -std::numeric_limits<double>::infinity();
            for (Eigen::Index j = 0; j < count; ++j) {
                if (alpha(j) > 0.0 && grad(j) > worst) {
                    worst = grad(j);
                    away = j;
                }
            }
        }
        const double away_gain = away >= 0 ? grad(away) - grad.dot(alpha) : -1.0;
        const bool use_away = away >= 0 && away_gain > gap;

        // Direction d as a sparse update of alpha: alpha + gamma * d.
        Vector dir;
        double max_step = 1.0;
        if (!use_away) {
            dir = -alpha;
            dir(fw) += 1.0;
        } else {
            dir = alpha;
            dir(away) -= 1.0;
            const double a = alpha(away);
            max_step = a < 1.0 ? a / (1.0 - a) : std::numeric_limits<double>::infinity();
            if (!std::isfinite(max_step)) break;  // alpha is the away vertex itself
        }
        const Vector g_dir = gram_ * dir;
        const double curvature = dir.dot(g_dir);
        const double slope = dir.dot(g_alpha - b);
        double step = curvature > 0.0 ? -slope / curvature : max_step;
        step = std::clamp(step, 0.0, max_step);
        if (step <= 0.0) break;

        alpha += step * dir;
        if (use_away && step == max_step) alpha(away) = 0.0;  // drop step
        alpha = alpha.cwiseMax(0.0);
        alpha /= alpha.sum();

        if (opts.fully_corrective) {
            correct_on_support(gram_, b, alpha);
            residual = samples_ * alpha - target;
            g_alpha = gram_ * alpha;
        } else if ((it + 1) % 64 == 0) {
            // Refresh from scratch periodically to keep incremental drift out.
            residual = samples_ * alpha - target;
            g_alpha = gram_ * alpha;
        } else {
            residual += step * (samples_ * dir);
            g_alpha += step * g_dir;
        }
        out.objective_trace.push_back(objective());
    }
    residual = samples_ * alpha - target;
    out.weights = alpha;
    out.iterations = it;
    out.duality_gap = gap;
    // Final entry re-evaluated from scratch so that residual^2 matches it exactly.
    out.objective_trace.back() = objective();
    out.residual = std::sqrt(std::max(0.0, out.objective_trace.back()));
    return out;
}

ProjectionResult project_to_hull(const ScalarFn& target, const BasisSet& basis, int channel,
                                 const QuadratureSpec& quad, const ProjectionOptions& opts) {
    return HullProjector(basis, channel, quad).project(target, opts);
}

double theorem1_bound(double m_g, double target_norm, int n) {
    require(n >= 0 && n <= kMaxStateDim, "theorem1_bound: n out of range");
    require(m_g >= 0.0 && target_norm >= 0.0, "theorem1_bound: norms must be nonnegative");
    const double radicand = (m_g * m_g - target_norm * target_norm) / static_cast<double>(subset_count(n));
    return radicand_sqrt(radicand, m_g * m_g, "theorem1_bound");
}

double corollary1_bound(int m, double m_g, const std::vector<double>& channel_norms, int n) {
    require(m >= 1, "corollary1_bound: m must be positive");
    require(static_cast<int>(channel_norms.size()) == m, "corollary1_bound: need one norm per channel");
    require(n >= 0 && n <= kMaxStateDim, "corollary1_bound: n out of range");
    double sum_sq = 0.0;
    for (double v : channel_norms) {
        require(v >= 0.0, "corollary1_bound: norms must be nonnegative");
        sum_sq += v * v;
    }
    const double radicand = (m * m_g * m_g - sum_sq) / static_cast<double>(subset_count(n));
    return radicand_sqrt(radicand, m * m_g * m_g, "corollary1_bound");
}

double compute_M_g(const BasisSet& basis, const QuadratureSpec& quad) {
    const QuadratureRule rule = make_rule(basis.box(), quad);
    const auto count = static_cast<Eigen::Index>(basis.basis_count());
    Matrix sq = Matrix::Zero(basis.input_dim(), count);
    for (Eigen::Index k = 0; k < rule.points.cols(); ++k) {
        const Matrix vals = basis.gamma() * basis.eval_all(rule.points.col(k));
        sq += rule.weights(k) * vals.cwiseAbs2();
    }
    if (!sq.allFinite()) throw NumericError("compute_M_g: non-finite basis values");
    return std::sqrt(std::max(0.0, sq.maxCoeff()));
}

BoundReport make_bound_report(double achieved_error, double thm1, double cor1, double tolerance) {
    BoundReport r;
    r.achieved_error = achieved_error;
    r.theorem1_bound = thm1;
    r.corollary1_bound = cor1;
    r.tolerance = tolerance;
    r.satisfied = achieved_error <= thm1 + tolerance;
    return r;
}

}  // namespace tsalc
