#include "doctest.h"

#include "support.hpp"
#include "tsalc/cost.hpp"
#include "tsalc/plant_sim.hpp"

using namespace tsalc;
using namespace testing_support;

namespace {

Vector scalar(double x) { return Vector::Constant(1, x); }

StateBox unit_box() { return StateBox(scalar(-1), scalar(1)); }

NoiseSpec quiet() {
    NoiseSpec n;
    n.family = "none";
    return n;
}

// x' = 0.5 x + u
PlantModel linear_plant(NoiseSpec noise = quiet()) {
    return PlantModel::polynomial(1, 1, {{{0.5, {1, 0}}, {1.0, {0, 1}}}}, noise, unit_box(), scalar(1.0));
}

// u = -0.2 x, reproduced exactly by uniform weights with Gamma = 2.
BasisSet feedback_basis() {
    return BasisSet(InitialLaw::linear_feedback(Matrix::Constant(1, 1, 0.2), scalar(0), scalar(0)), scalar(0), 2.0,
                    unit_box());
}

CostSpec quadratic(double q, double r, std::size_t k) {
    CostSpec c;
    c.Q = Matrix::Constant(1, 1, q);
    c.R = Matrix::Constant(1, 1, r);
    c.horizon = k;
    c.floor = 1e-6;
    return c;
}

Segment hand_segment(std::vector<double> xs, std::vector<double> us) {
    Segment s;
    for (double x : xs) s.states.push_back(scalar(x));
    for (double u : us) s.inputs.push_back(scalar(u));
    return s;
}

}  // namespace

TEST_CASE("single steps") {
    Rng rng = make_rng(1);
    const StepOutcome lin = step(linear_plant(), scalar(1.0), scalar(0.0), rng);
    CHECK(lin.state(0) == 0.5);
    CHECK_FALSE(lin.saturated);

    const PlantModel logi = PlantModel::logistic(2.5, quiet(), StateBox(scalar(0), scalar(1)), scalar(0.4));
    CHECK(step(logi, scalar(0.4), scalar(0.0), rng).state(0) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(step(logi, scalar(0.4), scalar(0.1), rng).state(0) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK_THROWS_AS(step(logi, Vector::Zero(2), scalar(0.0), rng), InvalidInput);
}

TEST_CASE("states past the guard are clipped and flagged") {
    Rng rng = make_rng(2);
    const PlantModel p = linear_plant();
    const StepOutcome out = step(p, scalar(0.0), scalar(1e6), rng);
    CHECK(out.saturated);
    CHECK(out.state(0) == doctest::Approx(p.guard_radius()));
}

TEST_CASE("non-finite dynamics throw PlantBlowup") {
    const PlantModel bad(
        "bad", 1, 1, [](const Vector&, const Vector&, const Vector&) { return scalar(std::nan("")); }, quiet(),
        unit_box(), scalar(0));
    Rng rng = make_rng(3);
    CHECK_THROWS_AS(step(bad, scalar(0), scalar(0), rng, 7), PlantBlowup);
    try {
        step(bad, scalar(0), scalar(0), rng, 7);
    } catch (const PlantBlowup& e) {
        CHECK(e.segment() == 7);
    }
}

TEST_CASE("hand-computed K=5 rollout") {
    const BasisSet basis = feedback_basis();
    const Segment seg = rollout_segment(linear_plant(), basis, ControllerWeights::uniform(1, 1), 5, 99, 0);
    REQUIRE(seg.states.size() == 6);
    REQUIRE(seg.inputs.size() == 5);
    double x = 1.0;
    double expected_cost = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(seg.states[k](0) == doctest::Approx(x).epsilon(1e-14));
        CHECK(seg.inputs[k](0) == doctest::Approx(-0.2 * x).epsilon(1e-14));
        expected_cost += x * x + 0.04 * x * x;
        x *= 0.3;
    }
    CHECK(seg.states[5](0) == doctest::Approx(x).epsilon(1e-14));
    expected_cost += x * x;
    CHECK(segment_cost(quadratic(1, 1, 5), seg) == doctest::Approx(expected_cost).epsilon(1e-13));
}

TEST_CASE("K=1 rollout starts at x0") {
    const Segment seg = rollout_segment(linear_plant(), feedback_basis(), ControllerWeights::uniform(1, 1), 1, 5, 3);
    CHECK(seg.index == 3);
    CHECK(seg.horizon() == 1);
    CHECK(seg.states.front()(0) == 1.0);
    CHECK(seg.states.back()(0) == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("rollouts are reproducible from (seed, segment)") {
    NoiseSpec noise;
    noise.scale = 0.05;
    const PlantModel p = linear_plant(noise);
    const BasisSet basis = feedback_basis();
    const ControllerWeights w = ControllerWeights::uniform(1, 1);
    const Segment a = rollout_segment(p, basis, w, 20, 42, 4);
    const Segment b = rollout_segment(p, basis, w, 20, 42, 4);
    const Segment c = rollout_segment(p, basis, w, 20, 42, 5);
    bool same = true, differs = false;
    for (std::size_t k = 0; k <= 20; ++k) {
        same = same && a.states[k] == b.states[k];
        differs = differs || a.states[k] != c.states[k];
    }
    CHECK(same);
    CHECK(differs);
}

TEST_CASE("truncated noise stays within its bound") {
    NoiseSpec noise;
    noise.scale = 0.1;
    noise.truncation = 2.0;
    const PlantModel p = PlantModel::polynomial(2, 1, {{{1.0, {1, 0, 0}}}, {{1.0, {0, 1, 0}}}}, noise,
                                                StateBox(Vector::Constant(2, -1), Vector::Constant(2, 1)),
                                                Vector::Zero(2));
    Rng rng = make_rng(4);
    double widest = 0.0;
    for (int k = 0; k < 5000; ++k) widest = std::max(widest, p.draw_noise(rng).cwiseAbs().maxCoeff());
    CHECK(widest <= noise.bound());
    CHECK(widest > 0.5 * noise.bound());
}

TEST_CASE("quadratic segment cost examples") {
    // 1 + 0.09 + 0.2^2 with Q = R = 1.
    CHECK(segment_cost(quadratic(1, 1, 1), hand_segment({1.0, 0.2}, {0.3})) == doctest::Approx(1.13).epsilon(1e-15));
    // Q = 2, R = 0.1: stage costs 2 + 0.025 and 0.5.
    CHECK(segment_cost(quadratic(2, 0.1, 1), hand_segment({1.0, 0.5}, {0.5})) ==
          doctest::Approx(2.0 + 0.025 + 0.5).epsilon(1e-15));
    CHECK(segment_cost(quadratic(1, 1, 1), hand_segment({0.0, 0.0}, {0.0})) == 1e-6);
    CHECK_THROWS_AS(segment_cost(quadratic(1, 1, 2), hand_segment({1.0, 0.5}, {0.5})), InvalidInput);
}

TEST_CASE("cost is invariant under a sign flip of the trajectory") {
    Rng rng = make_rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> xs, us;
        for (int k = 0; k < 6; ++k) xs.push_back(uniform(rng, -2, 2));
        for (int k = 0; k < 5; ++k) us.push_back(uniform(rng, -2, 2));
        std::vector<double> nx, nu;
        for (double v : xs) nx.push_back(-v);
        for (double v : us) nu.push_back(-v);
        const CostSpec c = quadratic(uniform(rng, 0.1, 3), uniform(rng, 0.1, 3), 5);
        CHECK(segment_cost(c, hand_segment(xs, us)) == segment_cost(c, hand_segment(nx, nu)));
        CHECK(segment_cost(c, hand_segment(xs, us)) >= c.floor);
    }
}

TEST_CASE("discounted cost approaches the quadratic cost as alpha shrinks") {
    const Segment seg = hand_segment({1.0, 0.8, 0.6, 0.4}, {0.2, 0.1, 0.05});
    const CostSpec plain = quadratic(1, 1, 3);
    CostSpec risk = plain;
    risk.kind = CostKind::risk_sensitive;
    double prev_gap = std::numeric_limits<double>::infinity();
    for (double alpha : {1.0, 0.1, 0.01, 1e-4, 1e-8}) {
        risk.alpha_risk = alpha;
        const double gap = segment_cost(plain, seg) - segment_cost(risk, seg);
        CHECK(gap >= 0.0);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap <= 1e-7);
    risk.alpha_risk = 0.5;
    double expected = 0.0;
    const double xs[] = {1.0, 0.8, 0.6, 0.4};
    const double us[] = {0.2, 0.1, 0.05, 0.0};
    for (int k = 0; k < 4; ++k) expected += std::exp(-0.5 * k) * (xs[k] * xs[k] + us[k] * us[k]);
    CHECK(segment_cost(risk, seg) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("cost spec validation") {
    CostSpec c = quadratic(1, 1, 1);
    c.Q = Matrix{{2, 1}, {1, 2}};
    CHECK_NOTHROW(validate_spec(c));
    CHECK(validate_spec(c).warnings.size() == 1);
    c.lipschitz = 3.0;
    CHECK(validate_spec(c).warnings.empty());

    c.Q = Matrix{{1, 2}, {2, 1}};  // eigenvalues 3 and -1
    CHECK_THROWS_AS(validate_spec(c), InvalidInput);
    c.Q = Matrix{{1, 0.5}, {0, 1}};
    CHECK_THROWS_AS(validate_spec(c), InvalidInput);
    c = quadratic(1, 1, 1);
    c.floor = 0.0;
    CHECK_THROWS_AS(validate_spec(c), InvalidInput);
    c = quadratic(1, 1, 1);
    c.kind = CostKind::risk_sensitive;
    CHECK_THROWS_AS(validate_spec(c), InvalidInput);
    CHECK(CostSpec::default_floor(Matrix{{2, 1}, {1, 2}}) == doctest::Approx(4e-6).epsilon(1e-15));
}
