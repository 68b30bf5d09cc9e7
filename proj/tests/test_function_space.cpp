#include "doctest.h"

#include "support.hpp"
#include "tsalc/function_space.hpp"

using namespace tsalc;
using namespace testing_support;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

StateBox cube(int n, double lo, double hi) { return StateBox(Vector::Constant(n, lo), Vector::Constant(n, hi)); }

InitialLaw square_law() {
    return InitialLaw(1, 1, [](const Vector& x) { return Vector::Constant(1, x(0) * x(0)); }, "square");
}

InitialLaw product_law() {
    return InitialLaw(2, 1, [](const Vector& x) { return Vector::Constant(1, x(0) * x(1)); }, "product");
}

}  // namespace

TEST_CASE("mask_vector examples") {
    CHECK(mask_vector(vec({1, 2, 3}), vec({9, 9, 9}), 0) == vec({9, 9, 9}));
    // {1,3} in one-based coordinates is bits 0 and 2.
    CHECK(mask_vector(vec({1, 2, 3}), vec({0, 5, 0}), 0b101) == vec({1, 5, 3}));
    CHECK(mask_vector(vec({1, 2, 3}), vec({0, 5, 0}), 0b111) == vec({1, 2, 3}));
    CHECK_THROWS_AS(mask_vector(vec({1, 2}), vec({0, 0}), 0b100), InvalidInput);
}

TEST_CASE("mask_vector is idempotent") {
    Rng rng = make_rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + trial % 5;
        const Vector x = uniform_vector(rng, n, -3, 3);
        const Vector a = uniform_vector(rng, n, -3, 3);
        const auto w = static_cast<SubsetMask>(rng() % subset_count(n));
        const Vector once = mask_vector(x, a, w);
        CHECK(mask_vector(once, a, w) == once);
    }
}

TEST_CASE("box_hull examples") {
    const StateBox sym = box_hull({vec({1, -2})}, true);
    CHECK(sym.lower == vec({-2, -2}));
    CHECK(sym.upper == vec({2, 2}));

    const StateBox point = box_hull({vec({0, 0})});
    CHECK(point.lower == vec({0, 0}));
    CHECK(point.upper == vec({0, 0}));

    const StateBox b = box_hull({vec({1, 0}), vec({0, 3})});
    CHECK(b.lower == vec({0, 0}));
    CHECK(b.upper == vec({1, 3}));

    CHECK_THROWS_AS(box_hull({}), InvalidInput);
}

TEST_CASE("masked vectors stay in the box: examples") {
    CHECK(proposition1_check(cube(2, -1, 1), vec({1, -1}), vec({-1, 1}), 0b01));
    CHECK(proposition1_check(cube(3, 0, 0), vec({0, 0, 0}), vec({0, 0, 0}), 0b110));
    Rng rng = make_rng(5);
    const StateBox unit = cube(2, 0, 1);
    const Vector x = random_point(rng, unit);
    const Vector a = random_point(rng, unit);
    for (SubsetMask w = 0; w < 4; ++w) CHECK(proposition1_check(unit, x, a, w));
}

TEST_CASE("masked vectors stay in every box_hull box") {
    Rng rng = make_rng(6);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + trial % 4;
        std::vector<Vector> samples;
        for (int k = 0; k < 6; ++k) samples.push_back(uniform_vector(rng, n, -5, 5));
        for (bool symmetric : {false, true}) {
            const StateBox box = box_hull(samples, symmetric);
            for (const auto& x : samples)
                for (const auto& a : samples)
                    for (SubsetMask w = 0; w < subset_count(n); ++w) CHECK(proposition1_check(box, x, a, w));
        }
    }
}

TEST_CASE("recursive basis examples") {
    const BasisSet sq(square_law(), vec({0}), 1.0, cube(1, -3, 3));
    CHECK(sq.eval_recursive(0, 0, vec({2})) == 0.0);
    CHECK(sq.eval_recursive(0, 1, vec({2})) == doctest::Approx(4.0).epsilon(1e-15));

    const BasisSet prod(product_law(), vec({1, 1}), 1.0, cube(2, 0, 4));
    CHECK(prod.eval_recursive(0, 0b11, vec({2, 3})) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(prod.eval_closed(0, 0b11, vec({2, 3})) == doctest::Approx(2.0).epsilon(1e-15));
    // Empty subset returns the law at the anchor regardless of x.
    CHECK(prod.eval_recursive(0, 0, vec({3, 0.5})) == 1.0);
    CHECK(prod.eval_closed(0, 0, vec({3, 0.5})) == 1.0);
}

TEST_CASE("closed form vanishes at the anchor") {
    Rng rng = make_rng(7);
    for (int n = 1; n <= 4; ++n) {
        const StateBox box = cube(n, -1, 1);
        const Vector anchor = random_point(rng, box);
        const BasisSet basis(random_trig_law(rng, n, 2), anchor, BasisSet::default_gamma(n), box);
        for (int i = 0; i < 2; ++i)
            for (SubsetMask w = 1; w < subset_count(n); ++w) {
                CHECK(std::abs(basis.eval_closed(i, w, anchor)) <= 1e-12);
                CHECK(std::abs(basis.eval_recursive(i, w, anchor)) <= 1e-12);
            }
    }
}

TEST_CASE("recursive, closed form and the oracle agree") {
    Rng rng = make_rng(8);
    for (int n = 1; n <= 4; ++n) {
        for (int m = 1; m <= 2; ++m) {
            for (int kind = 0; kind < 2; ++kind) {
                const StateBox box = cube(n, -1.5, 1.5);
                const Vector anchor = random_point(rng, box);
                InitialLaw law = kind == 0 ? random_cubic_law(rng, n, m) : random_trig_law(rng, n, m);
                const BasisSet basis(law, anchor, BasisSet::default_gamma(n), box);
                for (int k = 0; k < 25; ++k) {
                    const Vector x = random_point(rng, box);
                    const Matrix all = basis.eval_all(x);
                    for (int i = 0; i < m; ++i) {
                        double sum = 0.0;
                        for (SubsetMask w = 0; w < subset_count(n); ++w) {
                            const double oracle = inclusion_exclusion(law, i, members(w, n), x, anchor);
                            const double rec = basis.eval_recursive(i, w, x);
                            const double closed = basis.eval_closed(i, w, x);
                            CHECK(std::abs(rec - oracle) <= 1e-9 * (1 + std::abs(oracle)));
                            CHECK(std::abs(closed - oracle) <= 1e-9 * (1 + std::abs(oracle)));
                            CHECK(std::abs(all(i, w) - oracle) <= 1e-9 * (1 + std::abs(oracle)));
                            sum += rec;
                        }
                        CHECK(std::abs(sum - law(x)(i)) <= 1e-9 * (1 + std::abs(law(x)(i))));
                    }
                }
            }
        }
    }
}

TEST_CASE("controller_eval examples") {
    Rng rng = make_rng(9);
    const int n = 3;
    const StateBox box = cube(n, -1, 1);
    const Vector anchor = random_point(rng, box);
    const InitialLaw law = random_cubic_law(rng, n, 2);
    const double gamma = BasisSet::default_gamma(n);
    const BasisSet basis(law, anchor, gamma, box);

    const ControllerWeights empty_mass = ControllerWeights::vertex(n, {0, 0});
    const Vector x = random_point(rng, box);
    const Vector u_empty = controller_eval(basis, empty_mass, x);
    CHECK((u_empty - gamma * law(anchor)).cwiseAbs().maxCoeff() <= 1e-12);

    const Vector u_uniform = controller_eval(basis, ControllerWeights::uniform(2, n), x);
    CHECK((u_uniform - law(x)).cwiseAbs().maxCoeff() <= 1e-9);

    Matrix a(2, 8);
    for (int i = 0; i < 2; ++i) a.row(i) = random_mass(rng, 8).transpose();
    const ControllerWeights w(a);
    const Vector at_anchor = controller_eval(basis, w, anchor);
    for (int i = 0; i < 2; ++i) CHECK(std::abs(at_anchor(i) - a(i, 0) * gamma * law(anchor)(i)) <= 1e-12);

    Matrix bad = a;
    bad(0, 0) += 0.1;
    CHECK_THROWS_AS(controller_eval(basis, ControllerWeights(bad), x), InvalidInput);
}

TEST_CASE("controller_eval is affine in the weights") {
    Rng rng = make_rng(10);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + trial % 4;
        const StateBox box = cube(n, -1, 1);
        const BasisSet basis(random_trig_law(rng, n, 2), random_point(rng, box), BasisSet::default_gamma(n), box);
        const auto k = static_cast<int>(subset_count(n));
        Matrix a(2, k), b(2, k);
        for (int i = 0; i < 2; ++i) {
            a.row(i) = random_mass(rng, k).transpose();
            b.row(i) = random_mass(rng, k).transpose();
        }
        const double lambda = uniform01(rng);
        const Vector x = random_point(rng, box);
        const Vector mixed = controller_eval(basis, ControllerWeights(lambda * a + (1 - lambda) * b), x);
        const Vector separate = lambda * controller_eval(basis, ControllerWeights(a), x) +
                                (1 - lambda) * controller_eval(basis, ControllerWeights(b), x);
        CHECK((mixed - separate).cwiseAbs().maxCoeff() <= 1e-12 * (1 + separate.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("state dimension is capped at 12") {
    auto law_of = [](int n) {
        return InitialLaw(n, 1, [](const Vector& x) { return Vector::Constant(1, x.sum()); });
    };
    CHECK_NOTHROW(law_of(12));
    CHECK_THROWS_AS(law_of(13), InvalidInput);
}

TEST_CASE("basis construction rejects bad inputs") {
    CHECK_THROWS_AS(BasisSet(square_law(), vec({5}), 1.0, cube(1, -1, 1)), InvalidInput);
    CHECK_THROWS_AS(BasisSet(square_law(), vec({0}), 0.0, cube(1, -1, 1)), InvalidInput);
    CHECK_THROWS_AS(StateBox(vec({1}), vec({0})), InvalidInput);
}
