#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rovella/errors.hpp"
#include "rovella/flow_geometry.hpp"

using namespace rovella;

namespace {
const FlowParams p0{};
}

TEST_CASE("linear flow and exit time") {
    const Point3 origin = linear_flow({0, 0, 0}, 3.0, p0);
    CHECK(origin.x == 0.0);
    CHECK(origin.y == 0.0);
    CHECK(origin.z == 0.0);

    CHECK(exit_time(std::exp(-1.0), p0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(exit_time(0.25, p0) == doctest::Approx(std::log(4.0)).epsilon(1e-15));
    CHECK_THROWS_AS(exit_time(0.0, p0), InfiniteTimeError);
    CHECK(exit_time(0.01, p0) > exit_time(0.1, p0));

    const Point3 out = linear_flow({0.25, 0.5, 1.0}, exit_time(0.25, p0), p0);
    CHECK(out.x == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(out.z == doctest::Approx(oracle::quarter_pow_ell).epsilon(1e-13));
}

TEST_CASE("linear flow semigroup") {
    const Point3 p{0.3, -0.2, 0.9};
    const Point3 a = linear_flow(linear_flow(p, 0.7, p0), 1.3, p0);
    const Point3 b = linear_flow(p, 2.0, p0);
    CHECK(std::abs(a.x - b.x) <= 1e-12);
    CHECK(std::abs(a.y - b.y) <= 1e-12);
    CHECK(std::abs(a.z - b.z) <= 1e-12);
}

TEST_CASE("cusp map L") {
    const Point3 q = cusp_map_L({0.25, 0.5}, p0);
    CHECK(q.x == 1.0);
    CHECK(q.y == doctest::Approx(0.5 * oracle::quarter_pow_beta).epsilon(1e-13));
    CHECK(q.z == doctest::Approx(oracle::quarter_pow_ell).epsilon(1e-13));

    const Point3 r = cusp_map_L({-0.5, 0.0}, p0);
    CHECK(r.x == -1.0);
    CHECK(r.y == 0.0);
    CHECK(r.z == doctest::Approx(std::pow(0.5, 1.1)).epsilon(1e-14));

    const Point3 s = linear_flow({0.25, 0.5, 1.0}, exit_time(0.25, p0), p0);
    CHECK(std::abs(s.y - q.y) <= 1e-12);
    CHECK(std::abs(s.z - q.z) <= 1e-12);
    CHECK_THROWS_AS(cusp_map_L({0.0, 0.1}, p0), DomainError);
}

TEST_CASE("connecting map") {
    const Point3 q = cusp_map_L({0.25, 0.5}, p0);
    const SectionPoint back = connecting_map(Side::plus, q, p0);
    CHECK(back.x == doctest::Approx(oracle::f_p0_at_quarter).epsilon(1e-13));
    CHECK(back.y == doctest::Approx(oracle::connecting_y).epsilon(1e-14));

    const SectionPoint minus = connecting_map(Side::minus, {-1.0, 0.0, std::pow(0.5, 1.1)}, p0);
    CHECK(minus.x == doctest::Approx(-oracle::f_p0_at_half).epsilon(1e-13));
    CHECK(minus.y == doctest::Approx(p0.cy_minus));

    CHECK_THROWS_AS(connecting_map(Side::plus, {0.5, 0.0, 0.2}, p0), DomainError);
}

TEST_CASE("poincare return matches the interval map and fiber formula") {
    const SectionPoint q = poincare_return({0.25, 0.5}, p0);
    CHECK(q.x == doctest::Approx(oracle::f_p0_at_quarter).epsilon(1e-13));
    CHECK(q.y == doctest::Approx(oracle::connecting_y).epsilon(1e-14));
    CHECK_THROWS_AS(poincare_return({0.0, 0.0}, p0), DomainError);

    const CuspMap f = rovella_map_from_flow(p0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int k = 0; k < 10000; ++k) {
        const SectionPoint p{u(rng), u(rng)};
        if (p.x == 0.0) continue;
        const SectionPoint a = poincare_return(p, p0);
        const SectionPoint b = poincare_return({p.x, u(rng)}, p0);
        REQUIRE(std::abs(a.x - eval_map(f, p.x)) <= 1e-9);
        REQUIRE(a.x == b.x);  // stable leaves map to stable leaves
        const double cy = p.x > 0 ? p0.cy_plus : p0.cy_minus;
        REQUIRE(std::abs(a.y - (p.y * std::pow(std::abs(p.x), 4.5) + cy)) <= 1e-12);
        REQUIRE(fiber_derivative(p.x, p0) <= oracle::half_pow_beta + 1e-12);
        REQUIRE(std::isfinite(cross_derivative(p.x, p.y, p0)));
        const Point3 l = cusp_map_L(p, p0);
        REQUIRE(std::abs(l.y) <= oracle::half_pow_beta * 0.5);
        REQUIRE(l.z <= std::pow(0.5, 1.1));
    }
}

TEST_CASE("roof function") {
    CHECK(roof(std::exp(-1.0), p0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(roof(0.5, p0) == doctest::Approx(1.0 + oracle::log2).epsilon(1e-15));
    CHECK(roof(0.01, p0) > roof(0.1, p0));
    CHECK_THROWS_AS(roof(0.0, p0), InfiniteTimeError);
    for (double x : {0.3, -0.01, 1e-7}) {
        CHECK(roof(x, p0) * p0.lambda1 + std::log(std::abs(x)) == doctest::Approx(p0.tau_c * p0.lambda1));
    }

    const RoofFunction r = RoofFunction::from_flow(p0);
    CHECK(r(0.5) == doctest::Approx(roof(0.5, p0)));
    CHECK(r.integral(-0.5, 0.5) == doctest::Approx(oracle::two_plus_log2).epsilon(1e-14));
    CHECK(r.integral(-0.5, 0.0) + r.integral(0.0, 0.5) == doctest::Approx(oracle::two_plus_log2).epsilon(1e-14));
    CHECK(RoofFunction::constant(2.0).integral(0.0, 1.0) == 2.0);
}

TEST_CASE("simulation") {
    const auto one = simulate({0.25, 0.5}, 1, p0);
    REQUIRE(one.hits.size() == 2);
    CHECK(one.hits[1].x == doctest::Approx(oracle::f_p0_at_quarter).epsilon(1e-13));
    CHECK(one.hits[1].y == doctest::Approx(oracle::connecting_y).epsilon(1e-14));
    CHECK(one.return_times[1] == doctest::Approx(std::log(4.0) + 1.0).epsilon(1e-15));
    REQUIRE(one.segments.size() == 2);
    CHECK(one.segments[0].kind == Phase::linear);
    CHECK(one.segments[1].kind == Phase::connecting);
    const Point3 s0 = one.segments[0].sample(0.0);
    CHECK(s0.x == 0.25);

    const auto none = simulate({0.25, 0.5}, 0, p0);
    CHECK(none.segments.empty());
    CHECK(none.hits.size() == 1);

    const auto many = simulate({0.3, 0.1}, 20, p0);
    SectionPoint cur{0.3, 0.1};
    for (std::size_t n = 1; n < many.hits.size(); ++n) {
        const double r = roof(cur.x, p0);
        cur = poincare_return(cur, p0);
        CHECK(many.hits[n].x == cur.x);
        CHECK(std::abs(many.return_times[n] - r) <= 1e-12);
    }

    try {
        simulate({1e-13, 0.0}, 3, p0);
        FAIL("expected a near-singularity error");
    } catch (const NearSingularityError& e) {
        CHECK(e.step() == 0);
    }
}

TEST_CASE("domination and fiber contraction") {
    const auto dom = domination_check(p0, {0.0, 1.0, 5.0});
    CHECK(dom.rate == doctest::Approx(-3.4));
    CHECK(dom.products[0].second == 1.0);
    CHECK(dom.products[1].second == doctest::Approx(oracle::exp_minus_3_4).epsilon(1e-14));
    CHECK(dom.passed);

    const auto fc = fiber_contraction_check(p0, 3, 2000, 5);
    CHECK(fc.lambda == doctest::Approx(oracle::half_pow_beta).epsilon(1e-14));
    CHECK(fc.max_step_ratio <= fc.lambda);
    CHECK(fc.best_constant <= 1.0);
    CHECK(fc.max_product_mismatch <= 1e-14);
    CHECK(fc.passed);
}
