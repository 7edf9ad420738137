#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rovella/errors.hpp"
#include "rovella/spectrum.hpp"

using namespace rovella;

namespace {

const PLFullBranchMap pl46({0.4, 0.6});

PressureCurve wide_pl_curve(double step = 0.01) {
    return closed_form_curve(pl46, linear_grid(-40.0, step, 40.0));
}

SpectrumDomain pl_domain(const PressureCurve& c) {
    return spectrum_domain(c, admissible_t_range(c, oracle::log_5_3, oracle::log_2_5));
}

} // namespace

TEST_CASE("pressure derivative") {
    const auto c = closed_form_curve(pl46, linear_grid(-2.0, 0.01, 2.0));
    const auto d1 = pressure_derivative(c, 1.0);
    CHECK(std::abs(d1.value + oracle::pl46_lyapunov_leb) <= 1e-6);
    CHECK_FALSE(d1.one_sided);
    CHECK(pressure_derivative(c, -2.0).one_sided);
    CHECK_THROWS_AS(pressure_derivative(c, 2.5), RangeError);

    const auto flat = closed_form_curve(PLFullBranchMap::doubling(), linear_grid(-2.0, 0.25, 2.0));
    for (double t : {-1.9, 0.0, 0.3, 1.0}) {
        CHECK(pressure_derivative(flat, t).value == doctest::Approx(-oracle::log2).epsilon(1e-12));
    }

    const auto wide = wide_pl_curve();
    CHECK(std::abs(pressure_derivative(wide, 39.0).value + oracle::log_5_3) <= 1e-5);
}

TEST_CASE("pressure interpolation") {
    const auto c = closed_form_curve(pl46, linear_grid(-2.0, 0.05, 2.0));
    CHECK(pressure_value(c, 1.0) == c.values[60]);
    CHECK(std::abs(pressure_value(c, 0.5) - oracle::pl46_p_half) <= 1e-14);
    CHECK(std::abs(pressure_value(c, 0.512) - pl_pressure_closed_form(pl46, 0.512)) <= 1e-6);
}

TEST_CASE("spectrum domain") {
    const auto wide = wide_pl_curve();
    const auto dom = pl_domain(wide);
    CHECK_FALSE(dom.empty);
    CHECK(std::abs(dom.alpha1 - oracle::log_5_3) <= 1e-6);
    CHECK(std::abs(dom.alpha2 - oracle::log_2_5) <= 1e-6);

    const auto flat = closed_form_curve(PLFullBranchMap::doubling(), linear_grid(-2.0, 0.25, 2.0));
    const auto empty = spectrum_domain(flat, admissible_t_range(flat, oracle::log2, oracle::log2));
    CHECK(empty.empty);
    CHECK(empty.degenerate_alpha == doctest::Approx(oracle::log2));
    CHECK_THROWS_AS(solve_t_alpha(flat, empty, oracle::log2), RangeError);

    // strictly convex synthetic curve: slopes of t^2 / 2 on [-1, 1]
    std::vector<double> t = linear_grid(-1.0, 0.1, 1.0);
    std::vector<double> p;
    for (double s : t) p.push_back(0.5 * s * s);
    const auto c = PressureCurve::from_samples(t, p, PressureMethod::synthetic, 0, "parabola");
    PressureDomain pd;
    pd.t_minus.value = -infinity;
    pd.t_plus.value = infinity;
    const auto sd = spectrum_domain(c, pd);
    CHECK(sd.alpha1 == doctest::Approx(-0.95));
    CHECK(sd.alpha2 == doctest::Approx(0.95));
}

TEST_CASE("Legendre points") {
    const auto wide = wide_pl_curve();
    const auto dom = pl_domain(wide);
    const auto lp = solve_t_alpha(wide, dom, oracle::pl46_lyapunov_leb);
    CHECK(std::abs(lp.t_alpha - 1.0) <= 1e-4);
    CHECK(std::abs(lp.value - 1.0) <= 1e-4);
    CHECK(std::abs(lp.residual) <= 1e-8);
    CHECK_THROWS_AS(solve_t_alpha(wide, dom, 0.3), RangeError);

    // near the fast end, t_alpha runs towards the left edge of the grid
    const auto edge = solve_t_alpha(wide, dom, oracle::log_2_5 - 1e-6);
    CHECK(edge.t_alpha < -20.0);
}

TEST_CASE("interval and flow spectra of the PL oracle") {
    const auto wide = wide_pl_curve();
    const auto dom = pl_domain(wide);
    std::vector<double> alphas = auto_alpha_grid(dom, 21);
    alphas.push_back(oracle::pl46_lyapunov_leb);
    alphas.push_back(oracle::pl46_p_half);  // outside the domain
    std::sort(alphas.begin(), alphas.end());

    const auto interval = lyapunov_spectrum_interval(wide, dom, alphas);
    const auto flow = lyapunov_spectrum_flow(wide, dom, alphas);
    REQUIRE(interval.samples.size() == alphas.size());
    std::size_t unresolved = 0;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        const auto& s = interval.samples[i];
        if (!s.resolved) {
            ++unresolved;
            continue;
        }
        CHECK(std::abs(s.residual) <= 1e-9);
        CHECK(s.L_interval <= 1.0 + 1e-9);
        CHECK(s.L_interval >= 0.0);
        CHECK(flow.samples[i].L_flow == s.L_interval + 2.0);
        if (s.alpha == oracle::pl46_lyapunov_leb) {
            CHECK(std::abs(s.L_interval - 1.0) <= 1e-4);
            CHECK(std::abs(flow.samples[i].L_flow - 3.0) <= 1e-4);
        }
    }
    CHECK(unresolved == 1);
    CHECK(interval.monotone_t);
    CHECK(interval.duality_margin >= -1e-9);
    CHECK(flow.flow);
}

TEST_CASE("maximal-entropy point of the spectrum") {
    const auto wide = wide_pl_curve();
    const auto dom = pl_domain(wide);
    const double alpha = -pressure_derivative(wide, 0.0).value;
    const auto result = lyapunov_spectrum_interval(wide, dom, {alpha});
    REQUIRE(result.samples[0].resolved);
    CHECK(std::abs(result.samples[0].t_alpha) <= 1e-3);
    CHECK(std::abs(result.samples[0].L_interval - oracle::log2 / alpha) <= 1e-5);
}

TEST_CASE("empty domain gives an empty spectrum") {
    const auto flat = closed_form_curve(PLFullBranchMap::doubling(), linear_grid(-2.0, 0.25, 2.0));
    const auto dom = spectrum_domain(flat, admissible_t_range(flat, oracle::log2, oracle::log2));
    const auto flow = lyapunov_spectrum_flow(flat, dom, {0.6, 0.7});
    CHECK(flow.domain.empty);
    CHECK(flow.samples.empty());
}

TEST_CASE("Birkhoff exponents") {
    const CuspMap d = PLFullBranchMap::doubling().to_cusp_map();
    CHECK(birkhoff_exponent(d, 1.0 / 3.0, 10).value == doctest::Approx(oracle::log2).epsilon(1e-14));

    const CuspMap f = pl46.to_cusp_map();
    CHECK(birkhoff_exponent(f, 0.0, 7).value == doctest::Approx(oracle::log_2_5).epsilon(1e-14));

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto typical = birkhoff_exponent(f, u(rng), 10000);
    CHECK(std::abs(typical.value - oracle::pl46_lyapunov_leb) <= 0.02);

    const CuspMap rov = rovella_map_from_flow(FlowParams{});
    const auto near = birkhoff_exponent(rov, 1e-120, 3);
    REQUIRE(near.near_cusp_step);
    CHECK(*near.near_cusp_step == 0);
}
