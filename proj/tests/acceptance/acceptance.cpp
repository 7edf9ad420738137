// End-to-end acceptance run: one PASS/FAIL line per criterion, exit 1 on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rovella/core_maps.hpp"
#include "rovella/flow_geometry.hpp"
#include "rovella/lift.hpp"
#include "rovella/spectrum.hpp"
#include "rovella/thermo.hpp"

using namespace rovella;
namespace fs = std::filesystem;

namespace {

const double log2v = std::log(2.0);
// mean log-derivative of Lebesgue for the (0.4, 0.6) map: 0.4 log 2.5 + 0.6 log(5/3)
const double pl46_lyapunov = 0.4 * std::log(2.5) + 0.6 * std::log(5.0 / 3.0);

struct Outcome {
    bool pass = true;
    std::string detail;
};

class Report {
public:
    void run(const std::string& id, const std::string& title, double budget_s, const std::function<Outcome()>& body) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = body();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (budget_s > 0.0 && secs > budget_s) {
            o.pass = false;
            o.detail += " [over time budget " + std::to_string(budget_s) + " s]";
        }
        if (!o.pass) ++failures_;
        std::printf("%-5s %s  %-44s %8.3f s  %s\n", id.c_str(), o.pass ? "PASS" : "FAIL", title.c_str(), secs,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    int failures() const { return failures_; }

private:
    int failures_ = 0;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

double min_second_difference(const PressureCurve& c) {
    double worst = infinity;
    for (std::size_t i = 1; i + 1 < c.values.size(); ++i) {
        worst = std::min(worst, c.values[i + 1] - 2.0 * c.values[i] + c.values[i - 1]);
    }
    return worst;
}

Outcome ac1() {
    double worst = 0.0;
    for (const auto& w : {std::vector<double>{0.4, 0.6}, std::vector<double>{0.5, 0.5}}) {
        const PLFullBranchMap pl(w);
        const CuspMap f = pl.to_cusp_map();
        for (std::size_t n = 1; n <= 10; ++n) {
            for (double t : {-2.0, -1.0, 0.0, 0.5, 1.0, 2.0}) {
                const double exact = std::log(std::pow(w[0], t) + std::pow(w[1], t));
                worst = std::max(worst, std::abs(periodic_orbit_pressure(f, t, n).value - exact));
            }
        }
    }
    return {worst <= 1e-12, "max error " + fmt(worst)};
}

Outcome ac2() {
    const CuspMap d = PLFullBranchMap::doubling().to_cusp_map();
    double prev = infinity;
    bool monotone = true;
    double e0 = 0.0;
    double e1 = 0.0;
    for (std::size_t N : {256, 512, 1024, 2048, 4096}) {
        e0 = std::abs(ulam_pressure(d, 0.0, N).value - log2v);
        e1 = std::abs(ulam_pressure(d, 1.0, N).value);
        const double err = std::max(e0, e1);
        // the estimate is exact here, so only growth above round-off counts
        if (err > prev + 1e-12) monotone = false;
        prev = err;
    }
    return {e0 <= 5e-3 && e1 <= 5e-3 && monotone,
            "N=4096 errors " + fmt(e0) + ", " + fmt(e1) + (monotone ? ", non-increasing" : ", NOT monotone")};
}

Outcome ac3() {
    const auto grid = linear_grid(-2.0, 0.05, 2.0);
    const PLFullBranchMap pl46({0.4, 0.6});
    std::vector<PressureCurve> curves;
    curves.push_back(closed_form_curve(pl46, grid));
    curves.push_back(closed_form_curve(PLFullBranchMap::doubling(), grid));
    EstimatorConfig po;
    po.method = PressureMethod::periodic_orbit;
    curves.push_back(pressure_curve(pl46.to_cusp_map(), grid, po, 4));
    EstimatorConfig ulam;
    ulam.method = PressureMethod::ulam;
    curves.push_back(pressure_curve(pl46.to_cusp_map(), grid, ulam, 4));
    curves.push_back(pressure_curve(rovella_map_from_flow(FlowParams{}), grid, ulam, 4));
    double worst = infinity;
    bool certified = true;
    for (const auto& c : curves) {
        worst = std::min(worst, min_second_difference(c));
        certified = certified && c.convex;
    }
    return {worst >= -1e-8 && certified, std::to_string(curves.size()) + " curves, min second difference " + fmt(worst)};
}

Outcome ac4() {
    const PLFullBranchMap pl46({0.4, 0.6});
    const auto curve = closed_form_curve(pl46, linear_grid(-2.0, 0.01, 2.0));
    const double dp = pressure_derivative(curve, 1.0).value;
    const auto mu = equilibrium_measure(pl46.to_cusp_map(), 1.0, 1024);
    const double e_closed = std::abs(dp + pl46_lyapunov);
    const double e_ulam = std::abs(dp + mu.lyapunov);
    return {e_closed <= 1e-6 && e_ulam <= 1e-2,
            "Dp(1) = " + std::to_string(dp) + ", |Dp+lambda| " + fmt(e_closed) + ", vs Ulam " + fmt(e_ulam)};
}

Outcome ac5() {
    const PLFullBranchMap pl46({0.4, 0.6});
    const auto curve = closed_form_curve(pl46, linear_grid(-40.0, 0.01, 40.0));
    const auto dom =
        spectrum_domain(curve, admissible_t_range(curve, std::log(5.0 / 3.0), std::log(2.5)));
    auto alphas = auto_alpha_grid(dom, 41);
    alphas.push_back(pl46_lyapunov);
    std::sort(alphas.begin(), alphas.end());
    const auto interval = lyapunov_spectrum_interval(curve, dom, alphas);
    const auto flow = lyapunov_spectrum_flow(curve, dom, alphas);
    double worst_residual = 0.0;
    double peak_error = infinity;
    bool shifted = true;
    std::size_t resolved = 0;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        const auto& s = interval.samples[i];
        if (!s.resolved) continue;
        ++resolved;
        worst_residual = std::max(worst_residual, std::abs(s.residual));
        shifted = shifted && flow.samples[i].L_flow == s.L_interval + 2.0;
        if (s.alpha == pl46_lyapunov) peak_error = std::abs(s.L_interval - 1.0);
    }
    const auto flat = closed_form_curve(PLFullBranchMap::doubling(), linear_grid(-2.0, 0.05, 2.0));
    const auto empty = spectrum_domain(flat, admissible_t_range(flat, log2v, log2v));
    const bool ok = peak_error <= 1e-4 && worst_residual <= 1e-9 && shifted && empty.empty && resolved == alphas.size();
    return {ok, "|L-1| " + fmt(peak_error) + ", residual " + fmt(worst_residual) + ", " + std::to_string(resolved) +
                    " samples, doubling " + (empty.empty ? "empty" : "NOT empty")};
}

Outcome ac6() {
    const FlowParams p0;
    const CuspMap f = rovella_map_from_flow(p0);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    SimulationOptions opts;
    opts.sample_dt = 100.0;
    double worst_map = 0.0;
    double worst_time = 0.0;
    for (int k = 0; k < 10000; ++k) {
        const double x = u(rng);
        const double y = u(rng);
        if (x == 0.0) continue;
        const auto sim = simulate({x, y}, 1, p0, opts);
        const double cy = x > 0 ? p0.cy_plus : p0.cy_minus;
        const double gx = eval_map(f, x);
        const double gy = y * std::pow(std::abs(x), p0.beta()) + cy;
        worst_map = std::max({worst_map, std::abs(sim.hits[1].x - gx), std::abs(sim.hits[1].y - gy)});
        const double r = -std::log(std::abs(x)) / p0.lambda1 + p0.tau_c;
        worst_time = std::max(worst_time, std::abs(sim.return_times[1] - r));
    }
    return {worst_map <= 1e-9 && worst_time <= 1e-12,
            "return map " + fmt(worst_map) + ", return time " + fmt(worst_time)};
}

Outcome ac7() {
    const FlowParams p0;
    const double bound = std::pow(0.5, p0.beta());
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    double sup = 0.0;
    for (int k = 0; k < 100000; ++k) sup = std::max(sup, fiber_derivative(u(rng), p0));
    sup = std::max(sup, fiber_derivative(0.5, p0));
    std::vector<double> s_grid;
    for (int k = 1; k <= 100; ++k) s_grid.push_back(0.1 * k);
    const auto dom = domination_check(p0, s_grid);
    double worst = 0.0;
    for (const auto& [s, prod] : dom.products) worst = std::max(worst, prod);
    return {sup <= bound + 1e-12 && dom.passed && worst < 1.0,
            "sup |d_y g| " + fmt(sup) + " vs " + fmt(bound) + ", max domination product " + fmt(worst)};
}

Outcome ac8() {
    const auto rov = validate_cusp_map(rovella_map_from_flow(FlowParams{}));
    bool ok = true;
    std::string failed;
    for (const char* axiom : {"holder", "crit_derivative", "schwarzian", "f1", "f2", "f3", "f5"}) {
        if (rov.at(axiom).status != CheckStatus::pass) {
            ok = false;
            failed += std::string(" ") + axiom;
        }
    }
    const auto dbl = validate_cusp_map(PLFullBranchMap::doubling().to_cusp_map());
    const bool dbl_fails = dbl.at("crit_derivative").status == CheckStatus::fail;
    return {ok && dbl_fails, std::string("P0 ") + (ok ? "passes" : "fails" + failed) + "; doubling condition (2) " +
                                 (dbl_fails ? "fails" : "passes")};
}

Outcome ac9() {
    const FlowParams p0;
    const RoofFunction r = RoofFunction::from_flow(p0);
    const auto leb = MeasureApprox::lebesgue(Partition(linear_grid(-0.5, 0.001, 0.5)));
    const double integral = roof_integrability_check(leb, r).value;
    const double two_plus_log2 = 2.0 + log2v;

    const CuspMap f = rovella_map_from_flow(p0);
    const auto mu = equilibrium_measure(f, 1.0, 1024);
    const auto s = suspend(lift_to_square(mu, p0, 60), r);
    const double abramov = std::abs(s.h_flow * s.roof_integral - s.h_base);
    return {std::abs(integral - two_plus_log2) <= 1e-3 && abramov <= 1e-12,
            "roof integral " + std::to_string(integral) + ", |h_flow*R - h_base| " + fmt(abramov)};
}

Outcome ac10() {
    const FlowParams p0;
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    std::vector<double> x;
    std::vector<double> w;
    for (int k = 0; k < 1000; ++k) {
        x.push_back(u(rng));
        w.push_back(1e-3);
    }
    const auto mu = MeasureApprox::atoms(x, w);
    const auto back = project_to_interval(lift_to_square(mu, p0, 60));
    double discrepancy = std::abs(back.total_mass() - mu.total_mass());
    std::vector<std::pair<double, double>> a;
    for (std::size_t i = 0; i < x.size(); ++i) a.emplace_back(x[i], w[i]);
    std::sort(a.begin(), a.end());
    if (back.support.size() != a.size()) discrepancy = infinity;
    for (std::size_t i = 0; i < a.size() && i < back.support.size(); ++i) {
        discrepancy = std::max(discrepancy, std::abs(back.support[i].lo - a[i].first) +
                                                std::abs(back.weights[i] - a[i].second));
    }

    // fixed point x* = 0 of the (0.4, 0.6) map under a uniform (1/2)^beta fiber
    const double c = std::pow(0.5, p0.beta());
    const double bound = std::pow(0.5, p0.beta() * 60.0);
    const auto fixed = lift_to_square(MeasureApprox::atoms({0.0}, {1.0}),
                                      PLFullBranchMap({0.4, 0.6}).to_cusp_map(),
                                      FiberMap::uniform(c, {p0.cy_minus, p0.cy_plus}), 60);
    const double fixed_gap = std::abs(fixed.y[0] - p0.cy_minus / (1.0 - c));

    // period-2 orbit of the return map itself
    const CuspMap f = rovella_map_from_flow(p0);
    std::vector<double> orbit;
    for_each_periodic_orbit(f, 2, [&](const PeriodicOrbit& o) {
        if (orbit.empty() && o.word[0] != o.word[1]) orbit = o.points;
    });
    const auto two = lift_to_square(MeasureApprox::atoms(orbit, {0.5, 0.5}), p0, 60);
    if (two.x.size() != 2) return {false, "period-2 orbit was not lifted"};
    const SectionPoint image = poincare_return({two.x[0], two.y[0]}, p0);
    const std::size_t other = std::abs(two.x[1] - image.x) < std::abs(two.x[0] - image.x) ? 1 : 0;
    const double orbit_gap = std::abs(image.y - two.y[other]) + std::abs(image.x - two.x[other]);

    const bool ok = discrepancy <= 1e-9 && fixed_gap <= 1e-15 && fixed.fiber_residual <= bound &&
                    two.fiber_residual <= bound && orbit_gap <= 1e-12;
    return {ok, "round trip " + fmt(discrepancy) + ", fixed point gap " + fmt(fixed_gap) + ", residual " +
                    fmt(std::max(fixed.fiber_residual, two.fiber_residual)) + " <= " + fmt(bound) +
                    ", period-2 gap " + fmt(orbit_gap)};
}

Outcome ac11() {
    const CuspMap d = PLFullBranchMap::doubling().to_cusp_map();
    const double top = flow_pressure(d, RoofFunction::constant(1.0), FlowPotential::geometric(0.0)).value;
    const double scaled = flow_pressure(d, RoofFunction::constant(2.0), FlowPotential::geometric(0.0)).value;
    // t = 1 normalizes every full-branch affine map: P(-log|Df|) = 0
    const double norm_d = flow_pressure(d, RoofFunction::constant(1.0), FlowPotential::geometric(1.0)).value;
    const CuspMap pl46 = PLFullBranchMap({0.4, 0.6}).to_cusp_map();
    const double norm_pl = flow_pressure(pl46, RoofFunction::constant(1.7), FlowPotential::geometric(1.0)).value;
    const double e1 = std::abs(top - log2v);
    const double e2 = std::abs(scaled - log2v / 2.0);
    const double e3 = std::max(std::abs(norm_d), std::abs(norm_pl));
    return {e1 <= 1e-8 && e2 <= 1e-8 && e3 <= 1e-8,
            "errors " + fmt(e1) + ", " + fmt(e2) + ", normalized " + fmt(e3)};
}

Outcome ac12(const std::string& binary) {
    const fs::path dir = fs::temp_directory_path() / "rovella_acceptance_ac12";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path cfg = dir / "run.cfg";
    {
        std::ofstream out(cfg);
        out << "# default flow, Ulam pressure\nN = 512\nt_grid = -2:0.05:2\nalpha_grid = auto:31\n";
    }
    bool ok = true;
    std::string detail;
    for (const char* cmd : {"pressure", "spectrum"}) {
        for (const char* run : {"a", "b"}) {
            const std::string line = binary + " --config " + cfg.string() + " --out " + (dir / run).string() +
                                     " --jobs " + (run[0] == 'a' ? "1" : "4") + " " + cmd + " > /dev/null 2>&1";
            if (std::system(line.c_str()) != 0) {
                ok = false;
                detail += std::string(cmd) + " run failed; ";
            }
        }
    }
    for (const char* file : {"pressure.csv", "spectrum.csv"}) {
        const std::string a = slurp(dir / "a" / file);
        const std::string b = slurp(dir / "b" / file);
        const bool same = !a.empty() && a == b;
        ok = ok && same;
        detail += std::string(file) + (same ? " identical (" + std::to_string(a.size()) + " bytes); " : " DIFFERS; ");
    }
    return {ok, detail};
}

} // namespace

int main(int argc, char** argv) {
    const std::string binary = argc > 1 ? argv[1] : "rovella";
    Report r;
    r.run("AC1", "periodic-orbit pressure exactness", 5.0, ac1);
    r.run("AC2", "Ulam convergence on the doubling map", 30.0, ac2);
    r.run("AC3", "convexity of produced pressure curves", 0.0, ac3);
    r.run("AC4", "derivative identity Dp(1) = -lambda", 0.0, ac4);
    r.run("AC5", "Legendre spectrum and flow shift", 0.0, ac5);
    r.run("AC6", "flow / return-map consistency", 0.0, ac6);
    r.run("AC7", "fiber contraction and domination", 0.0, ac7);
    r.run("AC8", "cusp-map axiom gate", 0.0, ac8);
    r.run("AC9", "Abramov identity and roof integral", 0.0, ac9);
    r.run("AC10", "lift round trip and fiber fixed point", 0.0, ac10);
    r.run("AC11", "flow pressure oracles", 0.0, ac11);
    r.run("AC12", "byte-identical repeated CLI runs", 0.0, [&] { return ac12(binary); });
    std::printf("%d of 12 criteria failed\n", r.failures());
    return r.failures() == 0 ? 0 : 1;
}
