#include "rovella/flow_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "rovella/errors.hpp"

namespace rovella {

Point3 linear_flow(const Point3& p, double s, const FlowParams& params) {
    if (s < 0.0) throw DomainError("linear flow is only used forward in time");
    return {p.x * std::exp(params.lambda1 * s), p.y * std::exp(params.lambda2 * s),
            p.z * std::exp(params.lambda3 * s)};
}

double exit_time(double x0, const FlowParams& params) {
    if (x0 == 0.0) throw InfiniteTimeError("x0 = 0 lies on the singular line and never exits");
    if (std::abs(x0) > 0.5) throw DomainError("exit time needs 0 < |x0| <= 1/2");
    return -std::log(std::abs(x0)) / params.lambda1;
}

Point3 cusp_map_L(const SectionPoint& p, const FlowParams& params) {
    if (p.x == 0.0) throw DomainError("L is undefined on the singular line x = 0");
    const double ax = std::abs(p.x);
    return {p.x > 0.0 ? 1.0 : -1.0, p.y * std::pow(ax, params.beta()), std::pow(ax, params.ell())};
}

SectionPoint connecting_map(Side side, const Point3& p, const FlowParams& params) {
    const double sign = side == Side::plus ? 1.0 : -1.0;
    if (p.x != sign) throw DomainError("connecting map expects a point on the matching exit face |x| = 1");
    // R: (x, y, z) -> (+-z, y, +-x); E: first coordinate scaled by rho;
    // T: translate by (d_i, cy, 0) and land on z = 1.
    const double rx = sign * p.z;
    const double ex = params.rho * rx;
    const double d = side == Side::plus ? -0.5 : 0.5;
    const double cy = side == Side::plus ? params.cy_plus : params.cy_minus;
    return {ex + d, p.y + cy};
}

SectionPoint poincare_return(const SectionPoint& p, const FlowParams& params) {
    if (p.x == 0.0) throw DomainError("no return from the singular line x = 0");
    return connecting_map(p.x > 0.0 ? Side::plus : Side::minus, cusp_map_L(p, params), params);
}

double fiber_derivative(double x, const FlowParams& params) {
    return std::pow(std::abs(x), params.beta());
}

double cross_derivative(double x, double y, const FlowParams& params) {
    if (x == 0.0) return 0.0;
    const double b = params.beta();
    return (x > 0.0 ? 1.0 : -1.0) * b * std::pow(std::abs(x), b - 1.0) * y;
}

// --- roof -----------------------------------------------------------------

RoofFunction RoofFunction::logarithmic(double lambda1, double tau_c, double center) {
    if (!(lambda1 > 0.0)) throw DomainError("logarithmic roof needs lambda1 > 0");
    return RoofFunction(lambda1, tau_c, center);
}

RoofFunction RoofFunction::from_flow(const FlowParams& params) {
    return logarithmic(params.lambda1, params.tau_c, 0.0);
}

RoofFunction RoofFunction::constant(double value) {
    if (!(value > 0.0)) throw DomainError("constant roof must be positive");
    return RoofFunction(0.0, value, 0.0);
}

double RoofFunction::operator()(double x) const {
    if (is_constant()) return offset_;
    if (x == center_) throw InfiniteTimeError("roof is infinite on the singular line");
    return -std::log(std::abs(x - center_)) / lambda1_ + offset_;
}

double RoofFunction::integral(double a, double b) const {
    if (is_constant()) return offset_ * (b - a);
    auto F = [](double u) { return u == 0.0 ? 0.0 : u * std::log(std::abs(u)) - u; };
    return -(F(b - center_) - F(a - center_)) / lambda1_ + offset_ * (b - a);
}

double roof(double x, const FlowParams& params) { return exit_time(x, params) + params.tau_c; }

// --- trajectories ---------------------------------------------------------

const char* to_string(Phase phase) { return phase == Phase::linear ? "linear" : "connecting"; }

Point3 TrajectorySegment::sample(double s) const {
    if (kind == Phase::linear) {
        return {start.x * std::exp(lambda1 * s), start.y * std::exp(lambda2 * s),
                start.z * std::exp(lambda3 * s)};
    }
    const double u = duration > 0.0 ? s / duration : 1.0;
    return {start.x + (end.x - start.x) * u, start.y + (end.y - start.y) * u,
            start.z + (end.z - start.z) * u};
}

SimulationResult simulate(const SectionPoint& p, std::size_t n_returns, const FlowParams& params,
                          const SimulationOptions& options) {
    params.validate();
    SimulationResult out;
    out.hits.push_back(p);
    out.return_times.push_back(0.0);
    SectionPoint cur = p;
    double clock = 0.0;
    for (std::size_t step = 0; step < n_returns; ++step) {
        if (std::abs(cur.x) < options.x_min_cutoff) {
            std::ostringstream msg;
            msg << "orbit reached |x| = " << std::abs(cur.x) << " < cutoff at step " << step;
            throw NearSingularityError(msg.str(), step);
        }
        TrajectorySegment lin;
        lin.kind = Phase::linear;
        lin.start = {cur.x, cur.y, 1.0};
        lin.duration = exit_time(cur.x, params);
        lin.lambda1 = params.lambda1;
        lin.lambda2 = params.lambda2;
        lin.lambda3 = params.lambda3;
        lin.end = cusp_map_L(cur, params);

        const SectionPoint next = connecting_map(cur.x > 0.0 ? Side::plus : Side::minus, lin.end, params);
        TrajectorySegment con;
        con.kind = Phase::connecting;
        con.start = lin.end;
        con.end = {next.x, next.y, 1.0};
        con.duration = params.tau_c;

        for (const auto& seg : {lin, con}) {
            if (options.sample_dt > 0.0) {
                // samples sit on the global grid k * dt
                auto k = static_cast<long long>(std::ceil(clock / options.sample_dt));
                for (;; ++k) {
                    const double t = static_cast<double>(k) * options.sample_dt;
                    if (t >= clock + seg.duration) break;
                    out.samples.push_back({t, seg.sample(t - clock), seg.kind});
                }
            }
            clock += seg.duration;
            out.segments.push_back(seg);
        }
        out.hits.push_back(next);
        out.return_times.push_back(lin.duration + con.duration);
        cur = next;
    }
    if (options.sample_dt > 0.0) {
        out.samples.push_back({clock, {cur.x, cur.y, 1.0},
                               out.segments.empty() ? Phase::linear : Phase::connecting});
    }
    return out;
}

// --- hyperbolicity diagnostics --------------------------------------------

DominationReport domination_check(const FlowParams& params, const std::vector<double>& s_grid) {
    DominationReport rep;
    rep.rate = params.lambda2 - params.lambda3;
    for (double s : s_grid) {
        if (s < 0.0) throw DomainError("domination check needs s >= 0");
        // ||Df_s|E^s|| = e^{l2 s}; ||Df_{-s}|E^cu|| = e^{-l3 s} since l3 < 0 < l1
        const double prod = std::exp(params.lambda2 * s) * std::exp(-params.lambda3 * s);
        rep.products.emplace_back(s, prod);
        if (s > 0.0 && !(prod < 1.0)) rep.passed = false;
    }
    return rep;
}

FiberContractionReport fiber_contraction_check(const FlowParams& params, std::size_t n,
                                               std::size_t samples, std::uint64_t seed) {
    if (n < 1) throw DomainError("fiber contraction check needs n >= 1");
    FiberContractionReport rep;
    const double beta = params.beta();
    rep.lambda = std::pow(0.5, beta);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(-0.5, 0.5);
    for (std::size_t k = 0; k < samples; ++k) {
        SectionPoint a{ux(rng), ux(rng)};
        SectionPoint b{a.x, ux(rng)};
        const double d0 = std::abs(a.y - b.y);
        double product = 1.0;
        bool skip = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(a.x) < 1e-12) {
                skip = true;
                break;
            }
            const double step = std::pow(std::abs(a.x), beta);
            product *= step;
            rep.max_step_ratio = std::max(rep.max_step_ratio, step);
            a = poincare_return(a, params);
            b = poincare_return(b, params);
        }
        if (skip) {
            ++rep.skipped;
            continue;
        }
        ++rep.used;
        if (d0 == 0.0) continue;
        const double dn = std::abs(a.y - b.y);
        rep.best_constant = std::max(rep.best_constant, dn / (std::pow(rep.lambda, double(n)) * d0));
        rep.max_product_mismatch = std::max(rep.max_product_mismatch, std::abs(dn - product * d0));
    }
    rep.passed = rep.max_step_ratio <= rep.lambda && rep.best_constant <= 1.0 + 1e-9 &&
                 rep.max_product_mismatch <= 1e-14;
    return rep;
}

} // namespace rovella
