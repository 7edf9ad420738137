#include "rovella/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rovella/errors.hpp"

namespace rovella {

namespace {

std::vector<double> node_slopes(const PressureCurve& c) {
    const auto& t = c.t;
    const auto& p = c.values;
    const std::size_t m = t.size();
    std::vector<double> d(m);
    d[0] = (p[1] - p[0]) / (t[1] - t[0]);
    d[m - 1] = (p[m - 1] - p[m - 2]) / (t[m - 1] - t[m - 2]);
    for (std::size_t i = 1; i + 1 < m; ++i) d[i] = (p[i + 1] - p[i - 1]) / (t[i + 1] - t[i - 1]);
    return d;
}

// index i with t[i] <= x <= t[i+1]
std::size_t segment(const std::vector<double>& t, double x) {
    auto it = std::upper_bound(t.begin(), t.end(), x);
    if (it == t.begin()) return 0;
    const auto i = static_cast<std::size_t>(it - t.begin()) - 1;
    return std::min(i, t.size() - 2);
}

void check_in_grid(const PressureCurve& c, double t) {
    if (!(t >= c.t.front() && t <= c.t.back())) {
        std::ostringstream msg;
        msg << "t = " << t << " is outside the curve grid [" << c.t.front() << ", " << c.t.back() << "]";
        throw RangeError(msg.str());
    }
}

double chord(const PressureCurve& c, std::size_t i) {
    return (c.values[i + 1] - c.values[i]) / (c.t[i + 1] - c.t[i]);
}

double quadratic_through(const double* t, const double* y, double x) {
    const double l0 = (x - t[1]) * (x - t[2]) / ((t[0] - t[1]) * (t[0] - t[2]));
    const double l1 = (x - t[0]) * (x - t[2]) / ((t[1] - t[0]) * (t[1] - t[2]));
    const double l2 = (x - t[0]) * (x - t[1]) / ((t[2] - t[0]) * (t[2] - t[1]));
    return y[0] * l0 + y[1] * l1 + y[2] * l2;
}

std::size_t window_start(std::size_t nearest, std::size_t m) {
    if (nearest == 0) return 0;
    return std::min(nearest - 1, m - 3);
}

} // namespace

SlopeEstimate pressure_derivative(const PressureCurve& curve, double t) {
    check_in_grid(curve, t);
    const auto d = node_slopes(curve);
    const std::size_t m = curve.t.size();
    const std::size_t i = segment(curve.t, t);
    const double u = (t - curve.t[i]) / (curve.t[i + 1] - curve.t[i]);
    SlopeEstimate out;
    if (u == 0.0) {
        out.value = d[i];
        out.one_sided = i == 0;
    } else if (u == 1.0) {
        out.value = d[i + 1];
        out.one_sided = i + 1 == m - 1;
    } else {
        out.value = (1.0 - u) * d[i] + u * d[i + 1];
        out.one_sided = i == 0 || i + 1 == m - 1;
    }
    return out;
}

double pressure_value(const PressureCurve& curve, double t) {
    check_in_grid(curve, t);
    const std::size_t m = curve.t.size();
    const std::size_t i = segment(curve.t, t);
    const std::size_t nearest = (t - curve.t[i] <= curve.t[i + 1] - t) ? i : i + 1;
    if (curve.t[nearest] == t) return curve.values[nearest];
    const std::size_t s = window_start(nearest, m);
    return quadratic_through(&curve.t[s], &curve.values[s], t);
}

SpectrumDomain spectrum_domain(const PressureCurve& curve, const PressureDomain& dom) {
    if (!curve.convex) throw DomainError("spectrum domain needs a convex pressure curve");
    const std::size_t m = curve.t.size();
    auto index_of = [&](double t) {
        const auto it = std::find(curve.t.begin(), curve.t.end(), t);
        if (it == curve.t.end()) throw DomainError("domain endpoint is not a node of the curve");
        return static_cast<std::size_t>(it - curve.t.begin());
    };
    SpectrumDomain out;
    // slow end: left derivative at t+ (or the last chord)
    if (std::isinf(dom.t_plus.value)) {
        out.alpha1 = -chord(curve, m - 2);
    } else {
        const std::size_t i1 = index_of(dom.t_plus.value);
        out.alpha1 = -chord(curve, i1 == 0 ? 0 : i1 - 1);
    }
    // fast end: right derivative at t- (or the first chord)
    if (std::isinf(dom.t_minus.value)) {
        out.alpha2 = -chord(curve, 0);
    } else {
        const std::size_t i0 = index_of(dom.t_minus.value);
        out.alpha2 = -chord(curve, std::min(i0, m - 2));
    }
    const double scale = std::max(1.0, std::abs(out.alpha1));
    if (std::abs(out.alpha2 - out.alpha1) <= 1e-9 * scale || out.alpha2 < out.alpha1) {
        out.empty = true;
        out.degenerate_alpha = 0.5 * (out.alpha1 + out.alpha2);
    }
    return out;
}

LegendrePoint solve_t_alpha(const PressureCurve& curve, const SpectrumDomain& domain, double alpha) {
    if (domain.empty) throw RangeError("spectrum domain is empty");
    if (!domain.contains(alpha)) {
        std::ostringstream msg;
        msg << "alpha = " << alpha << " is outside (" << domain.alpha1 << ", " << domain.alpha2 << ")";
        throw RangeError(msg.str());
    }
    const auto d = node_slopes(curve);
    const std::size_t m = d.size();
    const double target = -alpha;
    if (target < d.front() || target > d.back()) {
        std::ostringstream msg;
        msg << "t_alpha for alpha = " << alpha << " lies outside the curve grid";
        throw RangeError(msg.str());
    }
    // bisection over the monotone node slopes, then the exact root on the
    // piecewise-linear segment
    std::size_t lo = 0;
    std::size_t hi = m - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (d[mid] < target) lo = mid; else hi = mid;
    }
    double t;
    if (d[hi] == d[lo]) {
        t = 0.5 * (curve.t[lo] + curve.t[hi]);
    } else {
        const double u = std::clamp((target - d[lo]) / (d[hi] - d[lo]), 0.0, 1.0);
        t = curve.t[lo] + u * (curve.t[hi] - curve.t[lo]);
    }
    LegendrePoint out;
    out.alpha = alpha;
    out.t_alpha = t;
    out.residual = pressure_derivative(curve, t).value + alpha;
    if (std::abs(out.residual) > legendre_root_tolerance) {
        std::ostringstream msg;
        msg << "root residual " << out.residual << " exceeds tolerance at alpha = " << alpha;
        throw ConvergenceError(msg.str(), out.residual);
    }
    out.value = (pressure_value(curve, t) + t * alpha) / alpha;
    return out;
}

std::pair<double, double> direct_legendre(const PressureCurve& curve, double alpha) {
    const std::size_t m = curve.t.size();
    std::vector<double> q(m);
    std::size_t best = 0;
    for (std::size_t i = 0; i < m; ++i) {
        q[i] = curve.values[i] + curve.t[i] * alpha;
        if (q[i] < q[best]) best = i;
    }
    const std::size_t s = window_start(best, m);
    const double* t = &curve.t[s];
    const double* y = &q[s];
    // vertex of the interpolating parabola, kept inside its three nodes
    const double d01 = (y[1] - y[0]) / (t[1] - t[0]);
    const double d12 = (y[2] - y[1]) / (t[2] - t[1]);
    const double curv = (d12 - d01) / (t[2] - t[0]);
    double t_min = curve.t[best];
    double value = q[best];
    if (curv > 0.0) {
        const double vertex = std::clamp(0.5 * (t[0] + t[1]) - d01 / (2.0 * curv), t[0], t[2]);
        const double v = quadratic_through(t, y, vertex);
        if (v < value) {
            t_min = vertex;
            value = v;
        }
    }
    return {t_min, value / alpha};
}

std::vector<double> auto_alpha_grid(const SpectrumDomain& domain, std::size_t count) {
    std::vector<double> out;
    if (domain.empty || count == 0) return out;
    for (std::size_t k = 1; k <= count; ++k) {
        const double u = static_cast<double>(k) / static_cast<double>(count + 1);
        out.push_back(domain.alpha1 + u * (domain.alpha2 - domain.alpha1));
    }
    return out;
}

SpectrumCurve lyapunov_spectrum_interval(const PressureCurve& curve, const SpectrumDomain& domain,
                                         const std::vector<double>& alpha_grid) {
    SpectrumCurve out;
    out.domain = domain;
    if (domain.empty) return out;
    for (double alpha : alpha_grid) {
        SpectrumSample s;
        s.alpha = alpha;
        if (!domain.contains(alpha)) {
            s.resolved = false;
            s.note = "alpha outside the spectrum domain";
        } else {
            try {
                const LegendrePoint lp = solve_t_alpha(curve, domain, alpha);
                const auto direct = direct_legendre(curve, alpha);
                if (std::abs(direct.second - lp.value) > legendre_route_tolerance) {
                    std::ostringstream msg;
                    msg << "Legendre routes disagree at alpha = " << alpha << ": root " << lp.value
                        << ", direct " << direct.second;
                    throw InconsistencyError(msg.str(), lp.value, direct.second);
                }
                s.t_alpha = lp.t_alpha;
                s.L_interval = lp.value;
                s.residual = alpha * lp.value - pressure_value(curve, lp.t_alpha) - lp.t_alpha * alpha;
            } catch (const RangeError& e) {
                s.resolved = false;
                s.note = e.what();
            }
        }
        if (!s.resolved) {
            s.t_alpha = std::nan("");
            s.L_interval = std::nan("");
            s.residual = std::nan("");
        }
        s.L_flow = s.L_interval + 2.0;
        out.samples.push_back(s);
    }

    const SpectrumSample* prev = nullptr;
    const SpectrumSample* prev2 = nullptr;
    for (const auto& s : out.samples) {
        if (!s.resolved) continue;
        for (std::size_t i = 0; i < curve.t.size(); ++i) {
            const double gap = curve.values[i] + curve.t[i] * s.alpha - s.alpha * s.L_interval;
            out.duality_margin = std::min(out.duality_margin, gap);
        }
        if (prev && s.alpha > prev->alpha && s.t_alpha > prev->t_alpha) out.monotone_t = false;
        if (prev && prev2) {
            out.smoothness =
                std::max(out.smoothness, std::abs(s.L_interval - 2.0 * prev->L_interval + prev2->L_interval));
        }
        prev2 = prev;
        prev = &s;
    }
    return out;
}

SpectrumCurve lyapunov_spectrum_flow(const PressureCurve& curve, const SpectrumDomain& domain,
                                     const std::vector<double>& alpha_grid) {
    SpectrumCurve out = lyapunov_spectrum_interval(curve, domain, alpha_grid);
    out.flow = true;
    return out;
}

BirkhoffResult birkhoff_exponent(const CuspMap& map, double x, std::size_t n, double floor) {
    if (n < 1) throw DomainError("Birkhoff average needs n >= 1");
    BirkhoffResult out;
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto j = map.dynamic_branch(x);
        if (!j) {
            std::ostringstream msg;
            msg << "orbit left the domain at step " << k;
            throw DomainError(msg.str());
        }
        const Branch& b = map.branch(*j);
        const auto ld = log_derivative(b, x, floor);
        if (ld.clamped && !out.near_cusp_step) {
            out.near_cusp_step = k;
            std::ostringstream msg;
            msg << "orbit entered the derivative-floor region at step " << k;
            out.warning = msg.str();
        }
        sum += ld.value;
        x = b.value(x);
    }
    out.value = sum / static_cast<double>(n);
    return out;
}

} // namespace rovella
