#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rovella/core_maps.hpp"
#include "rovella/thermo.hpp"

namespace rovella {

struct SlopeEstimate {
    double value = 0.0;
    /// A one-sided difference at a grid end entered the estimate.
    bool one_sided = false;
};

/// Central differences at the nodes (one-sided at the two ends), linearly
/// interpolated in between. RangeError outside the grid.
SlopeEstimate pressure_derivative(const PressureCurve& curve, double t);

/// p(t) by quadratic interpolation through the three nearest nodes.
double pressure_value(const PressureCurve& curve, double t);

/// Open interval (alpha1, alpha2) of Lyapunov exponents, or empty.
struct SpectrumDomain {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    bool empty = false;
    /// The common exponent when the domain collapses.
    double degenerate_alpha = 0.0;

    bool contains(double alpha) const { return !empty && alpha > alpha1 && alpha < alpha2; }
};

/// alpha1 = -D^-p(t+), alpha2 = -D^+p(t-); an infinite endpoint uses the
/// chord slope at the matching end of the sampled grid.
SpectrumDomain spectrum_domain(const PressureCurve& curve, const PressureDomain& dom);

struct LegendrePoint {
    double alpha = 0.0;
    double t_alpha = 0.0;
    double value = 0.0;     // (p(t_alpha) + t_alpha alpha) / alpha
    double residual = 0.0;  // Dp(t_alpha) + alpha
};

inline constexpr double legendre_root_tolerance = 1e-8;
inline constexpr double legendre_route_tolerance = 1e-6;

/// Root of Dp(t) = -alpha inside the grid hull. RangeError when alpha is
/// outside the domain or t_alpha leaves the grid.
LegendrePoint solve_t_alpha(const PressureCurve& curve, const SpectrumDomain& domain, double alpha);

/// inf over grid nodes of p(t) + t alpha, refined by the parabola through
/// the three nodes around the minimum. Returns (t, value / alpha).
std::pair<double, double> direct_legendre(const PressureCurve& curve, double alpha);

struct SpectrumSample {
    double alpha = 0.0;
    double t_alpha = 0.0;
    double L_interval = 0.0;
    double L_flow = 0.0;
    double residual = 0.0;  // alpha L - p(t_alpha) - t_alpha alpha
    bool resolved = true;
    std::string note;
};

struct SpectrumCurve {
    SpectrumDomain domain;
    std::vector<SpectrumSample> samples;
    bool flow = false;
    /// t_alpha is non-increasing in alpha over resolved samples.
    bool monotone_t = true;
    /// min over samples and grid nodes of p(t) + t alpha - alpha L.
    double duality_margin = infinity;
    /// Largest |second difference| of L over consecutive resolved samples.
    double smoothness = 0.0;
};

/// `count` evenly spaced exponents strictly inside the domain.
std::vector<double> auto_alpha_grid(const SpectrumDomain& domain, std::size_t count);

/// Throws InconsistencyError when the two Legendre routes disagree.
SpectrumCurve lyapunov_spectrum_interval(const PressureCurve& curve, const SpectrumDomain& domain,
                                         const std::vector<double>& alpha_grid);

/// The interval spectrum shifted by 2.
SpectrumCurve lyapunov_spectrum_flow(const PressureCurve& curve, const SpectrumDomain& domain,
                                     const std::vector<double>& alpha_grid);

struct BirkhoffResult {
    double value = 0.0;
    /// First step whose derivative fell below the floor.
    std::optional<std::size_t> near_cusp_step;
    std::string warning;
};

/// (1/n) sum_{k<n} log|Df(f^k x)|.
BirkhoffResult birkhoff_exponent(const CuspMap& map, double x, std::size_t n,
                                 double floor = default_derivative_floor);

} // namespace rovella
