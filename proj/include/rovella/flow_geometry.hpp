#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "rovella/core_maps.hpp"

namespace rovella {

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

/// Point (x, y, 1) of the cross-section; points with x = 0 lie on the
/// singular line and have no return.
struct SectionPoint {
    double x = 0.0;
    double y = 0.0;
};

enum class Side { plus, minus };

/// Linear flow (x e^{l1 s}, y e^{l2 s}, z e^{l3 s}) near the origin.
Point3 linear_flow(const Point3& p, double s, const FlowParams& params);

/// Time for (x0, y, 1) to reach |x| = 1; InfiniteTimeError when x0 = 0.
double exit_time(double x0, const FlowParams& params);

/// (x, y, 1) -> (sgn x, y|x|^beta, |x|^ell).
Point3 cusp_map_L(const SectionPoint& p, const FlowParams& params);

/// Rotation, expansion and translation taking |x| = 1 back to the section.
SectionPoint connecting_map(Side side, const Point3& p, const FlowParams& params);

SectionPoint poincare_return(const SectionPoint& p, const FlowParams& params);

/// d/dy of the fiber coordinate of the return map: |x|^beta.
double fiber_derivative(double x, const FlowParams& params);

/// d/dx of the fiber coordinate of the return map at (x, y).
double cross_derivative(double x, double y, const FlowParams& params);

/// Return time to the section as a function of the base coordinate.
///
/// The logarithmic roof is r(x) = -(1/lambda1) log|x - center| + tau_c;
/// the constant roof is r(x) = c.
class RoofFunction {
public:
    static RoofFunction logarithmic(double lambda1, double tau_c, double center = 0.0);
    static RoofFunction from_flow(const FlowParams& params);
    static RoofFunction constant(double value);

    double operator()(double x) const;

    /// Exact integral of r over [a, b] (may include the singular point).
    double integral(double a, double b) const;

    bool is_constant() const { return lambda1_ == 0.0; }
    double center() const { return center_; }
    /// Lower bound of r over the unit-scale section (tau_c or the constant).
    double floor_value() const { return offset_; }

private:
    RoofFunction(double lambda1, double offset, double center)
        : lambda1_(lambda1), offset_(offset), center_(center) {}

    double lambda1_;  // 0 for the constant roof
    double offset_;
    double center_;
};

double roof(double x, const FlowParams& params);

enum class Phase { linear, connecting };

const char* to_string(Phase phase);

/// One piece of a simulated orbit: closed-form linear motion near the
/// origin, or an affine flight of duration tau_c back to the section.
struct TrajectorySegment {
    Phase kind = Phase::linear;
    Point3 start;
    Point3 end;
    double duration = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double lambda3 = 0.0;

    Point3 sample(double s) const;
};

struct TrajectorySample {
    double t = 0.0;
    Point3 p;
    Phase phase = Phase::linear;
};

struct SimulationOptions {
    double sample_dt = 0.05;
    double x_min_cutoff = 1e-12;
};

struct SimulationResult {
    std::vector<TrajectorySegment> segments;
    /// Section hits including the initial point at index 0.
    std::vector<SectionPoint> hits;
    /// return_times[n] is the flight time from hit n-1 to hit n (0 for n = 0).
    std::vector<double> return_times;
    std::vector<TrajectorySample> samples;
};

/// Throws NearSingularityError (with step index) when the orbit comes
/// within x_min_cutoff of the singular line.
SimulationResult simulate(const SectionPoint& p, std::size_t n_returns, const FlowParams& params,
                          const SimulationOptions& options = {});

struct DominationReport {
    double rate = 0.0;  // lambda2 - lambda3
    std::vector<std::pair<double, double>> products;  // (s, e^{rate s})
    bool passed = true;
};

DominationReport domination_check(const FlowParams& params, const std::vector<double>& s_grid);

struct FiberContractionReport {
    double lambda = 0.0;        // (1/2)^beta
    double best_constant = 0.0; // smallest C with dist_n <= lambda^n C dist_0 on the samples
    double max_step_ratio = 0.0;
    /// Largest |dist_n - dist_0 prod |x_k|^beta|; absolute, since the product
    /// can fall far below the resolution of the y coordinate.
    double max_product_mismatch = 0.0;
    std::size_t skipped = 0;
    std::size_t used = 0;
    bool passed = true;
};

FiberContractionReport fiber_contraction_check(const FlowParams& params, std::size_t n,
                                               std::size_t samples, std::uint64_t seed = 0);

} // namespace rovella
