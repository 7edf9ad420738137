#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rovella/core_maps.hpp"
#include "rovella/flow_geometry.hpp"
#include "rovella/thermo.hpp"

namespace rovella {

/// Fiber part of a skew product over a cusp map: y -> c(x) y + offset(branch).
class FiberMap {
public:
    /// The return map fiber: c(x) = |x|^beta, offsets cy- (left) and cy+ (right).
    static FiberMap rovella(const FlowParams& params);
    /// Constant contraction with one offset per branch.
    static FiberMap uniform(double contraction, std::vector<double> offsets);

    double contraction(double x) const;
    double offset(std::size_t branch) const { return offsets_.at(branch); }
    std::size_t branch_count() const { return offsets_.size(); }
    /// Upper bound of c over the section.
    double sup_contraction() const { return sup_; }
    double apply(std::size_t branch, double x, double y) const { return contraction(x) * y + offset(branch); }

private:
    FiberMap(double beta, double sup, std::vector<double> offsets, bool power)
        : beta_(beta), sup_(sup), offsets_(std::move(offsets)), power_(power) {}

    double beta_;  // exponent for |x|^beta, or the uniform factor
    double sup_;
    std::vector<double> offsets_;
    bool power_;
};

enum class Provenance { lifted_from_interval, direct };

/// Weighted points of the square.
struct SquareMeasureApprox {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> weights;
    Provenance provenance = Provenance::direct;
    /// Cells of the source measure, used to project back (empty for atoms).
    std::vector<Interval> source_cells;
    /// Source cell of each point (index into source_cells).
    std::vector<std::size_t> source_index;
    double entropy = 0.0;
    double lyapunov = 0.0;
    std::string map_id;

    std::size_t dropped_atoms = 0;
    double dropped_mass = 0.0;
    /// increments[k] = sup over atoms of |y^(k+1) - y^(k)| for chain depth k+1.
    std::vector<double> increments;
    /// sup over atoms of a bound on |y - y_attractor|.
    double fiber_residual = 0.0;
};

/// Lifts every atom (cell midpoints for cell measures) to the attractor
/// through a backward chain of n_push preimages followed by the fiber map.
/// x coordinates are kept exactly. Atoms meeting Crit are dropped.
SquareMeasureApprox lift_to_square(const MeasureApprox& mu, const CuspMap& map, const FiberMap& fiber,
                                   std::size_t n_push);

/// Lift for the return map of a flow (Rovella base and fiber).
SquareMeasureApprox lift_to_square(const MeasureApprox& mu, const FlowParams& flow, std::size_t n_push);

/// Pushes mass through (x, y) -> x, aggregated onto the source cells when
/// present and onto distinct atoms otherwise.
MeasureApprox project_to_interval(const SquareMeasureApprox& mu2);

/// Aggregates onto the cells of `grid`.
MeasureApprox project_to_interval(const SquareMeasureApprox& mu2, const Partition& grid);

struct RoofIntegral {
    double value = 0.0;
    bool divergent = false;
    /// Mass sitting exactly on the singular point of the roof.
    double singular_mass = 0.0;
};

/// Sum of weights times r, exact over cells and pointwise at atoms.
RoofIntegral roof_integrability_check(const MeasureApprox& mu, const RoofFunction& roof);

struct SuspensionMeasure {
    std::string base_id;
    double roof_integral = 0.0;
    double normalization = 0.0;
    double h_base = 0.0;
    double h_flow = 0.0;
    double lyapunov_base = 0.0;
    double flow_pressure = std::nan("");
    double flow_free_energy = std::nan("");
    double residual = std::nan("");
    std::size_t clamped = 0;
    std::size_t dropped_atoms = 0;
    double dropped_mass = 0.0;
    MeasureApprox base;
    SquareMeasureApprox square;
};

/// h_base / roof_integral. DomainError when roof_integral <= 0.
double abramov_entropy(double h_base, double roof_integral);

/// Throws IntegrabilityError when the roof integral diverges.
SuspensionMeasure suspend(const SquareMeasureApprox& mu2, const RoofFunction& roof);

/// Flow potential spread uniformly over each excursion, with orbit integral
/// Delta(x) = -t log|Df(x)| (geometric) or Delta(x) = c r(x) (constant).
class FlowPotential {
public:
    static FlowPotential geometric(double t) { return FlowPotential(true, t); }
    static FlowPotential constant(double c) { return FlowPotential(false, c); }

    bool is_geometric() const { return geometric_; }
    double parameter() const { return parameter_; }

    /// Value at height s in [0, r(x)] above x.
    double pointwise(const CuspMap& map, const RoofFunction& roof, double x, double s) const;

private:
    FlowPotential(bool geometric, double parameter) : geometric_(geometric), parameter_(parameter) {}
    bool geometric_;
    double parameter_;
};

/// Integral of the flow potential over one excursion above x.
double delta_potential(const FlowPotential& phi, const CuspMap& map, const RoofFunction& roof, double x);

struct FlowPressureResult {
    double value = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    std::size_t evaluations = 0;
    std::size_t clamped = 0;
};

inline constexpr double flow_bracket_limit = 50.0;
inline constexpr double flow_root_tolerance = 1e-10;

/// Root s of s -> P_base(Delta - s r). BracketError when no sign change is
/// found in [-50, 50].
FlowPressureResult flow_pressure(const CuspMap& map, const RoofFunction& roof, const FlowPotential& phi,
                                 const EstimatorConfig& config = {});

struct FlowEquilibriumOptions {
    std::size_t N = 1024;
    std::size_t n_push = 60;
    double floor = default_derivative_floor;
    /// When set, t must lie strictly inside (t-, t+).
    std::optional<PressureDomain> domain;
    EstimatorConfig pressure;
};

/// equilibrium_measure -> lift_to_square -> suspend, with the flow pressure
/// and the flow free energy of the result attached.
SuspensionMeasure flow_equilibrium(const CuspMap& map, const FiberMap& fiber, const RoofFunction& roof,
                                   double t, const FlowEquilibriumOptions& options = {});

} // namespace rovella
