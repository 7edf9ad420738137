#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "rovella/core_maps.hpp"

namespace rovella {

inline constexpr double default_derivative_floor = 1e-10;
inline constexpr double infinity = std::numeric_limits<double>::infinity();

// --- potentials -----------------------------------------------------------

struct PotentialValue {
    double value = 0.0;
    bool clamped = false;  // |Df| was raised to the floor
};

/// A potential evaluated on a named branch (needed at shared endpoints).
using Potential = std::function<PotentialValue(const Branch&, double x)>;

/// -t log max(|Df|, floor).
Potential geometric_potential(double t, double floor = default_derivative_floor);

Potential constant_potential(double c);

/// log max(|Df(x)|, floor) with a clamp flag.
PotentialValue log_derivative(const Branch& branch, double x, double floor);

// --- partitions and the transfer matrix -----------------------------------

/// Ordered cell edges covering the map's domain.
class Partition {
public:
    explicit Partition(std::vector<double> edges);

    std::size_t size() const { return edges_.size() - 1; }
    const std::vector<double>& edges() const { return edges_; }
    Interval cell(std::size_t i) const { return {edges_[i], edges_[i + 1]}; }
    double width(std::size_t i) const { return edges_[i + 1] - edges_[i]; }
    /// Index of the cell containing x (the right-closed last cell included).
    std::optional<std::size_t> find(double x) const;

private:
    std::vector<double> edges_;
};

/// N uniform cells plus every branch endpoint, refined geometrically
/// (ratio 1/2) over the 2% of the domain on each side of every cusp point.
Partition ulam_partition(const CuspMap& map, std::size_t N);

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Discretized transfer operator acting on cell densities from the left:
/// entry (i, j) is the integral of e^phi |Df| over cell i intersected with
/// the preimage of cell j, divided by the width of cell j.
struct TransferMatrix {
    Partition grid;
    SparseRowMatrix matrix;
    std::size_t clamped_cells = 0;
    /// Some entry overflowed; the pressure is then +inf.
    bool overflow = false;
};

TransferMatrix ulam_operator(const CuspMap& map, std::size_t N, const Potential& potential);

// --- power iteration ------------------------------------------------------

struct PowerIterationOptions {
    double eigenvalue_tol = 1e-12;  // relative change of the eigenvalue estimate
    double vector_tol = 1e-8;       // L1 change of the normalized iterate
    std::size_t max_iters = 100000;
};

struct PowerIterationResult {
    double eigenvalue = 0.0;
    Eigen::VectorXd vector;  // L1-normalized, nonnegative
    std::size_t iterations = 0;
    /// Contraction ratio of successive iterate changes (estimate of |l2/l1|).
    double gap_ratio = 0.0;
    std::string warning;
};

/// Leading eigenpair of a nonnegative matrix from the all-ones start.
/// `transpose` iterates g -> g A (row vectors) instead of v -> A v.
/// Throws ConvergenceError carrying the last eigenvalue change.
PowerIterationResult power_iteration(const SparseRowMatrix& A, bool transpose,
                                     const PowerIterationOptions& options = {});

// --- pressure estimators --------------------------------------------------

enum class PressureMethod { periodic_orbit, ulam, closed_form, synthetic };

std::string to_string(PressureMethod method);
PressureMethod pressure_method_from_string(const std::string& name);

struct PressureEstimate {
    double value = 0.0;
    std::size_t clamped = 0;  // clamped cells (Ulam) or clamped orbits (periodic orbits)
    std::size_t iterations = 0;
    std::string warning;
};

struct PeriodicOrbit {
    std::vector<std::size_t> word;  // branch itinerary
    std::vector<double> points;     // x_0, ..., x_{n-1}
};

/// Calls `visit` once for every admissible periodic itinerary of exact
/// length n (all k^n words for full-branch maps). Words whose cylinder is
/// empty, or on which f^n - id has no sign change, are skipped.
void for_each_periodic_orbit(const CuspMap& map, std::size_t n,
                             const std::function<void(const PeriodicOrbit&)>& visit);

/// (1/n) log sum over period-n points of exp(S_n phi). Full-branch maps only.
PressureEstimate periodic_orbit_pressure(const CuspMap& map, const Potential& potential, std::size_t n);
PressureEstimate periodic_orbit_pressure(const CuspMap& map, double t, std::size_t n,
                                         double floor = default_derivative_floor);

PressureEstimate ulam_pressure(const CuspMap& map, const Potential& potential, std::size_t N);
PressureEstimate ulam_pressure(const CuspMap& map, double t, std::size_t N,
                               double floor = default_derivative_floor);

struct EstimatorConfig {
    /// Periodic orbits for full-branch maps, Ulam otherwise, when unset.
    std::optional<PressureMethod> method;
    std::size_t n = 10;
    std::size_t N = 1024;
    double floor = default_derivative_floor;
};

PressureMethod resolve_method(const CuspMap& map, const EstimatorConfig& config);

/// Pressure of an arbitrary potential with the configured estimator.
PressureEstimate estimate_pressure(const CuspMap& map, const Potential& potential,
                                   const EstimatorConfig& config);

// --- pressure curves ------------------------------------------------------

struct PressureCurve {
    std::vector<double> t;
    std::vector<double> values;
    std::vector<std::size_t> clamped;
    PressureMethod method = PressureMethod::synthetic;
    std::size_t resolution = 0;
    std::string map_id;
    /// Smallest normalized second difference; +inf with fewer than 3 nodes.
    double worst_second_difference = infinity;
    bool convex = true;
    bool monotone_decreasing = true;

    static PressureCurve from_samples(std::vector<double> t, std::vector<double> values,
                                      PressureMethod method, std::size_t resolution,
                                      std::string map_id);
    /// Recompute the convexity and monotonicity flags.
    void certify();
};

inline constexpr double convexity_tolerance = 1e-8;

/// Evenly spaced grid from start to stop inclusive.
std::vector<double> linear_grid(double start, double step, double stop);

/// Samples t -> p(t); `jobs` worker threads, results in grid order.
PressureCurve pressure_curve(const CuspMap& map, const std::vector<double>& t_grid,
                             const EstimatorConfig& config, std::size_t jobs = 1);

PressureCurve closed_form_curve(const PLFullBranchMap& map, const std::vector<double>& t_grid);

// --- measures -------------------------------------------------------------

/// Discrete invariant-measure approximation: weighted cells, or atoms when
/// a support interval is a single point.
struct MeasureApprox {
    std::vector<Interval> support;
    std::vector<double> weights;
    double t = 0.0;
    double pressure = 0.0;
    double lyapunov = 0.0;
    double entropy = 0.0;
    std::size_t clamped = 0;
    std::string map_id;
    std::string warning;

    static MeasureApprox atoms(const std::vector<double>& points, const std::vector<double>& weights);
    static MeasureApprox cells(const Partition& grid, const std::vector<double>& weights);
    /// Normalized Lebesgue measure on the cells of `grid`.
    static MeasureApprox lebesgue(const Partition& grid);

    bool is_atomic(std::size_t i) const { return support[i].lo == support[i].hi; }
    double total_mass() const;
};

struct LyapunovEstimate {
    double value = 0.0;
    std::size_t clamped = 0;
};

/// Integral of log|Df|: exact at atoms, Gauss averaged over cells.
LyapunovEstimate lyapunov_of_measure(const CuspMap& map, const MeasureApprox& mu,
                                     double floor = default_derivative_floor);

/// h(mu) - t lambda(mu).
double free_energy(const MeasureApprox& mu, double t);

/// Product of the left and right leading eigenvectors of the Ulam matrix.
/// Entropy is p(t) + t lambda(mu).
MeasureApprox equilibrium_measure(const CuspMap& map, double t, std::size_t N,
                                  double floor = default_derivative_floor);

// --- exponent bounds and the admissible range -----------------------------

struct ExponentBounds {
    double lambda_m = 0.0;
    double lambda_M = 0.0;
    std::size_t orbits = 0;
    /// Bounds after each period 1..n; the interval only widens.
    std::vector<std::pair<double, double>> by_period;
};

/// Extreme Birkhoff averages of log|Df| over periodic orbits of period <= n.
ExponentBounds exponent_bounds(const CuspMap& map, std::size_t n,
                               double floor = default_derivative_floor);

struct DomainEndpoint {
    double value = 0.0;      // innermost grid node meeting the condition, or +-inf
    double bracket_lo = 0.0; // the crossing lies in [bracket_lo, bracket_hi]
    double bracket_hi = 0.0;
    bool unresolved = false;
    /// p is linear with slope -lambda beyond the endpoint on the grid.
    bool linear_beyond = false;
};

struct PressureDomain {
    double lambda_m = 0.0;
    double lambda_M = 0.0;
    DomainEndpoint t_minus;
    DomainEndpoint t_plus;
};

inline constexpr double admissible_strictness = 1e-9;

/// Scans p(t) > -lambda_M t (lower end) and p(t) > -lambda_m t (upper end).
PressureDomain admissible_t_range(const PressureCurve& curve, const ExponentBounds& bounds);
PressureDomain admissible_t_range(const PressureCurve& curve, double lambda_m, double lambda_M);

} // namespace rovella
