#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rovella {

/// Closed interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    double midpoint() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Eigenvalues and connecting-map constants of one contracting Lorenz flow.
///
/// The exponents beta and ell are always derived from the eigenvalues.
struct FlowParams {
    double lambda1 = 1.0;
    double lambda2 = -4.5;
    double lambda3 = -1.1;
    double rho = 1.8;
    double tau_c = 1.0;
    double cy_plus = 0.25;
    double cy_minus = -0.25;

    double beta() const { return -lambda2 / lambda1; }
    double ell() const { return -lambda3 / lambda1; }

    /// Throws ParameterError naming the first inequality that fails.
    void validate() const;
};

enum class BranchKind { rovella_left, rovella_right, piecewise_linear, custom };

std::string to_string(BranchKind kind);

/// One monotone C^1 branch f_j : [a_j, b_j] -> I.
///
/// Values at the endpoints are the one-sided limits of the branch.
class Branch {
public:
    using Fn = std::function<double(double)>;

    Branch(Interval interval, Fn value, Fn derivative, BranchKind kind,
           Fn inverse = {}, Fn cusp_bound = {});

    const Interval& interval() const { return interval_; }
    BranchKind kind() const { return kind_; }

    double value(double x) const { return value_(x); }
    double derivative(double x) const { return derivative_(x); }
    bool increasing() const { return increasing_; }

    /// Image of the closed branch interval, as [min, max].
    Interval image() const;

    /// Preimage of y in the branch closure (closed form when supplied,
    /// bisection otherwise). y must lie in image().
    double inverse(double y) const;

    /// Bound on |Df| at distance delta from a cusp endpoint.
    double cusp_bound(double delta) const;

private:
    Interval interval_;
    Fn value_;
    Fn derivative_;
    Fn inverse_;
    Fn cusp_bound_;
    BranchKind kind_;
    bool increasing_;
};

/// Shape constants of a Rovella map, kept for the (f1)-(f5) checks.
struct RovellaShape {
    double rho = 0.0;
    double ell = 0.0;
    double d0 = -0.5;
    double d1 = 0.5;
};

/// Piecewise map on finitely many branch intervals with cusp set Crit.
///
/// Crit holds the branch endpoints interior to the domain; the outer
/// endpoints of the domain carry no vanishing-derivative requirement.
class CuspMap {
public:
    CuspMap(std::string id, Interval domain, std::vector<Branch> branches,
            std::vector<double> crit, std::optional<RovellaShape> rovella = {});

    const std::string& id() const { return id_; }
    const Interval& domain() const { return domain_; }
    const std::vector<Branch>& branches() const { return branches_; }
    const Branch& branch(std::size_t j) const { return branches_.at(j); }
    std::size_t branch_count() const { return branches_.size(); }
    const std::vector<double>& crit() const { return crit_; }
    const std::optional<RovellaShape>& rovella() const { return rovella_; }

    /// Index of the unique closed branch containing x. Throws DomainError
    /// when x is outside every branch or sits on a shared endpoint.
    std::size_t locate(double x) const;

    /// Branch used when iterating: half-open [a_j, b_j), last branch closed.
    std::optional<std::size_t> dynamic_branch(double x) const;

    /// True when every branch maps its closure onto the whole domain.
    bool is_full_branch(double tol = 1e-12) const;

private:
    std::string id_;
    Interval domain_;
    std::vector<Branch> branches_;
    std::vector<double> crit_;
    std::optional<RovellaShape> rovella_;
};

/// Full-branch affine map: branch i has length w_i and slope 1/w_i.
class PLFullBranchMap {
public:
    explicit PLFullBranchMap(std::vector<double> weights);

    static PLFullBranchMap doubling() { return PLFullBranchMap({0.5, 0.5}); }

    const std::vector<double>& weights() const { return weights_; }
    std::size_t branch_count() const { return weights_.size(); }

    /// The map on I = [0, 1] with increasing affine branches.
    CuspMap to_cusp_map() const;

    std::string id() const;

private:
    std::vector<double> weights_;
};

/// Two-branch Rovella map on [-1/2, 1/2] with f(0+) = -1/2, f(0-) = +1/2.
/// No flow-parameter validation; requires rho > 0 and ell > 0.
CuspMap rovella_map(double rho, double ell);

CuspMap rovella_map_from_flow(const FlowParams& params);

double eval_map(const CuspMap& map, double x);
double eval_map(const CuspMap& map, double x, std::size_t branch);
double eval_derivative(const CuspMap& map, double x);
double eval_derivative(const CuspMap& map, double x, std::size_t branch);

double pl_pressure_closed_form(const PLFullBranchMap& map, double t);

// --- axiom checks ---------------------------------------------------------

enum class CheckStatus { pass, fail, not_checked };

std::string to_string(CheckStatus status);

struct AxiomResult {
    std::string axiom;
    CheckStatus status = CheckStatus::not_checked;
    double measured = 0.0;         // axiom-specific worst observed quantity
    double worst_violation = 0.0;  // amount past the threshold, 0 when passing
    std::string detail;
};

struct ValidationReport {
    std::string map_id;
    std::vector<AxiomResult> entries;

    const AxiomResult& at(const std::string& axiom) const;
    /// True when no entry failed (not-checked entries are ignored).
    bool passed() const;
};

struct SchwarzianBranch {
    std::size_t branch = 0;
    double worst_second_difference = 0.0;
    /// Largest value of Sf = -2 g''/g seen on the grid (g = 1/sqrt|Df|).
    double max_schwarzian = 0.0;
    bool passed = true;
};

struct SchwarzianReport {
    std::vector<SchwarzianBranch> branches;
    bool passed() const;
};

/// Convexity of 1/sqrt|Df| on a uniform interior grid of each branch.
SchwarzianReport schwarzian_check(const CuspMap& map, std::size_t grid_size);

struct ValidationOptions {
    double holder_C = 1e8;
    double holder_alpha = 1.01;
    std::size_t holder_pairs = 10000;
    std::size_t grid_size = 1000;
    double cusp_offset = 1e-6;
    std::uint64_t seed = 0;
    /// Orbit horizon for the optional (f4) check; 0 leaves it unchecked.
    std::size_t f4_horizon = 0;
};

ValidationReport validate_cusp_map(const CuspMap& map, const ValidationOptions& options = {});

} // namespace rovella
