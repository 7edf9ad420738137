#include "rovella/core_maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "rovella/errors.hpp"

namespace rovella {

void FlowParams::validate() const {
    auto fail = [](const std::string& inequality) {
        throw ParameterError("flow parameters violate " + inequality);
    };
    for (double v : {lambda1, lambda2, lambda3, rho, tau_c, cy_plus, cy_minus}) {
        if (!std::isfinite(v)) fail("finiteness of all parameters");
    }
    if (!(lambda1 > 0.0)) fail("lambda1 > 0");
    if (!(-lambda3 > lambda1)) fail("-lambda3 > lambda1");
    if (!(-lambda2 > -lambda3)) fail("-lambda2 > -lambda3");
    if (!(beta() > ell() + 3.0)) fail("beta > ell + 3");
    if (!(rho > 0.0)) fail("rho > 0");
    if (!(rho * std::pow(0.5, ell()) < 1.0)) fail("rho * (1/2)^ell < 1");
    if (!(tau_c > 0.0)) fail("tau_c > 0");
    // fiber images y|x|^beta + cy must stay inside the section
    const double fiber_reach = 0.5 * std::pow(0.5, beta());
    if (!(std::abs(cy_plus) + fiber_reach <= 0.5) || !(std::abs(cy_minus) + fiber_reach <= 0.5)) {
        fail("|cy| + (1/2)^(beta+1) <= 1/2");
    }
}

std::string to_string(BranchKind kind) {
    switch (kind) {
    case BranchKind::rovella_left: return "rovella-left";
    case BranchKind::rovella_right: return "rovella-right";
    case BranchKind::piecewise_linear: return "piecewise-linear";
    case BranchKind::custom: return "custom";
    }
    return "unknown";
}

std::string to_string(CheckStatus status) {
    switch (status) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::not_checked: return "not-checked";
    }
    return "unknown";
}

// --- Branch ---------------------------------------------------------------

Branch::Branch(Interval interval, Fn value, Fn derivative, BranchKind kind, Fn inverse,
               Fn cusp_bound)
    : interval_(interval),
      value_(std::move(value)),
      derivative_(std::move(derivative)),
      inverse_(std::move(inverse)),
      cusp_bound_(std::move(cusp_bound)),
      kind_(kind) {
    if (!(interval_.lo < interval_.hi)) throw DomainError("branch interval must have lo < hi");
    increasing_ = value_(interval_.hi) >= value_(interval_.lo);
}

Interval Branch::image() const {
    const double a = value_(interval_.lo);
    const double b = value_(interval_.hi);
    return {std::min(a, b), std::max(a, b)};
}

double Branch::inverse(double y) const {
    if (inverse_) return std::clamp(inverse_(y), interval_.lo, interval_.hi);
    double lo = interval_.lo;
    double hi = interval_.hi;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const bool below = value_(mid) < y;
        if (below == increasing_) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

double Branch::cusp_bound(double delta) const {
    if (cusp_bound_) return cusp_bound_(delta);
    return std::sqrt(delta);
}

// --- CuspMap --------------------------------------------------------------

CuspMap::CuspMap(std::string id, Interval domain, std::vector<Branch> branches,
                 std::vector<double> crit, std::optional<RovellaShape> rovella)
    : id_(std::move(id)),
      domain_(domain),
      branches_(std::move(branches)),
      crit_(std::move(crit)),
      rovella_(rovella) {
    if (branches_.empty()) throw DomainError("a cusp map needs at least one branch");
    std::sort(branches_.begin(), branches_.end(),
              [](const Branch& a, const Branch& b) { return a.interval().lo < b.interval().lo; });
    for (std::size_t j = 0; j < branches_.size(); ++j) {
        const auto& iv = branches_[j].interval();
        if (iv.lo < domain_.lo || iv.hi > domain_.hi) {
            throw DomainError("branch interval leaves the domain");
        }
        if (j > 0 && iv.lo < branches_[j - 1].interval().hi) {
            throw DomainError("branch intervals overlap");
        }
    }
    std::sort(crit_.begin(), crit_.end());
}

std::size_t CuspMap::locate(double x) const {
    std::optional<std::size_t> found;
    for (std::size_t j = 0; j < branches_.size(); ++j) {
        if (branches_[j].interval().contains(x)) {
            if (found) {
                std::ostringstream msg;
                msg << "x = " << x << " is a shared branch endpoint; the value is two-valued, name the branch";
                throw DomainError(msg.str());
            }
            found = j;
        }
    }
    if (!found) {
        std::ostringstream msg;
        msg << "x = " << x << " lies outside every branch of " << id_;
        throw DomainError(msg.str());
    }
    return *found;
}

std::optional<std::size_t> CuspMap::dynamic_branch(double x) const {
    for (std::size_t j = 0; j < branches_.size(); ++j) {
        const auto& iv = branches_[j].interval();
        if (x >= iv.lo && x < iv.hi) return j;
    }
    if (x == branches_.back().interval().hi) return branches_.size() - 1;
    return std::nullopt;
}

bool CuspMap::is_full_branch(double tol) const {
    const double scale = std::max(1.0, domain_.length());
    return std::all_of(branches_.begin(), branches_.end(), [&](const Branch& b) {
        const Interval im = b.image();
        return std::abs(im.lo - domain_.lo) <= tol * scale && std::abs(im.hi - domain_.hi) <= tol * scale;
    });
}

// --- PL maps --------------------------------------------------------------

PLFullBranchMap::PLFullBranchMap(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.size() < 2) throw DomainError("a full-branch PL map needs at least two branches");
    double total = 0.0;
    for (double w : weights_) {
        if (!(w > 0.0)) throw DomainError("PL weights must be positive");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw DomainError("PL weights must sum to 1");
}

std::string PLFullBranchMap::id() const {
    std::ostringstream out;
    out.precision(17);
    out << "pl:";
    for (std::size_t i = 0; i < weights_.size(); ++i) out << (i ? "," : "") << weights_[i];
    return out.str();
}

CuspMap PLFullBranchMap::to_cusp_map() const {
    std::vector<Branch> branches;
    std::vector<double> crit;
    double left = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        const double w = weights_[i];
        const double a = left;
        const double b = (i + 1 == weights_.size()) ? 1.0 : a + w;
        branches.emplace_back(
            Interval{a, b}, [a, w](double x) { return (x - a) / w; },
            [w](double) { return 1.0 / w; }, BranchKind::piecewise_linear,
            [a, w](double y) { return a + w * y; });
        if (i + 1 < weights_.size()) crit.push_back(b);
        left = b;
    }
    return CuspMap(id(), Interval{0.0, 1.0}, std::move(branches), std::move(crit));
}

double pl_pressure_closed_form(const PLFullBranchMap& map, double t) {
    // log-sum-exp keeps large |t| finite
    double top = -std::numeric_limits<double>::infinity();
    for (double w : map.weights()) top = std::max(top, t * std::log(w));
    double sum = 0.0;
    for (double w : map.weights()) sum += std::exp(t * std::log(w) - top);
    return top + std::log(sum);
}

// --- Rovella maps ---------------------------------------------------------

CuspMap rovella_map(double rho, double ell) {
    if (!(rho > 0.0) || !(ell > 0.0)) throw ParameterError("rovella map needs rho > 0 and ell > 0");
    const RovellaShape shape{rho, ell, -0.5, 0.5};
    const double d0 = shape.d0;
    const double d1 = shape.d1;
    auto bound = [rho, ell](double delta) { return 10.0 * rho * ell * std::pow(delta, ell - 1.0); };

    Branch left(
        Interval{-0.5, 0.0}, [=](double x) { return -rho * std::pow(std::abs(x), ell) + d1; },
        [=](double x) { return rho * ell * std::pow(std::abs(x), ell - 1.0); },
        BranchKind::rovella_left,
        [=](double y) { return -std::pow(std::max(0.0, (d1 - y) / rho), 1.0 / ell); }, bound);
    Branch right(
        Interval{0.0, 0.5}, [=](double x) { return rho * std::pow(std::abs(x), ell) + d0; },
        [=](double x) { return rho * ell * std::pow(std::abs(x), ell - 1.0); },
        BranchKind::rovella_right,
        [=](double y) { return std::pow(std::max(0.0, (y - d0) / rho), 1.0 / ell); }, bound);

    std::ostringstream id;
    id.precision(17);
    id << "rovella:rho=" << rho << ",ell=" << ell;
    return CuspMap(id.str(), Interval{-0.5, 0.5}, {std::move(left), std::move(right)}, {0.0}, shape);
}

CuspMap rovella_map_from_flow(const FlowParams& params) {
    params.validate();
    return rovella_map(params.rho, params.ell());
}

// --- evaluation -----------------------------------------------------------

namespace {

const Branch& checked_branch(const CuspMap& map, double x, std::size_t branch) {
    if (branch >= map.branch_count()) throw DomainError("branch index out of range");
    const Branch& b = map.branch(branch);
    if (!b.interval().contains(x)) {
        std::ostringstream msg;
        msg << "x = " << x << " is not in the closure of branch " << branch;
        throw DomainError(msg.str());
    }
    return b;
}

} // namespace

double eval_map(const CuspMap& map, double x) { return map.branch(map.locate(x)).value(x); }

double eval_map(const CuspMap& map, double x, std::size_t branch) {
    return checked_branch(map, x, branch).value(x);
}

double eval_derivative(const CuspMap& map, double x) {
    return map.branch(map.locate(x)).derivative(x);
}

double eval_derivative(const CuspMap& map, double x, std::size_t branch) {
    return checked_branch(map, x, branch).derivative(x);
}

// --- Schwarzian -----------------------------------------------------------

bool SchwarzianReport::passed() const {
    return std::all_of(branches.begin(), branches.end(), [](const auto& b) { return b.passed; });
}

SchwarzianReport schwarzian_check(const CuspMap& map, std::size_t grid_size) {
    if (grid_size < 3) throw DomainError("schwarzian check needs at least 3 grid points per branch");
    SchwarzianReport report;
    for (std::size_t j = 0; j < map.branch_count(); ++j) {
        const Branch& b = map.branch(j);
        const auto& iv = b.interval();
        const double h = iv.length() / static_cast<double>(grid_size + 1);
        std::vector<double> g(grid_size);
        double g_max = 0.0;
        for (std::size_t k = 0; k < grid_size; ++k) {
            const double x = iv.lo + h * static_cast<double>(k + 1);
            const double d = std::abs(b.derivative(x));
            if (d == 0.0 || !std::isfinite(d)) {
                std::ostringstream msg;
                msg << "derivative vanishes or is singular at interior point x = " << x << " of branch " << j;
                throw SingularDerivativeError(msg.str());
            }
            g[k] = 1.0 / std::sqrt(d);
            g_max = std::max(g_max, g[k]);
        }
        const double tol = 1e-9 * std::max(1.0, g_max);
        SchwarzianBranch out;
        out.branch = j;
        out.worst_second_difference = std::numeric_limits<double>::infinity();
        out.max_schwarzian = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k + 1 < grid_size; ++k) {
            const double second = g[k - 1] - 2.0 * g[k] + g[k + 1];
            out.worst_second_difference = std::min(out.worst_second_difference, second);
            out.max_schwarzian = std::max(out.max_schwarzian, -2.0 * second / (h * h) / g[k]);
        }
        out.passed = out.worst_second_difference >= -tol;
        report.branches.push_back(out);
    }
    return report;
}

// --- validation -----------------------------------------------------------

const AxiomResult& ValidationReport::at(const std::string& axiom) const {
    for (const auto& e : entries) {
        if (e.axiom == axiom) return e;
    }
    throw DomainError("no validation entry named " + axiom);
}

bool ValidationReport::passed() const {
    return std::none_of(entries.begin(), entries.end(),
                        [](const AxiomResult& e) { return e.status == CheckStatus::fail; });
}

namespace {

CheckStatus status_of(bool ok) { return ok ? CheckStatus::pass : CheckStatus::fail; }

AxiomResult check_holder(const CuspMap& map, const ValidationOptions& opt) {
    AxiomResult r{"holder", CheckStatus::pass, 0.0, 0.0, ""};
    std::mt19937_64 rng(opt.seed);
    for (const auto& b : map.branches()) {
        std::uniform_real_distribution<double> u(b.interval().lo, b.interval().hi);
        for (std::size_t k = 0; k < opt.holder_pairs; ++k) {
            const double x = u(rng);
            const double y = u(rng);
            if (x == y) continue;
            const double ratio = std::abs(b.derivative(x) - b.derivative(y)) /
                                 std::pow(std::abs(x - y), opt.holder_alpha);
            r.measured = std::max(r.measured, ratio);
        }
    }
    r.status = status_of(r.measured < opt.holder_C);
    r.worst_violation = std::max(0.0, r.measured - opt.holder_C);
    std::ostringstream d;
    d << "sup |Df(x)-Df(y)|/|x-y|^" << opt.holder_alpha << " over sampled pairs vs C = " << opt.holder_C;
    r.detail = d.str();
    return r;
}

AxiomResult check_crit_derivative(const CuspMap& map, const ValidationOptions& opt) {
    AxiomResult r{"crit_derivative", CheckStatus::pass, 0.0, 0.0, ""};
    const double delta = opt.cusp_offset;
    std::size_t sides = 0;
    bool ok = true;
    for (double c : map.crit()) {
        for (const auto& b : map.branches()) {
            const auto& iv = b.interval();
            double sign = 0.0;
            if (iv.lo == c) sign = 1.0;
            else if (iv.hi == c) sign = -1.0;
            else continue;
            ++sides;
            const double near = std::abs(b.derivative(c + sign * delta));
            const double far = std::abs(b.derivative(c + sign * 100.0 * delta));
            const double bound = b.cusp_bound(delta);
            r.measured = std::max(r.measured, near);
            r.worst_violation = std::max(r.worst_violation, near - bound);
            if (!(near <= bound) || !(near < far)) ok = false;
        }
    }
    r.status = status_of(ok);
    r.worst_violation = std::max(0.0, r.worst_violation);
    r.detail = sides == 0 ? "no cusp points" : "one-sided |Df| at offset " + std::to_string(delta) + " from Crit";
    return r;
}

AxiomResult check_schwarzian(const CuspMap& map, const ValidationOptions& opt) {
    AxiomResult r{"schwarzian", CheckStatus::pass, 0.0, 0.0, "min second difference of 1/sqrt|Df|"};
    try {
        const auto rep = schwarzian_check(map, opt.grid_size);
        r.measured = std::numeric_limits<double>::infinity();
        for (const auto& b : rep.branches) r.measured = std::min(r.measured, b.worst_second_difference);
        r.worst_violation = std::max(0.0, -r.measured);
        r.status = status_of(rep.passed());
    } catch (const SingularDerivativeError& e) {
        r.status = CheckStatus::fail;
        r.detail = e.what();
    }
    return r;
}

std::vector<AxiomResult> check_rovella(const CuspMap& map, const ValidationOptions& opt) {
    const RovellaShape& s = *map.rovella();
    std::vector<AxiomResult> out;
    const std::size_t left = map.locate(-0.5);
    const std::size_t right = map.locate(0.5);
    const Branch& bl = map.branch(left);
    const Branch& br = map.branch(right);

    {
        AxiomResult r{"f1", CheckStatus::pass, 0.0, 0.0, "lateral limits f(0+) = -1/2, f(0-) = +1/2"};
        const double plus = br.value(0.0);
        const double minus = bl.value(0.0);
        r.measured = std::max(std::abs(std::abs(plus) - 0.5), std::abs(std::abs(minus) - 0.5));
        const double sign_err = std::max(std::abs(plus - s.d0), std::abs(minus - s.d1));
        r.worst_violation = std::max(r.measured, sign_err);
        r.status = status_of(r.worst_violation <= 1e-12);
        out.push_back(r);
    }
    {
        AxiomResult r{"f2", CheckStatus::pass, 0.0, 0.0, "Df > 0 off the cusp and local order at 0 is > 0"};
        double min_df = std::numeric_limits<double>::infinity();
        for (const Branch* b : {&bl, &br}) {
            const auto& iv = b->interval();
            const double h = iv.length() / static_cast<double>(opt.grid_size + 1);
            for (std::size_t k = 1; k <= opt.grid_size; ++k) {
                min_df = std::min(min_df, b->derivative(iv.lo + h * static_cast<double>(k)));
            }
        }
        // order estimate log(Df(d)/Df(100 d)) / log(1/100) on both sides
        const double d = opt.cusp_offset;
        const double order_r = std::log(br.derivative(d) / br.derivative(100.0 * d)) / std::log(0.01);
        const double order_l = std::log(bl.derivative(-d) / bl.derivative(-100.0 * d)) / std::log(0.01);
        r.measured = std::min(order_r, order_l);
        const bool ok = min_df > 0.0 && r.measured > 1e-9 && s.ell > 1.0;
        r.worst_violation = ok ? 0.0 : std::max(0.0, -r.measured) + (min_df > 0.0 ? 0.0 : -min_df);
        r.status = status_of(ok);
        std::ostringstream detail;
        detail << r.detail << "; min Df = " << min_df << ", estimated order = " << r.measured;
        r.detail = detail.str();
        out.push_back(r);
    }
    {
        AxiomResult r{"f3", CheckStatus::pass, 0.0, 0.0, "max Df on each branch attained at the outer endpoint"};
        double excess = -std::numeric_limits<double>::infinity();
        for (const Branch* b : {&bl, &br}) {
            const auto& iv = b->interval();
            const double outer = (b == &bl) ? iv.lo : iv.hi;
            const double at_outer = b->derivative(outer);
            const double h = iv.length() / static_cast<double>(opt.grid_size + 1);
            double grid_max = 0.0;
            for (std::size_t k = 1; k <= opt.grid_size; ++k) {
                grid_max = std::max(grid_max, b->derivative(iv.lo + h * static_cast<double>(k)));
            }
            excess = std::max(excess, grid_max - at_outer);
        }
        r.measured = excess;
        r.worst_violation = std::max(0.0, excess);
        r.status = status_of(excess <= 1e-12);
        out.push_back(r);
    }
    {
        AxiomResult r{"f4", CheckStatus::not_checked, 0.0, 0.0, "pre-periodic repelling outer endpoints"};
        if (opt.f4_horizon > 0) {
            bool all = true;
            std::ostringstream detail;
            for (double start : {-0.5, 0.5}) {
                std::vector<double> orbit{start};
                std::vector<double> slopes;
                bool found = false;
                double x = start;
                for (std::size_t n = 0; n < opt.f4_horizon && !found; ++n) {
                    auto j = map.dynamic_branch(x);
                    if (!j) break;
                    slopes.push_back(std::abs(map.branch(*j).derivative(x)));
                    x = map.branch(*j).value(x);
                    for (std::size_t m = 0; m < orbit.size(); ++m) {
                        if (std::abs(orbit[m] - x) <= 1e-9) {
                            double mult = 1.0;
                            for (std::size_t q = m; q < slopes.size(); ++q) mult *= slopes[q];
                            found = mult > 1.0;
                            detail << "endpoint " << start << ": cycle of period " << orbit.size() - m
                                   << " with multiplier " << mult << "; ";
                            break;
                        }
                    }
                    orbit.push_back(x);
                }
                if (!found) detail << "endpoint " << start << ": no repelling cycle within horizon; ";
                all = all && found;
            }
            r.status = status_of(all);
            r.detail = detail.str();
        }
        out.push_back(r);
    }
    {
        AxiomResult r{"f5", CheckStatus::pass, 0.0, 0.0, "Sf = -2 (1/sqrt Df)'' / (1/sqrt Df) < 0"};
        try {
            const auto rep = schwarzian_check(map, opt.grid_size);
            r.measured = -std::numeric_limits<double>::infinity();
            for (const auto& b : rep.branches) r.measured = std::max(r.measured, b.max_schwarzian);
            r.worst_violation = std::max(0.0, r.measured);
            r.status = status_of(r.measured < 0.0);
        } catch (const SingularDerivativeError& e) {
            r.status = CheckStatus::fail;
            r.detail = e.what();
        }
        out.push_back(r);
    }
    return out;
}

} // namespace

ValidationReport validate_cusp_map(const CuspMap& map, const ValidationOptions& options) {
    if (!(options.holder_alpha > 1.0)) throw DomainError("holder exponent must exceed 1");
    ValidationReport report;
    report.map_id = map.id();
    report.entries.push_back(check_holder(map, options));
    report.entries.push_back(check_crit_derivative(map, options));
    report.entries.push_back(check_schwarzian(map, options));
    if (map.rovella()) {
        for (auto& e : check_rovella(map, options)) report.entries.push_back(std::move(e));
    }
    return report;
}

} // namespace rovella
