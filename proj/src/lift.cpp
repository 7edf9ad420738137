#include "rovella/lift.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include "rovella/errors.hpp"

namespace rovella {

// --- fiber maps -----------------------------------------------------------

FiberMap FiberMap::rovella(const FlowParams& params) {
    params.validate();
    const double beta = params.beta();
    return FiberMap(beta, std::pow(0.5, beta), {params.cy_minus, params.cy_plus}, true);
}

FiberMap FiberMap::uniform(double contraction, std::vector<double> offsets) {
    if (!(contraction >= 0.0 && contraction < 1.0)) throw DomainError("fiber contraction must lie in [0, 1)");
    if (offsets.empty()) throw DomainError("fiber map needs one offset per branch");
    return FiberMap(contraction, contraction, std::move(offsets), false);
}

double FiberMap::contraction(double x) const { return power_ ? std::pow(std::abs(x), beta_) : beta_; }

// --- lifting --------------------------------------------------------------

namespace {

bool on_crit(const CuspMap& map, double x) {
    return std::find(map.crit().begin(), map.crit().end(), x) != map.crit().end();
}

// Mass density of mu near x, used to follow the measure backwards.
class DensityLookup {
public:
    explicit DensityLookup(const MeasureApprox& mu) : mu_(mu) {
        for (std::size_t i = 0; i < mu.support.size(); ++i) order_.push_back(i);
        std::sort(order_.begin(), order_.end(),
                  [&](std::size_t a, std::size_t b) { return mu.support[a].lo < mu.support[b].lo; });
    }

    // (category, score): exact atom matches beat cell densities
    std::pair<int, double> at(double x) const {
        auto it = std::upper_bound(order_.begin(), order_.end(), x,
                                   [&](double v, std::size_t i) { return v < mu_.support[i].lo; });
        std::pair<int, double> best{0, 0.0};
        // neighbours on both sides cover atoms sitting at x and the cell containing x
        for (int step = 0; step < 2 && it != order_.begin(); ++step) {
            --it;
            const std::size_t i = *it;
            const Interval& s = mu_.support[i];
            const double w = mu_.weights[i];
            if (w <= 0.0) continue;
            if (mu_.is_atomic(i)) {
                if (std::abs(s.lo - x) <= 1e-12) best = std::max(best, {2, w});
            } else if (s.contains(x)) {
                best = std::max(best, {1, w / s.length()});
            }
        }
        return best;
    }

private:
    const MeasureApprox& mu_;
    std::vector<std::size_t> order_;
};

struct ChainLink {
    double x;
    std::size_t branch;
};

} // namespace

SquareMeasureApprox lift_to_square(const MeasureApprox& mu, const CuspMap& map, const FiberMap& fiber,
                                   std::size_t n_push) {
    if (fiber.branch_count() != map.branch_count()) {
        throw StructureError("fiber map and base map have different branch counts");
    }
    SquareMeasureApprox out;
    out.provenance = Provenance::lifted_from_interval;
    out.entropy = mu.entropy;
    out.lyapunov = mu.lyapunov;
    out.map_id = mu.map_id.empty() ? map.id() : mu.map_id;
    out.increments.assign(n_push, 0.0);
    const bool cells = std::any_of(mu.support.begin(), mu.support.end(),
                                   [](const Interval& s) { return s.lo != s.hi; });
    if (cells) out.source_cells = mu.support;

    const DensityLookup density(mu);
    std::vector<ChainLink> chain;
    for (std::size_t i = 0; i < mu.support.size(); ++i) {
        const double w = mu.weights[i];
        const double x0 = mu.support[i].midpoint();
        if (on_crit(map, x0)) {
            ++out.dropped_atoms;
            out.dropped_mass += w;
            continue;
        }
        chain.clear();
        bool dropped = false;
        double cur = x0;
        for (std::size_t k = 0; k < n_push; ++k) {
            std::optional<ChainLink> pick;
            std::tuple<int, double> pick_score{-1, 0.0};
            bool saw_crit = false;
            for (std::size_t b = 0; b < map.branch_count(); ++b) {
                const Branch& br = map.branch(b);
                if (!br.image().contains(cur)) continue;
                const double pre = br.inverse(cur);
                if (on_crit(map, pre)) {
                    saw_crit = true;
                    continue;
                }
                const double slope = std::abs(br.derivative(pre));
                const auto d = density.at(pre);
                const std::tuple<int, double> score{d.first, d.first == 0 ? 1.0 / slope : d.second / slope};
                if (!pick || score > pick_score) {
                    pick = ChainLink{pre, b};
                    pick_score = score;
                }
            }
            if (!pick) {
                dropped = saw_crit;
                break;
            }
            chain.push_back(*pick);
            cur = pick->x;
        }
        if (dropped) {
            ++out.dropped_atoms;
            out.dropped_mass += w;
            continue;
        }
        // push (x_depth, 0) forward along the chain
        double y = 0.0;
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) y = fiber.apply(it->branch, it->x, y);
        double product = 1.0;
        for (std::size_t k = 0; k < chain.size(); ++k) {
            const double inc = std::abs(fiber.offset(chain[k].branch)) * product;
            out.increments[k] = std::max(out.increments[k], inc);
            product *= fiber.contraction(chain[k].x);
        }
        // the start point differs from the attractor by at most the section half-width
        out.fiber_residual = std::max(out.fiber_residual, 0.5 * product);

        out.x.push_back(x0);
        out.y.push_back(y);
        out.weights.push_back(w);
        if (cells) out.source_index.push_back(i);
    }
    return out;
}

SquareMeasureApprox lift_to_square(const MeasureApprox& mu, const FlowParams& flow, std::size_t n_push) {
    return lift_to_square(mu, rovella_map_from_flow(flow), FiberMap::rovella(flow), n_push);
}

MeasureApprox project_to_interval(const SquareMeasureApprox& mu2) {
    MeasureApprox out;
    if (!mu2.source_cells.empty()) {
        out.support = mu2.source_cells;
        out.weights.assign(mu2.source_cells.size(), 0.0);
        for (std::size_t k = 0; k < mu2.x.size(); ++k) out.weights[mu2.source_index[k]] += mu2.weights[k];
    } else {
        std::map<double, double> mass;
        for (std::size_t k = 0; k < mu2.x.size(); ++k) mass[mu2.x[k]] += mu2.weights[k];
        for (const auto& [x, w] : mass) {
            out.support.push_back({x, x});
            out.weights.push_back(w);
        }
    }
    out.entropy = mu2.entropy;
    out.lyapunov = mu2.lyapunov;
    out.map_id = mu2.map_id;
    return out;
}

MeasureApprox project_to_interval(const SquareMeasureApprox& mu2, const Partition& grid) {
    std::vector<double> w(grid.size(), 0.0);
    for (std::size_t k = 0; k < mu2.x.size(); ++k) {
        const auto cell = grid.find(mu2.x[k]);
        if (!cell) throw DomainError("square measure point outside the projection grid");
        w[*cell] += mu2.weights[k];
    }
    MeasureApprox out = MeasureApprox::cells(grid, w);
    out.entropy = mu2.entropy;
    out.lyapunov = mu2.lyapunov;
    out.map_id = mu2.map_id;
    return out;
}

// --- suspension -----------------------------------------------------------

RoofIntegral roof_integrability_check(const MeasureApprox& mu, const RoofFunction& roof) {
    RoofIntegral out;
    for (std::size_t i = 0; i < mu.support.size(); ++i) {
        const double w = mu.weights[i];
        if (w == 0.0) continue;
        const Interval& s = mu.support[i];
        if (mu.is_atomic(i)) {
            if (!roof.is_constant() && s.lo == roof.center()) {
                out.singular_mass += w;
                continue;
            }
            out.value += w * roof(s.lo);
        } else {
            out.value += w * roof.integral(s.lo, s.hi) / s.length();
        }
    }
    out.divergent = out.singular_mass > 0.0;
    if (out.divergent) out.value = infinity;
    return out;
}

double abramov_entropy(double h_base, double roof_integral) {
    if (!(roof_integral > 0.0)) throw DomainError("roof integral must be positive");
    return h_base / roof_integral;
}

SuspensionMeasure suspend(const SquareMeasureApprox& mu2, const RoofFunction& roof) {
    SuspensionMeasure out;
    out.base = project_to_interval(mu2);
    const double mass = out.base.total_mass();
    if (!(mass > 0.0)) throw DomainError("cannot suspend an empty measure");
    const RoofIntegral ri = roof_integrability_check(out.base, roof);
    if (ri.divergent || !std::isfinite(ri.value)) {
        std::ostringstream msg;
        msg << "roof integral diverges: mass " << ri.singular_mass << " on the singular line";
        throw IntegrabilityError(msg.str());
    }
    out.base_id = mu2.map_id;
    out.roof_integral = ri.value / mass;
    out.normalization = out.roof_integral;
    out.h_base = mu2.entropy;
    out.h_flow = abramov_entropy(out.h_base, out.roof_integral);
    out.lyapunov_base = mu2.lyapunov;
    out.dropped_atoms = mu2.dropped_atoms;
    out.dropped_mass = mu2.dropped_mass;
    out.square = mu2;
    return out;
}

// --- flow potentials ------------------------------------------------------

double delta_potential(const FlowPotential& phi, const CuspMap& map, const RoofFunction& roof, double x) {
    if (!phi.is_geometric()) return phi.parameter() * roof(x);
    if (phi.parameter() == 0.0) return 0.0;
    const auto j = map.dynamic_branch(x);
    if (!j) throw DomainError("point outside every branch");
    const double d = std::abs(map.branch(*j).derivative(x));
    if (d == 0.0 || !std::isfinite(d)) {
        std::ostringstream msg;
        msg << "log|Df| is singular at x = " << x;
        throw SingularDerivativeError(msg.str());
    }
    return -phi.parameter() * std::log(d);
}

double FlowPotential::pointwise(const CuspMap& map, const RoofFunction& roof, double x, double s) const {
    const double r = roof(x);
    if (!(s >= 0.0 && s <= r)) throw DomainError("height must lie in [0, r(x)]");
    if (!geometric_) return parameter_;
    return delta_potential(*this, map, roof, x) / r;
}

FlowPressureResult flow_pressure(const CuspMap& map, const RoofFunction& roof, const FlowPotential& phi,
                                 const EstimatorConfig& config) {
    FlowPressureResult out;
    const Potential delta = phi.is_geometric()
                                ? geometric_potential(phi.parameter(), config.floor)
                                : Potential([&roof, c = phi.parameter()](const Branch&, double x) {
                                      return PotentialValue{c * roof(x), false};
                                  });
    auto G = [&](double s) {
        const Potential shifted = [&](const Branch& b, double x) {
            PotentialValue v = delta(b, x);
            if (s != 0.0) v.value -= s * roof(x);
            return v;
        };
        ++out.evaluations;
        const PressureEstimate e = estimate_pressure(map, shifted, config);
        out.clamped = std::max(out.clamped, e.clamped);
        return e.value;
    };

    double lo;
    double hi;
    const double g0 = G(0.0);
    if (g0 == 0.0) {
        out.value = 0.0;
        return out;
    }
    // G decreases in s; widen by doubling until the sign flips
    if (g0 > 0.0) {
        lo = 0.0;
        hi = 1.0;
        while (!(G(hi) <= 0.0)) {
            if (hi >= flow_bracket_limit) throw BracketError("no flow-pressure root in [0, 50]");
            lo = hi;
            hi = std::min(2.0 * hi, flow_bracket_limit);
        }
    } else {
        hi = 0.0;
        lo = -1.0;
        while (!(G(lo) >= 0.0)) {
            if (lo <= -flow_bracket_limit) throw BracketError("no flow-pressure root in [-50, 0]");
            hi = lo;
            lo = std::max(2.0 * lo, -flow_bracket_limit);
        }
    }
    out.bracket_lo = lo;
    out.bracket_hi = hi;
    while (hi - lo > flow_root_tolerance) {
        const double mid = 0.5 * (lo + hi);
        const double g = G(mid);
        if (g == 0.0) {
            lo = hi = mid;
            break;
        }
        if (g > 0.0) lo = mid; else hi = mid;
    }
    out.value = 0.5 * (lo + hi);
    return out;
}

SuspensionMeasure flow_equilibrium(const CuspMap& map, const FiberMap& fiber, const RoofFunction& roof,
                                   double t, const FlowEquilibriumOptions& options) {
    if (options.domain) {
        const auto& d = *options.domain;
        if (!(t > d.t_minus.value && t < d.t_plus.value)) {
            std::ostringstream msg;
            msg << "t = " << t << " is outside the admissible range (" << d.t_minus.value << ", "
                << d.t_plus.value << ")";
            throw RangeError(msg.str());
        }
    }
    const MeasureApprox mu = equilibrium_measure(map, t, options.N, options.floor);
    SuspensionMeasure out = suspend(lift_to_square(mu, map, fiber, options.n_push), roof);
    out.clamped = mu.clamped;
    const FlowPressureResult fp = flow_pressure(map, roof, FlowPotential::geometric(t), options.pressure);
    out.flow_pressure = fp.value;
    out.flow_free_energy = (out.h_base - t * out.lyapunov_base) / out.roof_integral;
    out.residual = out.flow_pressure - out.flow_free_energy;
    out.clamped = std::max(out.clamped, fp.clamped);
    return out;
}

} // namespace rovella
