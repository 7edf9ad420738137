#include "rovella/thermo.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>
#include <utility>

#include "rovella/errors.hpp"

namespace rovella {

namespace {

// 8-point Gauss-Legendre rule on [-1, 1]
constexpr std::array<double, 4> gauss_nodes{0.1834346424956498, 0.5255324099163290,
                                            0.7966664774136267, 0.9602898564975363};
constexpr std::array<double, 4> gauss_weights{0.3626837833783620, 0.3137066458778873,
                                              0.2223810344533745, 0.1012285362903763};

template <class F>
double gauss8(double a, double b, F&& f) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t k = 0; k < gauss_nodes.size(); ++k) {
        sum += gauss_weights[k] * (f(mid - half * gauss_nodes[k]) + f(mid + half * gauss_nodes[k]));
    }
    return sum * half;
}

const Branch* branch_of_cell(const CuspMap& map, const Interval& cell) {
    const double mid = cell.midpoint();
    for (const auto& b : map.branches()) {
        if (b.interval().lo <= cell.lo && cell.hi <= b.interval().hi && b.interval().contains(mid)) return &b;
    }
    return nullptr;
}

std::optional<Interval> branch_preimage(const Branch& b, const Interval& target) {
    const Interval im = b.image();
    const double a = std::max(target.lo, im.lo);
    const double c = std::min(target.hi, im.hi);
    if (a > c) return std::nullopt;
    double xa = b.inverse(a);
    double xc = b.inverse(c);
    if (xa > xc) std::swap(xa, xc);
    return Interval{xa, xc};
}

} // namespace

// --- potentials -----------------------------------------------------------

PotentialValue log_derivative(const Branch& branch, double x, double floor) {
    const double d = std::abs(branch.derivative(x));
    if (d < floor) return {std::log(floor), true};
    return {std::log(d), false};
}

Potential geometric_potential(double t, double floor) {
    if (!(floor > 0.0)) throw DomainError("derivative floor must be positive");
    return [t, floor](const Branch& b, double x) {
        if (t == 0.0) return PotentialValue{0.0, false};
        const auto ld = log_derivative(b, x, floor);
        return PotentialValue{-t * ld.value, ld.clamped};
    };
}

Potential constant_potential(double c) {
    return [c](const Branch&, double) { return PotentialValue{c, false}; };
}

// --- partitions -----------------------------------------------------------

Partition::Partition(std::vector<double> edges) : edges_(std::move(edges)) {
    if (edges_.size() < 2) throw DomainError("a partition needs at least one cell");
    for (std::size_t i = 1; i < edges_.size(); ++i) {
        if (!(edges_[i] > edges_[i - 1])) throw DomainError("partition edges must increase");
    }
}

std::optional<std::size_t> Partition::find(double x) const {
    if (x < edges_.front() || x > edges_.back()) return std::nullopt;
    auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    if (it == edges_.end()) return size() - 1;
    return static_cast<std::size_t>(it - edges_.begin()) - 1;
}

Partition ulam_partition(const CuspMap& map, std::size_t N) {
    if (N < 1) throw DomainError("partition needs N >= 1");
    const Interval dom = map.domain();
    const double L = dom.length();
    // (edge, structural) pairs; structural edges win during deduplication
    std::vector<std::pair<double, bool>> raw;
    for (std::size_t k = 0; k <= N; ++k) {
        const double x = k == N ? dom.hi : dom.lo + L * static_cast<double>(k) / static_cast<double>(N);
        raw.emplace_back(x, k == 0 || k == N);
    }
    for (const auto& b : map.branches()) {
        raw.emplace_back(b.interval().lo, true);
        raw.emplace_back(b.interval().hi, true);
    }
    const double zone = 0.02 * L;
    for (double c : map.crit()) {
        raw.emplace_back(c, true);
        for (double d = zone; d >= 1e-12 * L; d *= 0.5) {
            if (c - d > dom.lo) raw.emplace_back(c - d, true);
            if (c + d < dom.hi) raw.emplace_back(c + d, true);
        }
    }
    std::sort(raw.begin(), raw.end());
    std::vector<std::pair<double, bool>> kept;
    const double tol = 1e-14 * L;
    for (const auto& e : raw) {
        if (!kept.empty() && e.first - kept.back().first <= tol) {
            if (e.second && !kept.back().second) kept.back() = e;
            continue;
        }
        kept.push_back(e);
    }
    std::vector<double> edges;
    edges.reserve(kept.size());
    for (const auto& e : kept) edges.push_back(e.first);
    return Partition(std::move(edges));
}

// --- transfer matrix ------------------------------------------------------

TransferMatrix ulam_operator(const CuspMap& map, std::size_t N, const Potential& potential) {
    TransferMatrix out{ulam_partition(map, N), {}, 0, false};
    const Partition& grid = out.grid;
    const auto& edges = grid.edges();
    const std::size_t n = grid.size();
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(4 * n);

    for (std::size_t i = 0; i < n; ++i) {
        const Interval cell = grid.cell(i);
        const Branch* b = branch_of_cell(map, cell);
        if (!b) continue;  // cell in a gap between branches
        const double ya = b->value(cell.lo);
        const double yb = b->value(cell.hi);
        const double lo = std::max(std::min(ya, yb), edges.front());
        const double hi = std::min(std::max(ya, yb), edges.back());
        if (!(lo < hi)) continue;
        bool clamped = false;
        auto integrand = [&](double x) {
            const PotentialValue v = potential(*b, x);
            clamped = clamped || v.clamped;
            return std::exp(v.value) * std::abs(b->derivative(x));
        };
        std::size_t j = *grid.find(lo);
        for (; j < n && edges[j] < hi; ++j) {
            const double ylo = std::max(lo, edges[j]);
            const double yhi = std::min(hi, edges[j + 1]);
            if (!(ylo < yhi)) continue;
            double xa = std::clamp(b->inverse(ylo), cell.lo, cell.hi);
            double xb = std::clamp(b->inverse(yhi), cell.lo, cell.hi);
            if (xa > xb) std::swap(xa, xb);
            if (!(xa < xb)) continue;
            const double value = gauss8(xa, xb, integrand) / grid.width(j);
            if (!std::isfinite(value)) out.overflow = true;
            if (value != 0.0) entries.emplace_back(static_cast<int>(i), static_cast<int>(j), value);
        }
        if (clamped) ++out.clamped_cells;
    }
    out.matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    out.matrix.setFromTriplets(entries.begin(), entries.end());
    return out;
}

// --- power iteration ------------------------------------------------------

PowerIterationResult power_iteration(const SparseRowMatrix& A, bool transpose,
                                     const PowerIterationOptions& options) {
    const Eigen::Index n = A.rows();
    if (n == 0 || A.cols() != n) throw DomainError("power iteration needs a nonempty square matrix");
    PowerIterationResult out;
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    Eigen::VectorXd y(n);
    double prev_lambda = 0.0;
    double prev_change = 0.0;
    double last_gap = infinity;
    for (std::size_t it = 1; it <= options.max_iters; ++it) {
        if (transpose) {
            y = (x.transpose() * A).transpose();
        } else {
            y = A * x;
        }
        const double lambda = y.sum();  // x has unit L1 norm and A >= 0
        if (!std::isfinite(lambda)) {
            out.eigenvalue = infinity;
            out.vector = x;
            out.iterations = it;
            return out;
        }
        if (lambda == 0.0) {
            out.eigenvalue = 0.0;
            out.vector = x;
            out.iterations = it;
            out.warning = "nilpotent matrix: spectral radius 0";
            return out;
        }
        y /= lambda;
        const double change = (y - x).lpNorm<1>();
        if (it > 1 && prev_change > 0.0) out.gap_ratio = change / prev_change;
        last_gap = std::abs(lambda - prev_lambda);
        x.swap(y);
        if (it > 1 && last_gap <= options.eigenvalue_tol * lambda && change <= options.vector_tol) {
            out.eigenvalue = lambda;
            out.vector = x;
            out.iterations = it;
            if (out.gap_ratio > 1.0 - 1e-3) {
                std::ostringstream msg;
                msg << "small eigen-gap: iterate contraction ratio " << out.gap_ratio
                    << "; leading eigenvector may not be unique";
                out.warning = msg.str();
            }
            return out;
        }
        prev_lambda = lambda;
        prev_change = change;
    }
    std::ostringstream msg;
    msg << "power iteration did not converge in " << options.max_iters << " iterations";
    throw ConvergenceError(msg.str(), last_gap);
}

// --- pressure estimators --------------------------------------------------

std::string to_string(PressureMethod method) {
    switch (method) {
    case PressureMethod::periodic_orbit: return "periodic-orbit";
    case PressureMethod::ulam: return "ulam";
    case PressureMethod::closed_form: return "closed-form";
    case PressureMethod::synthetic: return "synthetic";
    }
    return "unknown";
}

PressureMethod pressure_method_from_string(const std::string& name) {
    if (name == "periodic-orbit") return PressureMethod::periodic_orbit;
    if (name == "ulam") return PressureMethod::ulam;
    if (name == "closed-form") return PressureMethod::closed_form;
    if (name == "synthetic") return PressureMethod::synthetic;
    throw ParseError("unknown pressure method: " + name);
}

void for_each_periodic_orbit(const CuspMap& map, std::size_t n,
                             const std::function<void(const PeriodicOrbit&)>& visit) {
    if (n < 1) throw DomainError("period must be at least 1");
    const std::size_t k = map.branch_count();
    PeriodicOrbit orbit;
    orbit.word.assign(n, 0);
    orbit.points.assign(n, 0.0);

    auto compose = [&](double x) {
        for (std::size_t m = 0; m < n; ++m) {
            const Branch& b = map.branch(orbit.word[m]);
            x = b.value(std::clamp(x, b.interval().lo, b.interval().hi));
        }
        return x;
    };

    auto solve = [&](const Interval& cyl) {
        double lo = cyl.lo;
        double hi = cyl.hi;
        double glo = compose(lo) - lo;
        const double ghi = compose(hi) - hi;
        double root;
        if (glo == 0.0) {
            root = lo;
        } else if (ghi == 0.0) {
            root = hi;
        } else if ((glo < 0.0) == (ghi < 0.0)) {
            return;
        } else {
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                const double g = compose(mid) - mid;
                if ((g < 0.0) == (glo < 0.0)) {
                    lo = mid;
                    glo = g;
                } else {
                    hi = mid;
                }
            }
            root = 0.5 * (lo + hi);
        }
        double x = root;
        for (std::size_t m = 0; m < n; ++m) {
            const Branch& b = map.branch(orbit.word[m]);
            x = std::clamp(x, b.interval().lo, b.interval().hi);
            orbit.points[m] = x;
            x = b.value(x);
        }
        visit(orbit);
    };

    // cylinders are built from the back: C_{m} = f_{w_m}^{-1}(C_{m+1}) within branch w_m
    std::function<void(std::size_t, const Interval&)> descend = [&](std::size_t level, const Interval& target) {
        for (std::size_t b = 0; b < k; ++b) {
            const auto pre = branch_preimage(map.branch(b), target);
            if (!pre) continue;
            orbit.word[level] = b;
            if (level == 0) {
                solve(*pre);
            } else {
                descend(level - 1, *pre);
            }
        }
    };
    descend(n - 1, map.domain());
}

PressureEstimate periodic_orbit_pressure(const CuspMap& map, const Potential& potential, std::size_t n) {
    if (!map.is_full_branch()) {
        throw StructureError("periodic-orbit pressure needs a full-branch map; use the Ulam estimator for " +
                             map.id());
    }
    if (n < 1 || n > 22) throw DomainError("periodic-orbit depth must lie in [1, 22]");
    PressureEstimate out;
    double top = -infinity;
    double sum = 0.0;
    for_each_periodic_orbit(map, n, [&](const PeriodicOrbit& orbit) {
        double s = 0.0;
        bool clamped = false;
        for (std::size_t m = 0; m < n; ++m) {
            const auto v = potential(map.branch(orbit.word[m]), orbit.points[m]);
            s += v.value;
            clamped = clamped || v.clamped;
        }
        if (clamped) ++out.clamped;
        if (s > top) {
            sum = (top == -infinity ? 0.0 : sum * std::exp(top - s)) + 1.0;
            top = s;
        } else {
            sum += std::exp(s - top);
        }
    });
    out.value = (top + std::log(sum)) / static_cast<double>(n);
    return out;
}

PressureEstimate periodic_orbit_pressure(const CuspMap& map, double t, std::size_t n, double floor) {
    return periodic_orbit_pressure(map, geometric_potential(t, floor), n);
}

PressureEstimate ulam_pressure(const CuspMap& map, const Potential& potential, std::size_t N) {
    if (N < 16) throw DomainError("Ulam grid size must be at least 16");
    const TransferMatrix T = ulam_operator(map, N, potential);
    PressureEstimate out;
    out.clamped = T.clamped_cells;
    if (T.overflow) {
        out.value = infinity;
        out.warning = "transfer weights overflow";
        return out;
    }
    const auto r = power_iteration(T.matrix, true);
    out.value = std::log(r.eigenvalue);
    out.iterations = r.iterations;
    out.warning = r.warning;
    return out;
}

PressureEstimate ulam_pressure(const CuspMap& map, double t, std::size_t N, double floor) {
    return ulam_pressure(map, geometric_potential(t, floor), N);
}

PressureMethod resolve_method(const CuspMap& map, const EstimatorConfig& config) {
    if (config.method) return *config.method;
    return map.is_full_branch() ? PressureMethod::periodic_orbit : PressureMethod::ulam;
}

PressureEstimate estimate_pressure(const CuspMap& map, const Potential& potential,
                                   const EstimatorConfig& config) {
    switch (resolve_method(map, config)) {
    case PressureMethod::periodic_orbit: return periodic_orbit_pressure(map, potential, config.n);
    case PressureMethod::ulam: return ulam_pressure(map, potential, config.N);
    default: throw DomainError("estimator must be periodic-orbit or ulam");
    }
}

// --- pressure curves ------------------------------------------------------

void PressureCurve::certify() {
    worst_second_difference = infinity;
    convex = true;
    monotone_decreasing = true;
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (!(values[i] - values[i - 1] <= convexity_tolerance)) monotone_decreasing = false;
    }
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        const double hl = t[i] - t[i - 1];
        const double hr = t[i + 1] - t[i];
        // reduces to p[i-1] - 2 p[i] + p[i+1] on uniform grids
        const double d = 2.0 * (hl * values[i + 1] + hr * values[i - 1] - (hl + hr) * values[i]) / (hl + hr);
        if (!(d >= worst_second_difference)) worst_second_difference = d;
    }
    if (std::isnan(worst_second_difference) || worst_second_difference < -convexity_tolerance) convex = false;
}

PressureCurve PressureCurve::from_samples(std::vector<double> t, std::vector<double> values,
                                          PressureMethod method, std::size_t resolution,
                                          std::string map_id) {
    if (t.size() != values.size()) throw DomainError("curve needs one value per parameter");
    if (t.size() < 3) throw DomainError("a pressure curve needs at least 3 parameters");
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (!(t[i] > t[i - 1])) throw DomainError("curve parameters must be strictly increasing");
    }
    PressureCurve c;
    c.t = std::move(t);
    c.values = std::move(values);
    c.clamped.assign(c.t.size(), 0);
    c.method = method;
    c.resolution = resolution;
    c.map_id = std::move(map_id);
    c.certify();
    return c;
}

std::vector<double> linear_grid(double start, double step, double stop) {
    if (!(step > 0.0) || !(stop >= start)) throw DomainError("grid needs step > 0 and stop >= start");
    const double span = (stop - start) / step;
    const auto intervals = static_cast<std::size_t>(std::llround(span));
    if (std::abs(span - static_cast<double>(intervals)) > 1e-9) {
        throw DomainError("grid step must divide stop - start");
    }
    std::vector<double> grid(intervals + 1);
    for (std::size_t k = 0; k <= intervals; ++k) {
        if (intervals == 0) {
            grid[k] = start;
            continue;
        }
        // interpolating between the ends keeps nodes like t = 1 exact
        const double a = static_cast<double>(intervals - k);
        const double b = static_cast<double>(k);
        grid[k] = (start * a + stop * b) / static_cast<double>(intervals);
    }
    return grid;
}

PressureCurve pressure_curve(const CuspMap& map, const std::vector<double>& t_grid,
                             const EstimatorConfig& config, std::size_t jobs) {
    const PressureMethod method = resolve_method(map, config);
    const std::size_t m = t_grid.size();
    std::vector<PressureEstimate> results(m);
    std::vector<std::exception_ptr> errors(m);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < m; i = next++) {
            try {
                results[i] = estimate_pressure(map, geometric_potential(t_grid[i], config.floor), config);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, m));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::vector<double> values(m);
    for (std::size_t i = 0; i < m; ++i) values[i] = results[i].value;
    auto curve = PressureCurve::from_samples(t_grid, std::move(values), method,
                                             method == PressureMethod::ulam ? config.N : config.n, map.id());
    for (std::size_t i = 0; i < m; ++i) curve.clamped[i] = results[i].clamped;
    return curve;
}

PressureCurve closed_form_curve(const PLFullBranchMap& map, const std::vector<double>& t_grid) {
    std::vector<double> values;
    values.reserve(t_grid.size());
    for (double t : t_grid) values.push_back(pl_pressure_closed_form(map, t));
    return PressureCurve::from_samples(t_grid, std::move(values), PressureMethod::closed_form, 0, map.id());
}

// --- measures -------------------------------------------------------------

MeasureApprox MeasureApprox::atoms(const std::vector<double>& points, const std::vector<double>& weights) {
    if (points.size() != weights.size()) throw DomainError("one weight per atom required");
    MeasureApprox mu;
    for (double x : points) mu.support.push_back({x, x});
    mu.weights = weights;
    return mu;
}

MeasureApprox MeasureApprox::cells(const Partition& grid, const std::vector<double>& weights) {
    if (grid.size() != weights.size()) throw DomainError("one weight per cell required");
    MeasureApprox mu;
    for (std::size_t i = 0; i < grid.size(); ++i) mu.support.push_back(grid.cell(i));
    mu.weights = weights;
    return mu;
}

MeasureApprox MeasureApprox::lebesgue(const Partition& grid) {
    const double total = grid.edges().back() - grid.edges().front();
    std::vector<double> w(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) w[i] = grid.width(i) / total;
    return cells(grid, w);
}

double MeasureApprox::total_mass() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

LyapunovEstimate lyapunov_of_measure(const CuspMap& map, const MeasureApprox& mu, double floor) {
    LyapunovEstimate out;
    for (std::size_t i = 0; i < mu.support.size(); ++i) {
        if (mu.weights[i] == 0.0) continue;
        const Interval& s = mu.support[i];
        double value;
        bool clamped = false;
        if (mu.is_atomic(i)) {
            const auto j = map.dynamic_branch(s.lo);
            if (!j) throw DomainError("measure atom outside every branch");
            const auto v = log_derivative(map.branch(*j), s.lo, floor);
            value = v.value;
            clamped = v.clamped;
        } else {
            const Branch* b = branch_of_cell(map, s);
            if (!b) throw DomainError("measure cell straddles a branch boundary");
            value = gauss8(s.lo, s.hi, [&](double x) {
                        const auto v = log_derivative(*b, x, floor);
                        clamped = clamped || v.clamped;
                        return v.value;
                    }) / s.length();
        }
        if (clamped) ++out.clamped;
        out.value += mu.weights[i] * value;
    }
    return out;
}

double free_energy(const MeasureApprox& mu, double t) { return mu.entropy - t * mu.lyapunov; }

MeasureApprox equilibrium_measure(const CuspMap& map, double t, std::size_t N, double floor) {
    if (N < 16) throw DomainError("Ulam grid size must be at least 16");
    const TransferMatrix T = ulam_operator(map, N, geometric_potential(t, floor));
    if (T.overflow) throw RangeError("transfer weights overflow at this t");
    PowerIterationOptions opt;
    opt.vector_tol = 1e-10;
    const auto left = power_iteration(T.matrix, true, opt);   // eigen-density
    const auto right = power_iteration(T.matrix, false, opt); // conformal cell masses
    std::vector<double> w(T.grid.size());
    double total = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = left.vector[static_cast<Eigen::Index>(i)] * right.vector[static_cast<Eigen::Index>(i)];
        total += w[i];
    }
    if (!(total > 0.0)) throw ConvergenceError("left and right eigenvectors have disjoint supports", 0.0);
    for (double& x : w) x /= total;

    MeasureApprox mu = MeasureApprox::cells(T.grid, w);
    mu.t = t;
    mu.pressure = std::log(left.eigenvalue);
    const auto lyap = lyapunov_of_measure(map, mu, floor);
    mu.lyapunov = lyap.value;
    mu.clamped = std::max(T.clamped_cells, lyap.clamped);
    mu.entropy = mu.pressure + t * mu.lyapunov;
    mu.map_id = map.id();
    mu.warning = !left.warning.empty() ? left.warning : right.warning;
    return mu;
}

// --- exponent bounds and the admissible range -----------------------------

ExponentBounds exponent_bounds(const CuspMap& map, std::size_t n, double floor) {
    if (n < 1) throw DomainError("exponent bounds need n >= 1");
    ExponentBounds out;
    out.lambda_m = infinity;
    out.lambda_M = -infinity;
    for (std::size_t p = 1; p <= n; ++p) {
        for_each_periodic_orbit(map, p, [&](const PeriodicOrbit& orbit) {
            double s = 0.0;
            for (std::size_t m = 0; m < p; ++m) {
                s += log_derivative(map.branch(orbit.word[m]), orbit.points[m], floor).value;
            }
            const double avg = s / static_cast<double>(p);
            out.lambda_m = std::min(out.lambda_m, avg);
            out.lambda_M = std::max(out.lambda_M, avg);
            ++out.orbits;
        });
        out.by_period.emplace_back(out.lambda_m, out.lambda_M);
    }
    if (out.orbits == 0) throw StructureError("no periodic orbits found up to the requested period");
    return out;
}

namespace {

// cond[i] holds where the pressure lies strictly above the line -lambda t
std::vector<bool> above_line(const PressureCurve& c, double lambda) {
    std::vector<bool> cond(c.t.size());
    for (std::size_t i = 0; i < c.t.size(); ++i) {
        cond[i] = c.values[i] + lambda * c.t[i] > admissible_strictness;
    }
    return cond;
}

bool on_line(const PressureCurve& c, double lambda, std::size_t i) {
    return std::abs(c.values[i] + lambda * c.t[i]) <= 1e-8 * std::max(1.0, std::abs(c.values[i]));
}

std::size_t transitions(const std::vector<bool>& cond) {
    std::size_t k = 0;
    for (std::size_t i = 1; i < cond.size(); ++i) k += cond[i] != cond[i - 1];
    return k;
}

} // namespace

PressureDomain admissible_t_range(const PressureCurve& curve, double lambda_m, double lambda_M) {
    if (!(lambda_m <= lambda_M)) throw DomainError("exponent bounds need lambda_m <= lambda_M");
    PressureDomain dom;
    dom.lambda_m = lambda_m;
    dom.lambda_M = lambda_M;
    const std::size_t n = curve.t.size();

    {
        const auto cond = above_line(curve, lambda_M);
        auto& e = dom.t_minus;
        const auto first = std::find(cond.begin(), cond.end(), true);
        if (first == cond.end()) {
            e.value = infinity;
            e.bracket_lo = curve.t.back();
            e.bracket_hi = infinity;
            e.unresolved = true;
        } else {
            const auto i0 = static_cast<std::size_t>(first - cond.begin());
            e.value = i0 == 0 ? -infinity : curve.t[i0];
            e.bracket_lo = i0 == 0 ? -infinity : curve.t[i0 - 1];
            e.bracket_hi = curve.t[i0];
            e.unresolved = transitions(cond) > 1;
            if (i0 > 0) {
                e.linear_beyond = true;
                for (std::size_t i = 0; i < i0; ++i) e.linear_beyond = e.linear_beyond && on_line(curve, lambda_M, i);
            }
        }
    }
    {
        const auto cond = above_line(curve, lambda_m);
        auto& e = dom.t_plus;
        const auto last = std::find(cond.rbegin(), cond.rend(), true);
        if (last == cond.rend()) {
            e.value = -infinity;
            e.bracket_lo = -infinity;
            e.bracket_hi = curve.t.front();
            e.unresolved = true;
        } else {
            const auto i1 = n - 1 - static_cast<std::size_t>(last - cond.rbegin());
            e.value = i1 + 1 == n ? infinity : curve.t[i1];
            e.bracket_lo = curve.t[i1];
            e.bracket_hi = i1 + 1 == n ? infinity : curve.t[i1 + 1];
            e.unresolved = transitions(cond) > 1;
            if (i1 + 1 < n) {
                e.linear_beyond = true;
                for (std::size_t i = i1 + 1; i < n; ++i) e.linear_beyond = e.linear_beyond && on_line(curve, lambda_m, i);
            }
        }
    }
    return dom;
}

PressureDomain admissible_t_range(const PressureCurve& curve, const ExponentBounds& bounds) {
    return admissible_t_range(curve, bounds.lambda_m, bounds.lambda_M);
}

} // namespace rovella
