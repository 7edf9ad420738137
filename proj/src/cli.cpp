#include "rovella/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "rovella/errors.hpp"
#include "rovella/lift.hpp"
#include "rovella/spectrum.hpp"

namespace rovella::cli {

using Json = nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) parts.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

double parse_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw ParseError("'" + key + "' expects a finite decimal, got '" + text + "'");
    }
    return v;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
    std::uint64_t v = 0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw ParseError("'" + key + "' expects a non-negative integer, got '" + text + "'");
    }
    return v;
}

std::size_t parse_count(const std::string& key, const std::string& text, std::size_t lo, std::size_t hi) {
    const auto v = parse_unsigned(key, text);
    if (v < lo || v > hi) {
        std::ostringstream msg;
        msg << "'" << key << "' must lie in [" << lo << ", " << hi << "], got " << v;
        throw ParseError(msg.str());
    }
    return static_cast<std::size_t>(v);
}

double parse_positive(const std::string& key, const std::string& text) {
    const double v = parse_double(key, text);
    if (!(v > 0.0)) throw ParseError("'" + key + "' must be positive");
    return v;
}

struct GridSpec {
    double start;
    double step;
    double stop;
};

GridSpec parse_grid(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ParseError("t_grid expects start:step:stop, got '" + text + "'");
    GridSpec g{parse_double("t_grid", parts[0]), parse_double("t_grid", parts[1]),
               parse_double("t_grid", parts[2])};
    if (!(g.step > 0.0) || !(g.stop > g.start)) throw ParseError("t_grid needs step > 0 and stop > start");
    if ((g.stop - g.start) / g.step > 1e6) throw ParseError("t_grid has more than 10^6 nodes");
    return g;
}

std::vector<double> parse_weights(const std::string& text) {
    std::vector<double> w;
    for (const auto& part : split(text, ',')) w.push_back(parse_double("map", part));
    return w;
}

void check_alpha_grid(const std::string& text) {
    if (text.rfind("auto:", 0) == 0) {
        parse_count("alpha_grid", text.substr(5), 1, 10000);
        return;
    }
    for (const auto& part : split(text, ',')) parse_double("alpha_grid", part);
}

Json number(double v) {
    if (std::isfinite(v)) return v;
    return format_number(v);
}

Json header(const RunConfig& config, const std::string& command) {
    Json h;
    h["tool"] = tool_name;
    h["version"] = tool_version;
    h["command"] = command;
    h["config_hash"] = config_hash(config);
    return h;
}

std::string csv_header(const RunConfig& config) {
    return std::string("# ") + tool_name + " " + tool_version + " config=" + config_hash(config) + "\n";
}

void write_json(const std::filesystem::path& path, const Json& doc) {
    write_file_atomic(path, doc.dump(2) + "\n");
}

std::ostream& log_of(const CommandContext& ctx) { return ctx.log ? *ctx.log : std::cout; }
std::ostream& err_of(const CommandContext& ctx) { return ctx.err ? *ctx.err : std::cerr; }

std::optional<PLFullBranchMap> pl_map_of(const RunConfig& config) {
    if (config.map.rfind("pl:", 0) != 0) return std::nullopt;
    return PLFullBranchMap(parse_weights(config.map.substr(3)));
}

PressureCurve build_curve(const CommandContext& ctx, const CuspMap& map) {
    const RunConfig& cfg = ctx.config;
    const auto grid = build_t_grid(cfg);
    PressureCurve curve;
    if (cfg.method == PressureMethod::closed_form) {
        const auto pl = pl_map_of(cfg);
        if (!pl) throw DomainError("closed-form pressure needs a pl: map");
        curve = closed_form_curve(*pl, grid);
    } else if (cfg.method == PressureMethod::synthetic) {
        throw DomainError("synthetic curves cannot be sampled from a map");
    } else {
        curve = pressure_curve(map, grid, build_estimator(cfg), ctx.jobs);
    }
    if (cfg.convexity_defect) {
        const double t = *cfg.convexity_defect;
        const auto it = std::min_element(curve.t.begin(), curve.t.end(), [t](double a, double b) {
            return std::abs(a - t) < std::abs(b - t);
        });
        curve.values[static_cast<std::size_t>(it - curve.t.begin())] += 1e-3;
        curve.certify();
    }
    return curve;
}

PressureDomain build_domain(const RunConfig& cfg, const CuspMap& map, const PressureCurve& curve) {
    if (const auto pl = pl_map_of(cfg)) {
        // the extreme exponents of a PL map are its branch slopes
        const auto [wmin, wmax] = std::minmax_element(pl->weights().begin(), pl->weights().end());
        return admissible_t_range(curve, -std::log(*wmax), -std::log(*wmin));
    }
    return admissible_t_range(curve, exponent_bounds(map, cfg.bounds_n, cfg.delta_floor));
}

Json endpoint_json(const DomainEndpoint& e) {
    Json j;
    j["value"] = number(e.value);
    j["bracket"] = Json::array({number(e.bracket_lo), number(e.bracket_hi)});
    j["unresolved"] = e.unresolved;
    j["linear_beyond"] = e.linear_beyond;
    return j;
}

std::vector<double> build_alpha_grid(const RunConfig& cfg, const SpectrumDomain& dom) {
    if (cfg.alpha_grid.rfind("auto:", 0) == 0) {
        return auto_alpha_grid(dom, parse_count("alpha_grid", cfg.alpha_grid.substr(5), 1, 10000));
    }
    std::vector<double> out;
    for (const auto& part : split(cfg.alpha_grid, ',')) out.push_back(parse_double("alpha_grid", part));
    return out;
}

FiberMap build_fiber(const RunConfig& cfg, const CuspMap& map) {
    if (map.rovella()) return FiberMap::rovella(cfg.flow);
    // evenly spaced offsets between cy- and cy+, one per branch
    const std::size_t k = map.branch_count();
    std::vector<double> offsets;
    for (std::size_t j = 0; j < k; ++j) {
        const double u = static_cast<double>(j) / static_cast<double>(k - 1);
        offsets.push_back(cfg.flow.cy_minus + u * (cfg.flow.cy_plus - cfg.flow.cy_minus));
    }
    return FiberMap::uniform(std::pow(0.5, cfg.flow.beta()), std::move(offsets));
}

} // namespace

// --- config ---------------------------------------------------------------

void RunConfig::set(const std::string& key, const std::string& raw) {
    const std::string value = trim(raw);
    if (key == "lambda1") flow.lambda1 = parse_double(key, value);
    else if (key == "lambda2") flow.lambda2 = parse_double(key, value);
    else if (key == "lambda3") flow.lambda3 = parse_double(key, value);
    else if (key == "rho") flow.rho = parse_double(key, value);
    else if (key == "tau_c") flow.tau_c = parse_double(key, value);
    else if (key == "cy_plus") flow.cy_plus = parse_double(key, value);
    else if (key == "cy_minus") flow.cy_minus = parse_double(key, value);
    else if (key == "map") {
        if (value != "rovella") {
            if (value.rfind("pl:", 0) != 0) throw ParseError("map must be 'rovella' or 'pl:w1,w2,...'");
            try {
                PLFullBranchMap check(parse_weights(value.substr(3)));
            } catch (const DomainError& e) {
                throw ParseError(std::string("map: ") + e.what());
            }
        }
        map = value;
    } else if (key == "method") {
        if (value == "auto") method.reset();
        else method = pressure_method_from_string(value);
    } else if (key == "n") n = parse_count(key, value, 1, 22);
    else if (key == "N") N = parse_count(key, value, 8, std::size_t{1} << 20);
    else if (key == "delta_floor") {
        delta_floor = parse_positive(key, value);
        if (delta_floor >= 1.0) throw ParseError("'delta_floor' must be below 1");
    } else if (key == "t_grid") {
        parse_grid(value);
        t_grid = value;
    } else if (key == "alpha_grid") {
        check_alpha_grid(value);
        alpha_grid = value;
    } else if (key == "n_push") n_push = parse_count(key, value, 0, 1000);
    else if (key == "roof") {
        if (value != "flow") {
            if (value.rfind("const:", 0) != 0) throw ParseError("roof must be 'flow' or 'const:c'");
            parse_positive(key, value.substr(6));
        }
        roof = value;
    } else if (key == "bounds_n") bounds_n = parse_count(key, value, 1, 16);
    else if (key == "t") t = parse_double(key, value);
    else if (key == "x0") x0 = parse_double(key, value);
    else if (key == "y0") y0 = parse_double(key, value);
    else if (key == "n_returns") n_returns = parse_count(key, value, 0, 1000000);
    else if (key == "sample_dt") sample_dt = parse_positive(key, value);
    else if (key == "cutoff") cutoff = parse_positive(key, value);
    else if (key == "f4_horizon") f4_horizon = parse_count(key, value, 0, 1000000);
    else if (key == "seed") seed = parse_unsigned(key, value);
    else if (key == "inject_convexity_defect") convexity_defect = parse_double(key, value);
    else throw ParseError("unknown config key '" + key + "'");
    entries[key] = value;
}

RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError("line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ParseError("line " + std::to_string(lineno) + ": empty key");
        if (cfg.entries.count(key)) throw ParseError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        try {
            cfg.set(key, line.substr(eq + 1));
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

RunConfig parse_config_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read config file " + path.string());
    return parse_config(in);
}

std::string config_hash(const RunConfig& config) {
    std::uint64_t h = 14695981039346656037ull;
    auto feed = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
    };
    for (const auto& [k, v] : config.entries) feed(k + "=" + v + "\n");
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

CuspMap build_map(const RunConfig& config) {
    if (const auto pl = pl_map_of(config)) return pl->to_cusp_map();
    return rovella_map_from_flow(config.flow);
}

RoofFunction build_roof(const RunConfig& config) {
    if (config.roof == "flow") return RoofFunction::from_flow(config.flow);
    const double c = parse_positive("roof", config.roof.substr(6));
    return RoofFunction::constant(c);
}

std::vector<double> build_t_grid(const RunConfig& config) {
    const GridSpec g = parse_grid(config.t_grid);
    return linear_grid(g.start, g.step, g.stop);
}

EstimatorConfig build_estimator(const RunConfig& config) {
    EstimatorConfig est;
    if (config.method == PressureMethod::periodic_orbit || config.method == PressureMethod::ulam) {
        est.method = config.method;
    }
    est.n = config.n;
    est.N = config.N;
    est.floor = config.delta_floor;
    return est;
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DomainError("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw DomainError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

// --- commands -------------------------------------------------------------

int run_validate(const CommandContext& ctx) {
    const RunConfig& cfg = ctx.config;
    Json doc = header(cfg, "validate");
    const CuspMap map = build_map(cfg);
    ValidationOptions opts;
    opts.seed = cfg.seed;
    opts.f4_horizon = cfg.f4_horizon;
    const ValidationReport report = validate_cusp_map(map, opts);
    doc["map_id"] = report.map_id;
    doc["passed"] = report.passed();
    Json entries = Json::array();
    for (const auto& e : report.entries) {
        Json j;
        j["axiom"] = e.axiom;
        j["status"] = to_string(e.status);
        j["measured"] = number(e.measured);
        j["worst_violation"] = number(e.worst_violation);
        j["detail"] = e.detail;
        entries.push_back(std::move(j));
        log_of(ctx) << std::left << std::setw(16) << e.axiom << to_string(e.status) << "\n";
    }
    doc["entries"] = std::move(entries);
    write_json(ctx.out / "validate.json", doc);
    return report.passed() ? exit_ok : exit_failure;
}

int run_simulate(const CommandContext& ctx) {
    const RunConfig& cfg = ctx.config;
    SimulationOptions opts;
    opts.sample_dt = cfg.sample_dt;
    opts.x_min_cutoff = cfg.cutoff;
    const SimulationResult sim = simulate({cfg.x0, cfg.y0}, cfg.n_returns, cfg.flow, opts);

    std::ostringstream traj;
    traj << csv_header(cfg) << "t,x,y,z,phase\n";
    for (const auto& s : sim.samples) {
        traj << format_number(s.t) << ',' << format_number(s.p.x) << ',' << format_number(s.p.y) << ','
             << format_number(s.p.z) << ',' << to_string(s.phase) << '\n';
    }
    std::ostringstream section;
    section << csv_header(cfg) << "n,x,y,return_time\n";
    for (std::size_t k = 0; k < sim.hits.size(); ++k) {
        section << k << ',' << format_number(sim.hits[k].x) << ',' << format_number(sim.hits[k].y) << ','
                << format_number(sim.return_times[k]) << '\n';
    }
    write_file_atomic(ctx.out / "trajectory.csv", traj.str());
    write_file_atomic(ctx.out / "section.csv", section.str());
    log_of(ctx) << sim.hits.size() - 1 << " returns, " << sim.samples.size() << " samples\n";
    return exit_ok;
}

int run_pressure(const CommandContext& ctx) {
    const RunConfig& cfg = ctx.config;
    const CuspMap map = build_map(cfg);
    const PressureCurve curve = build_curve(ctx, map);

    std::ostringstream csv;
    csv << csv_header(cfg) << "t,p,method,resolution,clamped_cells\n";
    for (std::size_t i = 0; i < curve.t.size(); ++i) {
        csv << format_number(curve.t[i]) << ',' << format_number(curve.values[i]) << ','
            << to_string(curve.method) << ',' << curve.resolution << ',' << curve.clamped[i] << '\n';
    }
    write_file_atomic(ctx.out / "pressure.csv", csv.str());

    Json doc = header(cfg, "pressure");
    doc["map_id"] = curve.map_id;
    doc["method"] = to_string(curve.method);
    doc["resolution"] = curve.resolution;
    doc["convex"] = curve.convex;
    doc["monotone_decreasing"] = curve.monotone_decreasing;
    doc["worst_second_difference"] = number(curve.worst_second_difference);
    if (curve.convex) {
        const PressureDomain dom = build_domain(cfg, map, curve);
        doc["lambda_m"] = number(dom.lambda_m);
        doc["lambda_M"] = number(dom.lambda_M);
        doc["t_minus"] = endpoint_json(dom.t_minus);
        doc["t_plus"] = endpoint_json(dom.t_plus);
        log_of(ctx) << "t- = " << format_number(dom.t_minus.value) << ", t+ = " << format_number(dom.t_plus.value)
                    << "\n";
    }
    write_json(ctx.out / "domain.json", doc);
    if (!curve.convex) {
        err_of(ctx) << "pressure curve is not convex: worst second difference "
                    << format_number(curve.worst_second_difference) << "\n";
        return exit_failure;
    }
    return exit_ok;
}

int run_spectrum(const CommandContext& ctx) {
    const RunConfig& cfg = ctx.config;
    const CuspMap map = build_map(cfg);
    const PressureCurve curve = build_curve(ctx, map);
    if (!curve.convex) {
        err_of(ctx) << "pressure curve is not convex\n";
        return exit_failure;
    }
    const PressureDomain pdom = build_domain(cfg, map, curve);
    const SpectrumDomain dom = spectrum_domain(curve, pdom);

    Json doc = header(cfg, "spectrum");
    doc["map_id"] = curve.map_id;
    if (dom.empty) {
        doc["domain"] = "empty";
        doc["degenerate_alpha"] = number(dom.degenerate_alpha);
        write_json(ctx.out / "spectrum.json", doc);
        log_of(ctx) << "domain: empty (alpha = " << format_number(dom.degenerate_alpha) << ")\n";
        return exit_ok;
    }
    const SpectrumCurve result = lyapunov_spectrum_flow(curve, dom, build_alpha_grid(cfg, dom));
    std::ostringstream csv;
    csv << csv_header(cfg) << "alpha,t_alpha,L_interval,L_flow,residual,status\n";
    std::size_t unresolved = 0;
    for (const auto& s : result.samples) {
        if (!s.resolved) ++unresolved;
        csv << format_number(s.alpha) << ',' << format_number(s.t_alpha) << ',' << format_number(s.L_interval)
            << ',' << format_number(s.L_flow) << ',' << format_number(s.residual) << ','
            << (s.resolved ? "ok" : "unresolved") << '\n';
    }
    write_file_atomic(ctx.out / "spectrum.csv", csv.str());

    doc["domain"] = Json::array({number(dom.alpha1), number(dom.alpha2)});
    doc["samples"] = result.samples.size();
    doc["unresolved"] = unresolved;
    doc["monotone_t"] = result.monotone_t;
    doc["duality_margin"] = number(result.duality_margin);
    write_json(ctx.out / "spectrum.json", doc);
    log_of(ctx) << "domain (" << format_number(dom.alpha1) << ", " << format_number(dom.alpha2) << "), "
                << result.samples.size() << " samples, " << unresolved << " unresolved\n";
    return exit_ok;
}

int run_lift(const CommandContext& ctx) {
    const RunConfig& cfg = ctx.config;
    const CuspMap map = build_map(cfg);
    const PressureCurve curve = build_curve(ctx, map);
    if (!curve.convex) {
        err_of(ctx) << "pressure curve is not convex\n";
        return exit_failure;
    }
    PressureDomain dom = build_domain(cfg, map, curve);
    // an endpoint beyond the sampled grid is only known to lie past its end
    if (std::isinf(dom.t_minus.value)) dom.t_minus.value = curve.t.front();
    if (std::isinf(dom.t_plus.value)) dom.t_plus.value = curve.t.back();

    FlowEquilibriumOptions opts;
    opts.N = cfg.N;
    opts.n_push = cfg.n_push;
    opts.floor = cfg.delta_floor;
    opts.domain = dom;
    opts.pressure = build_estimator(cfg);
    const SuspensionMeasure s = flow_equilibrium(map, build_fiber(cfg, map), build_roof(cfg), cfg.t, opts);

    Json doc = header(cfg, "lift");
    doc["base_id"] = s.base_id;
    doc["t"] = cfg.t;
    doc["roof_integral"] = number(s.roof_integral);
    doc["h_base"] = number(s.h_base);
    doc["h_flow"] = number(s.h_flow);
    doc["lyapunov_base"] = number(s.lyapunov_base);
    doc["flow_pressure"] = number(s.flow_pressure);
    doc["flow_free_energy"] = number(s.flow_free_energy);
    doc["residual"] = number(s.residual);
    doc["clamped"] = s.clamped;
    doc["dropped_atoms"] = s.dropped_atoms;
    doc["dropped_mass"] = number(s.dropped_mass);
    doc["fiber_residual"] = number(s.square.fiber_residual);
    write_json(ctx.out / "lift.json", doc);

    std::ostringstream csv;
    csv << csv_header(cfg) << "x,y,weight\n";
    for (std::size_t i = 0; i < s.square.x.size(); ++i) {
        csv << format_number(s.square.x[i]) << ',' << format_number(s.square.y[i]) << ','
            << format_number(s.square.weights[i]) << '\n';
    }
    write_file_atomic(ctx.out / "square.csv", csv.str());
    log_of(ctx) << "h_flow = " << format_number(s.h_flow) << ", flow pressure = " << format_number(s.flow_pressure)
                << "\n";
    return exit_ok;
}

int run_command(const std::string& name, const CommandContext& ctx) {
    try {
        if (name == "validate") return run_validate(ctx);
        if (name == "simulate") return run_simulate(ctx);
        if (name == "pressure") return run_pressure(ctx);
        if (name == "spectrum") return run_spectrum(ctx);
        if (name == "lift") return run_lift(ctx);
        err_of(ctx) << "unknown command '" << name << "'\n";
        return exit_usage;
    } catch (const ParseError& e) {
        err_of(ctx) << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        err_of(ctx) << "error: " << e.what() << "\n";
        return exit_failure;
    }
}

} // namespace rovella::cli
