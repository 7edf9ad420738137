#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rovella/core_maps.hpp"
#include "rovella/flow_geometry.hpp"
#include "rovella/thermo.hpp"

namespace rovella::cli {

inline constexpr const char* tool_name = "rovella";
inline constexpr const char* tool_version = "0.1.0";

enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_usage = 2 };

/// Everything a run reads from its config file, with documented defaults.
struct RunConfig {
    FlowParams flow;
    /// "rovella" or "pl:w1,w2,...".
    std::string map = "rovella";
    std::optional<PressureMethod> method;
    std::size_t n = 10;
    std::size_t N = 1024;
    double delta_floor = default_derivative_floor;
    /// "start:step:stop".
    std::string t_grid = "-2:0.05:2";
    /// "auto:K" or a comma-separated list.
    std::string alpha_grid = "auto:41";
    std::size_t n_push = 60;
    /// "flow" for the logarithmic roof of the flow, "const:c" otherwise.
    std::string roof = "flow";
    /// Periodic-orbit period used for the exponent bounds.
    std::size_t bounds_n = 8;
    double t = 1.0;
    double x0 = 0.25;
    double y0 = 0.5;
    std::size_t n_returns = 10;
    double sample_dt = 0.05;
    double cutoff = 1e-12;
    std::size_t f4_horizon = 0;
    std::uint64_t seed = 0;
    /// Test hook: raise the pressure sample nearest this t before certifying.
    std::optional<double> convexity_defect;

    /// Explicitly set keys in canonical form; the input of the config hash.
    std::map<std::string, std::string> entries;

    /// Sets one key. ParseError on unknown keys or out-of-range values.
    void set(const std::string& key, const std::string& value);
};

/// `key = value` lines; blank lines and `#` comments are ignored.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// FNV-1a of the canonical key list, as 16 hex digits.
std::string config_hash(const RunConfig& config);

CuspMap build_map(const RunConfig& config);
RoofFunction build_roof(const RunConfig& config);
std::vector<double> build_t_grid(const RunConfig& config);
EstimatorConfig build_estimator(const RunConfig& config);

/// Shortest round-trip text, "inf", "-inf" or "nan".
std::string format_number(double value);

/// Writes through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

struct CommandContext {
    RunConfig config;
    std::filesystem::path out = ".";
    std::size_t jobs = 1;
    std::ostream* log = nullptr;  // stdout summary
    std::ostream* err = nullptr;  // error stream
};

int run_validate(const CommandContext& ctx);
int run_simulate(const CommandContext& ctx);
int run_pressure(const CommandContext& ctx);
int run_spectrum(const CommandContext& ctx);
int run_lift(const CommandContext& ctx);

/// Dispatches by name; maps library errors to exit codes.
int run_command(const std::string& name, const CommandContext& ctx);

} // namespace rovella::cli
