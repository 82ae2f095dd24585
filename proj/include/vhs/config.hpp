#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "vhs/coefficients.hpp"
#include "vhs/dynamics.hpp"
#include "vhs/periodic.hpp"

namespace vhs {

/// A run configuration. Files are INI text:
///
///     [domain]       x_left, x_right, period
///     [grid]         nx, steps_per_period
///     [bc1] [bc2]    type = neumann | dirichlet | robin, b = <expression>
///     [coefficients] rho sigma1 sigma2 beta mu1 mu2 d1 d2 H_u = <expression>
///     [parameters]   name = number (referenced by name in expressions)
///     [solver]       tol band max_iters orbit_tol max_periods blowup_cap extrapolation
///     [run]          H_i0 V_u0 V_i0 = <expression in x>, n_periods, sample_stride,
///                    target, eps, perturbation
///     [sweep]        parameter, values = comma-separated numbers
///
/// Missing keys take their defaults; only [coefficients] is required.
struct Config {
    boost::property_tree::ptree tree;  // after overrides
    ParameterTable parameters;
    Problem problem;
    OrbitOptions orbit;
    RunOptions run;
    Expression h_i0, v_u0, v_i0;
    std::optional<double> eps;
    double perturbation = 0.0;
    std::string sweep_parameter;
    std::vector<double> sweep_values;
};

/// Splits "section.key=value"; throws ConfigError when malformed.
std::pair<std::string, std::string> parse_override(const std::string& text);

boost::property_tree::ptree read_config_tree(const std::filesystem::path& path);
void apply_override(boost::property_tree::ptree& tree, const std::string& text);
/// Builds and checks a Config; throws ConfigError, ParseError or DomainError.
Config build_config(const boost::property_tree::ptree& tree);
Config load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Comma-separated numbers; blank items are skipped.
std::vector<double> parse_number_list(const std::string& key, const std::string& text);

/// Sets `parameter` to `value`: a [parameters] name, a [coefficients] key or
/// a dotted section.key path.
void set_sweep_value(boost::property_tree::ptree& tree, const std::string& parameter, double value);

/// Initial (H_i, V_u, V_i) sampled on the grid, Dirichlet endpoints zeroed.
/// A positive `perturbation` with a seed scales each interior value by
/// 1 + perturbation * U(-1, 1).
StateField initial_state(const Config& config, std::optional<std::uint64_t> seed = std::nullopt);

/// %.17g
std::string format_number(double v);

/// RFC 4180 style: comma separated, LF line ends, one header row.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    void row(const std::vector<double>& values);
    void row(const std::vector<std::string>& cells);

private:
    std::ofstream out_;
    std::size_t columns_ = 0;
};

/// Orbit samples as rows x,t,<names...>.
void write_orbit_csv(const std::filesystem::path& path, const Grid& grid, const PeriodicOrbit& orbit,
                     const std::vector<std::string>& names);

}  // namespace vhs
