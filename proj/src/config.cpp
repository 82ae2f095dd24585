#include "vhs/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

#include "vhs/error.hpp"

namespace vhs {

namespace pt = boost::property_tree;

namespace {

constexpr std::array<const char*, 9> kCoefficientKeys = {
    "rho", "sigma1", "sigma2", "beta", "mu1", "mu2", "d1", "d2", "H_u"};

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"domain", {"x_left", "x_right", "period"}},
        {"grid", {"nx", "steps_per_period"}},
        {"bc1", {"type", "b"}},
        {"bc2", {"type", "b"}},
        {"coefficients", {kCoefficientKeys.begin(), kCoefficientKeys.end()}},
        {"solver",
         {"tol", "band", "max_iters", "orbit_tol", "max_periods", "blowup_cap", "extrapolation"}},
        {"run",
         {"H_i0", "V_u0", "V_i0", "n_periods", "sample_stride", "target", "eps", "perturbation"}},
        {"sweep", {"parameter", "values"}},
    };
    return keys;
}

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

double to_number(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || s.empty() || !std::isfinite(v)) {
        throw ConfigError(key + ": '" + raw + "' is not a number");
    }
    return v;
}

double number(const pt::ptree& tree, const std::string& key, double fallback) {
    const auto v = tree.get_optional<std::string>(key);
    return v ? to_number(key, *v) : fallback;
}

double positive(const pt::ptree& tree, const std::string& key, double fallback) {
    const double v = number(tree, key, fallback);
    if (!(v > 0.0)) throw ConfigError(key + " must be positive");
    return v;
}

std::size_t count(const pt::ptree& tree, const std::string& key, std::size_t fallback) {
    const auto v = tree.get_optional<std::string>(key);
    if (!v) return fallback;
    const std::string s = trim(*v);
    std::size_t n = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec != std::errc() || end != s.data() + s.size() || s.empty() || n == 0) {
        throw ConfigError(key + ": '" + *v + "' is not a positive integer");
    }
    return n;
}

Expression expression(const pt::ptree& tree, const std::string& key, const char* fallback,
                      const ParameterTable& params) {
    const auto v = tree.get_optional<std::string>(key);
    if (!v && fallback == nullptr) throw ConfigError(key + " is required");
    try {
        return parse_expression(v ? *v : std::string(fallback), params);
    } catch (const ParseError& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

BoundarySpec boundary(const pt::ptree& tree, const std::string& section,
                      const ParameterTable& params) {
    const std::string type = trim(tree.get<std::string>(section + ".type", "neumann"));
    const bool has_b = tree.get_optional<std::string>(section + ".b").has_value();
    if (type == "neumann" || type == "dirichlet") {
        if (has_b) throw ConfigError(section + ".b is only meaningful for type = robin");
        return type == "neumann" ? BoundarySpec::neumann() : BoundarySpec::dirichlet();
    }
    if (type == "robin") {
        return BoundarySpec::robin(as_field(expression(tree, section + ".b", nullptr, params)));
    }
    throw ConfigError(section + ".type must be neumann, dirichlet or robin (got '" + type + "')");
}

void check_keys(const pt::ptree& tree) {
    for (const auto& [section, body] : tree) {
        if (section == "parameters") continue;
        const auto it = known_keys().find(section);
        if (it == known_keys().end()) throw ConfigError("unknown section [" + section + "]");
        for (const auto& [key, value] : body) {
            if (!it->second.count(key)) throw ConfigError("unknown key " + section + "." + key);
        }
    }
}

}  // namespace

std::pair<std::string, std::string> parse_override(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + text + "' is not key=value");
    std::string key = trim(text.substr(0, eq));
    std::string value = trim(text.substr(eq + 1));
    const auto dot = key.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == key.size() ||
        key.find('.', dot + 1) != std::string::npos) {
        throw ConfigError("override key '" + key + "' must be section.key");
    }
    return {std::move(key), std::move(value)};
}

pt::ptree read_config_tree(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    pt::ptree tree;
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(path.string() + ": " + e.message() + " (line " +
                          std::to_string(e.line()) + ")");
    }
    return tree;
}

void apply_override(pt::ptree& tree, const std::string& text) {
    const auto [key, value] = parse_override(text);
    tree.put(key, value);
}

Config build_config(const pt::ptree& tree) {
    check_keys(tree);
    Config cfg;
    cfg.tree = tree;

    if (const auto params = tree.get_child_optional("parameters")) {
        for (const auto& [name, value] : *params) {
            cfg.parameters[name] = to_number("parameters." + name, value.data());
        }
    }
    const ParameterTable& p = cfg.parameters;

    const double x_left = number(tree, "domain.x_left", 0.0);
    const double x_right = number(tree, "domain.x_right", 1.0);
    const double period = positive(tree, "domain.period", 1.0);
    const std::size_t nx = count(tree, "grid.nx", 32);
    const std::size_t steps = count(tree, "grid.steps_per_period", 256);
    cfg.problem.grid = build_grid(x_left, x_right, nx, period, steps);

    if (!tree.get_child_optional("coefficients")) throw ConfigError("[coefficients] is required");
    CoefficientSet& c = cfg.problem.coefficients;
    c.rho = expression(tree, "coefficients.rho", nullptr, p);
    c.sigma1 = expression(tree, "coefficients.sigma1", nullptr, p);
    c.sigma2 = expression(tree, "coefficients.sigma2", nullptr, p);
    c.beta = expression(tree, "coefficients.beta", nullptr, p);
    c.mu1 = expression(tree, "coefficients.mu1", nullptr, p);
    c.mu2 = expression(tree, "coefficients.mu2", nullptr, p);
    c.d1 = expression(tree, "coefficients.d1", "1", p);
    c.d2 = expression(tree, "coefficients.d2", "1", p);
    c.h_u = expression(tree, "coefficients.H_u", "1", p);
    cfg.problem.host_bc = boundary(tree, "bc1", p);
    cfg.problem.vector_bc = boundary(tree, "bc2", p);

    cfg.orbit.eigen.tol = positive(tree, "solver.tol", 1e-10);
    cfg.orbit.eigen.max_iters = count(tree, "solver.max_iters", 10000);
    cfg.orbit.eigen.extrapolation_levels = count(tree, "solver.extrapolation", 3);
    cfg.orbit.band = positive(tree, "solver.band", 1e-3);
    cfg.orbit.tol = positive(tree, "solver.orbit_tol", 1e-9);
    cfg.orbit.max_periods = count(tree, "solver.max_periods", 500);

    cfg.run.n_periods = count(tree, "run.n_periods", 40);
    cfg.run.stride = count(tree, "run.sample_stride", 1);
    if (steps % cfg.run.stride != 0) {
        throw ConfigError("run.sample_stride must divide grid.steps_per_period");
    }
    cfg.run.target = positive(tree, "run.target", 1e-3);
    cfg.run.blowup_cap = positive(tree, "solver.blowup_cap", 1e12);
    cfg.h_i0 = expression(tree, "run.H_i0", "1", p);
    cfg.v_u0 = expression(tree, "run.V_u0", "1", p);
    cfg.v_i0 = expression(tree, "run.V_i0", "1", p);
    if (tree.get_optional<std::string>("run.eps")) {
        cfg.eps = number(tree, "run.eps", 0.0);
        if (*cfg.eps < 0.0) throw ConfigError("run.eps must be nonnegative");
    }
    cfg.perturbation = number(tree, "run.perturbation", 0.0);
    if (cfg.perturbation < 0.0 || cfg.perturbation >= 1.0) {
        throw ConfigError("run.perturbation must lie in [0, 1)");
    }

    cfg.sweep_parameter = trim(tree.get<std::string>("sweep.parameter", ""));
    if (const auto values = tree.get_optional<std::string>("sweep.values")) {
        cfg.sweep_values = parse_number_list("sweep.values", *values);
    }
    return cfg;
}

std::vector<double> parse_number_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!trim(item).empty()) out.push_back(to_number(key, item));
    }
    return out;
}

Config load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    pt::ptree tree = read_config_tree(path);
    for (const auto& o : overrides) apply_override(tree, o);
    return build_config(tree);
}

void set_sweep_value(pt::ptree& tree, const std::string& parameter, double value) {
    const std::string v = format_number(value);
    if (parameter.find('.') != std::string::npos) {
        tree.put(parameter, v);
        return;
    }
    if (tree.get_optional<std::string>("parameters." + parameter)) {
        tree.put("parameters." + parameter, v);
        return;
    }
    for (const char* key : kCoefficientKeys) {
        if (parameter == key) {
            tree.put(std::string("coefficients.") + key, v);
            return;
        }
    }
    throw ConfigError("sweep parameter '" + parameter +
                      "' is neither a [parameters] name nor a coefficient");
}

StateField initial_state(const Config& config, std::optional<std::uint64_t> seed) {
    const Grid& g = config.problem.grid;
    StateField u = make_state(g, 3, 0.0);
    const Expression* exprs[3] = {&config.h_i0, &config.v_u0, &config.v_i0};
    const BoundarySpec* bcs[3] = {&config.problem.host_bc, &config.problem.vector_bc,
                                  &config.problem.vector_bc};
    std::mt19937_64 rng(seed.value_or(0));
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const bool perturb = seed.has_value() && config.perturbation > 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            u.components[c][i] = (*exprs[c])(g.node(i), 0.0);
            if (perturb && i > 0 && i <= g.nx) u.components[c][i] *= 1.0 + config.perturbation * unit(rng);
        }
        if (bcs[c]->is_dirichlet()) {
            u.components[c].front() = 0.0;
            u.components[c].back() = 0.0;
        }
    }
    return u;
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary), columns_(header.size()) {
    if (!out_) throw ConfigError("cannot write " + path.string());
    row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw InternalError("csv row has the wrong column count");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_number(v));
    row(cells);
}

void write_orbit_csv(const std::filesystem::path& path, const Grid& grid, const PeriodicOrbit& orbit,
                     const std::vector<std::string>& names) {
    std::vector<std::string> header{"x", "t"};
    header.insert(header.end(), names.begin(), names.end());
    CsvWriter csv(path, header);
    std::vector<double> row(header.size());
    for (std::size_t k = 0; k < orbit.levels.size(); ++k) {
        for (std::size_t i = 0; i < grid.node_count(); ++i) {
            row[0] = grid.node(i);
            row[1] = grid.time(k);
            for (std::size_t c = 0; c < names.size(); ++c) row[2 + c] = orbit.levels[k].components[c][i];
            csv.row(row);
        }
    }
}

}  // namespace vhs
