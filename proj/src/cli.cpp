#include "vhs/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>
#include <utility>

#include "CLI11.hpp"
#include "vhs/config.hpp"
#include "vhs/dynamics.hpp"
#include "vhs/eigen.hpp"
#include "vhs/error.hpp"
#include "vhs/periodic.hpp"
#include "vhs/stepper.hpp"

namespace vhs::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
    std::string command;
    std::string config;
    std::string out = "./out";
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    bool strict = false;
    std::string parameter;
    std::optional<std::string> values;
};

/// key=value lines, echoed to stdout and written to report.txt.
class Report {
public:
    void add(const std::string& key, const std::string& value) { lines_.emplace_back(key, value); }
    void add(const std::string& key, double value) { add(key, format_number(value)); }
    void add(const std::string& key, std::size_t value) { add(key, std::to_string(value)); }

    void write(const fs::path& dir, std::ostream& out) const {
        std::ofstream f(dir / "report.txt", std::ios::binary);
        for (const auto& [k, v] : lines_) {
            f << k << '=' << v << '\n';
            out << k << '=' << v << '\n';
        }
    }

private:
    std::vector<std::pair<std::string, std::string>> lines_;
};

void add_eigen(Report& rep, const std::string& name, const EigenResult& r) {
    rep.add(name, r.value);
    rep.add(name + "_multiplier", r.multiplier);
    rep.add(name + "_discrete", r.discrete_value);
    rep.add(name + "_iterations", r.iterations);
    rep.add(name + "_residual", r.residual);
    rep.add(name + "_periodicity_residual", r.periodicity_residual);
    rep.add(name + "_reducible", std::string(r.reducible ? "true" : "false"));
}

void write_history(const fs::path& path, const EigenResult& r) {
    CsvWriter csv(path, {"iteration", "r_estimate"});
    for (std::size_t i = 0; i < r.history.size(); ++i) {
        csv.row(std::vector<double>{static_cast<double>(i + 1), r.history[i]});
    }
}

int cmd_validate(const Config& cfg, Report& rep) {
    const ValidationReport v = validate_hypothesis(cfg.problem);
    rep.add("status", std::string(v.pass() ? "PASS" : "FAIL"));
    rep.add("violations", v.violations.size());
    for (std::size_t i = 0; i < v.violations.size(); ++i) {
        const Violation& x = v.violations[i];
        rep.add("violation." + std::to_string(i + 1),
                x.field + ": " + x.condition + " at x=" + format_number(x.x) +
                    " t=" + format_number(x.t) + " value=" + format_number(x.value));
    }
    return v.pass() ? ok : hypothesis_violation;
}

int cmd_eigen(const Config& cfg, const fs::path& out, Report& rep) {
    const Problem& p = cfg.problem;
    const EigenResult z = zeta(p, cfg.orbit.eigen);
    add_eigen(rep, "zeta", z);
    write_history(out / "eigen_zeta.csv", z);
    const EigenResult g = gamma_rho(p, cfg.orbit.eigen);
    add_eigen(rep, "gamma", g);
    write_history(out / "eigen_gamma.csv", g);
    if (z.value > -cfg.orbit.band) {
        rep.add("lambda_V", std::string("ABSENT"));
        return ok;
    }
    const LogisticOrbitResult v = solve_logistic_orbit(p, cfg.orbit);
    const EigenResult l = lambda_V(p, v.orbit, cfg.orbit.eigen);
    add_eigen(rep, "lambda_V", l);
    write_history(out / "eigen_lambda_V.csv", l);
    if (cfg.eps) {
        const EigenResult le = lambda_V_eps(p, v.orbit, z.eigenfunction, *cfg.eps, cfg.orbit.eigen);
        rep.add("eps", *cfg.eps);
        add_eigen(rep, "lambda_V_eps", le);
        write_history(out / "eigen_lambda_V_eps.csv", le);
    }
    return ok;
}

int cmd_periodic(const Config& cfg, const fs::path& out, Report& rep) {
    const Problem& p = cfg.problem;
    const Grid& g = p.grid;
    const LogisticOrbitResult v = solve_logistic_orbit(p, cfg.orbit);
    rep.add("zeta", v.zeta);
    rep.add("V_converged_in", v.converged_in);
    rep.add("V_fixed_point_residual", v.fixed_point_residual);
    rep.add("V_seed_gap", v.seed_gap);
    rep.add("V_max", v.orbit.sup());
    write_orbit_csv(out / "V.csv", g, v.orbit, {"V"});
    if (v.zeta > -cfg.orbit.band) {
        rep.add("endemic_pair", std::string("ABSENT"));
        rep.add("endemic_reason", std::string("zeta >= -band: V is the zero orbit"));
        return ok;
    }
    const double eps_h = cfg.eps.value_or(0.0);
    const PeriodicOrbit hbar = solve_hbar(p, v.orbit, v.zeta_result.eigenfunction, eps_h, cfg.orbit);
    rep.add("Hbar_eps", eps_h);
    rep.add("Hbar_max", hbar.sup());
    write_orbit_csv(out / "Hbar.csv", g, hbar, {"Hbar"});
    try {
        const EndemicPairResult e = solve_endemic_pair(p, v, cfg.eps, cfg.orbit);
        rep.add("endemic_pair", std::string("PRESENT"));
        rep.add("lambda_V", e.lambda_V);
        rep.add("eps_ladder", e.eps_ladder);
        rep.add("eps_used", e.eps_used);
        rep.add("lambda_V_eps", e.lambda_V_eps);
        rep.add("delta", e.delta);
        rep.add("iterations", e.iterations);
        rep.add("upper_residual", e.upper_residual);
        rep.add("lower_residual", e.lower_residual);
        rep.add("gap", e.gap);
        rep.add("monotonicity_violation", e.monotonicity_violation);
        rep.add("order_violation", e.order_violation);
        rep.add("truncation_margin", e.truncation_margin);
        rep.add("H_i_max", e.h_orbit.sup());
        rep.add("V_i_max", e.vi_orbit.sup());
        PeriodicOrbit pair = e.h_orbit;
        for (std::size_t k = 0; k < pair.levels.size(); ++k) {
            pair.levels[k].components.push_back(e.vi_orbit.levels[k].components[0]);
        }
        write_orbit_csv(out / "endemic.csv", g, pair, {"H_i", "V_i"});
    } catch (const RegimeError& e) {
        rep.add("endemic_pair", std::string("ABSENT"));
        rep.add("endemic_reason", std::string(e.what()));
    }
    return ok;
}

void write_trajectory(const fs::path& path, const Grid& g, const Trajectory& traj) {
    CsvWriter csv(path, {"x", "t", "H_i", "V_u", "V_i"});
    std::vector<double> row(5);
    for (std::size_t s = 0; s < traj.samples.size(); ++s) {
        const StateField& u = traj.samples[s];
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            row[0] = g.node(i);
            row[1] = g.time(s * traj.stride);
            for (std::size_t c = 0; c < 3; ++c) row[2 + c] = u.components[c][i];
            csv.row(row);
        }
    }
}

int cmd_simulate(const Config& cfg, const Options& o, const fs::path& out, Report& rep) {
    const Problem& p = cfg.problem;
    const StateField u0 = initial_state(cfg, o.seed);
    check_initial_data(p, u0);
    const Trajectory traj = integrate_trajectory(NonlinearModel::full(p), u0, cfg.run.n_periods,
                                                 cfg.run.stride, cfg.run.blowup_cap);
    write_trajectory(out / "trajectory.csv", p.grid, traj);
    double lowest = 0.0;
    for (const auto& s : traj.samples) lowest = std::min(lowest, min_entry(s));
    const StateField& last = traj.samples.back();
    rep.add("n_periods", cfg.run.n_periods);
    rep.add("samples", traj.samples.size());
    rep.add("min_entry", lowest);
    const char* names[3] = {"H_i", "V_u", "V_i"};
    for (std::size_t c = 0; c < 3; ++c) {
        rep.add(std::string(names[c]) + "_final_max",
                *std::max_element(last.components[c].begin(), last.components[c].end()));
    }
    return ok;
}

void add_regime(Report& rep, const RegimeReport& r) {
    rep.add("regime", std::string(to_string(r.regime)));
    rep.add("zeta", r.zeta);
    if (r.lambda_V) {
        rep.add("lambda_V", *r.lambda_V);
    } else {
        rep.add("lambda_V", std::string("ABSENT"));
    }
    rep.add("attractor", std::string(r.attractor_description()));
}

int cmd_classify(const Config& cfg, const Options& o, const fs::path& out, Report& rep) {
    const RegimeReport r = classify_regime(cfg.problem, cfg.orbit);
    add_regime(rep, r);
    if (!r.attractor.empty()) {
        write_orbit_csv(out / "attractor.csv", cfg.problem.grid, r.attractor, {"H_i", "V_u", "V_i"});
        const char* names[3] = {"H_i", "V_u", "V_i"};
        for (std::size_t c = 0; c < 3; ++c) {
            double m = 0.0;
            for (const auto& l : r.attractor.levels) {
                m = std::max(m, *std::max_element(l.components[c].begin(), l.components[c].end()));
            }
            rep.add(std::string("attractor_") + names[c] + "_max", m);
        }
    }
    return r.regime == Regime::indeterminate && o.strict ? indeterminate : ok;
}

int cmd_verify(const Config& cfg, const Options& o, const fs::path& out, Report& rep) {
    const Problem& p = cfg.problem;
    const StateField u0 = initial_state(cfg, o.seed);
    const ConvergenceReport c = verify_trichotomy(p, u0, cfg.run, cfg.orbit);
    add_regime(rep, c.regime);
    rep.add("verdict", std::string(to_string(c.verdict)));
    rep.add("n_periods", cfg.run.n_periods);
    rep.add("target", cfg.run.target);
    if (!c.distances.empty()) rep.add("e_last", c.distances.back());
    rep.add("median_ratio", c.median_ratio);
    rep.add("min_entry", c.min_entry);
    {
        CsvWriter csv(out / "convergence.csv", {"n", "e_n", "ratio"});
        for (std::size_t n = 0; n < c.distances.size(); ++n) {
            const std::string ratio = n >= 1 && n - 1 < c.ratios.size() ? format_number(c.ratios[n - 1]) : "";
            csv.row(std::vector<std::string>{std::to_string(n + 1), format_number(c.distances[n]), ratio});
        }
    }
    if (cfg.eps && c.regime.zeta <= -cfg.orbit.band) {
        const SandwichReport s = sandwich_check(p, c.regime.logistic.orbit,
                                                c.regime.logistic.zeta_result.eigenfunction, *cfg.eps,
                                                c.trajectory);
        rep.add("sandwich_eps", *cfg.eps);
        rep.add("sandwich_N", s.entry_period ? std::to_string(*s.entry_period) : "NOT_REACHED");
    }
    switch (c.verdict) {
        case Verdict::pass: return ok;
        case Verdict::fail: return no_convergence;
        case Verdict::indeterminate: return o.strict ? indeterminate : ok;
    }
    return ok;
}

struct SweepRow {
    std::string zeta, lambda, regime = "ERROR", error;
};

SweepRow sweep_row(const Config& base, const std::string& parameter, double value) {
    SweepRow row;
    try {
        boost::property_tree::ptree tree = base.tree;
        set_sweep_value(tree, parameter, value);
        const Config cfg = build_config(tree);
        const ValidationReport v = validate_hypothesis(cfg.problem);
        if (!v.pass()) {
            row.error = v.violations.front().condition;
            return row;
        }
        const RegimeReport r = classify_regime(cfg.problem, cfg.orbit, false);
        row.zeta = format_number(r.zeta);
        if (r.lambda_V) row.lambda = format_number(*r.lambda_V);
        row.regime = std::string(to_string(r.regime));
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

int cmd_sweep(const Config& cfg, const Options& o, const fs::path& out, Report& rep,
              std::ostream& err) {
    const std::string parameter = o.parameter.empty() ? cfg.sweep_parameter : o.parameter;
    std::vector<double> values = cfg.sweep_values;
    if (o.values) values = parse_number_list("--values", *o.values);
    if (parameter.empty()) throw ConfigError("sweep: no parameter given");
    if (values.empty()) throw ConfigError("sweep: the value list is empty");

    std::vector<SweepRow> rows(values.size());
    std::atomic<std::size_t> next{0};
    const std::size_t workers =
        std::min<std::size_t>(values.size(), std::max(1u, std::thread::hardware_concurrency()));
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < values.size(); i = next++) {
                    rows[i] = sweep_row(cfg, parameter, values[i]);
                }
            });
        }
    }

    CsvWriter csv(out / "sweep.csv", {"value", "zeta", "lambda_V", "regime"});
    std::size_t succeeded = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        csv.row(std::vector<std::string>{format_number(values[i]), rows[i].zeta, rows[i].lambda,
                                         rows[i].regime});
        if (rows[i].regime != "ERROR") {
            ++succeeded;
        } else {
            err << "sweep: " << parameter << "=" << format_number(values[i]) << ": " << rows[i].error
                << '\n';
        }
    }
    rep.add("parameter", parameter);
    rep.add("rows", rows.size());
    rep.add("succeeded", succeeded);
    return succeeded > 0 ? ok : no_convergence;
}

int dispatch(const Options& o, std::ostream& out, std::ostream& err) {
    Report rep;
    rep.add("command", o.command);
    fs::path dir;
    try {
        const Config cfg = load_config(o.config, o.overrides);
        dir = o.out;
        fs::create_directories(dir);

        if (o.command == "validate") {
            const int code = cmd_validate(cfg, rep);
            rep.write(dir, out);
            return code;
        }
        if (o.command != "sweep") {
            const ValidationReport v = validate_hypothesis(cfg.problem);
            if (!v.pass()) {
                cmd_validate(cfg, rep);
                rep.write(dir, out);
                for (const auto& x : v.violations) err << "hypothesis (H): " << x.condition << '\n';
                return hypothesis_violation;
            }
        }

        int code = ok;
        if (o.command == "eigen") code = cmd_eigen(cfg, dir, rep);
        else if (o.command == "periodic") code = cmd_periodic(cfg, dir, rep);
        else if (o.command == "simulate") code = cmd_simulate(cfg, o, dir, rep);
        else if (o.command == "classify") code = cmd_classify(cfg, o, dir, rep);
        else if (o.command == "verify") code = cmd_verify(cfg, o, dir, rep);
        else if (o.command == "sweep") code = cmd_sweep(cfg, o, dir, rep, err);
        rep.write(dir, out);
        return code;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const ParseError& e) {
        err << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const DomainError& e) {
        err << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const EpsilonTooLarge& e) {
        err << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return config_error;
    } catch (const CoefficientError& e) {
        err << "hypothesis (H): " << e.what() << '\n';
        return hypothesis_violation;
    } catch (const EvalError& e) {
        err << "hypothesis (H): " << e.what() << '\n';
        return hypothesis_violation;
    } catch (const Error& e) {
        err << "numerical failure: " << e.what() << '\n';
        if (!dir.empty()) {
            rep.add("status", std::string("ERROR"));
            rep.add("error", std::string(e.what()));
            rep.write(dir, out);
        }
        return no_convergence;
    } catch (const fs::filesystem_error& e) {
        err << "output error: " << e.what() << '\n';
        return config_error;
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Seasonal vector-host model: eigenvalues, periodic orbits and regime checks", "vhs"};
    app.require_subcommand(1);
    Options o;
    std::uint64_t seed = 0;

    const std::pair<const char*, const char*> commands[] = {
        {"validate", "check hypothesis (H) on the sampling lattice"},
        {"eigen", "principal eigenvalues zeta, gamma, lambda(V) and lambda(V; eps)"},
        {"periodic", "logistic orbit V, Hbar and the endemic pair"},
        {"simulate", "integrate the full model and write the trajectory"},
        {"classify", "regime of the long-time dynamics"},
        {"verify", "convergence of a trajectory to the classified attractor"},
        {"sweep", "classify over a list of parameter values"},
    };
    std::vector<std::pair<CLI::App*, CLI::Option*>> subs;
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", o.config, "INI configuration file")->required();
        sub->add_option("--out", o.out, "output directory")->capture_default_str();
        sub->add_option("--override", o.overrides, "section.key=value, repeatable");
        CLI::Option* seed_opt = sub->add_option("--seed", seed, "seed for perturbed initial data");
        sub->add_flag("--strict", o.strict, "exit 4 when the regime is INDETERMINATE");
        if (std::string_view(name) == "sweep") {
            sub->add_option("--parameter", o.parameter, "parameter to vary");
            sub->add_option("--values", o.values, "comma-separated values");
        }
        subs.emplace_back(sub, seed_opt);
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return ok;
        }
        err << e.what() << '\n';
        return config_error;
    }
    for (const auto& [sub, seed_opt] : subs) {
        if (sub->parsed()) {
            o.command = sub->get_name();
            if (seed_opt->count() > 0) o.seed = seed;
        }
    }
    return dispatch(o, out, err);
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace vhs::cli
