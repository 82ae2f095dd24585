#include "vhs/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vhs/error.hpp"
#include "vhs/stepper.hpp"

namespace vhs {

namespace {

constexpr std::size_t kMaxHalvings = 60;

struct FixedPoint {
    StateField u;
    std::size_t periods = 0;
    double residual = 0.0;
};

FixedPoint iterate_to_fixed_point(const NonlinearModel& model, StateField u,
                                  const OrbitOptions& opts, const char* what) {
    u.time = 0.0;
    for (std::size_t n = 1; n <= opts.max_periods; ++n) {
        StateField next = integrate_over_period(model, u);
        next.time = 0.0;
        const double r = sup_distance(next, u);
        u = std::move(next);
        if (r <= opts.tol) return FixedPoint{std::move(u), n, r};
    }
    throw NoConvergence(std::string(what) + ": no periodic fixed point within " +
                        std::to_string(opts.max_periods) + " periods");
}

// Single component of a multi-component orbit.
PeriodicOrbit component_orbit(const PeriodicOrbit& o, std::size_t comp) {
    PeriodicOrbit out;
    out.period = o.period;
    for (const auto& level : o.levels) {
        StateField s;
        s.time = level.time;
        s.components.push_back(level.components[comp]);
        out.levels.push_back(std::move(s));
    }
    out.residual = sup_distance(out.levels.back(), out.levels.front());
    return out;
}

StateField first_level(const PeriodicOrbit& o) {
    StateField s = o.levels.front();
    s.time = 0.0;
    return s;
}

}  // namespace

LogisticOrbitResult solve_logistic_orbit(const Problem& problem, const OrbitOptions& opts) {
    const Grid& g = problem.grid;
    const CoefficientSet& c = problem.coefficients;
    LogisticOrbitResult res;
    res.zeta_result = zeta(problem, opts.eigen);
    res.zeta = res.zeta_result.value;
    if (res.zeta >= -opts.band) {
        res.orbit = constant_orbit(g, make_state(g, 1, 0.0));
        return res;
    }

    // Upper constant K = 1 + max(beta - mu1)^+ / min(mu2 over its support).
    double growth = 0.0;
    double mu2_min = std::numeric_limits<double>::infinity();
    double mu2_max = 0.0;
    for (std::size_t k = 0; k <= g.steps_per_period; ++k) {
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            const double x = g.node(i), t = g.time(k);
            growth = std::max(growth, c.beta(x, t) - c.mu1(x, t));
            const double m2 = c.mu2(x, t);
            if (m2 > 0.0) mu2_min = std::min(mu2_min, m2);
            mu2_max = std::max(mu2_max, m2);
        }
    }
    if (!(mu2_max > 0.0)) throw InputError("mu2 vanishes identically: the logistic orbit is unbounded");
    const double K = 1.0 + growth / std::max(mu2_min, 1e-8);

    StateField upper = make_state(g, 1, K);
    const std::size_t first = problem.vector_bc.first_unknown();
    if (first == 1) {
        upper.components[0].front() = 0.0;
        upper.components[0].back() = 0.0;
    }
    double delta = 1.0;
    const double delta_cap = std::min(K / 2.0, std::abs(res.zeta) / mu2_max);
    while (delta > delta_cap) delta *= 0.5;
    StateField lower = first_level(res.zeta_result.eigenfunction);
    for (double& v : lower.components[0]) v *= delta;

    const NonlinearModel model = NonlinearModel::logistic(problem);
    const FixedPoint hi = iterate_to_fixed_point(model, upper, opts, "logistic orbit (upper seed)");
    const FixedPoint lo = iterate_to_fixed_point(model, lower, opts, "logistic orbit (lower seed)");
    res.seed_gap = sup_distance(hi.u, lo.u);
    if (res.seed_gap > 10.0 * opts.tol) {
        throw NonUniqueOrbit("logistic limits from the upper and lower seeds differ by " +
                             std::to_string(res.seed_gap));
    }
    res.converged_in = std::max(hi.periods, lo.periods);
    res.orbit = integrate_orbit(model, hi.u);
    res.fixed_point_residual = res.orbit.residual;
    return res;
}

PeriodicOrbit solve_hbar(const Problem& problem, const PeriodicOrbit& v, const PeriodicOrbit& phi,
                         double eps, const OrbitOptions& opts) {
    gamma_rho(problem, opts.eigen);
    const NonlinearModel model = NonlinearModel::host_forced(problem, v, phi, eps);
    const FixedPoint fp =
        iterate_to_fixed_point(model, make_state(problem.grid, 1, 0.0), opts, "Hbar");
    return integrate_orbit(model, fp.u);
}

EpsilonChoice admissible_epsilon(const Problem& problem, const PeriodicOrbit& v,
                                 const PeriodicOrbit& phi, double zeta_value,
                                 const OrbitOptions& opts) {
    const Grid& g = problem.grid;
    const CoefficientSet& c = problem.coefficients;
    const std::size_t first = 1, end = g.nx + 1;

    double ratio = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < v.levels.size(); ++k) {
        for (std::size_t i = first; i < end; ++i) {
            const double p = phi.levels[k].components[0][i];
            if (p > 0.0) ratio = std::min(ratio, v.levels[k].components[0][i] / p);
        }
    }
    if (!std::isfinite(ratio) || !(ratio > 0.0)) {
        throw InputError("eps ladder: V and phi must be positive at interior nodes");
    }

    auto admissible = [&](double eps) {
        for (std::size_t k = 0; k < v.levels.size(); ++k) {
            const double t = g.time(k);
            for (std::size_t i = first; i < end; ++i) {
                const double x = g.node(i);
                const double vv = v.levels[k].components[0][i];
                const double ep = eps * phi.levels[k].components[0][i];
                if (!(vv - ep > 0.0) || !(vv + ep > 0.0)) return false;
                const double beta = c.beta(x, t);
                if (!(ep * ep * c.mu2(x, t) - ep * std::abs(beta + zeta_value) < beta * vv)) {
                    return false;
                }
            }
        }
        return true;
    };

    double eps = 0.1 * ratio;
    for (std::size_t h = 0; h <= kMaxHalvings; ++h, eps *= 0.5) {
        if (!admissible(eps)) continue;
        EigenResult lam = lambda_V_eps(problem, v, phi, eps, opts.eigen);
        if (lam.value < -opts.band) return EpsilonChoice{eps, h, std::move(lam)};
    }
    throw RegimeError("eps ladder: no eps with lambda(V; eps) < -band");
}

EndemicPairResult solve_endemic_pair(const Problem& problem, const LogisticOrbitResult& logistic,
                                     std::optional<double> eps, const OrbitOptions& opts) {
    if (logistic.zeta >= -opts.band) {
        throw RegimeError("endemic pair needs zeta < 0 (zeta = " + std::to_string(logistic.zeta) + ")");
    }
    const Grid& g = problem.grid;
    const PeriodicOrbit& v = logistic.orbit;
    const PeriodicOrbit& phi = logistic.zeta_result.eigenfunction;

    EndemicPairResult res;
    const EigenResult lam = lambda_V(problem, v, opts.eigen);
    res.lambda_V = lam.value;
    if (lam.value >= opts.band) {
        throw RegimeError("lambda(V) = " + std::to_string(lam.value) +
                          " >= 0: no positive periodic solution");
    }
    EpsilonChoice choice = admissible_epsilon(problem, v, phi, logistic.zeta, opts);
    res.eps_ladder = choice.eps;
    res.eps_used = eps.value_or(choice.eps);
    if (res.eps_used < 0.0) throw InputError("endemic pair: eps must be nonnegative");

    const EigenResult lam_eps = res.eps_used == choice.eps ? choice.lambda
                                : res.eps_used == 0.0      ? lam
                                : lambda_V_eps(problem, v, phi, res.eps_used, opts.eigen);
    res.lambda_V_eps = lam_eps.value;
    if (!(lam_eps.value < 0.0)) {
        throw RegimeError("lambda(V; eps) = " + std::to_string(lam_eps.value) + " is not negative");
    }

    const NonlinearModel model = NonlinearModel::truncated(problem, v, phi, res.eps_used);
    const PeriodicOrbit hbar = solve_hbar(problem, v, phi, res.eps_used, opts);

    StateField upper = make_state(g, 2, 0.0);
    upper.components[0] = hbar.levels.front().components[0];
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        upper.components[1][i] = v.levels.front().components[0][i] +
                                 res.eps_used * phi.levels.front().components[0][i];
    }

    const StateField shape = first_level(lam_eps.eigenfunction);
    double delta = 1.0;
    auto below_half_upper = [&](double d) {
        for (std::size_t comp = 0; comp < 2; ++comp) {
            for (std::size_t i = 0; i < g.node_count(); ++i) {
                if (d * shape.components[comp][i] > 0.5 * upper.components[comp][i]) return false;
            }
        }
        return true;
    };
    auto scaled = [&](double d) {
        StateField s = shape;
        for (auto& comp : s.components) {
            for (double& x : comp) x *= d;
        }
        return s;
    };
    std::size_t halvings = 0;
    while (!below_half_upper(delta)) {
        if (++halvings > kMaxHalvings) throw InputError("lower seed: no delta below the upper seed");
        delta *= 0.5;
    }
    StateField lower = scaled(delta);
    while (max_excess(lower, integrate_over_period(model, lower)) > 0.0) {
        if (++halvings > kMaxHalvings) {
            throw NoConvergence("lower seed: delta phi is not a sub-solution for any tested delta");
        }
        delta *= 0.5;
        lower = scaled(delta);
    }
    res.delta = delta;

    for (std::size_t n = 1;; ++n) {
        if (n > opts.max_periods) {
            throw NoConvergence("endemic pair: no convergence within " +
                                std::to_string(opts.max_periods) + " periods");
        }
        StateField up = integrate_over_period(model, upper);
        StateField lo = integrate_over_period(model, lower);
        up.time = lo.time = 0.0;
        res.monotonicity_violation =
            std::max({res.monotonicity_violation, max_excess(up, upper), max_excess(lower, lo)});
        res.order_violation = std::max(res.order_violation, max_excess(lo, up));
        res.upper_residual = sup_distance(up, upper);
        res.lower_residual = sup_distance(lo, lower);
        res.upper_history.push_back(res.upper_residual);
        res.lower_history.push_back(res.lower_residual);
        upper = std::move(up);
        lower = std::move(lo);
        res.iterations = n;
        if (res.upper_residual <= opts.tol && res.lower_residual <= opts.tol) break;
    }
    res.gap = sup_distance(upper, lower);
    if (res.gap > 100.0 * opts.tol) {
        throw GapError("endemic pair: upper and lower limits differ by " + std::to_string(res.gap));
    }

    const PeriodicOrbit pair = integrate_orbit(model, upper);
    res.h_orbit = component_orbit(pair, 0);
    res.vi_orbit = component_orbit(pair, 1);
    res.truncation_margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < pair.levels.size(); ++k) {
        for (std::size_t i = 1; i <= g.nx; ++i) {
            const double c = v.levels[k].components[0][i] +
                             res.eps_used * phi.levels[k].components[0][i];
            res.truncation_margin =
                std::min(res.truncation_margin, c - pair.levels[k].components[1][i]);
        }
    }
    return res;
}

}  // namespace vhs
