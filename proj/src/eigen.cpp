#include "vhs/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vhs/error.hpp"

namespace vhs {

namespace {

constexpr double kReducibleTol = 1e-8;

struct PowerResult {
    StateField u;  // sup-normalised fixed direction
    double r = 0.0;
    std::size_t iterations = 0;
    std::vector<double> history;
};

StateField positive_start(const LinearPeriodicSystem& system, const Grid& grid) {
    StateField u = make_state(grid, system.size(), 1.0);
    for (std::size_t k = 0; k < system.size(); ++k) {
        if (system.boundary[k].is_dirichlet()) {
            u.components[k].front() = 0.0;
            u.components[k].back() = 0.0;
        }
    }
    return u;
}

void scale(StateField& u, double s) {
    for (auto& c : u.components) {
        for (double& v : c) v *= s;
    }
}

PowerResult power_iterate(const PeriodMap& map, StateField u, const EigenOptions& opts) {
    PowerResult out;
    scale(u, 1.0 / sup_norm(u));
    double r_prev = -1.0;
    for (std::size_t it = 1; it <= opts.max_iters; ++it) {
        StateField v = map.apply(u);
        v.time = 0.0;
        const double r = sup_norm(v);
        if (!(r > 0.0) || !std::isfinite(r)) {
            throw SolveError("power iteration: period map annihilated or overflowed the iterate");
        }
        scale(v, 1.0 / r);
        out.history.push_back(r);
        const double change = sup_distance(u, v);
        u = std::move(v);
        if (r_prev > 0.0 && std::abs(r - r_prev) <= opts.tol * r && change <= opts.tol) {
            out.u = std::move(u);
            out.r = r;
            out.iterations = it;
            return out;
        }
        r_prev = r;
    }
    throw NoConvergence("power iteration did not converge in " + std::to_string(opts.max_iters) +
                        " iterations");
}

// Richardson table for values at dt, dt/2, dt/4, ... with error series in dt.
double richardson(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::vector<double>> r(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        r[i][0] = values[i];
        for (std::size_t j = 1; j <= i; ++j) {
            const double f = std::ldexp(1.0, static_cast<int>(j)) - 1.0;
            r[i][j] = r[i][j - 1] + (r[i][j - 1] - r[i - 1][j - 1]) / f;
        }
    }
    return r[n - 1][n - 1];
}

void require_nonnegative_orbit(const PeriodicOrbit& v, const char* name) {
    if (v.empty()) throw InputError(std::string(name) + " orbit is empty");
    bool nonzero = false;
    for (const auto& level : v.levels) {
        for (const auto& c : level.components) {
            for (double x : c) {
                if (x < 0.0) throw InputError(std::string(name) + " has negative entries");
                if (x > 0.0) nonzero = true;
            }
        }
    }
    if (!nonzero) throw InputError(std::string(name) + " is identically zero");
}

}  // namespace

EigenResult principal_eigenvalue(const LinearPeriodicSystem& system, const Grid& grid,
                                 const EigenOptions& opts) {
    if (!(opts.tol > 0.0)) throw InputError("eigen tolerance must be positive");
    if (opts.max_iters == 0) throw InputError("eigen max_iters must be positive");
    if (cooperativity_defect(system, grid) > 0.0) {
        throw InputError("linear system is not cooperative");
    }
    const std::size_t levels = std::max<std::size_t>(opts.extrapolation_levels, 1);
    const double T = grid.period;

    const PeriodMap base(system, grid);
    PowerResult p = power_iterate(base, positive_start(system, grid), opts);

    std::vector<double> lambdas{-std::log(p.r) / T};
    StateField warm = p.u;
    for (std::size_t l = 1; l < levels; ++l) {
        const PeriodMap fine(system, grid.refined_in_time(std::size_t{1} << l));
        PowerResult q = power_iterate(fine, warm, opts);
        lambdas.push_back(-std::log(q.r) / T);
        warm = std::move(q.u);
    }

    EigenResult res;
    res.discrete_multiplier = p.r;
    res.discrete_value = lambdas.front();
    res.value = richardson(lambdas);
    res.multiplier = std::exp(-res.value * T);
    res.iterations = p.iterations;
    res.history = std::move(p.history);

    // phi(t) = e^{lambda t} u(t) along one sweep of the base map.
    PeriodicOrbit orbit = base.sweep(p.u);
    for (std::size_t k = 0; k < orbit.levels.size(); ++k) {
        scale(orbit.levels[k], std::exp(res.discrete_value * grid.time(k)));
    }
    const double s = orbit.sup();
    for (auto& level : orbit.levels) scale(level, 1.0 / s);
    orbit.residual = sup_distance(orbit.levels.back(), orbit.levels.front());
    res.periodicity_residual = orbit.residual;

    const StateField& phi0 = orbit.levels.front();
    StateField image = base.apply(phi0);
    StateField target = phi0;
    scale(target, res.discrete_multiplier);
    res.residual = sup_distance(image, target) / sup_norm(phi0);

    for (std::size_t k = 0; k < system.size() && !res.reducible; ++k) {
        const BoundarySpec& bc = system.boundary[k];
        const std::size_t first = std::max<std::size_t>(bc.first_unknown(), 1);
        const std::size_t end = std::min(bc.end_unknown(grid), grid.nx + 1);
        if (orbit.min_over(k, first, end) <= kReducibleTol) res.reducible = true;
    }
    res.eigenfunction = std::move(orbit);
    return res;
}

LinearPeriodicSystem zeta_system(const Problem& problem) {
    const CoefficientSet& c = problem.coefficients;
    LinearPeriodicSystem s;
    s.diffusion = {as_field(c.d2)};
    s.boundary = {problem.vector_bc};
    s.coupling = {{as_field(c.beta)}};
    s.decay = {as_field(c.mu1)};
    return s;
}

LinearPeriodicSystem gamma_system(const Problem& problem) {
    const CoefficientSet& c = problem.coefficients;
    LinearPeriodicSystem s;
    s.diffusion = {as_field(c.d1)};
    s.boundary = {problem.host_bc};
    s.coupling = {{SpaceTimeField{}}};
    s.decay = {as_field(c.rho)};
    return s;
}

LinearPeriodicSystem lambda_system(const Problem& problem, const PeriodicOrbit& v,
                                   const PeriodicOrbit& phi, double eps) {
    const CoefficientSet& c = problem.coefficients;
    const SpaceTimeField vf = orbit_field(v, 0);
    const SpaceTimeField pf = eps != 0.0 ? orbit_field(phi, 0) : SpaceTimeField{};
    auto shifted = [vf, pf, eps](std::size_t i, double x, double t, double sign) {
        return vf(i, x, t) + (pf ? sign * eps * pf(i, x, t) : 0.0);
    };
    const Expression sigma1 = c.sigma1, h_u = c.h_u, sigma2 = c.sigma2;
    const Expression mu1 = c.mu1, mu2 = c.mu2;

    LinearPeriodicSystem s;
    s.diffusion = {as_field(c.d1), as_field(c.d2)};
    s.boundary = {problem.host_bc, problem.vector_bc};
    s.coupling = {
        {SpaceTimeField{},
         [sigma1, h_u](std::size_t, double x, double t) { return sigma1(x, t) * h_u(x, t); }},
        {[sigma2, shifted](std::size_t i, double x, double t) {
             return sigma2(x, t) * shifted(i, x, t, 1.0);
         },
         SpaceTimeField{}},
    };
    s.decay = {as_field(c.rho), [mu1, mu2, shifted](std::size_t i, double x, double t) {
                   return mu1(x, t) + mu2(x, t) * shifted(i, x, t, -1.0);
               }};
    return s;
}

EigenResult zeta(const Problem& problem, const EigenOptions& opts) {
    return principal_eigenvalue(zeta_system(problem), problem.grid, opts);
}

EigenResult gamma_rho(const Problem& problem, const EigenOptions& opts) {
    EigenResult r = principal_eigenvalue(gamma_system(problem), problem.grid, opts);
    if (!(r.value > 0.0)) {
        throw InternalError("gamma(rho) = " + std::to_string(r.value) +
                            " is not positive although rho > 0");
    }
    return r;
}

EigenResult lambda_V(const Problem& problem, const PeriodicOrbit& v, const EigenOptions& opts) {
    require_nonnegative_orbit(v, "V");
    return principal_eigenvalue(lambda_system(problem, v, v, 0.0), problem.grid, opts);
}

EigenResult lambda_V_eps(const Problem& problem, const PeriodicOrbit& v, const PeriodicOrbit& phi,
                         double eps, const EigenOptions& opts) {
    require_nonnegative_orbit(v, "V");
    if (eps != 0.0) {
        if (phi.steps() != v.steps()) throw InputError("V and phi have different time resolutions");
        const BoundarySpec& bc = problem.vector_bc;
        const std::size_t first = bc.first_unknown();
        const std::size_t end = bc.end_unknown(problem.grid);
        for (std::size_t k = 0; k < v.levels.size(); ++k) {
            const auto& vk = v.levels[k].components[0];
            const auto& pk = phi.levels[k].components[0];
            for (std::size_t i = first; i < end; ++i) {
                if (!(vk[i] - std::abs(eps) * pk[i] > 0.0)) {
                    throw EpsilonTooLarge("V - |eps| phi <= 0 at x = " +
                                          std::to_string(problem.grid.node(i)) +
                                          ", t = " + std::to_string(problem.grid.time(k)));
                }
            }
        }
    }
    return principal_eigenvalue(lambda_system(problem, v, phi, eps), problem.grid, opts);
}

}  // namespace vhs
