#include "vhs/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vhs/error.hpp"

namespace vhs {

namespace {

double sample(const SpaceTimeField& f, const Grid& g, std::size_t node, double t) {
    return f ? f(node, g.node(node), t) : 0.0;
}

void check_shape(const LinearPeriodicSystem& s) {
    const std::size_t m = s.size();
    if (m == 0) throw InputError("linear system has no components");
    if (s.boundary.size() != m || s.coupling.size() != m) {
        throw InputError("linear system: diffusion, boundary and coupling sizes differ");
    }
    for (const auto& row : s.coupling) {
        if (row.size() != m) throw InputError("linear system: coupling matrix is not square");
    }
    if (!s.decay.empty() && s.decay.size() != m) {
        throw InputError("linear system: decay has the wrong size");
    }
}

void check_state(const StateField& u, std::size_t components, const Grid& g) {
    if (u.component_count() != components) {
        throw InputError("state has " + std::to_string(u.component_count()) +
                         " components, expected " + std::to_string(components));
    }
    for (const auto& c : u.components) {
        if (c.size() != g.node_count()) throw InputError("state has the wrong node count");
    }
}

std::size_t step_index(const Grid& g, double t) {
    const double s = t / g.dt;
    const double r = std::round(s);
    if (std::abs(s - r) > 1e-6) throw InputError("state time is not on the step lattice");
    return static_cast<std::size_t>(std::llround(r)) % g.steps_per_period;
}

// I - dt A + dt diag(extra) over the unknown nodes of bc.
Tridiagonal implicit_operator(const DiffusionMatrix& a, double dt,
                              const std::vector<double>& extra_nodal) {
    Tridiagonal t = a.matrix;
    for (std::size_t r = 0; r < t.size(); ++r) {
        t.lower[r] *= -dt;
        t.upper[r] *= -dt;
        t.diag[r] = 1.0 - dt * t.diag[r] + dt * extra_nodal[r + a.first_node];
    }
    return t;
}

// Solve (I - dt A + dt diag(extra)) x = rhs on the unknowns; rhs is nodal and
// is overwritten with the nodal solution (Dirichlet endpoints zeroed).
void implicit_solve(const DiffusionMatrix& a, double dt, const std::vector<double>& extra,
                    std::vector<double>& rhs) {
    const Tridiagonal t = implicit_operator(a, dt, extra);
    std::span<double> unknowns(rhs.data() + a.first_node, t.size());
    solve_tridiagonal(t, unknowns);
    if (a.first_node == 1) {
        rhs.front() = 0.0;
        rhs.back() = 0.0;
    }
}

}  // namespace

double cooperativity_defect(const LinearPeriodicSystem& system, const Grid& grid) {
    check_shape(system);
    double worst = 0.0;
    for (std::size_t k = 0; k < system.size(); ++k) {
        for (std::size_t j = 0; j < system.size(); ++j) {
            if (j == k || !system.coupling[k][j]) continue;
            for (std::size_t n = 0; n <= grid.steps_per_period; ++n) {
                for (std::size_t i = 0; i < grid.node_count(); ++i) {
                    worst = std::min(worst, sample(system.coupling[k][j], grid, i, grid.time(n)));
                }
            }
        }
    }
    return -worst;
}

PeriodMap::PeriodMap(const LinearPeriodicSystem& system, const Grid& grid) : grid_(grid) {
    check_shape(system);
    const std::size_t m = system.size();
    const std::size_t nodes = grid.node_count();
    for (const auto& bc : system.boundary) {
        bounds_.emplace_back(bc.first_unknown(), bc.end_unknown(grid));
    }

    steps_.resize(grid.steps_per_period);
    std::vector<double> extra(nodes);
    for (std::size_t n = 0; n < grid.steps_per_period; ++n) {
        const double t0 = grid.time(n);
        const double t1 = grid.time(n + 1);
        StepData& sd = steps_[n];
        sd.explicit_terms.assign(m * m * nodes, 0.0);
        for (std::size_t k = 0; k < m; ++k) {
            for (std::size_t i = 0; i < nodes; ++i) {
                const double hkk_new = sample(system.coupling[k][k], grid, i, t1);
                const double decay = system.decay.empty() ? 0.0 : sample(system.decay[k], grid, i, t1);
                extra[i] = std::max(-hkk_new, 0.0) + decay;
                for (std::size_t j = 0; j < m; ++j) {
                    double h = sample(system.coupling[k][j], grid, i, t0);
                    if (j == k) h = std::max(h, 0.0);
                    sd.explicit_terms[(k * m + j) * nodes + i] = grid.dt * h;
                }
            }
            const DiffusionMatrix a = assemble_diffusion(grid, system.diffusion[k],
                                                         system.boundary[k], t1);
            sd.lhs.emplace_back(implicit_operator(a, grid.dt, extra));
        }
    }
}

void PeriodMap::step(StateField& u, std::size_t n) const {
    const std::size_t m = size();
    const std::size_t nodes = grid_.node_count();
    const StepData& sd = steps_[n % grid_.steps_per_period];
    const StateField old = u;
    for (std::size_t k = 0; k < m; ++k) {
        auto& out = u.components[k];
        const auto [first, end] = bounds_[k];
        for (std::size_t i = first; i < end; ++i) {
            double rhs = old.components[k][i];
            for (std::size_t j = 0; j < m; ++j) {
                rhs += sd.explicit_terms[(k * m + j) * nodes + i] * old.components[j][i];
            }
            out[i] = rhs;
        }
        sd.lhs[k].solve(std::span<double>(out.data() + first, end - first));
        if (first == 1) {
            out.front() = 0.0;
            out.back() = 0.0;
        }
    }
    u.time = old.time + grid_.dt;
}

StateField PeriodMap::apply(StateField u) const {
    check_state(u, size(), grid_);
    for (std::size_t n = 0; n < grid_.steps_per_period; ++n) step(u, n);
    return u;
}

PeriodicOrbit PeriodMap::sweep(StateField u0) const {
    check_state(u0, size(), grid_);
    PeriodicOrbit orbit;
    orbit.period = grid_.period;
    u0.time = 0.0;
    orbit.levels.reserve(grid_.steps_per_period + 1);
    orbit.levels.push_back(u0);
    for (std::size_t n = 0; n < grid_.steps_per_period; ++n) {
        step(u0, n);
        orbit.levels.push_back(u0);
    }
    orbit.residual = sup_distance(orbit.levels.back(), orbit.levels.front());
    return orbit;
}

StateField step(const LinearPeriodicSystem& system, const Grid& grid, const StateField& u) {
    const std::size_t n = step_index(grid, u.time);
    // Build a one-step map on a grid shifted so that step 0 starts at u.time.
    LinearPeriodicSystem shifted = system;
    const double t0 = grid.time(n);
    auto shift = [t0](const SpaceTimeField& f) -> SpaceTimeField {
        if (!f) return f;
        return [f, t0](std::size_t i, double x, double t) { return f(i, x, t + t0); };
    };
    for (auto& d : shifted.diffusion) d = shift(d);
    for (auto& row : shifted.coupling) {
        for (auto& h : row) h = shift(h);
    }
    for (auto& d : shifted.decay) d = shift(d);
    for (auto& bc : shifted.boundary) bc.robin_b = shift(bc.robin_b);

    Grid one = grid;
    one.steps_per_period = 1;
    one.period = grid.dt;
    const PeriodMap map(shifted, one);
    StateField out = u;
    check_state(out, system.size(), grid);
    map.step(out, 0);
    out.time = u.time + grid.dt;
    return out;
}

StateField integrate_over_period(const LinearPeriodicSystem& system, const Grid& grid,
                                 const StateField& u0) {
    return PeriodMap(system, grid).apply(u0);
}

// ---------------------------------------------------------------------------

struct ModelTables {
    Grid grid;
    BoundarySpec host_bc;
    BoundarySpec vector_bc;
    // [level][node], levels 0..m
    std::vector<std::vector<double>> rho, s1, sigma2, beta, mu1, mu2;
    std::vector<DiffusionMatrix> a1, a2;

    explicit ModelTables(const Problem& p)
        : grid(p.grid), host_bc(p.host_bc), vector_bc(p.vector_bc) {
        const CoefficientSet& c = p.coefficients;
        const std::size_t levels = grid.steps_per_period + 1;
        const std::size_t nodes = grid.node_count();
        auto table = [&](auto&& f) {
            std::vector<std::vector<double>> out(levels, std::vector<double>(nodes));
            for (std::size_t k = 0; k < levels; ++k) {
                for (std::size_t i = 0; i < nodes; ++i) out[k][i] = f(grid.node(i), grid.time(k));
            }
            return out;
        };
        rho = table(c.rho);
        s1 = table([&](double x, double t) { return c.sigma1(x, t) * c.h_u(x, t); });
        sigma2 = table(c.sigma2);
        beta = table(c.beta);
        mu1 = table(c.mu1);
        mu2 = table(c.mu2);
        const SpaceTimeField d1 = as_field(c.d1);
        const SpaceTimeField d2 = as_field(c.d2);
        for (std::size_t k = 0; k < levels; ++k) {
            a1.push_back(assemble_diffusion(grid, d1, host_bc, grid.time(k)));
            a2.push_back(assemble_diffusion(grid, d2, vector_bc, grid.time(k)));
        }
    }
};

NonlinearModel::NonlinearModel(std::shared_ptr<const ModelTables> tables, Kind kind)
    : tables_(std::move(tables)), kind_(kind) {}

NonlinearModel NonlinearModel::full(const Problem& problem) {
    return NonlinearModel(std::make_shared<const ModelTables>(problem), Kind::full);
}

NonlinearModel NonlinearModel::logistic(const Problem& problem) {
    return NonlinearModel(std::make_shared<const ModelTables>(problem), Kind::logistic);
}

namespace {

void shifted_levels(const Grid& g, const PeriodicOrbit& v, const PeriodicOrbit& phi, double eps,
                    std::vector<std::vector<double>>& upper,
                    std::vector<std::vector<double>>& lower) {
    if (v.steps() != g.steps_per_period || phi.steps() != g.steps_per_period) {
        throw InputError("orbit resolution does not match the grid's steps per period");
    }
    if (v.component_count() != 1 || phi.component_count() != 1) {
        throw InputError("V and phi must be single-component orbits");
    }
    const std::size_t levels = g.steps_per_period + 1;
    upper.assign(levels, std::vector<double>(g.node_count()));
    lower = upper;
    for (std::size_t k = 0; k < levels; ++k) {
        const auto& vk = v.levels[k].components[0];
        const auto& pk = phi.levels[k].components[0];
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            upper[k][i] = vk[i] + eps * pk[i];
            lower[k][i] = vk[i] - eps * pk[i];
        }
    }
}

}  // namespace

NonlinearModel NonlinearModel::truncated(const Problem& problem, const PeriodicOrbit& v,
                                         const PeriodicOrbit& phi, double eps, bool clip) {
    NonlinearModel m(std::make_shared<const ModelTables>(problem), Kind::truncated);
    m.eps_ = eps;
    m.clip_ = clip;
    shifted_levels(problem.grid, v, phi, eps, m.upper_, m.lower_);
    return m;
}

NonlinearModel NonlinearModel::host_forced(const Problem& problem, const PeriodicOrbit& v,
                                           const PeriodicOrbit& phi, double eps) {
    NonlinearModel m(std::make_shared<const ModelTables>(problem), Kind::host_forced);
    m.eps_ = eps;
    shifted_levels(problem.grid, v, phi, eps, m.upper_, m.lower_);
    return m;
}

std::size_t NonlinearModel::component_count() const noexcept {
    switch (kind_) {
        case Kind::full: return 3;
        case Kind::truncated: return 2;
        case Kind::logistic:
        case Kind::host_forced: return 1;
    }
    return 0;
}

const Grid& NonlinearModel::grid() const noexcept { return tables_->grid; }

void NonlinearModel::step(StateField& u, std::size_t n) const {
    const ModelTables& tb = *tables_;
    const Grid& g = tb.grid;
    const double dt = g.dt;
    const std::size_t nodes = g.node_count();
    const std::size_t e = n % g.steps_per_period;  // explicit level
    const std::size_t k = e + 1;                   // implicit level
    std::vector<double> extra(nodes);
    std::vector<double> rhs(nodes);

    switch (kind_) {
        case Kind::full: {
            const auto h = u.components[0];
            const auto vu = u.components[1];
            const auto vi = u.components[2];
            for (std::size_t i = 0; i < nodes; ++i) {
                extra[i] = tb.rho[k][i];
                rhs[i] = h[i] + dt * tb.s1[e][i] * vi[i];
            }
            implicit_solve(tb.a1[k], dt, extra, rhs);
            u.components[0] = rhs;

            // The transfer sigma2^{n+1} H^n V_u^{n+1} leaves V_u and enters V_i
            // with identical values, so V_u + V_i follows the logistic step.
            std::vector<double> w(nodes);
            for (std::size_t i = 0; i < nodes; ++i) {
                w[i] = vu[i] + vi[i];
                extra[i] = tb.mu1[k][i] + tb.mu2[k][i] * w[i] + tb.sigma2[k][i] * h[i];
                rhs[i] = vu[i] + dt * tb.beta[e][i] * w[i];
            }
            implicit_solve(tb.a2[k], dt, extra, rhs);
            const std::vector<double> vu_new = rhs;
            for (std::size_t i = 0; i < nodes; ++i) {
                extra[i] = tb.mu1[k][i] + tb.mu2[k][i] * w[i];
                rhs[i] = vi[i] + dt * tb.sigma2[k][i] * h[i] * vu_new[i];
            }
            implicit_solve(tb.a2[k], dt, extra, rhs);
            u.components[1] = vu_new;
            u.components[2] = rhs;
            break;
        }
        case Kind::logistic: {
            const auto& w = u.components[0];
            for (std::size_t i = 0; i < nodes; ++i) {
                extra[i] = tb.mu1[k][i] + tb.mu2[k][i] * w[i];
                rhs[i] = w[i] + dt * tb.beta[e][i] * w[i];
            }
            implicit_solve(tb.a2[k], dt, extra, rhs);
            u.components[0] = rhs;
            break;
        }
        case Kind::host_forced: {
            const auto& h = u.components[0];
            for (std::size_t i = 0; i < nodes; ++i) {
                extra[i] = tb.rho[k][i];
                rhs[i] = h[i] + dt * tb.s1[e][i] * upper_[e][i];
            }
            implicit_solve(tb.a1[k], dt, extra, rhs);
            u.components[0] = rhs;
            break;
        }
        case Kind::truncated: {
            const auto uu = u.components[0];
            const auto z = u.components[1];
            for (std::size_t i = 0; i < nodes; ++i) {
                extra[i] = tb.rho[k][i];
                rhs[i] = uu[i] + dt * tb.s1[e][i] * z[i];
            }
            implicit_solve(tb.a1[k], dt, extra, rhs);
            u.components[0] = rhs;

            // Solve M z' - dt g (c - z')^+ = z with M an M-matrix: policy
            // iteration over the set where the positive part is active.
            const auto& c = upper_[k];
            std::vector<char> active(nodes, 1);
            std::vector<double> sol;
            for (int iter = 0;; ++iter) {
                if (iter == 100) throw SolveError("truncated step: active set did not settle");
                for (std::size_t i = 0; i < nodes; ++i) {
                    const double gi = active[i] ? tb.sigma2[k][i] * uu[i] : 0.0;
                    extra[i] = tb.mu1[k][i] + tb.mu2[k][i] * lower_[e][i] + gi;
                    rhs[i] = z[i] + dt * gi * c[i];
                }
                implicit_solve(tb.a2[k], dt, extra, rhs);
                sol = rhs;
                if (!clip_) break;
                bool changed = false;
                for (std::size_t i = 0; i < nodes; ++i) {
                    const char now = sol[i] < c[i] ? 1 : 0;
                    if (now != active[i]) {
                        active[i] = now;
                        changed = true;
                    }
                }
                if (!changed) break;
            }
            u.components[1] = std::move(sol);
            break;
        }
    }
    u.time += dt;
}

StateField integrate_over_period(const NonlinearModel& model, StateField u0) {
    check_state(u0, model.component_count(), model.grid());
    for (std::size_t n = 0; n < model.grid().steps_per_period; ++n) model.step(u0, n);
    return u0;
}

PeriodicOrbit integrate_orbit(const NonlinearModel& model, StateField u0) {
    check_state(u0, model.component_count(), model.grid());
    const Grid& g = model.grid();
    PeriodicOrbit orbit;
    orbit.period = g.period;
    u0.time = 0.0;
    orbit.levels.push_back(u0);
    for (std::size_t n = 0; n < g.steps_per_period; ++n) {
        model.step(u0, n);
        orbit.levels.push_back(u0);
    }
    orbit.residual = sup_distance(orbit.levels.back(), orbit.levels.front());
    return orbit;
}

Trajectory integrate_trajectory(const NonlinearModel& model, const StateField& u0,
                                std::size_t n_periods, std::size_t stride, double cap) {
    const Grid& g = model.grid();
    check_state(u0, model.component_count(), g);
    if (n_periods == 0) throw InputError("integrate_trajectory: n_periods must be at least 1");
    if (stride == 0 || g.steps_per_period % stride != 0) {
        throw InputError("integrate_trajectory: stride must divide steps_per_period");
    }
    Trajectory traj;
    traj.stride = stride;
    traj.steps_per_period = g.steps_per_period;
    traj.samples.reserve(n_periods * g.steps_per_period / stride + 1);

    StateField u = u0;
    u.time = 0.0;
    traj.samples.push_back(u);
    const std::size_t total = n_periods * g.steps_per_period;
    for (std::size_t s = 0; s < total; ++s) {
        model.step(u, s);
        for (const auto& c : u.components) {
            for (double v : c) {
                if (!std::isfinite(v) || v > cap) {
                    throw BlowupError("trajectory exceeded the cap " + std::to_string(cap) +
                                      " at t = " + std::to_string(u.time));
                }
            }
        }
        if ((s + 1) % stride == 0) traj.samples.push_back(u);
    }
    return traj;
}

}  // namespace vhs
