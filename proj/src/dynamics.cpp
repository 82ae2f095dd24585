#include "vhs/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vhs/error.hpp"
#include "vhs/stepper.hpp"

namespace vhs {

namespace {

constexpr double kRatioFloor = 1e-12;
constexpr double kBandSlack = 1e-12;

PeriodicOrbit assemble_attractor(const Grid& g, const PeriodicOrbit& h, const PeriodicOrbit& vu,
                                 const PeriodicOrbit& vi) {
    PeriodicOrbit o;
    o.period = g.period;
    for (std::size_t k = 0; k <= g.steps_per_period; ++k) {
        StateField s;
        s.time = g.time(k);
        s.components = {h.levels[k].components[0], vu.levels[k].components[0],
                        vi.levels[k].components[0]};
        o.levels.push_back(std::move(s));
    }
    o.residual = sup_distance(o.levels.back(), o.levels.front());
    return o;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

}  // namespace

std::string_view to_string(Regime r) noexcept {
    switch (r) {
        case Regime::extinction: return "EXTINCTION";
        case Regime::disease_free: return "DISEASE_FREE";
        case Regime::endemic: return "ENDEMIC";
        case Regime::indeterminate: return "INDETERMINATE";
    }
    return "INDETERMINATE";
}

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::pass: return "PASS";
        case Verdict::fail: return "FAIL";
        case Verdict::indeterminate: return "INDETERMINATE";
    }
    return "FAIL";
}

Regime regime_from(double zeta, std::optional<double> lambda_V, double band) noexcept {
    if (zeta >= band) return Regime::extinction;
    if (zeta > -band || !lambda_V) return Regime::indeterminate;
    if (*lambda_V >= band) return Regime::disease_free;
    if (*lambda_V <= -band) return Regime::endemic;
    return Regime::indeterminate;
}

std::string_view RegimeReport::attractor_description() const noexcept {
    switch (regime) {
        case Regime::extinction: return "(0, 0, 0)";
        case Regime::disease_free: return "(0, V, 0)";
        case Regime::endemic: return "(H_i, V - V_i, V_i)";
        case Regime::indeterminate: return "none";
    }
    return "none";
}

RegimeReport classify_regime(const Problem& problem, const OrbitOptions& opts, bool attractor) {
    const Grid& g = problem.grid;
    RegimeReport rep;
    rep.logistic = solve_logistic_orbit(problem, opts);
    rep.zeta = rep.logistic.zeta;
    if (rep.zeta <= -opts.band) {
        rep.lambda_V = lambda_V(problem, rep.logistic.orbit, opts.eigen).value;
    }
    rep.regime = regime_from(rep.zeta, rep.lambda_V, opts.band);
    if (!attractor) return rep;

    const PeriodicOrbit zero = constant_orbit(g, make_state(g, 1, 0.0));
    switch (rep.regime) {
        case Regime::extinction:
            rep.attractor = constant_orbit(g, make_state(g, 3, 0.0));
            break;
        case Regime::disease_free:
            rep.attractor = assemble_attractor(g, zero, rep.logistic.orbit, zero);
            break;
        case Regime::endemic: {
            rep.pair = solve_endemic_pair(problem, rep.logistic, 0.0, opts);
            PeriodicOrbit vu = rep.logistic.orbit;
            for (std::size_t k = 0; k < vu.levels.size(); ++k) {
                auto& c = vu.levels[k].components[0];
                const auto& vi = rep.pair->vi_orbit.levels[k].components[0];
                for (std::size_t i = 0; i < c.size(); ++i) c[i] -= vi[i];
            }
            rep.attractor = assemble_attractor(g, rep.pair->h_orbit, vu, rep.pair->vi_orbit);
            break;
        }
        case Regime::indeterminate:
            break;
    }
    return rep;
}

void check_initial_data(const Problem& problem, const StateField& initial) {
    const Grid& g = problem.grid;
    if (initial.component_count() != 3) throw InputError("initial data needs (H_i, V_u, V_i)");
    const BoundarySpec* bcs[3] = {&problem.host_bc, &problem.vector_bc, &problem.vector_bc};
    const char* names[3] = {"H_i0", "V_u0", "V_i0"};
    for (std::size_t c = 0; c < 3; ++c) {
        const auto& u = initial.components[c];
        if (u.size() != g.node_count()) throw InputError("initial data has the wrong node count");
        for (std::size_t i = 1; i <= g.nx; ++i) {
            if (!(u[i] > 0.0)) {
                throw InputError(std::string(names[c]) + " must be positive at interior nodes (x = " +
                                 std::to_string(g.node(i)) + ")");
            }
        }
        const bool dirichlet = bcs[c]->is_dirichlet();
        for (std::size_t i : {std::size_t{0}, g.nx + 1}) {
            if (dirichlet ? u[i] != 0.0 : u[i] < 0.0) {
                throw InputError(std::string(names[c]) +
                                 (dirichlet ? " must vanish at Dirichlet endpoints"
                                            : " must be nonnegative at the endpoints"));
            }
        }
    }
}

std::vector<double> period_distances(const Trajectory& trajectory, const PeriodicOrbit& attractor) {
    const std::size_t spp = trajectory.samples_per_period();
    const std::size_t periods = trajectory.periods();
    std::vector<double> e(periods, 0.0);
    for (std::size_t s = 0; s < trajectory.samples.size(); ++s) {
        const StateField& u = trajectory.samples[s];
        const std::size_t level = (s % spp) * trajectory.stride;
        const StateField& a = attractor.levels[level];
        const double d = sup_distance(u, a);
        // A boundary sample belongs to both adjacent periods.
        if (s / spp < periods) e[s / spp] = std::max(e[s / spp], d);
        if (s % spp == 0 && s > 0) e[s / spp - 1] = std::max(e[s / spp - 1], d);
    }
    return e;
}

ConvergenceReport verify_trichotomy(const Problem& problem, const StateField& initial,
                                    const RunOptions& run, const OrbitOptions& opts) {
    check_initial_data(problem, initial);
    ConvergenceReport rep;
    rep.regime = classify_regime(problem, opts);
    rep.trajectory = integrate_trajectory(NonlinearModel::full(problem), initial, run.n_periods,
                                          run.stride, run.blowup_cap);
    rep.min_entry = 0.0;
    for (const auto& s : rep.trajectory.samples) rep.min_entry = std::min(rep.min_entry, min_entry(s));
    if (rep.regime.regime == Regime::indeterminate) {
        rep.verdict = Verdict::indeterminate;
        return rep;
    }
    rep.distances = period_distances(rep.trajectory, rep.regime.attractor);
    for (std::size_t n = 1; n < rep.distances.size(); ++n) {
        if (rep.distances[n - 1] <= kRatioFloor) break;
        rep.ratios.push_back(rep.distances[n] / rep.distances[n - 1]);
    }
    rep.median_ratio = median(rep.ratios);
    const bool close = !rep.distances.empty() && rep.distances.back() <= run.target;
    rep.verdict = close && rep.median_ratio < 1.0 ? Verdict::pass : Verdict::fail;
    return rep;
}

SandwichReport sandwich_check(const Problem& problem, const PeriodicOrbit& v,
                              const PeriodicOrbit& phi, double eps, const Trajectory& trajectory) {
    const Grid& g = problem.grid;
    SandwichReport rep;
    rep.band_positive = true;
    for (std::size_t k = 0; k < v.levels.size() && rep.band_positive; ++k) {
        for (std::size_t i = 1; i <= g.nx; ++i) {
            if (!(v.levels[k].components[0][i] - eps * phi.levels[k].components[0][i] > 0.0)) {
                rep.band_positive = false;
                break;
            }
        }
    }
    const std::size_t spp = trajectory.samples_per_period();
    const std::size_t periods = trajectory.periods();
    rep.inside.assign(periods, true);
    for (std::size_t s = 0; s < trajectory.samples.size(); ++s) {
        const StateField& u = trajectory.samples[s];
        const std::size_t level = (s % spp) * trajectory.stride;
        const auto& vk = v.levels[level].components[0];
        const auto& pk = phi.levels[level].components[0];
        bool ok = true;
        for (std::size_t i = 0; i < g.node_count() && ok; ++i) {
            const double w = u.components[1][i] + u.components[2][i];
            ok = w >= vk[i] - eps * pk[i] - kBandSlack && w <= vk[i] + eps * pk[i] + kBandSlack;
        }
        if (!ok) rep.inside[std::min(s / spp, periods - 1)] = false;
    }
    if (!rep.band_positive) return rep;
    std::size_t n = rep.inside.size();
    while (n > 0 && rep.inside[n - 1]) --n;
    if (n < rep.inside.size()) rep.entry_period = n;
    return rep;
}

}  // namespace vhs
