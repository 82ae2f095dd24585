#include <cmath>
#include <numbers>

#include "doctest.h"
#include "support.hpp"
#include "vhs/error.hpp"
#include "vhs/stepper.hpp"

using namespace vhs;
using namespace vhs::testing;

namespace {

SpaceTimeField constant(double v) {
    return [v](std::size_t, double, double) { return v; };
}

LinearPeriodicSystem scalar(double a, BoundarySpec bc = BoundarySpec::neumann()) {
    LinearPeriodicSystem s;
    s.diffusion = {constant(1.0)};
    s.boundary = {std::move(bc)};
    s.coupling = {{a == 0.0 ? SpaceTimeField{} : constant(a)}};
    return s;
}

double exponential_error(double a, std::size_t m) {
    const Grid g = build_grid(0.0, 1.0, 4, 1.0, m);
    const StateField out = integrate_over_period(scalar(a), g, constant_state(g, {1.0}));
    return std::abs(out.components[0][2] - std::exp(a));
}

LinearPeriodicSystem random_cooperative(Rng& rng, const Grid& g) {
    const std::size_t m = 1 + rng.index(3);
    LinearPeriodicSystem s;
    for (std::size_t k = 0; k < m; ++k) {
        const double d0 = rng.uniform(0.1, 2.0), d1 = rng.uniform(0.0, 0.09);
        s.diffusion.push_back([d0, d1](std::size_t, double x, double t) {
            return d0 + d1 * std::sin(2 * std::numbers::pi * t + x);
        });
        switch (rng.index(3)) {
            case 0: s.boundary.push_back(BoundarySpec::dirichlet()); break;
            case 1: s.boundary.push_back(BoundarySpec::neumann()); break;
            default: s.boundary.push_back(BoundarySpec::robin(constant(rng.uniform(0, 2))));
        }
    }
    s.coupling.assign(m, std::vector<SpaceTimeField>(m));
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t j = 0; j < m; ++j) {
            const double a = k == j ? rng.uniform(-2, 2) : rng.uniform(0, 2);
            const double b = k == j ? rng.uniform(-1, 1) : rng.uniform(0, a);
            s.coupling[k][j] = [a, b, T = g.period](std::size_t, double x, double t) {
                return a + b * std::cos(2 * std::numbers::pi * t / T) * std::cos(3 * x);
            };
        }
    }
    return s;
}

StateField random_state(Rng& rng, const Grid& g, std::size_t comps, double lo, double hi) {
    StateField s = make_state(g, comps);
    for (auto& c : s.components) {
        for (double& v : c) v = rng.uniform(lo, hi);
    }
    return s;
}

void pin_dirichlet(const LinearPeriodicSystem& s, StateField& u) {
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (s.boundary[k].is_dirichlet()) zero_dirichlet(u, k);
    }
}

}  // namespace

TEST_CASE("constants are invariant without reaction") {
    const Grid g = build_grid(0.0, 1.0, 10, 1.0, 16);
    const LinearPeriodicSystem s = scalar(0.0);
    StateField u = constant_state(g, {3.25});
    for (int i = 0; i < 5; ++i) {
        u = step(s, g, u);
        for (double v : u.components[0]) CHECK(v == doctest::Approx(3.25).epsilon(1e-14));
    }
    CHECK(u.time == doctest::Approx(5 * g.dt));
    const StateField one = integrate_over_period(s, g, constant_state(g, {1.0}));
    for (double v : one.components[0]) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("scalar exponential is first order in dt") {
    for (double a : {0.7, -1.0}) {
        const double e1 = exponential_error(a, 64), e2 = exponential_error(a, 128);
        CHECK(e1 < std::abs(a) * 2.0 / 64);
        CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.2));
    }
    const Grid g = build_grid(0.0, 1.0, 4, 1.0, 256);
    const StateField out = integrate_over_period(scalar(-1.0), g, constant_state(g, {2.0}));
    CHECK(std::abs(out.components[0][0] - 2.0 * std::exp(-1.0)) < 2.0 / 256);
}

TEST_CASE("single steps agree with the period map") {
    const Grid g = build_grid(0.0, 1.0, 9, 1.0, 16);
    Rng rng(5);
    const LinearPeriodicSystem s = random_cooperative(rng, g);
    StateField u = random_state(rng, g, s.size(), 0.0, 1.0);
    pin_dirichlet(s, u);
    const StateField whole = integrate_over_period(s, g, u);
    for (std::size_t n = 0; n < g.steps_per_period; ++n) u = step(s, g, u);
    CHECK(sup_distance(u, whole) < 1e-13);
    CHECK_THROWS_AS(step(s, g, [&] { StateField v = u; v.time = 0.3 * g.dt; return v; }()),
                    InputError);
}

TEST_CASE("comparison principle on random cooperative systems") {
    Rng rng(20240917);
    for (int trial = 0; trial < 20; ++trial) {
        const Grid g = build_grid(0.0, 1.0 + rng.uniform(0, 2), 8 + rng.index(10), 1.0, 32);
        const LinearPeriodicSystem s = random_cooperative(rng, g);
        CHECK(cooperativity_defect(s, g) == 0.0);
        StateField lo = random_state(rng, g, s.size(), 0.0, 1.0);
        StateField hi = lo;
        for (auto& c : hi.components) {
            for (double& v : c) v += rng.uniform(0, 1);
        }
        pin_dirichlet(s, lo);
        pin_dirichlet(s, hi);
        const PeriodMap map(s, g);
        const StateField a = map.apply(lo), b = map.apply(hi);
        CHECK(max_excess(a, b) <= 1e-12);
        CHECK(min_entry(a) >= -1e-12);
    }
}

TEST_CASE("negative off-diagonal coupling is measured") {
    const Grid g = build_grid(0.0, 1.0, 5, 1.0, 8);
    LinearPeriodicSystem s;
    s.diffusion = {constant(1), constant(1)};
    s.boundary = {BoundarySpec::neumann(), BoundarySpec::neumann()};
    s.coupling = {{SpaceTimeField{}, constant(-0.5)}, {constant(1), SpaceTimeField{}}};
    CHECK(cooperativity_defect(s, g) == doctest::Approx(0.5));
}

TEST_CASE("pure decay without recruitment") {
    Problem p = constants_problem(0.0, 8, 64);
    p.coefficients.sigma2 = Expression::constant(0.0);
    p.coefficients.beta = Expression::constant(0.0);
    const NonlinearModel model = NonlinearModel::full(p);
    StateField u = constant_state(p.grid, {1.0, 2.0, 0.5});
    for (std::size_t n = 0; n < 64; ++n) {
        const StateField prev = u;
        model.step(u, n);
        for (std::size_t c = 0; c < 3; ++c) CHECK(u.components[c][3] < prev.components[c][3]);
    }
}

TEST_CASE("logistic selector reaches its carrying capacity") {
    Problem p = constants_problem(1.0, 8, 64);
    const Trajectory tr =
        integrate_trajectory(NonlinearModel::logistic(p), constant_state(p.grid, {0.1}), 30, 8);
    CHECK(tr.periods() == 30);
    CHECK(tr.samples.size() == 30 * 8 + 1);
    for (double v : tr.at_period(30).components[0]) CHECK(std::abs(v - 1.0) < 1e-6);
}

TEST_CASE("full model without vector births dies out") {
    Problem p = constants_problem(5.0, 8, 64);
    p.coefficients.beta = Expression::constant(0.0);
    const Trajectory tr =
        integrate_trajectory(NonlinearModel::full(p), constant_state(p.grid, {1, 1, 1}), 30, 64);
    CHECK(sup_norm(tr.samples.back()) < 1e-4);
}

TEST_CASE("endemic constants approach (3, 0.4, 0.6)") {
    const Problem p = endemic_problem(8, 128);
    const Trajectory tr =
        integrate_trajectory(NonlinearModel::full(p), constant_state(p.grid, {1, 0.5, 0.1}), 40, 128);
    const StateField target = constant_state(p.grid, {3.0, 0.4, 0.6});
    CHECK(sup_distance(tr.samples.back(), target) < 1e-4);
}

TEST_CASE("V_u + V_i follows the logistic step exactly") {
    Problem p = endemic_problem(12, 64);
    p.coefficients.beta = parse_expression("2 + sin(2*pi*t)*cos(x)");
    p.coefficients.sigma2 = parse_expression("1 + 0.5*cos(2*pi*t)");
    p.vector_bc = BoundarySpec::robin(constant(0.3));
    Rng rng(3);
    StateField u = random_state(rng, p.grid, 3, 0.1, 2.0);
    StateField w = make_state(p.grid, 1);
    for (std::size_t i = 0; i < p.grid.node_count(); ++i) {
        w.components[0][i] = u.components[1][i] + u.components[2][i];
    }
    const Trajectory full = integrate_trajectory(NonlinearModel::full(p), u, 5, 4);
    const Trajectory logi = integrate_trajectory(NonlinearModel::logistic(p), w, 5, 4);
    double worst = 0.0;
    for (std::size_t s = 0; s < full.samples.size(); ++s) {
        for (std::size_t i = 0; i < p.grid.node_count(); ++i) {
            const double sum = full.samples[s].components[1][i] + full.samples[s].components[2][i];
            worst = std::max(worst, std::abs(sum - logi.samples[s].components[0][i]));
        }
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("truncated system at eps = 0 reproduces the full model on the V orbit") {
    const Problem p = endemic_problem(8, 64);
    const PeriodicOrbit v = constant_orbit(p.grid, constant_state(p.grid, {1.0}));
    const NonlinearModel trunc = NonlinearModel::truncated(p, v, v, 0.0);
    const NonlinearModel full = NonlinearModel::full(p);
    StateField a = constant_state(p.grid, {2.0, 0.7, 0.3});
    StateField b = constant_state(p.grid, {2.0, 0.3});
    for (std::size_t n = 0; n < 200; ++n) {
        full.step(a, n);
        trunc.step(b, n);
    }
    CHECK(std::abs(a.components[0][4] - b.components[0][4]) < 1e-12);
    CHECK(std::abs(a.components[2][4] - b.components[1][4]) < 1e-12);
}

TEST_CASE("positivity for the full, truncated and auxiliary right-hand sides") {
    Rng rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        Problem p = endemic_problem(10, 32);
        p.coefficients.sigma1 = Expression::constant(rng.uniform(0.1, 8));
        p.coefficients.beta = Expression::constant(rng.uniform(0, 4));
        p.coefficients.mu2 = Expression::constant(rng.uniform(0.1, 3));
        if (trial % 2 == 1) {
            p.host_bc = BoundarySpec::dirichlet();
            p.vector_bc = BoundarySpec::dirichlet();
        }
        StateField u = random_state(rng, p.grid, 3, 0.0, 3.0);
        if (trial % 2 == 1) {
            for (std::size_t c = 0; c < 3; ++c) zero_dirichlet(u, c);
        }
        const Trajectory tr = integrate_trajectory(NonlinearModel::full(p), u, 3, 4);
        for (const auto& s : tr.samples) CHECK(min_entry(s) >= -1e-12);

        const PeriodicOrbit v = constant_orbit(p.grid, constant_state(p.grid, {rng.uniform(0.5, 2)}));
        for (double eps : {0.1, -0.1}) {
            StateField z = random_state(rng, p.grid, 2, 0.0, 3.0);
            if (trial % 2 == 1) {
                zero_dirichlet(z, 0);
                zero_dirichlet(z, 1);
            }
            const Trajectory tt =
                integrate_trajectory(NonlinearModel::auxiliary(p, v, v, eps), z, 3, 4);
            for (const auto& s : tt.samples) CHECK(min_entry(s) >= -1e-12);
        }
    }
}

TEST_CASE("trajectory argument checks and blow-up cap") {
    Problem p = constants_problem(1.0, 6, 16);
    p.coefficients.mu2 = Expression::constant(0.0);
    const NonlinearModel logi = NonlinearModel::logistic(p);
    const StateField u = constant_state(p.grid, {1.0});
    CHECK_THROWS_AS(integrate_trajectory(logi, u, 20, 1, 10.0), BlowupError);
    CHECK_THROWS_AS(integrate_trajectory(logi, u, 2, 3), InputError);
    CHECK_THROWS_AS(integrate_trajectory(logi, u, 0, 1), InputError);
    CHECK_THROWS_AS(integrate_over_period(logi, constant_state(p.grid, {1.0, 1.0})), InputError);
    CHECK(NonlinearModel::full(p).component_count() == 3);
    CHECK(logi.component_count() == 1);
}

TEST_CASE("host-forced step balances a constant source") {
    const Problem p = endemic_problem(6, 32);
    const PeriodicOrbit v = constant_orbit(p.grid, constant_state(p.grid, {1.0}));
    const NonlinearModel m = NonlinearModel::host_forced(p, v, v, 0.05);
    const StateField h = integrate_over_period(m, constant_state(p.grid, {5.25}));
    for (double x : h.components[0]) CHECK(x == doctest::Approx(5.25).epsilon(1e-13));
}
