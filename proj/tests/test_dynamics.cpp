#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "vhs/dynamics.hpp"
#include "vhs/error.hpp"
#include "vhs/stepper.hpp"

using namespace vhs;
using namespace vhs::testing;

namespace {

double attractor_value(const RegimeReport& r, std::size_t comp) {
    return r.attractor.levels[5].components[comp][3];
}

}  // namespace

TEST_CASE("regime table") {
    CHECK(regime_from(1.0, std::nullopt, 1e-3) == Regime::extinction);
    CHECK(regime_from(1e-3, std::nullopt, 1e-3) == Regime::extinction);
    CHECK(regime_from(5e-4, std::nullopt, 1e-3) == Regime::indeterminate);
    CHECK(regime_from(-1.0, std::nullopt, 1e-3) == Regime::indeterminate);
    CHECK(regime_from(-1.0, 0.38, 1e-3) == Regime::disease_free);
    CHECK(regime_from(-1.0, -0.79, 1e-3) == Regime::endemic);
    CHECK(regime_from(-1.0, 1e-4, 1e-3) == Regime::indeterminate);
    CHECK(to_string(Regime::disease_free) == "DISEASE_FREE");
    CHECK(to_string(Verdict::pass) == "PASS");
}

TEST_CASE("classify the three constants configurations") {
    const RegimeReport ext = classify_regime(extinction_problem(8, 64));
    CHECK(ext.regime == Regime::extinction);
    CHECK(ext.zeta == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_FALSE(ext.lambda_V.has_value());
    CHECK(ext.attractor.sup() == 0.0);
    CHECK(ext.attractor.component_count() == 3);

    const RegimeReport dfree = classify_regime(disease_free_problem(8, 64));
    CHECK(dfree.regime == Regime::disease_free);
    CHECK(*dfree.lambda_V == doctest::Approx((3 - std::sqrt(5.0)) / 2).epsilon(1e-6));
    CHECK(attractor_value(dfree, 0) == 0.0);
    CHECK(attractor_value(dfree, 1) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(attractor_value(dfree, 2) == 0.0);

    const RegimeReport end = classify_regime(endemic_problem(8, 64));
    CHECK(end.regime == Regime::endemic);
    CHECK(end.zeta == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(*end.lambda_V == doctest::Approx((3 - std::sqrt(21.0)) / 2).epsilon(1e-5));
    CHECK(std::abs(attractor_value(end, 0) - 3.0) < 1e-4);
    CHECK(std::abs(attractor_value(end, 1) - 0.4) < 1e-4);
    CHECK(std::abs(attractor_value(end, 2) - 0.6) < 1e-4);
    CHECK(end.attractor_description() == "(H_i, V - V_i, V_i)");
    CHECK(end.pair.has_value());
}

TEST_CASE("a wide band refuses to decide") {
    OrbitOptions o;
    o.band = 10.0;
    const RegimeReport r = classify_regime(endemic_problem(8, 64), o);
    CHECK(r.regime == Regime::indeterminate);
    CHECK(r.attractor.empty());
}

TEST_CASE("trichotomy runs converge to the predicted attractor") {
    SUBCASE("endemic") {
        const Problem p = endemic_problem(8, 64);
        RunOptions run;
        run.n_periods = 30;
        const ConvergenceReport r = verify_trichotomy(p, constant_state(p.grid, {1, 0.5, 0.1}), run);
        CHECK(r.verdict == Verdict::pass);
        CHECK(r.distances.back() <= 1e-3);
        CHECK(r.median_ratio < 1.0);
        CHECK(r.distances.size() == 30);
    }
    SUBCASE("extinction") {
        const Problem p = extinction_problem(8, 64);
        RunOptions run;
        run.n_periods = 30;
        const ConvergenceReport r = verify_trichotomy(p, constant_state(p.grid, {1, 1, 1}), run);
        CHECK(r.verdict == Verdict::pass);
        CHECK(sup_norm(r.trajectory.samples.back()) <= 1e-4);
        // total vector density never increases
        double prev = 2.0;
        for (std::size_t n = 1; n <= 30; ++n) {
            const StateField& s = r.trajectory.at_period(n);
            const double w = s.components[1][4] + s.components[2][4];
            CHECK(w <= prev);
            prev = w;
        }
    }
    SUBCASE("disease-free") {
        const Problem p = disease_free_problem(8, 64);
        const ConvergenceReport r = verify_trichotomy(p, constant_state(p.grid, {1, 0.5, 0.5}));
        CHECK(r.verdict == Verdict::pass);
        const StateField& last = r.trajectory.samples.back();
        for (std::size_t i = 0; i < p.grid.node_count(); ++i) {
            CHECK(last.components[0][i] <= 1e-3);
            CHECK(last.components[2][i] <= 1e-3);
            CHECK(std::abs(last.components[1][i] - 1.0) <= 1e-3);
        }
        CHECK(r.min_entry >= -1e-12);
    }
}

TEST_CASE("distances are nonnegative and period-aligned") {
    const Problem p = endemic_problem(8, 64);
    const RegimeReport reg = classify_regime(p);
    const Trajectory tr = integrate_trajectory(NonlinearModel::full(p),
                                               constant_state(p.grid, {3.0, 0.4, 0.6}), 3, 8);
    const auto e = period_distances(tr, reg.attractor);
    CHECK(e.size() == 3);
    for (double d : e) {
        CHECK(d >= 0.0);
        CHECK(d < 1e-4);
    }
}

TEST_CASE("sandwich band") {
    const Problem p = endemic_problem(8, 64);
    const RegimeReport reg = classify_regime(p);
    const PeriodicOrbit& v = reg.logistic.orbit;
    const PeriodicOrbit& phi = reg.logistic.zeta_result.eigenfunction;

    const Trajectory far = integrate_trajectory(NonlinearModel::full(p),
                                                constant_state(p.grid, {1, 0.2, 0.05}), 25, 8);
    const SandwichReport a = sandwich_check(p, v, phi, 0.05, far);
    REQUIRE(a.entry_period.has_value());
    CHECK(*a.entry_period > 0);
    CHECK(*a.entry_period <= 15);
    CHECK(a.band_positive);
    CHECK(a.inside.size() == 25);

    const Trajectory on = integrate_trajectory(NonlinearModel::full(p),
                                               constant_state(p.grid, {1, 0.7, 0.3}), 5, 8);
    const SandwichReport b = sandwich_check(p, v, phi, 0.05, on);
    REQUIRE(b.entry_period.has_value());
    CHECK(*b.entry_period == 0);

    const Problem q = extinction_problem(8, 64);
    const RegimeReport ext = classify_regime(q);
    const Trajectory tr = integrate_trajectory(NonlinearModel::full(q),
                                               constant_state(q.grid, {1, 1, 1}), 5, 8);
    const SandwichReport c =
        sandwich_check(q, ext.logistic.orbit, ext.logistic.zeta_result.eigenfunction, 0.05, tr);
    CHECK_FALSE(c.entry_period.has_value());
    CHECK_FALSE(c.band_positive);
}

TEST_CASE("auxiliary systems preserve order") {
    Rng rng(8);
    const Problem p = endemic_problem(10, 32);
    const PeriodicOrbit v = constant_orbit(p.grid, constant_state(p.grid, {1.0}));
    for (double eps : {0.05, -0.05}) {
        const NonlinearModel m = NonlinearModel::auxiliary(p, v, v, eps);
        for (int trial = 0; trial < 5; ++trial) {
            StateField lo = make_state(p.grid, 2), hi = make_state(p.grid, 2);
            for (std::size_t c = 0; c < 2; ++c) {
                for (std::size_t i = 0; i < p.grid.node_count(); ++i) {
                    lo.components[c][i] = rng.uniform(0, 2);
                    hi.components[c][i] = lo.components[c][i] + rng.uniform(0, 1);
                }
            }
            CHECK(max_excess(integrate_over_period(m, lo), integrate_over_period(m, hi)) <= 1e-12);
        }
    }
}

TEST_CASE("initial data checks") {
    Problem p = endemic_problem(8, 64);
    StateField u = constant_state(p.grid, {1, 1, 1});
    CHECK_NOTHROW(check_initial_data(p, u));
    u.components[1][3] = 0.0;
    CHECK_THROWS_AS(check_initial_data(p, u), InputError);
    CHECK_THROWS_AS(check_initial_data(p, constant_state(p.grid, {1, 1})), InputError);

    p.vector_bc = BoundarySpec::dirichlet();
    StateField d = constant_state(p.grid, {1, 1, 1});
    CHECK_THROWS_AS(check_initial_data(p, d), InputError);
    zero_dirichlet(d, 1);
    zero_dirichlet(d, 2);
    CHECK_NOTHROW(check_initial_data(p, d));
}
