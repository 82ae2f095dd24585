#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "support.hpp"
#include "vhs/error.hpp"
#include "vhs/grid.hpp"

using namespace vhs;

namespace {

SpaceTimeField constant(double v) {
    return [v](std::size_t, double, double) { return v; };
}

// Smallest eigenvalue of -A by inverse power iteration on the tridiagonal system.
double smallest_eigenvalue(const Tridiagonal& a) {
    Tridiagonal neg = a;
    for (std::size_t i = 0; i < neg.size(); ++i) {
        neg.lower[i] = -neg.lower[i];
        neg.diag[i] = -neg.diag[i];
        neg.upper[i] = -neg.upper[i];
    }
    const TridiagonalFactor f(neg);
    std::vector<double> u(neg.size(), 1.0), w(neg.size());
    double mu = 0.0;
    for (int it = 0; it < 200; ++it) {
        w = u;
        f.solve(w);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            num += u[i] * u[i];
            den += u[i] * w[i];
        }
        mu = num / den;
        double norm = 0.0;
        for (double v : w) norm = std::max(norm, std::abs(v));
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = w[i] / norm;
    }
    return mu;
}

double sine_error(std::size_t nx) {
    const Grid g = build_grid(0.0, std::numbers::pi, nx, 1.0, 8);
    const DiffusionMatrix a = assemble_diffusion(g, constant(1.0), BoundarySpec::dirichlet(), 0.0);
    std::vector<double> u(g.node_count());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::sin(g.node(i));
    const std::vector<double> lu = a.apply(u);
    double err = 0.0;
    for (std::size_t i = 1; i <= nx; ++i) err = std::max(err, std::abs(lu[i] + std::sin(g.node(i))));
    return err;
}

// Solves (I - A) U = 2 cos(x - 1/2) with Robin b = tan(1/2) on (0, 1); exact u = cos(x - 1/2).
double robin_solution_error(std::size_t nx) {
    const Grid g = build_grid(0.0, 1.0, nx, 1.0, 8);
    const BoundarySpec bc = BoundarySpec::robin(constant(std::tan(0.5)));
    const DiffusionMatrix a = assemble_diffusion(g, constant(1.0), bc, 0.0);
    Tridiagonal m = a.matrix;
    for (std::size_t i = 0; i < m.size(); ++i) {
        m.lower[i] = -m.lower[i];
        m.upper[i] = -m.upper[i];
        m.diag[i] = 1.0 - m.diag[i];
    }
    std::vector<double> rhs(g.node_count());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = 2.0 * std::cos(g.node(i) - 0.5);
    solve_tridiagonal(m, rhs);
    double err = 0.0;
    for (std::size_t i = 0; i < rhs.size(); ++i) {
        err = std::max(err, std::abs(rhs[i] - std::cos(g.node(i) - 0.5)));
    }
    return err;
}

}  // namespace

TEST_CASE("build_grid arithmetic") {
    const Grid a = build_grid(0.0, 1.0, 63, 1.0, 64);
    CHECK(a.h == doctest::Approx(1.0 / 64).epsilon(1e-15));
    CHECK(a.dt == doctest::Approx(1.0 / 64).epsilon(1e-15));
    CHECK(a.node_count() == 65);
    CHECK(a.node(64) == doctest::Approx(1.0));

    const Grid b = build_grid(0.0, std::numbers::pi, 31, 1.0, 32);
    CHECK(b.h == doctest::Approx(std::numbers::pi / 32).epsilon(1e-15));

    for (std::size_t i = 1; i < b.node_count(); ++i) CHECK(b.node(i) > b.node(i - 1));
}

TEST_CASE("build_grid rejects bad input") {
    CHECK_THROWS_AS(build_grid(1.0, 0.0, 63, 1.0, 64), DomainError);
    CHECK_THROWS_AS(build_grid(0.0, 1.0, 2, 1.0, 64), DomainError);
    CHECK_THROWS_AS(build_grid(0.0, 1.0, 8, 0.0, 64), DomainError);
    CHECK_THROWS_AS(build_grid(0.0, 1.0, 8, 1.0, 7), DomainError);
    CHECK_THROWS_AS(build_grid(0.0, 0.0, 8, 1.0, 8), DomainError);
}

TEST_CASE("Dirichlet stencil on sin(x) is second order") {
    const Grid g = build_grid(0.0, std::numbers::pi, 15, 1.0, 8);
    const DiffusionMatrix a = assemble_diffusion(g, constant(1.0), BoundarySpec::dirichlet(), 0.0);
    CHECK(a.matrix.size() == 15);
    const double inv_h2 = 1.0 / (g.h * g.h);
    CHECK(a.matrix.diag[3] == doctest::Approx(-2.0 * inv_h2));
    CHECK(a.matrix.lower[3] == doctest::Approx(inv_h2));
    CHECK(a.matrix.upper[3] == doctest::Approx(inv_h2));

    // constant 1 with zero boundary: first row sees only its interior neighbour
    std::vector<double> ones(g.node_count(), 1.0);
    ones.front() = ones.back() = 0.0;
    const auto r = a.apply(ones);
    CHECK(r[1] == doctest::Approx(-inv_h2));
    CHECK(r[5] == doctest::Approx(0.0).epsilon(1e-9));

    const double e32 = sine_error(31), e64 = sine_error(63);
    CHECK(e32 < 2e-3);
    CHECK(e32 / e64 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("Neumann kernel contains constants") {
    const Grid g = build_grid(0.0, 1.0, 20, 1.0, 8);
    const auto d = [](std::size_t, double x, double t) { return 1.0 + 0.5 * std::sin(3 * x + t); };
    for (double t : {0.0, 0.3, 0.9}) {
        const DiffusionMatrix a = assemble_diffusion(g, d, BoundarySpec::neumann(), t);
        CHECK(a.matrix.size() == g.node_count());
        const auto r = a.apply(std::vector<double>(g.node_count(), 2.5));
        for (double v : r) CHECK(std::abs(v) < 1e-9);
        for (std::size_t i = 0; i < a.matrix.size(); ++i) {
            double sum = a.matrix.diag[i];
            if (i > 0) sum += a.matrix.lower[i];
            if (i + 1 < a.matrix.size()) sum += a.matrix.upper[i];
            CHECK(std::abs(sum) < 1e-9);
        }
    }
}

TEST_CASE("Robin closure keeps the M-matrix sign pattern") {
    const Grid g = build_grid(0.0, 1.0, 12, 1.0, 16);
    const BoundarySpec bc = BoundarySpec::robin(constant(1.0));
    for (std::size_t k = 0; k <= g.steps_per_period; ++k) {
        const DiffusionMatrix a = assemble_diffusion(g, constant(1.0), bc, g.time(k));
        const Tridiagonal& m = a.matrix;
        for (std::size_t i = 0; i < m.size(); ++i) {
            CHECK(m.diag[i] < 0.0);
            if (i > 0) CHECK(m.lower[i] >= 0.0);
            if (i + 1 < m.size()) CHECK(m.upper[i] >= 0.0);
        }
        // strictly dissipative at the ends
        CHECK(m.diag[0] + m.upper[0] < 0.0);
    }
}

TEST_CASE("Robin closure is second order globally") {
    const double e1 = robin_solution_error(31), e2 = robin_solution_error(63);
    CHECK(e1 < 1e-3);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("symmetric data gives a mirror-symmetric operator") {
    const Grid g = build_grid(-1.0, 1.0, 17, 1.0, 8);
    const auto d = [](std::size_t, double x, double) { return 2.0 + x * x; };
    const DiffusionMatrix a = assemble_diffusion(g, d, BoundarySpec::robin(constant(0.7)), 0.0);
    const Tridiagonal& m = a.matrix;
    const std::size_t n = m.size();
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(m.diag[i] == doctest::Approx(m.diag[n - 1 - i]).epsilon(1e-12));
        if (i + 1 < n) CHECK(m.upper[i] == doctest::Approx(m.lower[n - 1 - i]).epsilon(1e-12));
    }
}

TEST_CASE("smallest Dirichlet eigenvalue converges to 1 at second order") {
    double prev = 0.0;
    for (std::size_t nx : {15, 31, 63}) {
        const Grid g = build_grid(0.0, std::numbers::pi, nx, 1.0, 8);
        const auto a = assemble_diffusion(g, constant(1.0), BoundarySpec::dirichlet(), 0.0);
        const double err = std::abs(smallest_eigenvalue(a.matrix) - 1.0);
        if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.1));
        prev = err;
    }
    CHECK(prev < 2.5e-4);
}

TEST_CASE("nonpositive diffusion is rejected") {
    const Grid g = build_grid(0.0, 1.0, 8, 1.0, 8);
    CHECK_THROWS_AS(assemble_diffusion(g, constant(0.0), BoundarySpec::dirichlet(), 0.0),
                    CoefficientError);
    const auto sign_change = [](std::size_t, double x, double) { return x - 0.5; };
    CHECK_THROWS_AS(assemble_diffusion(g, sign_change, BoundarySpec::neumann(), 0.0), CoefficientError);
}

TEST_CASE("tridiagonal factor matches multiply") {
    vhs::testing::Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 3 + rng.index(40);
        Tridiagonal a(n);
        for (std::size_t i = 0; i < n; ++i) {
            a.lower[i] = i > 0 ? rng.uniform(-1, 1) : 0.0;
            a.upper[i] = i + 1 < n ? rng.uniform(-1, 1) : 0.0;
            a.diag[i] = 3.0 + rng.uniform(0, 1);
        }
        std::vector<double> x(n), b(n);
        for (double& v : x) v = rng.uniform(-5, 5);
        a.multiply(x, b);
        TridiagonalFactor(a).solve(b);
        for (std::size_t i = 0; i < n; ++i) CHECK(b[i] == doctest::Approx(x[i]).epsilon(1e-12));
    }
    Tridiagonal singular(3);
    CHECK_THROWS_AS(TridiagonalFactor{singular}, SolveError);
}

TEST_CASE("refined_in_time keeps the mesh") {
    const Grid g = build_grid(0.0, 2.0, 9, 3.0, 16);
    const Grid f = g.refined_in_time(4);
    CHECK(f.steps_per_period == 64);
    CHECK(f.h == g.h);
    CHECK(f.dt == doctest::Approx(g.dt / 4));
}
