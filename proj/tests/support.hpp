#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "vhs/coefficients.hpp"
#include "vhs/grid.hpp"
#include "vhs/orbit.hpp"

namespace vhs::testing {

// 2x2 Perron root of [[a, b], [c, d]] (b, c >= 0); the principal eigenvalue is its negative.
inline double perron_root(double a, double b, double c, double d) {
    return 0.5 * (a + d) + std::sqrt(0.25 * (a - d) * (a - d) + b * c);
}

// rho=1, sigma2=1, mu1=1, mu2=1, beta=2 so V = 1; sigma1*H_u = s.
inline Problem constants_problem(double s, std::size_t nx = 16, std::size_t m = 256) {
    return Problem{build_grid(0.0, 1.0, nx, 1.0, m),
                   CoefficientSet::constants(1.0, s, 1.0, 2.0, 1.0, 1.0), BoundarySpec::neumann(),
                   BoundarySpec::neumann()};
}

inline Problem endemic_problem(std::size_t nx = 16, std::size_t m = 256) {
    return constants_problem(5.0, nx, m);
}
inline Problem disease_free_problem(std::size_t nx = 16, std::size_t m = 256) {
    return constants_problem(1.0, nx, m);
}
inline Problem extinction_problem(std::size_t nx = 16, std::size_t m = 256) {
    Problem p = constants_problem(5.0, nx, m);
    p.coefficients.beta = Expression::constant(1.0);
    p.coefficients.mu1 = Expression::constant(2.0);
    return p;
}

inline StateField constant_state(const Grid& g, std::initializer_list<double> values) {
    StateField s = make_state(g, values.size(), 0.0);
    std::size_t c = 0;
    for (double v : values) s.components[c++].assign(g.node_count(), v);
    return s;
}

inline void zero_dirichlet(StateField& s, std::size_t comp) {
    s.components[comp].front() = 0.0;
    s.components[comp].back() = 0.0;
}

struct Rng {
    std::mt19937_64 engine;
    explicit Rng(std::uint64_t seed) : engine(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
    std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine); }
};

}  // namespace vhs::testing
