#include "vhs/grid.hpp"

#include <cmath>
#include <string>

#include "vhs/error.hpp"

namespace vhs {

Grid build_grid(double x_left, double x_right, std::size_t nx, double period,
                std::size_t steps_per_period) {
    if (!std::isfinite(x_left) || !std::isfinite(x_right) || !(x_left < x_right)) {
        throw DomainError("grid: need finite x_left < x_right");
    }
    if (nx < 3) throw DomainError("grid: nx must be at least 3");
    if (!std::isfinite(period) || !(period > 0.0)) throw DomainError("grid: period must be positive");
    if (steps_per_period < 8) throw DomainError("grid: steps_per_period must be at least 8");

    Grid g;
    g.x_left = x_left;
    g.x_right = x_right;
    g.nx = nx;
    g.h = (x_right - x_left) / static_cast<double>(nx + 1);
    g.period = period;
    g.steps_per_period = steps_per_period;
    g.dt = period / static_cast<double>(steps_per_period);
    return g;
}

Grid Grid::refined_in_time(std::size_t factor) const {
    return build_grid(x_left, x_right, nx, period, steps_per_period * factor);
}

BoundarySpec BoundarySpec::dirichlet() { return BoundarySpec{BoundaryKind::dirichlet, {}}; }

BoundarySpec BoundarySpec::neumann() { return BoundarySpec{BoundaryKind::robin, {}}; }

BoundarySpec BoundarySpec::robin(SpaceTimeField b) {
    return BoundarySpec{BoundaryKind::robin, std::move(b)};
}

double BoundarySpec::b(const Grid& g, std::size_t node, double t) const {
    if (is_dirichlet()) return 1.0;
    if (!robin_b) return 0.0;
    return robin_b(node, g.node(node), t);
}

void Tridiagonal::multiply(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        double s = diag[i] * x[i];
        if (i > 0) s += lower[i] * x[i - 1];
        if (i + 1 < n) s += upper[i] * x[i + 1];
        y[i] = s;
    }
}

TridiagonalFactor::TridiagonalFactor(const Tridiagonal& a)
    : lower_(a.lower), upper_mod_(a.size(), 0.0), inv_pivot_(a.size(), 0.0) {
    const std::size_t n = a.size();
    double prev_upper = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pivot = a.diag[i] - (i > 0 ? a.lower[i] * prev_upper : 0.0);
        if (pivot == 0.0 || !std::isfinite(pivot)) {
            throw SolveError("tridiagonal solve: zero pivot at row " + std::to_string(i));
        }
        inv_pivot_[i] = 1.0 / pivot;
        prev_upper = (i + 1 < n) ? a.upper[i] * inv_pivot_[i] : 0.0;
        upper_mod_[i] = prev_upper;
    }
}

void TridiagonalFactor::solve(std::span<double> rhs) const {
    const std::size_t n = size();
    if (n == 0) return;
    rhs[0] *= inv_pivot_[0];
    for (std::size_t i = 1; i < n; ++i) {
        rhs[i] = (rhs[i] - lower_[i] * rhs[i - 1]) * inv_pivot_[i];
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        rhs[i] -= upper_mod_[i] * rhs[i + 1];
    }
}

void solve_tridiagonal(const Tridiagonal& a, std::span<double> rhs) {
    TridiagonalFactor(a).solve(rhs);
}

std::vector<double> DiffusionMatrix::apply(std::span<const double> nodal) const {
    std::vector<double> out(nodal.size(), 0.0);
    matrix.multiply(nodal.subspan(first_node, matrix.size()),
                    std::span<double>(out).subspan(first_node, matrix.size()));
    return out;
}

DiffusionMatrix assemble_diffusion(const Grid& grid, const SpaceTimeField& d,
                                   const BoundarySpec& bc, double t) {
    const std::size_t last = grid.nx + 1;
    const double inv_h2 = 1.0 / (grid.h * grid.h);

    // faces[i] sits between nodes i and i+1
    std::vector<double> faces(grid.nx + 1);
    for (std::size_t i = 0; i <= grid.nx; ++i) {
        const double xf = grid.node(i) + 0.5 * grid.h;
        const double v = d(i, xf, t);
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw CoefficientError("diffusion coefficient must be positive (x=" +
                                   std::to_string(xf) + ", t=" + std::to_string(t) + ")");
        }
        faces[i] = v;
    }

    DiffusionMatrix out;
    out.time = t;
    out.first_node = bc.first_unknown();
    out.matrix = Tridiagonal(bc.unknown_count(grid));
    Tridiagonal& a = out.matrix;

    for (std::size_t node = 1; node <= grid.nx; ++node) {
        const std::size_t row = node - out.first_node;
        a.diag[row] = -(faces[node - 1] + faces[node]) * inv_h2;
        a.lower[row] = faces[node - 1] * inv_h2;
        a.upper[row] = faces[node] * inv_h2;
    }
    if (bc.is_dirichlet()) {
        a.lower[0] = 0.0;
        a.upper[a.size() - 1] = 0.0;
        return out;
    }

    // Ghost point u_{-1} = u_1 - 2h b u_0 at the left end, mirrored at the right.
    auto endpoint = [&](std::size_t node, std::size_t row, double face) {
        const double dn = d(node, grid.node(node), t);
        if (!(dn > 0.0) || !std::isfinite(dn)) {
            throw CoefficientError("diffusion coefficient must be positive at the boundary");
        }
        const double b = bc.b(grid, node, t);
        a.diag[row] = -2.0 * face * inv_h2 - 2.0 * dn * b / grid.h;
        return 2.0 * face * inv_h2;
    };
    a.upper[0] = endpoint(0, 0, faces[0]);
    a.lower[0] = 0.0;
    a.lower[last] = endpoint(last, last, faces[grid.nx]);
    a.upper[last] = 0.0;
    return out;
}

}  // namespace vhs
