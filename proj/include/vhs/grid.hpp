#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace vhs {

/// A coefficient evaluated at grid node `node` (coordinate `x`) and time `t`.
/// Closed-form coefficients ignore the node index; sampled fields (periodic
/// orbits) use it for an exact lookup.
using SpaceTimeField = std::function<double(std::size_t node, double x, double t)>;

/// Uniform 1D mesh on [x_left, x_right] with nx interior nodes plus the two
/// endpoints, and a uniform time lattice of steps_per_period steps over one
/// period.
struct Grid {
    double x_left = 0.0;
    double x_right = 1.0;
    std::size_t nx = 0;
    double h = 0.0;
    double period = 1.0;
    std::size_t steps_per_period = 0;
    double dt = 0.0;

    std::size_t node_count() const noexcept { return nx + 2; }
    double node(std::size_t i) const noexcept { return x_left + h * static_cast<double>(i); }
    double time(std::size_t step) const noexcept { return dt * static_cast<double>(step); }

    /// Same mesh with `factor` times as many steps per period.
    Grid refined_in_time(std::size_t factor) const;
};

Grid build_grid(double x_left, double x_right, std::size_t nx, double period,
                std::size_t steps_per_period);

enum class BoundaryKind { dirichlet, robin };

/// Boundary operator a*d_nu + b: Dirichlet (a=0, b=1) or Robin (a=1, b>=0).
/// An empty Robin coefficient means b == 0 (Neumann).
struct BoundarySpec {
    BoundaryKind kind = BoundaryKind::robin;
    SpaceTimeField robin_b;

    static BoundarySpec dirichlet();
    static BoundarySpec neumann();
    static BoundarySpec robin(SpaceTimeField b);

    bool is_dirichlet() const noexcept { return kind == BoundaryKind::dirichlet; }
    /// First and one-past-last node carrying an unknown.
    std::size_t first_unknown() const noexcept { return is_dirichlet() ? 1 : 0; }
    std::size_t end_unknown(const Grid& g) const noexcept {
        return is_dirichlet() ? g.nx + 1 : g.nx + 2;
    }
    std::size_t unknown_count(const Grid& g) const noexcept {
        return end_unknown(g) - first_unknown();
    }
    /// Robin coefficient at an endpoint node (0 or nx+1).
    double b(const Grid& g, std::size_t node, double t) const;
};

/// Tridiagonal matrix; lower[0] and upper[n-1] are unused.
struct Tridiagonal {
    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;

    Tridiagonal() = default;
    explicit Tridiagonal(std::size_t n) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}

    std::size_t size() const noexcept { return diag.size(); }
    void multiply(std::span<const double> x, std::span<double> y) const;
};

/// Thomas elimination, factored once and reused for many right-hand sides.
class TridiagonalFactor {
public:
    TridiagonalFactor() = default;
    explicit TridiagonalFactor(const Tridiagonal& a);

    std::size_t size() const noexcept { return inv_pivot_.size(); }
    /// Overwrites rhs with the solution.
    void solve(std::span<double> rhs) const;

private:
    std::vector<double> lower_;
    std::vector<double> upper_mod_;
    std::vector<double> inv_pivot_;
};

/// One-shot solve; throws SolveError on a vanishing pivot.
void solve_tridiagonal(const Tridiagonal& a, std::span<double> rhs);

/// Discrete div(d grad) on the unknowns of a boundary spec, assembled at t.
struct DiffusionMatrix {
    Tridiagonal matrix;
    std::size_t first_node = 0;
    double time = 0.0;

    /// Apply to a full nodal vector (length nx+2); nodes without an unknown
    /// are read as zero and written as zero.
    std::vector<double> apply(std::span<const double> nodal) const;
};

/// Flux-form second-order finite differences with face values d(x_{i+-1/2}, t).
/// Dirichlet rows drop the boundary unknowns; Robin rows use ghost-point
/// elimination of d_nu u + b u = 0.
DiffusionMatrix assemble_diffusion(const Grid& grid, const SpaceTimeField& d,
                                   const BoundarySpec& bc, double t);

}  // namespace vhs
