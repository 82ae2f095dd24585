#pragma once

#include <cstddef>
#include <vector>

#include "vhs/grid.hpp"

namespace vhs {

/// Nodal values of one or more solution components at one time level. Every
/// component is stored on all nx+2 nodes; nodes fixed by a Dirichlet
/// condition hold zero.
struct StateField {
    std::vector<std::vector<double>> components;
    double time = 0.0;

    std::size_t component_count() const noexcept { return components.size(); }
    std::size_t node_count() const noexcept {
        return components.empty() ? 0 : components.front().size();
    }
};

StateField make_state(const Grid& grid, std::size_t components, double value = 0.0);

/// Sup norm over all components and nodes.
double sup_norm(const StateField& u);
/// Sup norm of the difference; shapes must match.
double sup_distance(const StateField& a, const StateField& b);
/// max over entries of (a - b); positive when a exceeds b somewhere.
double max_excess(const StateField& a, const StateField& b);
double min_entry(const StateField& u);

/// A time-periodic field sampled at the m+1 levels 0, dt, ..., T.
struct PeriodicOrbit {
    std::vector<StateField> levels;
    double period = 1.0;
    /// ||level(T) - level(0)||_inf as produced.
    double residual = 0.0;

    std::size_t component_count() const noexcept {
        return levels.empty() ? 0 : levels.front().component_count();
    }
    std::size_t steps() const noexcept { return levels.empty() ? 0 : levels.size() - 1; }
    bool empty() const noexcept { return levels.empty(); }

    /// Value at (component, node, t) for any t; periodic in t and linear
    /// between stored levels.
    double value(std::size_t component, std::size_t node, double t) const;

    /// Level k with wrap-around: k = steps() maps back to level 0.
    const StateField& level(std::size_t k) const { return levels[k % steps()]; }

    double sup() const;
    /// Minimum over levels and the nodes [first, end).
    double min_over(std::size_t component, std::size_t first, std::size_t end) const;
};

/// The constant-in-time orbit holding `u` at every level.
PeriodicOrbit constant_orbit(const Grid& grid, const StateField& u);

/// Component `component` of an orbit viewed as a coefficient field.
SpaceTimeField orbit_field(const PeriodicOrbit& orbit, std::size_t component);

/// Samples of a time-dependent model state. `samples[k]` is the state after
/// k * stride steps; every period boundary is included.
struct Trajectory {
    std::vector<StateField> samples;
    std::size_t stride = 1;
    std::size_t steps_per_period = 1;

    std::size_t samples_per_period() const noexcept { return steps_per_period / stride; }
    std::size_t periods() const noexcept {
        return samples.empty() ? 0 : (samples.size() - 1) / samples_per_period();
    }
    const StateField& at_period(std::size_t n) const { return samples[n * samples_per_period()]; }
};

}  // namespace vhs
