#include "vhs/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "vhs/error.hpp"

namespace vhs {

StateField make_state(const Grid& grid, std::size_t components, double value) {
    StateField s;
    s.components.assign(components, std::vector<double>(grid.node_count(), value));
    return s;
}

double sup_norm(const StateField& u) {
    double m = 0.0;
    for (const auto& c : u.components) {
        for (double v : c) m = std::max(m, std::abs(v));
    }
    return m;
}

double sup_distance(const StateField& a, const StateField& b) {
    if (a.component_count() != b.component_count()) {
        throw InputError("sup_distance: component count mismatch");
    }
    double m = 0.0;
    for (std::size_t c = 0; c < a.component_count(); ++c) {
        const auto& x = a.components[c];
        const auto& y = b.components[c];
        if (x.size() != y.size()) throw InputError("sup_distance: node count mismatch");
        for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
    }
    return m;
}

double max_excess(const StateField& a, const StateField& b) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < a.component_count(); ++c) {
        for (std::size_t i = 0; i < a.components[c].size(); ++i) {
            m = std::max(m, a.components[c][i] - b.components[c][i]);
        }
    }
    return m;
}

double min_entry(const StateField& u) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : u.components) {
        for (double v : c) m = std::min(m, v);
    }
    return m;
}

double PeriodicOrbit::value(std::size_t component, std::size_t node, double t) const {
    const std::size_t m = steps();
    const double dt = period / static_cast<double>(m);
    double tau = std::fmod(t, period);
    if (tau < 0.0) tau += period;
    const double s = tau / dt;
    const double nearest = std::round(s);
    if (std::abs(s - nearest) < 1e-9) {
        return levels[static_cast<std::size_t>(nearest) % (m + 1)].components[component][node];
    }
    const auto k = std::min(static_cast<std::size_t>(std::floor(s)), m - 1);
    const double w = s - static_cast<double>(k);
    return (1.0 - w) * levels[k].components[component][node] +
           w * levels[k + 1].components[component][node];
}

double PeriodicOrbit::sup() const {
    double m = 0.0;
    for (const auto& l : levels) m = std::max(m, sup_norm(l));
    return m;
}

double PeriodicOrbit::min_over(std::size_t component, std::size_t first, std::size_t end) const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& l : levels) {
        const auto& c = l.components[component];
        for (std::size_t i = first; i < end; ++i) m = std::min(m, c[i]);
    }
    return m;
}

PeriodicOrbit constant_orbit(const Grid& grid, const StateField& u) {
    PeriodicOrbit o;
    o.period = grid.period;
    o.levels.reserve(grid.steps_per_period + 1);
    for (std::size_t k = 0; k <= grid.steps_per_period; ++k) {
        StateField s = u;
        s.time = grid.time(k);
        o.levels.push_back(std::move(s));
    }
    return o;
}

SpaceTimeField orbit_field(const PeriodicOrbit& orbit, std::size_t component) {
    auto shared = std::make_shared<const PeriodicOrbit>(orbit);
    return [shared, component](std::size_t node, double, double t) {
        return shared->value(component, node, t);
    };
}

}  // namespace vhs
