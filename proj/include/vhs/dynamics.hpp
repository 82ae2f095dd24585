#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "vhs/coefficients.hpp"
#include "vhs/orbit.hpp"
#include "vhs/periodic.hpp"

namespace vhs {

enum class Regime { extinction, disease_free, endemic, indeterminate };

std::string_view to_string(Regime r) noexcept;

/// EXTINCTION iff zeta >= band; DISEASE_FREE iff zeta <= -band and
/// lambda(V) >= band; ENDEMIC iff zeta <= -band and lambda(V) <= -band.
Regime regime_from(double zeta, std::optional<double> lambda_V, double band) noexcept;

struct RegimeReport {
    double zeta = 0.0;
    std::optional<double> lambda_V;  // absent unless zeta <= -band
    Regime regime = Regime::indeterminate;
    /// (H_i, V_u, V_i) over one period; empty for INDETERMINATE.
    PeriodicOrbit attractor;
    LogisticOrbitResult logistic;
    std::optional<EndemicPairResult> pair;  // ENDEMIC only

    std::string_view attractor_description() const noexcept;
};

/// With `attractor` false only the eigenvalues and the regime are computed.
RegimeReport classify_regime(const Problem& problem, const OrbitOptions& opts = {},
                             bool attractor = true);

enum class Verdict { pass, fail, indeterminate };

std::string_view to_string(Verdict v) noexcept;

struct ConvergenceReport {
    RegimeReport regime;
    /// distances[n-1] = sup over the stored samples of period n (times in
    /// [(n-1)T, nT]) of |state - attractor|.
    std::vector<double> distances;
    /// distances[n] / distances[n-1], while distances[n-1] > 1e-12.
    std::vector<double> ratios;
    double median_ratio = 0.0;
    double min_entry = 0.0;  // over the whole trajectory
    Verdict verdict = Verdict::fail;
    Trajectory trajectory;
};

struct RunOptions {
    std::size_t n_periods = 40;
    double target = 1e-3;
    std::size_t stride = 1;
    double blowup_cap = 1e12;
};

/// Initial data must be positive at interior nodes and vanish at Dirichlet endpoints.
void check_initial_data(const Problem& problem, const StateField& initial);

ConvergenceReport verify_trichotomy(const Problem& problem, const StateField& initial,
                                    const RunOptions& run = {}, const OrbitOptions& opts = {});

/// Sup distance per period between a trajectory and a one-period orbit.
std::vector<double> period_distances(const Trajectory& trajectory, const PeriodicOrbit& attractor);

struct SandwichReport {
    std::optional<std::size_t> entry_period;  // NOT_REACHED when empty
    std::vector<bool> inside;                 // per period n = 0..P-1, final sample in P-1
    bool band_positive = false;               // V - eps phi > 0 at interior nodes
};

/// Smallest N with V - eps phi <= V_u + V_i <= V + eps phi over every stored
/// sample of every period n >= N. Trajectory states are (H_i, V_u, V_i).
SandwichReport sandwich_check(const Problem& problem, const PeriodicOrbit& v,
                              const PeriodicOrbit& phi, double eps, const Trajectory& trajectory);

}  // namespace vhs
