#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "vhs/coefficients.hpp"
#include "vhs/eigen.hpp"
#include "vhs/orbit.hpp"

namespace vhs {

struct OrbitOptions {
    double tol = 1e-9;  // sup-norm fixed-point residual on period boundaries
    std::size_t max_periods = 500;
    double band = 1e-3;  // sign band for eigenvalue decisions
    EigenOptions eigen;
};

struct LogisticOrbitResult {
    PeriodicOrbit orbit;  // the zero orbit when zeta >= -band
    double zeta = 0.0;
    EigenResult zeta_result;  // phi = zeta_result.eigenfunction
    std::size_t converged_in = 0;
    double fixed_point_residual = 0.0;
    double seed_gap = 0.0;  // sup distance between the upper- and lower-seeded limits
};

LogisticOrbitResult solve_logistic_orbit(const Problem& problem, const OrbitOptions& opts = {});

/// Periodic solution of L1 H + rho H = sigma1 H_u (V + eps phi), iterated
/// from zero through the affine period map.
PeriodicOrbit solve_hbar(const Problem& problem, const PeriodicOrbit& v, const PeriodicOrbit& phi,
                         double eps, const OrbitOptions& opts = {});

struct EpsilonChoice {
    double eps = 0.0;
    std::size_t halvings = 0;
    EigenResult lambda;  // lambda(V; eps)
};

/// Largest eps = 0.1 min(V/phi) / 2^k with V +- eps phi > 0,
/// (eps phi)^2 mu2 - eps phi |beta + zeta| < beta V and lambda(V; eps) < -band.
EpsilonChoice admissible_epsilon(const Problem& problem, const PeriodicOrbit& v,
                                 const PeriodicOrbit& phi, double zeta, const OrbitOptions& opts = {});

struct EndemicPairResult {
    PeriodicOrbit h_orbit;
    PeriodicOrbit vi_orbit;
    double eps_used = 0.0;
    double eps_ladder = 0.0;  // admissible eps found by the ladder
    double lambda_V = 0.0;
    double lambda_V_eps = 0.0;
    double delta = 0.0;  // lower seed scale
    double upper_residual = 0.0;
    double lower_residual = 0.0;
    double gap = 0.0;
    std::size_t iterations = 0;
    /// Worst increase of the upper sequence / decrease of the lower one
    /// between consecutive period boundaries.
    double monotonicity_violation = 0.0;
    /// Worst excess of the lower iterate over the upper one.
    double order_violation = 0.0;
    /// min over levels and interior nodes of V + eps phi - V_i.
    double truncation_margin = 0.0;
    std::vector<double> upper_history;  // |U_{n+1} - U_n| per period
    std::vector<double> lower_history;
};

/// Monotone upper/lower iteration of the truncated reduced system. With
/// `eps` unset the ladder's value is used; eps = 0 gives the reduced system itself.
EndemicPairResult solve_endemic_pair(const Problem& problem, const LogisticOrbitResult& logistic,
                                     std::optional<double> eps = std::nullopt,
                                     const OrbitOptions& opts = {});

}  // namespace vhs
