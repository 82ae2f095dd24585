#pragma once

#include <cstddef>
#include <vector>

#include "vhs/coefficients.hpp"
#include "vhs/orbit.hpp"
#include "vhs/stepper.hpp"

namespace vhs {

struct EigenOptions {
    double tol = 1e-10;
    std::size_t max_iters = 10000;
    /// Number of time resolutions m, 2m, 4m, ... combined by Richardson
    /// extrapolation of the first-order dt error; 1 disables extrapolation.
    std::size_t extrapolation_levels = 3;
};

struct EigenResult {
    double value = 0.0;       // principal eigenvalue, extrapolated in dt
    double multiplier = 1.0;  // exp(-value * T)
    /// Spectral radius of the period map at the grid's own resolution and
    /// its eigenvalue; the eigenfunction belongs to this map.
    double discrete_multiplier = 1.0;
    double discrete_value = 0.0;
    PeriodicOrbit eigenfunction;       // sup-normalised over all stored levels
    double residual = 0.0;             // |P phi0 - r phi0| / |phi0|
    double periodicity_residual = 0.0; // |phi(T) - phi(0)| / sup phi
    std::size_t iterations = 0;        // power iterations at the base resolution
    bool reducible = false;            // eigenfunction vanishes at some interior node
    std::vector<double> history;       // r estimate per base-resolution iteration
};

EigenResult principal_eigenvalue(const LinearPeriodicSystem& system, const Grid& grid,
                                 const EigenOptions& opts = {});

/// zeta(mu1, beta): principal eigenvalue of L2 phi + (mu1 - beta) phi under B2.
EigenResult zeta(const Problem& problem, const EigenOptions& opts = {});

/// gamma(rho) of L1 eta + rho eta under B1; throws InternalError unless positive.
EigenResult gamma_rho(const Problem& problem, const EigenOptions& opts = {});

/// lambda(V) of the linearisation at (0, 0) of the reduced system.
EigenResult lambda_V(const Problem& problem, const PeriodicOrbit& v, const EigenOptions& opts = {});

/// lambda(V; eps): coupling sigma2 (V + eps phi), decay mu1 + mu2 (V - eps phi).
EigenResult lambda_V_eps(const Problem& problem, const PeriodicOrbit& v, const PeriodicOrbit& phi,
                         double eps, const EigenOptions& opts = {});

/// The linear systems behind the named eigenvalues.
LinearPeriodicSystem zeta_system(const Problem& problem);
LinearPeriodicSystem gamma_system(const Problem& problem);
LinearPeriodicSystem lambda_system(const Problem& problem, const PeriodicOrbit& v,
                                   const PeriodicOrbit& phi, double eps);

}  // namespace vhs
