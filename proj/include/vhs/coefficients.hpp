#pragma once

#include <string>
#include <vector>

#include "vhs/expression.hpp"
#include "vhs/grid.hpp"

namespace vhs {

/// The T-periodic coefficient fields of the vector-host model. Every field is
/// a closed-form expression in (x, t); smoothness is the caller's concern.
struct CoefficientSet {
    Expression rho;     // host recovery
    Expression sigma1;  // vector-to-host transmission
    Expression sigma2;  // host-to-vector transmission
    Expression beta;    // vector birth
    Expression mu1;     // vector linear death
    Expression mu2;     // vector crowding
    Expression d1;      // host diffusion
    Expression d2;      // vector diffusion
    Expression h_u;     // susceptible host density

    /// All fields set to the same constant; convenient starting point.
    static CoefficientSet constants(double rho, double sigma1, double sigma2, double beta,
                                    double mu1, double mu2, double d1 = 1.0, double d2 = 1.0,
                                    double h_u = 1.0);
};

/// Wrap an expression as a SpaceTimeField.
SpaceTimeField as_field(const Expression& e);

/// Everything a solver needs: mesh, coefficients and the two boundary groups
/// (group 1 acts on the host equation, group 2 on both vector equations).
struct Problem {
    Grid grid;
    CoefficientSet coefficients;
    BoundarySpec host_bc;
    BoundarySpec vector_bc;
};

struct Violation {
    std::string field;
    std::string condition;
    double x = 0.0;
    double t = 0.0;
    double value = 0.0;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool pass() const noexcept { return violations.empty(); }
};

/// Checks hypothesis (H) on the lattice of all grid nodes times the time
/// levels k*dt + offset, k = 0..2m: T-periodicity (relative 1e-10),
/// nonnegativity, strict positivity of rho, sigma2, mu1, d1, d2,
/// sigma1*H_u not identically zero and Robin b >= 0. One violation is
/// reported per (field, condition), at its worst lattice point.
ValidationReport validate_hypothesis(const Problem& problem, double time_offset = 0.0);

}  // namespace vhs
