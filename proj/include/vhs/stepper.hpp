#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "vhs/coefficients.hpp"
#include "vhs/grid.hpp"
#include "vhs/orbit.hpp"

namespace vhs {

/// u_k' = div(d_k grad u_k) + sum_j h_kj(x,t) u_j - decay_k(x,t) u_k with
/// boundary operator B_k on component k. Empty coupling entries are zero;
/// `decay` may be empty or hold empty entries.
struct LinearPeriodicSystem {
    std::vector<SpaceTimeField> diffusion;
    std::vector<BoundarySpec> boundary;
    std::vector<std::vector<SpaceTimeField>> coupling;
    std::vector<SpaceTimeField> decay;

    std::size_t size() const noexcept { return diffusion.size(); }
};

/// Most negative off-diagonal coupling value on the nodes x time levels of
/// one period (0 when the system is cooperative).
double cooperativity_defect(const LinearPeriodicSystem& system, const Grid& grid);

/// The discrete period map of a linear system, with every step's operators
/// precomputed. One step from t_n to t_{n+1}:
///
///     (I - dt A_k(t_{n+1}) + dt (h_kk^- + decay_k)(t_{n+1})) u_k^{n+1}
///         = u_k^n + dt (h_kk^+ u_k^n + sum_{j != k} h_kj u_j^n)(t_n)
///
/// For cooperative couplings every step maps nonnegative data to
/// nonnegative data and preserves order.
class PeriodMap {
public:
    PeriodMap(const LinearPeriodicSystem& system, const Grid& grid);

    const Grid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return bounds_.size(); }

    void step(StateField& u, std::size_t n) const;
    StateField apply(StateField u) const;
    /// One period from u0 with every level stored.
    PeriodicOrbit sweep(StateField u0) const;

private:
    struct StepData {
        std::vector<TridiagonalFactor> lhs;
        std::vector<double> explicit_terms;  // [k][j][node], scaled by dt
    };

    Grid grid_;
    std::vector<std::pair<std::size_t, std::size_t>> bounds_;  // unknown node range per component
    std::vector<StepData> steps_;
};

/// One step of a linear system from u.time (which must sit on the step lattice).
StateField step(const LinearPeriodicSystem& system, const Grid& grid, const StateField& u);
/// u(T) for the linear system started from u0 at t = 0.
StateField integrate_over_period(const LinearPeriodicSystem& system, const Grid& grid,
                                 const StateField& u0);

/// Coefficients and diffusion operators sampled at the levels 0..m of one period.
struct ModelTables;

/// Right-hand sides of the nonlinear model and of its reduced and auxiliary
/// forms, each advanced by first-order IMEX steps (implicit diffusion and
/// linear losses, explicit gains).
class NonlinearModel {
public:
    enum class Kind {
        full,         // (H_i, V_u, V_i)
        logistic,     // V = V_u + V_i alone
        truncated,    // (U, Z) with sigma2 (V + eps phi - Z)^+ U and loss mu1 + mu2 (V - eps phi)
        host_forced,  // H alone, forced by sigma1 H_u (V + eps phi)
    };

    static NonlinearModel full(const Problem& problem);
    static NonlinearModel logistic(const Problem& problem);
    /// eps < 0 gives the tau-shifted comparison system; clip = false drops
    /// the positive part.
    static NonlinearModel truncated(const Problem& problem, const PeriodicOrbit& v,
                                    const PeriodicOrbit& phi, double eps, bool clip = true);
    /// The comparison system used to bound the host/infected-vector pair from
    /// above; identical right-hand side to truncated(..., eps, true).
    static NonlinearModel auxiliary(const Problem& problem, const PeriodicOrbit& v,
                                    const PeriodicOrbit& phi, double eps) {
        return truncated(problem, v, phi, eps, true);
    }
    static NonlinearModel host_forced(const Problem& problem, const PeriodicOrbit& v,
                                      const PeriodicOrbit& phi, double eps);

    Kind kind() const noexcept { return kind_; }
    std::size_t component_count() const noexcept;
    const Grid& grid() const noexcept;
    double eps() const noexcept { return eps_; }

    /// Advance from t_n to t_{n+1}; n is taken modulo steps_per_period.
    void step(StateField& u, std::size_t n) const;

private:
    NonlinearModel(std::shared_ptr<const ModelTables> tables, Kind kind);

    std::shared_ptr<const ModelTables> tables_;
    Kind kind_;
    double eps_ = 0.0;
    bool clip_ = true;
    std::vector<std::vector<double>> upper_;  // V + eps phi per level
    std::vector<std::vector<double>> lower_;  // V - eps phi per level
};

StateField integrate_over_period(const NonlinearModel& model, StateField u0);
/// One period from u0 with every level stored.
PeriodicOrbit integrate_orbit(const NonlinearModel& model, StateField u0);

/// n_periods periods from u0 (taken at t = 0), storing every `stride`-th
/// step; stride must divide steps_per_period. Throws BlowupError once any
/// entry exceeds `cap` or turns non-finite.
Trajectory integrate_trajectory(const NonlinearModel& model, const StateField& u0,
                                std::size_t n_periods, std::size_t stride = 1,
                                double cap = 1e12);

}  // namespace vhs
