#include "vhs/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "vhs/error.hpp"

namespace vhs {

CoefficientSet CoefficientSet::constants(double rho, double sigma1, double sigma2, double beta,
                                         double mu1, double mu2, double d1, double d2,
                                         double h_u) {
    return CoefficientSet{Expression::constant(rho),   Expression::constant(sigma1),
                          Expression::constant(sigma2), Expression::constant(beta),
                          Expression::constant(mu1),   Expression::constant(mu2),
                          Expression::constant(d1),    Expression::constant(d2),
                          Expression::constant(h_u)};
}

SpaceTimeField as_field(const Expression& e) {
    return [e](std::size_t, double x, double t) { return e(x, t); };
}

namespace {

constexpr double kPeriodicityTol = 1e-10;

class Checker {
public:
    Checker(const Grid& grid, double offset) : grid_(grid), offset_(offset) {}

    // Keeps the worst witness per (field, condition).
    void flag(const std::string& field, const std::string& condition, double x, double t,
              double value, double badness) {
        for (std::size_t i = 0; i < report_.violations.size(); ++i) {
            auto& v = report_.violations[i];
            if (v.field == field && v.condition == condition) {
                if (badness > badness_[i]) {
                    v = Violation{field, condition, x, t, value};
                    badness_[i] = badness;
                }
                return;
            }
        }
        report_.violations.push_back(Violation{field, condition, x, t, value});
        badness_.push_back(badness);
    }

    // Samples f on nodes [first, last] x levels 0..2m.
    void check_field(const std::string& name, const std::function<double(std::size_t, double)>& f,
                     std::size_t first, std::size_t last, bool strictly_positive,
                     bool* any_nonzero = nullptr) {
        const std::size_t m = grid_.steps_per_period;
        for (std::size_t i = first; i <= last; ++i) {
            const double x = grid_.node(i);
            for (std::size_t k = 0; k <= 2 * m; ++k) {
                const double t = offset_ + grid_.time(k);
                double v = 0.0;
                try {
                    v = f(i, t);
                } catch (const Error& e) {
                    flag(name, std::string("evaluation failed: ") + e.what(), x, t, NAN, 1.0);
                    continue;
                }
                if (any_nonzero != nullptr && v != 0.0) *any_nonzero = true;
                if (v < 0.0) flag(name, name + " must be nonnegative", x, t, v, -v);
                if (strictly_positive && !(v > 0.0)) {
                    flag(name, name + " must be positive", x, t, v, -v + 1.0);
                }
                if (k + m <= 2 * m) {
                    double w = 0.0;
                    try {
                        w = f(i, t + grid_.period);
                    } catch (const Error&) {
                        continue;
                    }
                    const double diff = std::abs(w - v);
                    if (diff > kPeriodicityTol * std::max(1.0, std::abs(v))) {
                        flag(name, name + " must be T-periodic in t", x, t, diff, diff);
                    }
                }
            }
        }
    }

    ValidationReport take() { return std::move(report_); }

private:
    const Grid& grid_;
    double offset_;
    ValidationReport report_;
    std::vector<double> badness_;
};

}  // namespace

ValidationReport validate_hypothesis(const Problem& problem, double time_offset) {
    const Grid& g = problem.grid;
    const CoefficientSet& c = problem.coefficients;
    Checker checker(g, time_offset);
    const std::size_t last = g.nx + 1;

    struct Entry {
        const char* name;
        const Expression* e;
        bool positive;
    };
    const Entry entries[] = {
        {"rho", &c.rho, true},     {"sigma1", &c.sigma1, false}, {"sigma2", &c.sigma2, true},
        {"beta", &c.beta, false},  {"mu1", &c.mu1, true},        {"mu2", &c.mu2, false},
        {"d1", &c.d1, true},       {"d2", &c.d2, true},          {"H_u", &c.h_u, false},
    };
    for (const auto& entry : entries) {
        if (entry.e->empty()) {
            checker.flag(entry.name, std::string(entry.name) + " is not defined", 0, 0, NAN, 1.0);
            continue;
        }
        const Expression& e = *entry.e;
        bool nonzero = false;
        checker.check_field(
            entry.name, [&](std::size_t i, double t) { return e(g.node(i), t); }, 0, last,
            entry.positive, &nonzero);
        if (!entry.positive && !nonzero) {
            checker.flag(entry.name, std::string(entry.name) + " must be nontrivial", g.x_left,
                         time_offset, 0.0, 1.0);
        }
    }

    if (!c.sigma1.empty() && !c.h_u.empty()) {
        bool nonzero = false;
        for (std::size_t i = 0; i <= last && !nonzero; ++i) {
            for (std::size_t k = 0; k <= 2 * g.steps_per_period && !nonzero; ++k) {
                try {
                    const double x = g.node(i);
                    const double t = time_offset + g.time(k);
                    nonzero = c.sigma1(x, t) * c.h_u(x, t) != 0.0;
                } catch (const Error&) {
                }
            }
        }
        if (!nonzero) {
            checker.flag("sigma1*H_u", "sigma1(x,t)*H_u(x,t) must not vanish identically in Q_T",
                         g.x_left, time_offset, 0.0, 1.0);
        }
    }

    auto check_bc = [&](const char* name, const BoundarySpec& bc) {
        if (bc.is_dirichlet() || !bc.robin_b) return;
        for (std::size_t node : {std::size_t{0}, last}) {
            checker.check_field(
                name, [&](std::size_t i, double t) { return bc.b(g, i, t); }, node, node, false);
        }
    };
    check_bc("b1", problem.host_bc);
    check_bc("b2", problem.vector_bc);

    return checker.take();
}

}  // namespace vhs
