#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "degel/barriers.hpp"
#include "degel/grid.hpp"

namespace degel {

/// Certified interval for the first eigenvalue of the discrete problem:
/// lam_lo carries a converged positive witness, lam_hi a blow-up witness.
struct EigenBracket {
    double lam_lo = 0.0;
    double lam_hi = std::numeric_limits<double>::infinity();
    struct Entry {
        double lam = 0.0;
        double m_lam = 0.0; // sup of the converged field (0 when not converged)
        std::string status;
        long iterations = 0;
    };
    std::vector<Entry> history;
    double k = 1.0;
    double delta = 1.0;
    double seed = 0.0;
    std::vector<double> lo_field; // witness solution at lam_lo

    double mid() const { return 0.5 * (lam_lo + lam_hi); }
    double rel_width() const { return (lam_hi - lam_lo) / lam_lo; }
};

/// Thm-style rearranged lower bound for the eigenvalue given one converged
/// solve: lam * (1 + k delta / (m_lam - delta)). Empty when m_lam <= delta.
std::optional<double> lower_bound_from_solution(double lam, double delta, double m_lam, double k);

/// Admissible eigenvalue increment from a bounded positive super-solution:
/// eps = theta lam k (delta/m) / (1 - theta delta/m), 0 < theta < 1.
double epsilon_improvement(double lam, double theta, double delta, double m);

struct EstimateOptions {
    double tol = 0.02;               // relative bracket width target
    double delta = 1.0;              // boundary value
    std::optional<double> rho;       // outer-ball half-radius for case-II seeds
    double solver_rel_tol = 3e-4;    // residual tolerance, relative to lam nu delta^k
    // Blow-up classification cap. At bracket widths down to ~1% a feasible
    // field stays below a few hundred delta, so a cap of 10^3 delta (with a
    // 20x guard over the largest feasible sup seen) separates divergence
    // much earlier than the solver's 10^4 default.
    double M_cap_factor = 1e3;
    long max_iter = 1000000;
    int max_solves = 200;
};

/// Continuation in lambda from the guaranteed-feasible barrier seed: grow by
/// the paper bound (at least 1.5x) while solves converge, bisect after the
/// first blow-up, stop at the requested relative width.
EigenBracket estimate_lambda(const OperatorSpec& op, const GridDomain& dom, const EstimateOptions& opts);

struct DerivativeProbe {
    int node = -1;
    double lam = 0.0;
    double slope = 0.0;
    double lower = 0.0, upper = 0.0;
    bool passed = false;
};

struct DerivativeReport {
    std::vector<DerivativeProbe> probes;
    bool passed = true;
    double slack = 0.1;
};

/// Finite-difference slope of lam -> u_lam(x) against the two-sided Lipschitz
/// bounds v log(v/delta)/(k lam) <= dv/dlam <= (M/(k delta)) (v - delta)/lam.
DerivativeReport lambda_derivative_check(const OperatorSpec& op, const GridDomain& dom, double delta,
                                         const std::vector<double>& lambdas, int probe_count,
                                         double slack = 0.1, double solver_rel_tol = 1e-6);

nlohmann::json bracket_summary(const EigenBracket& br);

} // namespace degel
