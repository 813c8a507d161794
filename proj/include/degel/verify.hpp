#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "degel/grid.hpp"

namespace degel {

/// One named machine-checkable predicate evaluated on computed fields.
/// margin >= 0 means the inequality held with that much room (slack already
/// consumed); it is reported on passes too.
struct CheckResult {
    std::string check_id;
    bool passed = false;
    bool applicable = true;
    double margin = 0.0;
    std::vector<int> witnesses; // node ids of the tightest spots
    std::string note;
};

void to_json(nlohmann::json& j, const CheckResult& c);

/// sup over interior of u/v stays on the boundary (v > 0 required).
CheckResult quotient_comparison_check(const std::vector<double>& u, const std::vector<double>& v,
                                      const GridDomain& dom, double tol);

/// Harnack constant C = 1/(1-(2/3)^beta) and the matching Hoelder bound on
/// B_R(y), for positive super-solutions of case-I operators; requires
/// B_4R(y) inside the domain.
CheckResult harnack_holder_check(const std::vector<double>& w, const GridDomain& dom, double yx, double yy,
                                 double R, double beta, double slack = 0.05);

/// v = u^beta (0 < beta <= 1) is a discrete super-solution of the problem
/// with reaction weight beta^k lam a(x).
CheckResult change_of_variables_check(const std::vector<double>& u, double beta, const OperatorSpec& op,
                                      double lam, const GridDomain& dom, double slack = 0.05);

enum class ExtremumMode { Max, Min };

/// Max mode: interior sup <= boundary sup + tol. Min mode with a positive
/// reaction: interior inf strictly exceeds the boundary inf.
CheckResult extremum_principle_check(const std::vector<double>& u, const GridDomain& dom, ExtremumMode mode,
                                     bool strict, double tol);

/// sup-bound audit: sup u <= sup h + sigma (lam nu (sup u)^k)^(1/k) R_o^alpha.
CheckResult sup_bound_audit(const std::vector<double>& u, const GridDomain& dom, const OperatorSpec& op,
                            double lam, double slack = 0.05);

/// For 0 < lam < Lambda: sup u <= kappa2 / (1 - (lam/Lambda)^(1/k)).
CheckResult solution_bracket_audit(const std::vector<double>& u, const GridDomain& dom, const OperatorSpec& op,
                                   double lam, double slack = 0.05);

/// The full battery on one converged positive field. Harnack is attempted
/// only for case-I operators (it is conditional for case II).
std::vector<CheckResult> run_battery(const OperatorSpec& op, const GridDomain& dom, double lam, double delta,
                                     const std::vector<double>& u);

nlohmann::json battery_report(const std::vector<CheckResult>& results);

} // namespace degel
