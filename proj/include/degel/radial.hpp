#pragma once

#include <string>
#include <vector>

#include "degel/operators.hpp"

namespace degel {

/// Ball problem G(r, v', v'') + lam * a0 * |v|^(k-1) v = 0 on (0, R),
/// v = delta on r = R, solved for rotation-invariant operators.
struct RadialProblem {
    OperatorSpec op;
    double R = 1.0;
    double delta = 1.0;
    double lam = 0.0;
    double a0 = 1.0;
    int N = 4096;          // fixed integration steps per radius R
    double tol = 1e-8;     // relative boundary-match tolerance
    double v0_max_factor = 1e6; // shooting cap: v0 <= factor * delta
};

struct RadialSolution {
    std::vector<double> r, v, dv;
    double residual_sup = 0.0;
    double v0 = 0.0;
    bool monotone = false;
    double lam = 0.0, delta = 0.0, R = 0.0;
};

/// Leading profile v(r) ~ v0 - c r^alpha near the center, with
/// alpha = gamma/k and c = sigma (lam a0)^(1/k) v0.
std::pair<double, double> near_origin_expansion(const OperatorSpec& op, double v0, double lam, double a0);

struct RadialOutcome {
    enum class Status { Converged, Infeasible } status = Status::Infeasible;
    RadialSolution sol;
    std::string note;
    bool ok() const { return status == Status::Converged; }
};

/// Shooting on the center value v0 in (delta, v0_max]. Infeasible means no
/// admissible v0 attains the boundary value: the blow-up side of the
/// eigenvalue bracket.
RadialOutcome solve_radial_bvp(const RadialProblem& prob);

struct EigenRadialResult {
    double lambda_star = 0.0;
    RadialSolution profile; // normalized v(0)=1, positive on [0,R), zero at the end
    int integrations = 0;
    double r_star_rel_err = 0.0;
};

/// First-eigenvalue shooting: normalize v(0)=1, v'(0)=0 and bisect lam until
/// the first zero radius of the profile matches R within tol*R.
EigenRadialResult eigen_radial(const OperatorSpec& op, double R, double tol, int N = 4096);

struct ScalingReport {
    std::vector<double> radii, lambdas, products;
    double spread = 0.0;
    double tol = 0.0;
    bool passed = false;
};

/// lambda*(R) * R^gamma should not depend on R; reports the relative spread.
ScalingReport scaling_invariant_check(const OperatorSpec& op, const std::vector<double>& radii, double tol);

// CSV (r, v, dv) dump and a one-object JSON summary.
void dump_profile_csv(const RadialSolution& sol, const std::string& path);
nlohmann::json radial_summary(const RadialSolution& sol);

} // namespace degel
