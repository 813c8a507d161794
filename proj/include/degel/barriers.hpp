#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "degel/operators.hpp"

namespace degel {

/// Radial comparison functions v(r) = c ± d r^beta, c ± d r^(-beta) and the
/// cone c ± d r^alpha with alpha = gamma/k.
struct BarrierSpec {
    enum class Shape { Power, InversePower, AlphaCone } shape = Shape::Power;
    int sign = +1;   // +1: c + d * shape(r), -1: c - d * shape(r)
    double beta = 1; // exponent; ignored for AlphaCone (forced to alpha)
    double c = 0.0;
    double d = 1.0; // must be > 0
    std::array<double, 2> center{0.0, 0.0};

    double value(const OperatorSpec& op, double r) const;
    double slope(const OperatorSpec& op, double r) const;
    double curvature(const OperatorSpec& op, double r) const;
};

/// H(Dv, D²v) on the barrier at radius r > 0, via the radial closed form.
double barrier_residual(const OperatorSpec& op, const BarrierSpec& b, double r);

/// One evaluated bound with its inputs echoed for reporting.
struct BoundReport {
    std::string formula_id;
    double value = 0.0;
    bool applicable = true;
    std::vector<std::pair<std::string, double>> inputs;
};

void to_json(nlohmann::json& j, const BoundReport& r);

/// sup_Ω u <= sup h + sigma (sup f+)^(1/k) R_o^alpha and the mirrored
/// lower bound, for H(Du,D²u) + f = 0 on a domain with out-ball radius R_o.
std::pair<BoundReport, BoundReport> sup_inf_bound(const OperatorSpec& op, double sup_h, double inf_h,
                                                  double sup_f_plus, double inf_f_minus, double R_o);

/// Guaranteed-existence threshold for positive solutions with positive
/// boundary data on a domain of diameter R with sup weight nu.
/// Case I uses s_bar and beta = 2 - s_bar; case II needs the outer-ball
/// half-radius rho and uses beta > s_bar - 2 (default max(1, s_bar - 3/2)).
BoundReport lambda_threshold(const OperatorSpec& op, double nu, double R,
                             std::optional<double> rho = std::nullopt,
                             std::optional<double> beta_override = std::nullopt);

/// Lambda = nu^{ -1} (sigma R_o^alpha)^{-k} plus, for 0 <= lam < Lambda, the
/// solution bracket kappa1 <= u <= theta kappa2 with
/// theta = (1 - (lam/Lambda)^(1/k))^{-1} (nonnegative boundary data).
struct SolutionBounds {
    double Lambda = 0.0;
    bool bracket_applicable = false; // false when lam >= Lambda (not a fault)
    double theta = 1.0;
    double lower = 0.0;
    double upper = 0.0;
};

SolutionBounds lambda_big_and_solution_bounds(const OperatorSpec& op, double nu, double R_o,
                                              double lam, double kappa1, double kappa2);

} // namespace degel
