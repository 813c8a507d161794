#include "degel/barriers.hpp"

#include <cmath>

namespace degel {

namespace {
double shape_exponent(const OperatorSpec& op, const BarrierSpec& b) {
    if (b.shape == BarrierSpec::Shape::AlphaCone) return op.signature.alpha;
    if (!(b.beta > 0.0)) throw input_error("barrier exponent must be > 0");
    return b.beta;
}
} // namespace

double BarrierSpec::value(const OperatorSpec& op, double r) const {
    const double be = shape_exponent(op, *this);
    const double rp = (shape == Shape::InversePower) ? std::pow(r, -be) : std::pow(r, be);
    return c + sign * d * rp;
}

double BarrierSpec::slope(const OperatorSpec& op, double r) const {
    const double be = shape_exponent(op, *this);
    if (shape == Shape::InversePower) return -sign * d * be * std::pow(r, -be - 1.0);
    return sign * d * be * std::pow(r, be - 1.0);
}

double BarrierSpec::curvature(const OperatorSpec& op, double r) const {
    const double be = shape_exponent(op, *this);
    if (shape == Shape::InversePower) return sign * d * be * (be + 1.0) * std::pow(r, -be - 2.0);
    return sign * d * be * (be - 1.0) * std::pow(r, be - 2.0);
}

double barrier_residual(const OperatorSpec& op, const BarrierSpec& b, double r) {
    if (!(r > 0.0)) throw input_error("barrier_residual requires r > 0");
    if (!(b.d > 0.0)) throw input_error("barrier slope d must be > 0");
    return radial_eval(op, r, b.slope(op, r), b.curvature(op, r));
}

void to_json(nlohmann::json& j, const BoundReport& r) {
    nlohmann::json in = nlohmann::json::object();
    for (const auto& [k, v] : r.inputs) in[k] = v;
    j = nlohmann::json{{"formula_id", r.formula_id}, {"value", r.value},
                       {"applicable", r.applicable}, {"inputs", in}};
}

std::pair<BoundReport, BoundReport> sup_inf_bound(const OperatorSpec& op, double sup_h, double inf_h,
                                                  double sup_f_plus, double inf_f_minus, double R_o) {
    if (!(R_o > 0.0)) throw input_error("sup_inf_bound requires R_o > 0");
    if (sup_f_plus < 0.0) throw input_error("sup_f_plus must be >= 0");
    if (inf_f_minus > 0.0) throw input_error("inf_f_minus must be <= 0");
    const double k = op.signature.k;
    const double alpha = op.signature.alpha;
    const double sigma = sigma_constant(op);
    const double ra = std::pow(R_o, alpha);

    BoundReport up;
    up.formula_id = "sup_bound";
    up.value = sup_h + sigma * std::pow(sup_f_plus, 1.0 / k) * ra;
    up.inputs = {{"sup_h", sup_h}, {"sup_f_plus", sup_f_plus}, {"R_o", R_o},
                 {"sigma", sigma}, {"alpha", alpha}, {"k", k}};

    BoundReport lo;
    lo.formula_id = "inf_bound";
    lo.value = inf_h - sigma * std::pow(std::abs(inf_f_minus), 1.0 / k) * ra;
    lo.inputs = {{"inf_h", inf_h}, {"inf_f_minus", inf_f_minus}, {"R_o", R_o},
                 {"sigma", sigma}, {"alpha", alpha}, {"k", k}};
    return {up, lo};
}

BoundReport lambda_threshold(const OperatorSpec& op, double nu, double R,
                             std::optional<double> rho, std::optional<double> beta_override) {
    if (!(nu > 0.0) || !(R > 0.0)) throw input_error("lambda_threshold requires nu > 0 and R > 0");
    const double k = op.signature.k;
    const double gamma = op.signature.gamma;
    const CaseTag tag = classify_case(op);

    BoundReport rep;
    rep.inputs = {{"nu", nu}, {"R", R}, {"k", k}, {"gamma", gamma}, {"s_bar", tag.s_bar}};
    if (tag.is_case_one()) {
        const double beta = 2.0 - tag.s_bar;
        const double mh = std::abs(coercivity_high(op, tag.s_bar));
        rep.formula_id = "threshold_case1";
        rep.value = mh * std::pow(beta, k) / (nu * std::pow(R, gamma));
        rep.inputs.emplace_back("beta", beta);
        rep.inputs.emplace_back("mhigh_abs", mh);
    } else {
        if (!rho) throw input_error("lambda_threshold: case II requires the outer-ball half-radius rho");
        if (!(*rho > 0.0)) throw input_error("lambda_threshold: rho must be > 0");
        double beta = beta_override ? *beta_override : std::max(1.0, tag.s_bar - 2.0 + 0.5);
        if (!(beta > tag.s_bar - 2.0)) throw input_error("lambda_threshold: beta must exceed s_bar - 2");
        const double s = beta + 2.0;
        const double mh = std::abs(coercivity_high(op, s));
        rep.formula_id = "threshold_case2";
        rep.value = mh * std::pow(beta, k) / (nu * std::pow(R, gamma)) * std::pow(*rho / R, k * beta);
        rep.inputs.emplace_back("beta", beta);
        rep.inputs.emplace_back("s", s);
        rep.inputs.emplace_back("rho", *rho);
        rep.inputs.emplace_back("mhigh_abs", mh);
    }
    return rep;
}

SolutionBounds lambda_big_and_solution_bounds(const OperatorSpec& op, double nu, double R_o,
                                              double lam, double kappa1, double kappa2) {
    if (!(nu > 0.0) || !(R_o > 0.0)) throw input_error("requires nu > 0 and R_o > 0");
    if (lam < 0.0) throw input_error("requires lam >= 0");
    const double k = op.signature.k;
    const double sigma = sigma_constant(op);
    SolutionBounds b;
    b.Lambda = 1.0 / (nu * std::pow(sigma * std::pow(R_o, op.signature.alpha), k));
    if (lam < b.Lambda) {
        b.bracket_applicable = true;
        b.theta = 1.0 / (1.0 - std::pow(lam / b.Lambda, 1.0 / k));
        b.lower = kappa1;
        b.upper = b.theta * kappa2;
    }
    return b;
}

} // namespace degel
