#include "degel/verify.hpp"

#include <algorithm>
#include <cmath>

namespace degel {

void to_json(nlohmann::json& j, const CheckResult& c) {
    j = nlohmann::json{{"check_id", c.check_id}, {"passed", c.passed}, {"applicable", c.applicable},
                       {"margin", c.margin}, {"witnesses", c.witnesses}, {"note", c.note}};
}

CheckResult quotient_comparison_check(const std::vector<double>& u, const std::vector<double>& v,
                                      const GridDomain& dom, double tol) {
    CheckResult res;
    res.check_id = "quotient_comparison";
    double interior = -std::numeric_limits<double>::infinity();
    double boundary = -std::numeric_limits<double>::infinity();
    int worst = -1;
    for (size_t node = 0; node < dom.mask.size(); ++node) {
        if (dom.mask[node] == NodeClass::Exterior) continue;
        if (!(v[node] > 0.0)) throw input_error("quotient_comparison_check requires v > 0 on the domain");
        const double ratio = u[node] / v[node];
        if (dom.mask[node] == NodeClass::Interior) {
            if (ratio > interior) {
                interior = ratio;
                worst = static_cast<int>(node);
            }
        } else {
            boundary = std::max(boundary, ratio);
        }
    }
    res.margin = boundary + tol - interior;
    res.passed = res.margin >= 0.0;
    if (worst >= 0) res.witnesses.push_back(worst);
    return res;
}

CheckResult harnack_holder_check(const std::vector<double>& w, const GridDomain& dom, double yx, double yy,
                                 double R, double beta, double slack) {
    CheckResult res;
    res.check_id = "harnack_holder";
    if (!(R > 0.0) || !(beta > 0.0) || beta >= 1.0)
        throw input_error("harnack_holder_check requires R > 0 and beta in (0,1)");

    // geometry: B_4R(y) must be inside the masked domain
    std::vector<int> ball;
    for (size_t node = 0; node < dom.mask.size(); ++node) {
        const double d = std::hypot(dom.x(static_cast<int>(node)) - yx, dom.y(static_cast<int>(node)) - yy);
        if (d <= 4.0 * R && dom.mask[node] == NodeClass::Exterior)
            throw input_error("harnack_holder_check: B_4R(y) is not contained in the domain");
        if (d <= R && dom.mask[node] != NodeClass::Exterior) ball.push_back(static_cast<int>(node));
    }
    if (ball.empty()) throw input_error("harnack_holder_check: no nodes inside B_R(y)");

    double wmin = std::numeric_limits<double>::infinity(), wmax = -wmin;
    int arg_min = -1, arg_max = -1;
    for (int node : ball) {
        if (!(w[static_cast<size_t>(node)] > 0.0))
            throw input_error("harnack_holder_check requires w > 0");
        if (w[static_cast<size_t>(node)] < wmin) {
            wmin = w[static_cast<size_t>(node)];
            arg_min = node;
        }
        if (w[static_cast<size_t>(node)] > wmax) {
            wmax = w[static_cast<size_t>(node)];
            arg_max = node;
        }
    }
    const double C = 1.0 / (1.0 - std::pow(2.0 / 3.0, beta));
    const double harnack_margin = C * wmin * (1.0 + slack) - wmax;

    // Hoelder: |w(x)-w(z)| <= (3R)^(-beta) sup_B w |x-z|^beta, on sampled pairs
    const size_t stride = std::max<size_t>(1, ball.size() / 160);
    double holder_margin = std::numeric_limits<double>::infinity();
    const double pref = std::pow(3.0 * R, -beta) * wmax;
    for (size_t a = 0; a < ball.size(); a += stride) {
        for (size_t b = a + stride; b < ball.size(); b += stride) {
            const int na = ball[a], nb = ball[b];
            const double dist = std::hypot(dom.x(na) - dom.x(nb), dom.y(na) - dom.y(nb));
            if (dist <= 0.0) continue;
            const double bound = pref * std::pow(dist, beta) * (1.0 + slack) + 1e-14;
            holder_margin = std::min(holder_margin,
                                     bound - std::abs(w[static_cast<size_t>(na)] - w[static_cast<size_t>(nb)]));
        }
    }
    res.margin = std::min(harnack_margin, holder_margin);
    res.passed = res.margin >= 0.0;
    res.witnesses = {arg_max, arg_min};
    return res;
}

CheckResult change_of_variables_check(const std::vector<double>& u, double beta, const OperatorSpec& op,
                                      double lam, const GridDomain& dom, double slack) {
    CheckResult res;
    res.check_id = "change_of_variables";
    if (!(beta > 0.0) || beta > 1.0) throw input_error("change_of_variables_check: beta in (0,1]");
    const double k = op.signature.k;
    std::vector<double> v(u.size(), 0.0);
    double sup_v = 0.0;
    for (size_t node = 0; node < u.size(); ++node) {
        if (dom.mask[node] == NodeClass::Exterior) continue;
        if (!(u[node] > 0.0)) throw input_error("change_of_variables_check requires u > 0");
        v[node] = std::pow(u[node], beta);
        sup_v = std::max(sup_v, v[node]);
    }
    // 5% of the reaction scale plus a grid-consistency allowance; the floor
    // absorbs the solver's own residual on reaction-free fields
    const double scale = std::pow(beta, k) * lam * dom.nu * std::pow(sup_v, k);
    const double tol = slack * scale + 4.0 * std::pow(dom.h, 2.0 / 3.0) * scale + 1e-9 * (1.0 + std::pow(sup_v, k));

    double worst = -std::numeric_limits<double>::infinity();
    int arg = -1;
    for (int node : dom.interior) {
        const double resid = scheme_residual(op, dom, v, node) +
                             std::pow(beta, k) * lam * dom.weight_a[static_cast<size_t>(node)] *
                                 std::pow(v[static_cast<size_t>(node)], k);
        if (resid > worst) {
            worst = resid;
            arg = node;
        }
    }
    res.margin = tol - worst;
    res.passed = res.margin >= 0.0;
    if (arg >= 0) res.witnesses.push_back(arg);
    return res;
}

CheckResult extremum_principle_check(const std::vector<double>& u, const GridDomain& dom, ExtremumMode mode,
                                     bool strict, double tol) {
    CheckResult res;
    res.check_id = mode == ExtremumMode::Max ? "max_principle" : "min_principle";
    double bnd = mode == ExtremumMode::Max ? -std::numeric_limits<double>::infinity()
                                           : std::numeric_limits<double>::infinity();
    double intr = bnd;
    int arg = -1;
    for (size_t node = 0; node < dom.mask.size(); ++node) {
        const double val = u[node];
        if (dom.mask[node] == NodeClass::Boundary) {
            bnd = mode == ExtremumMode::Max ? std::max(bnd, val) : std::min(bnd, val);
        } else if (dom.mask[node] == NodeClass::Interior) {
            if (mode == ExtremumMode::Max ? val > intr || arg < 0 : val < intr || arg < 0) {
                intr = val;
                arg = static_cast<int>(node);
            }
        }
    }
    if (mode == ExtremumMode::Max) {
        res.margin = bnd + tol - intr;
        res.passed = res.margin >= 0.0;
    } else {
        res.margin = intr - bnd;                      // strict excess of the interior minimum
        res.passed = strict ? res.margin > 0.0 : res.margin >= -tol;
    }
    if (arg >= 0) res.witnesses.push_back(arg);
    return res;
}

CheckResult sup_bound_audit(const std::vector<double>& u, const GridDomain& dom, const OperatorSpec& op,
                            double lam, double slack) {
    CheckResult res;
    res.check_id = "sup_bound_audit";
    double sup_u = -std::numeric_limits<double>::infinity(), sup_h = sup_u;
    for (size_t node = 0; node < dom.mask.size(); ++node) {
        if (dom.mask[node] == NodeClass::Interior) sup_u = std::max(sup_u, u[node]);
        else if (dom.mask[node] == NodeClass::Boundary) sup_h = std::max(sup_h, u[node]);
    }
    sup_u = std::max(sup_u, sup_h);
    const double k = op.signature.k;
    const double f_plus = lam * dom.nu * std::pow(std::max(sup_u, 0.0), k);
    const double bound = sup_h + sigma_constant(op) * std::pow(f_plus, 1.0 / k) *
                                     std::pow(dom.out_radius, op.signature.alpha);
    res.margin = bound * (1.0 + slack) - sup_u;
    res.passed = res.margin >= 0.0;
    return res;
}

CheckResult solution_bracket_audit(const std::vector<double>& u, const GridDomain& dom, const OperatorSpec& op,
                                   double lam, double slack) {
    CheckResult res;
    res.check_id = "solution_bracket_audit";
    const double k = op.signature.k;
    const double Lambda = 1.0 / (dom.nu * std::pow(sigma_constant(op) *
                                                       std::pow(dom.out_radius, op.signature.alpha), k));
    if (!(lam < Lambda)) {
        res.applicable = false;
        res.passed = true;
        res.note = "lam >= Lambda: bracket inapplicable";
        return res;
    }
    double sup_u = -std::numeric_limits<double>::infinity(), kappa2 = sup_u;
    for (size_t node = 0; node < dom.mask.size(); ++node) {
        if (dom.mask[node] == NodeClass::Interior) sup_u = std::max(sup_u, u[node]);
        else if (dom.mask[node] == NodeClass::Boundary) kappa2 = std::max(kappa2, u[node]);
    }
    const double theta = 1.0 / (1.0 - std::pow(lam / Lambda, 1.0 / k));
    res.margin = theta * kappa2 * (1.0 + slack) - sup_u;
    res.passed = res.margin >= 0.0;
    return res;
}

std::vector<CheckResult> run_battery(const OperatorSpec& op, const GridDomain& dom, double lam, double delta,
                                     const std::vector<double>& u) {
    std::vector<CheckResult> out;
    const double grid_tol = 2.0 * dom.h * (1.0 + lam);
    (void)delta;

    // the boundary infimum is a constant sub-solution; the field itself is
    // the super-solution
    double inf_bc = std::numeric_limits<double>::infinity();
    for (size_t node = 0; node < dom.mask.size(); ++node)
        if (dom.mask[node] == NodeClass::Boundary) inf_bc = std::min(inf_bc, dom.boundary_data[node]);
    std::vector<double> sub(u.size(), inf_bc);
    for (size_t node = 0; node < dom.mask.size(); ++node)
        if (dom.mask[node] == NodeClass::Boundary) sub[node] = dom.boundary_data[node];
    out.push_back(quotient_comparison_check(sub, u, dom, 1e-9));

    // a scaled copy is again a solution by homogeneity
    std::vector<double> half = u;
    for (auto& x : half) x *= 0.5;
    out.push_back(quotient_comparison_check(half, u, dom, 1e-9));

    out.push_back(extremum_principle_check(u, dom, ExtremumMode::Min, lam > 0.0, grid_tol));
    // the max principle applies to fields with H_h >= 0, i.e. the reaction-free solve
    if (lam == 0.0) out.push_back(extremum_principle_check(u, dom, ExtremumMode::Max, false, grid_tol));
    out.push_back(change_of_variables_check(u, 0.5, op, lam, dom));
    out.push_back(change_of_variables_check(u, 1.0, op, lam, dom));

    const CaseTag tag = classify_case(op);
    if (tag.is_case_one() && dom.deepest_node >= 0) {
        // largest centered ball with B_4R inside the domain
        const double yx = dom.x(dom.deepest_node), yy = dom.y(dom.deepest_node);
        double clearance = std::numeric_limits<double>::infinity();
        for (size_t node = 0; node < dom.mask.size(); ++node)
            if (dom.mask[node] == NodeClass::Exterior)
                clearance = std::min(clearance, std::hypot(dom.x(static_cast<int>(node)) - yx,
                                                           dom.y(static_cast<int>(node)) - yy));
        const double R = 0.9 * clearance / 4.0;
        if (R > 3.0 * dom.h) {
            CheckResult h = harnack_holder_check(u, dom, yx, yy, R, 2.0 - tag.s_bar);
            out.push_back(h);
        }
    }
    out.push_back(sup_bound_audit(u, dom, op, lam));
    out.push_back(solution_bracket_audit(u, dom, op, lam));
    return out;
}

nlohmann::json battery_report(const std::vector<CheckResult>& results) {
    nlohmann::json arr = nlohmann::json::array();
    bool all = true;
    for (const auto& r : results) {
        nlohmann::json j;
        to_json(j, r);
        arr.push_back(j);
        all = all && r.passed;
    }
    return nlohmann::json{{"all_passed", all}, {"checks", arr}};
}

} // namespace degel
