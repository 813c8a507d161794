#include "degel/radial.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace degel {

std::pair<double, double> near_origin_expansion(const OperatorSpec& op, double v0, double lam, double a0) {
    if (!(v0 > 0.0)) throw input_error("near_origin_expansion requires v0 > 0");
    if (lam < 0.0) throw input_error("near_origin_expansion requires lam >= 0");
    const double alpha = op.signature.alpha;
    if (lam == 0.0) return {alpha, 0.0};
    const double c = sigma_constant(op) * std::pow(lam * a0, 1.0 / op.signature.k) * v0;
    return {alpha, c};
}

namespace {

// Solve G(r, w, z) = rhs for z. G is nondecreasing in z (monotonicity in the
// Hessian), so an expanding bracket plus bisection always works away from the
// degenerate set w = 0.
double invert_curvature(const OperatorSpec& op, double r, double w, double rhs, double z_warm) {
    auto g = [&](double z) { return radial_eval(op, r, w, z) - rhs; };
    double step = 1.0 + std::abs(z_warm);
    double lo = z_warm - step, hi = z_warm + step;
    double glo = g(lo), ghi = g(hi);
    int guard = 0;
    while (glo > 0.0) {
        hi = lo;
        ghi = glo;
        step *= 4.0;
        lo -= step;
        glo = g(lo);
        if (++guard > 200 || !std::isfinite(lo)) {
            std::ostringstream os;
            os << "curvature inversion bracket failure (low side): r=" << r << " w=" << w
               << " rhs=" << rhs << " op=" << op.name();
            throw numerical_error(os.str());
        }
    }
    guard = 0;
    while (ghi < 0.0) {
        lo = hi;
        glo = ghi;
        step *= 4.0;
        hi += step;
        ghi = g(hi);
        if (++guard > 200 || !std::isfinite(hi)) {
            std::ostringstream os;
            os << "curvature inversion bracket failure (high side): r=" << r << " w=" << w
               << " rhs=" << rhs << " op=" << op.name();
            throw numerical_error(os.str());
        }
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo < 1e-14 * (1.0 + std::abs(mid))) return mid;
        if (g(mid) < 0.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct Trace {
    std::vector<double> r, v, w;
    bool crossed = false;
    double r_zero = 0.0;
    double defect_sup = 0.0;
};

// Outward integration of the radial equation from the near-origin expansion.
// Classic 4-stage explicit stepping with fixed step; the curvature at each
// stage comes from the monotone inversion, warm-started along the profile.
Trace integrate_profile(const OperatorSpec& op, double lam, double a0, double v0, double h,
                        double r_stop, bool stop_at_zero) {
    const double k = op.signature.k;
    auto rhs = [&](double v) { return -lam * a0 * std::pow(std::abs(v), k - 1.0) * v; };

    const auto [alpha, c] = near_origin_expansion(op, v0, lam, a0);
    const double r0 = h;
    Trace tr;
    tr.r.reserve(static_cast<size_t>(r_stop / h) + 2);
    double r = r0;
    double v = v0 - c * std::pow(r0, alpha);
    double w = -c * alpha * std::pow(r0, alpha - 1.0);
    tr.r.push_back(0.0);
    tr.v.push_back(v0);
    tr.w.push_back(0.0);
    tr.r.push_back(r);
    tr.v.push_back(v);
    tr.w.push_back(w);

    double z_warm = (lam > 0.0) ? -c * alpha * (alpha - 1.0) * std::pow(r0, alpha - 2.0) : 0.0;
    while (r < r_stop - 0.5 * h) {
        auto accel = [&](double rr, double vv, double ww) {
            const double z = invert_curvature(op, rr, ww, rhs(vv), z_warm);
            z_warm = z;
            return z;
        };
        const double f1v = w, f1w = accel(r, v, w);
        tr.defect_sup = std::max(tr.defect_sup, std::abs(radial_eval(op, r, w, f1w) - rhs(v)));
        const double y2v = v + 0.5 * h * f1v, y2w = w + 0.5 * h * f1w;
        const double f2v = y2w, f2w = accel(r + 0.5 * h, y2v, y2w);
        const double y3v = v + 0.5 * h * f2v, y3w = w + 0.5 * h * f2w;
        const double f3v = y3w, f3w = accel(r + 0.5 * h, y3v, y3w);
        const double y4v = v + h * f3v, y4w = w + h * f3w;
        const double f4v = y4w, f4w = accel(r + h, y4v, y4w);
        const double v_new = v + (h / 6.0) * (f1v + 2.0 * f2v + 2.0 * f3v + f4v);
        const double w_new = w + (h / 6.0) * (f1w + 2.0 * f2w + 2.0 * f3w + f4w);
        const double r_new = r + h;
        if (!std::isfinite(v_new) || !std::isfinite(w_new)) {
            std::ostringstream os;
            os << "radial integration lost finiteness at r=" << r_new << " for " << op.name();
            throw numerical_error(os.str());
        }
        if (stop_at_zero && v > 0.0 && v_new <= 0.0) {
            tr.crossed = true;
            tr.r_zero = r + h * v / (v - v_new); // linear interpolation of the crossing
            tr.r.push_back(tr.r_zero);
            tr.v.push_back(0.0);
            tr.w.push_back(w_new);
            return tr;
        }
        r = r_new;
        v = v_new;
        w = w_new;
        tr.r.push_back(r);
        tr.v.push_back(v);
        tr.w.push_back(w);
    }
    return tr;
}

} // namespace

RadialOutcome solve_radial_bvp(const RadialProblem& prob) {
    const OperatorSpec& op = prob.op;
    if (!op.symmetric) throw unsupported_operator("solve_radial_bvp: " + op.name() + " is not rotation invariant");
    if (!(prob.R > 0.0) || !(prob.delta >= 0.0) || !(prob.a0 > 0.0))
        throw input_error("solve_radial_bvp: invalid problem data");
    if (prob.N < 64) throw input_error("solve_radial_bvp: N must be >= 64");
    if (prob.lam < 0.0) throw input_error("solve_radial_bvp: lam must be >= 0");

    RadialOutcome out;
    const double h = prob.R / prob.N;

    if (prob.lam == 0.0) {
        // Reaction-free problem with constant data: the solution is the constant.
        RadialSolution s;
        s.lam = 0.0;
        s.delta = prob.delta;
        s.R = prob.R;
        s.v0 = prob.delta;
        s.monotone = true;
        s.residual_sup = 0.0;
        for (int i = 0; i <= prob.N; ++i) {
            s.r.push_back(i * h);
            s.v.push_back(prob.delta);
            s.dv.push_back(0.0);
        }
        out.status = RadialOutcome::Status::Converged;
        out.sol = std::move(s);
        return out;
    }
    if (!(prob.delta > 0.0)) throw input_error("solve_radial_bvp: lam > 0 requires delta > 0");

    // The equation is exactly k-homogeneous, so v(r; v0) scales linearly in
    // v0. One normalized shot determines the hitting value; a secant pass
    // polishes away the residual rounding.
    const double v0_max = prob.v0_max_factor * prob.delta;
    Trace probe = integrate_profile(op, prob.lam, prob.a0, prob.delta, h, prob.R, true);
    if (probe.crossed || probe.v.back() <= 0.0) {
        out.status = RadialOutcome::Status::Infeasible;
        out.note = "normalized profile crosses zero before R";
        return out;
    }
    const double phi_R = probe.v.back() / prob.delta; // normalized boundary value
    double v0 = prob.delta / phi_R;
    if (v0 > v0_max) {
        out.status = RadialOutcome::Status::Infeasible;
        out.note = "required center value exceeds the shooting cap";
        return out;
    }

    Trace tr = integrate_profile(op, prob.lam, prob.a0, v0, h, prob.R, true);
    for (int it = 0; it < 8 && !tr.crossed; ++it) {
        const double miss = tr.v.back() - prob.delta;
        if (std::abs(miss) <= prob.tol * prob.delta) break;
        const double v0_next = v0 - miss * v0 / tr.v.back();
        if (!(v0_next > prob.delta) || v0_next > v0_max) break;
        v0 = v0_next;
        tr = integrate_profile(op, prob.lam, prob.a0, v0, h, prob.R, true);
    }
    if (tr.crossed || std::abs(tr.v.back() - prob.delta) > prob.tol * prob.delta) {
        out.status = RadialOutcome::Status::Infeasible;
        out.note = "shooting failed to match the boundary value within tolerance";
        return out;
    }

    RadialSolution s;
    s.r = std::move(tr.r);
    s.v = std::move(tr.v);
    s.dv = std::move(tr.w);
    s.v0 = v0;
    s.lam = prob.lam;
    s.delta = prob.delta;
    s.R = prob.R;
    s.monotone = true;
    for (size_t i = 1; i < s.v.size(); ++i)
        if (s.v[i] > s.v[i - 1] + 1e-12 * (1.0 + std::abs(s.v[i]))) s.monotone = false;
    s.residual_sup = std::max(tr.defect_sup, std::abs(s.v.back() - prob.delta));
    out.status = RadialOutcome::Status::Converged;
    out.sol = std::move(s);
    return out;
}

namespace {

// First zero radius of the normalized profile, +inf if it stays positive
// up to r_cap.
double first_zero_radius(const OperatorSpec& op, double lam, double h, double r_cap) {
    Trace tr = integrate_profile(op, lam, 1.0, 1.0, h, r_cap, true);
    return tr.crossed ? tr.r_zero : std::numeric_limits<double>::infinity();
}

} // namespace

EigenRadialResult eigen_radial(const OperatorSpec& op, double R, double tol, int N) {
    if (!op.symmetric) throw unsupported_operator("eigen_radial: " + op.name() + " is not rotation invariant");
    if (!(R > 0.0) || !(tol > 0.0)) throw input_error("eigen_radial requires R > 0 and tol > 0");
    const double h = R / N;
    const double gamma = op.signature.gamma;

    // Feasibility threshold on the ball seeds the search (diameter 2R; the
    // outer-ball half-radius of a ball is its radius).
    const double seed = [&] {
        const CaseTag tag = classify_case(op);
        if (tag.is_case_one()) {
            const double beta = 2.0 - tag.s_bar;
            return std::abs(coercivity_high(op, tag.s_bar)) * std::pow(beta, op.signature.k) /
                   std::pow(2.0 * R, gamma);
        }
        const double beta = std::max(1.0, tag.s_bar - 1.5);
        const double s = beta + 2.0;
        return std::abs(coercivity_high(op, s)) * std::pow(beta, op.signature.k) /
               std::pow(2.0 * R, gamma) * std::pow(0.5, op.signature.k * beta);
    }();

    EigenRadialResult res;
    int evals = 0;
    auto rstar = [&](double lam, double cap) {
        ++evals;
        return first_zero_radius(op, lam, h, cap);
    };

    // One probe plus the exact scaling identity lam * r*^gamma = const gives a
    // tight initial guess; verify and widen into a true bracket.
    const double lam_min = 0.5 * seed, lam_max = 1e6;
    double lam_probe = std::max(seed, lam_min * 2.0);
    double rs = rstar(lam_probe, 64.0 * R);
    while (!std::isfinite(rs)) {
        lam_probe *= 4.0;
        if (lam_probe > lam_max)
            throw numerical_error("eigen_radial: no zero crossing found up to lam = 1e6 for " + op.name());
        rs = rstar(lam_probe, 64.0 * R);
    }
    double guess = lam_probe * std::pow(rs / R, gamma);
    double lo = std::max(lam_min, guess * 0.98), hi = std::min(lam_max, guess * 1.02);
    // enforce r*(lo) > R > r*(hi)
    while (true) {
        const double r_lo = rstar(lo, 4.0 * R);
        if (r_lo > R) break;
        hi = lo;
        lo = std::max(lam_min, lo * 0.7);
        if (lo <= lam_min) {
            if (rstar(lam_min, 64.0 * R) <= R)
                throw numerical_error("eigen_radial: bracket not found within [threshold/2, 1e6] for " + op.name());
            lo = lam_min;
            break;
        }
    }
    while (true) {
        const double r_hi = rstar(hi, 4.0 * R);
        if (r_hi < R) break;
        lo = hi;
        hi = std::min(lam_max, hi * 1.4);
        if (hi >= lam_max)
            throw numerical_error("eigen_radial: bracket not found within [threshold/2, 1e6] for " + op.name());
    }

    double lam_star = 0.5 * (lo + hi);
    double rerr = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 400; ++it) {
        lam_star = 0.5 * (lo + hi);
        const double r = rstar(lam_star, 4.0 * R);
        rerr = std::isfinite(r) ? std::abs(r - R) / R : std::numeric_limits<double>::infinity();
        if (rerr <= tol) break;
        if (!std::isfinite(r) || r > R) lo = lam_star;
        else hi = lam_star;
        if (hi - lo < 1e-15 * lam_star) break;
    }

    Trace tr = integrate_profile(op, lam_star, 1.0, 1.0, h, 4.0 * R, true);
    RadialSolution prof;
    prof.r = std::move(tr.r);
    prof.v = std::move(tr.v);
    prof.dv = std::move(tr.w);
    prof.v0 = 1.0;
    prof.lam = lam_star;
    prof.delta = 0.0;
    prof.R = R;
    prof.monotone = true;
    prof.residual_sup = tr.defect_sup;

    res.lambda_star = lam_star;
    res.profile = std::move(prof);
    res.integrations = evals;
    res.r_star_rel_err = rerr;
    return res;
}

ScalingReport scaling_invariant_check(const OperatorSpec& op, const std::vector<double>& radii, double tol) {
    if (radii.size() < 1) throw input_error("scaling_invariant_check needs at least one radius");
    ScalingReport rep;
    rep.tol = tol;
    rep.radii = radii;
    const double gamma = op.signature.gamma;
    for (double R : radii) {
        const auto e = eigen_radial(op, R, std::min(1e-6, tol / (4.0 * gamma)));
        rep.lambdas.push_back(e.lambda_star);
        rep.products.push_back(e.lambda_star * std::pow(R, gamma));
    }
    double pmin = rep.products.front(), pmax = rep.products.front();
    for (double p : rep.products) {
        pmin = std::min(pmin, p);
        pmax = std::max(pmax, p);
    }
    rep.spread = (pmax - pmin) / (0.5 * (pmax + pmin));
    rep.passed = rep.spread <= tol;
    return rep;
}

void dump_profile_csv(const RadialSolution& sol, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw input_error("cannot open " + path + " for writing");
    f << "r,v,dv\n";
    f.precision(17);
    for (size_t i = 0; i < sol.r.size(); ++i)
        f << sol.r[i] << "," << sol.v[i] << "," << sol.dv[i] << "\n";
}

nlohmann::json radial_summary(const RadialSolution& sol) {
    return nlohmann::json{{"lambda", sol.lam}, {"v0", sol.v0}, {"residual_sup", sol.residual_sup},
                          {"delta", sol.delta}, {"R", sol.R}, {"monotone", sol.monotone}};
}

} // namespace degel
