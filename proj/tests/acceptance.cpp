// Acceptance suite: one machine-checked criterion per section, one PASS/FAIL
// line each. Expensive artifacts (eigenvalue brackets, converged fields) are
// produced once and shared by the later property criteria.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "degel/barriers.hpp"
#include "degel/eigen.hpp"
#include "degel/grid.hpp"
#include "degel/operators.hpp"
#include "degel/radial.hpp"
#include "degel/verify.hpp"
#include "oracles.hpp"

using namespace degel;

namespace {

const ScalarField2D kOne = [](double, double) { return 1.0; };
const OperatorSpec kLap = OperatorSpec::plap_type(2, 0.0, 0.0);
const OperatorSpec kInf = OperatorSpec::inf_type(2, 0.0);

struct Outcome {
    bool passed = true;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& label, const Outcome& out) {
    std::printf("%s criterion %d: %s%s%s\n", out.passed ? "PASS" : "FAIL", id, label.c_str(),
                out.detail.empty() ? "" : " -- ", out.detail.c_str());
    std::fflush(stdout);
    if (!out.passed) ++failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// artifacts shared across criteria
struct GridArtifact {
    OperatorSpec op;
    GridDomain dom;
    double lam = 0.0;
    double delta = 1.0;
    std::vector<double> u;
    std::string label;
};

std::vector<GridArtifact> g_fields; // converged grid fields from criteria 2 and 5
EigenBracket g_disk_bracket;        // criterion 2 disk continuation

// ---------------------------------------------------------------------------

Outcome criterion1() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = eigen_radial(kLap, 1.0, 1e-6);
    const double secs = seconds_since(t0);
    const double target = 5.78318596; // j01^2, cross-checked against the series oracle
    const double oracle = oracles::laplace_disk_eigenvalue(1.0);
    const double rel = std::abs(res.lambda_star - target) / target;
    out.passed = rel <= 1e-4 && std::abs(oracle - target) / target <= 1e-7 && secs < 5.0;
    out.detail = fmt("lambda*=%.8f target=%.8f rel=%.2e time=%.2fs", res.lambda_star, target, rel, secs);
    return out;
}

Outcome criterion2() {
    Outcome out;
    auto brackets = [&](const GridDomain& dom, double target, const char* name, std::optional<double> rho) {
        const auto t0 = std::chrono::steady_clock::now();
        EstimateOptions opts;
        opts.tol = 0.02;
        opts.delta = 1.0;
        opts.rho = rho;
        const auto br = estimate_lambda(kLap, dom, opts);
        const double secs = seconds_since(t0);
        const double mid_err = std::abs(br.mid() - target) / target;
        const bool ok = br.lam_lo <= target * 1.02 && br.lam_hi >= target * 0.98 &&
                        br.rel_width() <= 0.02 + 1e-12 && mid_err <= 0.02 && secs < 120.0;
        out.passed = out.passed && ok;
        out.detail += fmt("%s[%.4f,%.4f] vs %.4f (mid err %.2f%%, %.0fs) ", name, br.lam_lo, br.lam_hi,
                          target, 100.0 * mid_err, secs);
        return br;
    };

    const auto disk = build_domain(DomainShape::disk(1.0), 1.0 / 64, kOne, kOne);
    g_disk_bracket = brackets(disk, oracles::laplace_disk_eigenvalue(1.0), "disk ", 1.0);
    g_fields.push_back({kLap, disk, g_disk_bracket.lam_lo, 1.0, g_disk_bracket.lo_field, "disk bracket witness"});

    const auto square = build_domain(DomainShape::rectangle(1.0, 1.0), 1.0 / 32, kOne, kOne);
    const auto br_sq = brackets(square, 2.0 * M_PI * M_PI, "square ", 0.5);
    g_fields.push_back({kLap, square, br_sq.lam_lo, 1.0, br_sq.lo_field, "square bracket witness"});
    return out;
}

Outcome criterion3() {
    Outcome out;
    const std::vector<double> radii = {0.5, 1.0, 2.0};
    for (const auto& op : {kLap, kInf, OperatorSpec::pucci_plus(2, 1.0, 2.0, 0.0)}) {
        const auto rep = scaling_invariant_check(op, radii, 1e-3);
        out.passed = out.passed && rep.passed;
        out.detail += fmt("%s spread=%.2e ", family_name(op.family).c_str(), rep.spread);
    }
    return out;
}

Outcome criterion4() {
    Outcome out;
    const auto lap_like = OperatorSpec::pucci_plus(2, 1.0, 1.0, 0.0);
    const auto a = eigen_radial(lap_like, 1.0, 1e-6);
    const auto b = eigen_radial(kLap, 1.0, 1e-6);
    const double rel = std::abs(a.lambda_star - b.lambda_star) / b.lambda_star;
    out.passed = rel <= 1e-4;
    out.detail = fmt("pucci(1,1)=%.8f laplace=%.8f rel=%.2e", a.lambda_star, b.lambda_star, rel);
    return out;
}

Outcome criterion5() {
    Outcome out;
    const auto dom = build_domain(DomainShape::disk(1.0), 1.0 / 32, kOne, kOne);
    const std::vector<OperatorSpec> roster = {
        OperatorSpec::plap_type(2, 0.0, 0.0),   OperatorSpec::plap_type(2, 1.0, 1.0),
        OperatorSpec::pseudo_plap(2, 2.0, 0.0), OperatorSpec::inf_type(2, 0.0),
        OperatorSpec::inf_type(2, 1.0),         OperatorSpec::pucci_plus(2, 1.0, 2.0, 0.0),
        OperatorSpec::pucci_minus(2, 1.0, 2.0, 0.0)};
    const double delta = 1.0;
    for (const auto& op : roster) {
        const auto thr = lambda_threshold(op, dom.nu, dom.diameter, 1.0);
        const double lam = 0.9 * thr.value;
        GridSolveOptions opts;
        opts.tol_abs = default_grid_tol(dom, op, lam, 1e-4);
        const auto st = solve_grid_bvp(op, dom, lam, opts);
        double interior_min = std::numeric_limits<double>::infinity();
        bool positive = true;
        for (int node : dom.interior) {
            interior_min = std::min(interior_min, st.u[static_cast<size_t>(node)]);
            positive = positive && st.u[static_cast<size_t>(node)] > 0.0;
        }
        const bool ok = st.status == FieldState::Status::Converged && positive && interior_min > delta;
        out.passed = out.passed && ok;
        if (!ok)
            out.detail += fmt("%s: %s min=%.6f; ", op.name().c_str(), status_name(st.status).c_str(),
                              interior_min);
        else
            g_fields.push_back({op, dom, lam, delta, st.u, "threshold solve " + op.name()});
    }
    if (out.passed) out.detail = fmt("%zu operators converged with interior min > delta", roster.size());
    return out;
}

Outcome criterion6() {
    Outcome out;
    if (g_disk_bracket.history.empty()) {
        out.passed = false;
        out.detail = "no continuation history available";
        return out;
    }
    int checked = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& e : g_disk_bracket.history) {
        if (e.status != "converged") continue;
        const double bound =
            g_disk_bracket.delta * (1.0 + g_disk_bracket.k * e.lam / (g_disk_bracket.lam_hi - e.lam));
        worst = std::min(worst, e.m_lam / bound);
        ++checked;
    }
    out.passed = checked > 0 && worst >= 0.95;
    out.detail = fmt("%d feasible solves, worst m/bound = %.3f (slack floor 0.95)", checked, worst);
    return out;
}

Outcome criterion7() {
    Outcome out;
    // against the closed-form solution v_x(lam) = delta J0(sqrt(lam) r)/J0(sqrt(lam) R)
    const double delta = 1.0, R = 1.0, slack = 0.10;
    const std::vector<double> lams = {3.6, 3.8, 4.0, 4.2, 4.4};
    int probes = 0;
    bool all = true;
    for (int pr = 0; pr < 20; ++pr) {
        const double r = 0.045 * pr;
        auto vx = [&](double lam) {
            return delta * oracles::bessel_j0(std::sqrt(lam) * r) / oracles::bessel_j0(std::sqrt(lam) * R);
        };
        for (size_t c = 1; c + 1 < lams.size(); ++c) {
            const double slope = (vx(lams[c + 1]) - vx(lams[c - 1])) / (lams[c + 1] - lams[c - 1]);
            const double v = vx(lams[c]);
            const double M = delta / oracles::bessel_j0(std::sqrt(lams[c]) * R);
            const double lo = v * std::log(v / delta) / lams[c];
            const double hi = (M / delta) * (v - delta) / lams[c];
            const double span = std::max(std::abs(hi), 1e-12);
            all = all && slope >= lo - slack * span && slope <= hi + slack * span;
            ++probes;
        }
    }
    out.passed = all && probes >= 20 * 3;
    out.detail = fmt("%d oracle probes within the slope window", probes);

    // and the grid implementation of the same check on a moderate mesh
    const auto dom = build_domain(DomainShape::disk(1.0), 1.0 / 32, kOne, kOne);
    const auto rep = lambda_derivative_check(kLap, dom, delta, lams, 20, slack, 1e-6);
    out.passed = out.passed && rep.passed && rep.probes.size() >= 20;
    out.detail += fmt("; grid check: %zu probes %s", rep.probes.size(), rep.passed ? "ok" : "FAILED");
    return out;
}

// One damped synchronous sweep applied to an ordered pair keeps the order.
// Prefactor-free families are tested with the full scheme; gradient-weighted
// ones against the frozen-coefficient envelope, which is the monotone
// contract the damped iteration actually uses.
double comparison_preservation_margin(const OperatorSpec& op, const GridDomain& dom, double lam,
                                      const std::vector<double>& base) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<double> lo = base, hi = base;
    for (int node : dom.interior) hi[static_cast<size_t>(node)] += 0.3 * u01(rng);

    const bool prefactor_free =
        (op.family == Family::PlapType && op.q == 0.0 && op.a == 0.0) ||
        ((op.family == Family::PucciPlus || op.family == Family::PucciMinus) && op.q == 0.0);
    auto resid = [&](const std::vector<double>& field, int node) {
        return prefactor_free ? scheme_residual(op, dom, field, node)
                              : scheme_residual_frozen(op, dom, base, field, node);
    };

    const double k = op.signature.k;
    double sup = 0.0;
    for (double v : hi) sup = std::max(sup, std::abs(v));
    // measure the scheme's own-node coefficient so tau sits under the
    // monotonicity bound for every node
    double diag_bound = 8.0 * std::max(1.0, op.Lam) / (dom.h * dom.h);
    std::vector<double> probe = base;
    for (int node : dom.interior) {
        const double r0 = resid(probe, node);
        const double eps = 1e-5 * (1.0 + std::abs(probe[static_cast<size_t>(node)]));
        probe[static_cast<size_t>(node)] += eps;
        const double r1 = resid(probe, node);
        probe[static_cast<size_t>(node)] -= eps;
        diag_bound = std::max(diag_bound, (r0 - r1) / eps);
    }
    const double tau = 0.4 / (diag_bound + lam * dom.nu * k * std::pow(sup, k - 1.0));

    double margin = std::numeric_limits<double>::infinity();
    for (int node : dom.interior) {
        const double rl = resid(lo, node) + lam * std::pow(std::abs(lo[static_cast<size_t>(node)]), k - 1.0) *
                                                lo[static_cast<size_t>(node)];
        const double rh = resid(hi, node) + lam * std::pow(std::abs(hi[static_cast<size_t>(node)]), k - 1.0) *
                                                hi[static_cast<size_t>(node)];
        const double a = lo[static_cast<size_t>(node)] + tau * rl;
        const double b = hi[static_cast<size_t>(node)] + tau * rh;
        margin = std::min(margin, b - a);
    }
    return margin;
}

Outcome criterion8() {
    Outcome out;
    // homogeneity / monotonicity battery at 1e-12 over 10^4 samples
    {
        std::mt19937_64 rng(4242);
        std::normal_distribution<double> g(0.0, 1.0);
        std::uniform_real_distribution<double> upos(0.05, 4.0);
        const std::vector<OperatorSpec> roster = {
            OperatorSpec::plap_type(2, 0.0, 0.0),   OperatorSpec::plap_type(3, 1.0, 1.0),
            OperatorSpec::pseudo_plap(2, 2.0, 0.0), OperatorSpec::inf_type(2, 0.0),
            OperatorSpec::inf_type(3, 1.0),         OperatorSpec::pucci_plus(2, 1.0, 2.0, 0.0),
            OperatorSpec::pucci_minus(3, 1.0, 2.0, 1.0)};
        bool ok = true;
        const int per_op = 10000 / static_cast<int>(roster.size()) + 1;
        for (const auto& op : roster) {
            for (int t = 0; t < per_op; ++t) {
                Vector p(static_cast<size_t>(op.n));
                for (auto& x : p) x = g(rng);
                SymMat X(op.n);
                for (int i = 0; i < op.n; ++i)
                    for (int j = i; j < op.n; ++j) X(i, j) = X(j, i) = g(rng);
                const double h = eval(op, p, X);
                const double th = upos(rng);
                SymMat tX = X;
                tX.scale(th);
                ok = ok && std::abs(eval(op, p, tX) - th * h) <= 1e-12 * (1.0 + std::abs(h) * th);
                Vector tp = p;
                for (auto& x : tp) x *= -th;
                const double thk1 = std::pow(th, op.signature.k1);
                ok = ok && std::abs(eval(op, tp, X) - thk1 * h) <= 1e-12 * (1.0 + std::abs(h) * thk1);
                SymMat gm(op.n);
                for (int i = 0; i < op.n; ++i)
                    for (int j = i; j < op.n; ++j) gm(i, j) = gm(j, i) = g(rng);
                SymMat P(op.n);
                for (int i = 0; i < op.n; ++i)
                    for (int j = 0; j < op.n; ++j) {
                        double s = 0.0;
                        for (int kk = 0; kk < op.n; ++kk) s += gm(i, kk) * gm(j, kk);
                        P(i, j) = s;
                    }
                SymMat Y = X;
                Y.axpy(1.0, P);
                ok = ok && (eval(op, p, Y) - h >= -1e-12 * (1.0 + std::abs(h)));
            }
        }
        out.passed = out.passed && ok;
        out.detail += fmt("laws@1e-12:%s ", ok ? "ok" : "FAIL");
    }

    // radial artifacts: the eigen profile and a mid-range solve carry the
    // profile properties and the sup bound
    {
        const auto eig = eigen_radial(kLap, 1.0, 1e-6);
        bool mono = true, positive = true;
        for (size_t i = 1; i + 1 < eig.profile.v.size(); ++i) {
            mono = mono && eig.profile.v[i] <= eig.profile.v[i - 1] + 1e-12;
            positive = positive && eig.profile.v[i] > 0.0;
        }
        RadialProblem prob;
        prob.op = kLap;
        prob.R = 1.0;
        prob.delta = 1.0;
        prob.lam = 4.0;
        const auto sol = solve_radial_bvp(prob);
        bool radial_ok = mono && positive && sol.ok() && sol.sol.monotone;
        if (sol.ok()) {
            // sup-bound audit with f+ = lam nu (sup u)^k on the out-ball
            const double m = sol.sol.v0;
            auto [up, lo] = sup_inf_bound(kLap, prob.delta, prob.delta, prob.lam * std::pow(m, 1.0), 0.0, prob.R);
            (void)lo;
            radial_ok = radial_ok && m <= up.value * 1.05;
            // blow-up lower bound at this lambda, eigenvalue from the shoot
            const double bound = prob.delta * (1.0 + prob.lam / (eig.lambda_star - prob.lam));
            radial_ok = radial_ok && m >= 0.95 * bound;
        }
        out.passed = out.passed && radial_ok;
        out.detail += fmt("radial:%s ", radial_ok ? "ok" : "FAIL");
    }

    // property battery plus one-sweep comparison preservation on every
    // converged grid field from criteria 2 and 5
    int batteries = 0;
    for (const auto& art : g_fields) {
        const auto checks = run_battery(art.op, art.dom, art.lam, art.delta, art.u);
        for (const auto& c : checks) {
            out.passed = out.passed && c.passed;
            if (!c.passed)
                out.detail += fmt("[%s %s margin=%.3e] ", art.label.c_str(), c.check_id.c_str(), c.margin);
        }
        const double margin = comparison_preservation_margin(art.op, art.dom, art.lam, art.u);
        const bool prefactor_free =
            (art.op.family == Family::PlapType && art.op.q == 0.0 && art.op.a == 0.0) ||
            ((art.op.family == Family::PucciPlus || art.op.family == Family::PucciMinus) && art.op.q == 0.0);
        const double tol = prefactor_free ? 1e-12 : 1e-4;
        out.passed = out.passed && margin >= -tol;
        if (margin < -tol) out.detail += fmt("[%s comparison margin=%.3e] ", art.label.c_str(), margin);
        ++batteries;
    }
    out.detail += fmt("%d field batteries green", batteries);
    return out;
}

Outcome criterion9() {
    Outcome out;
    struct Setup {
        double h;
        int K, W;
    };
    const std::vector<Setup> setups = {{1.0 / 16, 16, 1}, {1.0 / 32, 20, 2}, {1.0 / 64, 26, 3}};
    const std::array<double, 2> center = {0.013, -0.0071};

    std::vector<double> lap_err, inf_err;
    for (const auto& st : setups) {
        const auto dom = build_domain(DomainShape::disk(1.0), st.h, kOne, kOne, st.K, st.W);
        std::vector<double> u4(dom.mask.size(), 0.0), ucone(dom.mask.size(), 0.0);
        const double alpha = kInf.signature.alpha;
        for (size_t node = 0; node < dom.mask.size(); ++node) {
            const double dx = dom.x(static_cast<int>(node)) - center[0];
            const double dy = dom.y(static_cast<int>(node)) - center[1];
            const double r2 = dx * dx + dy * dy;
            u4[node] = r2 * r2;
            ucone[node] = 1.0 - std::pow(std::sqrt(r2), alpha);
        }
        double e_lap = 0.0, e_inf = 0.0;
        BarrierSpec cone;
        cone.shape = BarrierSpec::Shape::AlphaCone;
        cone.sign = -1;
        cone.c = 1.0;
        cone.d = 1.0;
        for (int node : dom.interior) {
            const double r = std::hypot(dom.x(node) - center[0], dom.y(node) - center[1]);
            if (r < 0.25) continue;
            const double lap_exact = radial_eval(kLap, r, 4.0 * r * r * r, 12.0 * r * r);
            e_lap = std::max(e_lap, std::abs(scheme_residual(kLap, dom, u4, node) - lap_exact));
            const double inf_exact = barrier_residual(kInf, cone, r);
            e_inf = std::max(e_inf, std::abs(scheme_residual(kInf, dom, ucone, node) - inf_exact));
        }
        lap_err.push_back(e_lap);
        inf_err.push_back(e_inf);
    }
    const double lap_rate = 0.5 * std::log2(lap_err[0] / lap_err[2]);
    const double inf_rate = 0.5 * std::log2(inf_err[0] / inf_err[2]);
    out.passed = lap_rate >= 2.0 - 0.2 && inf_rate >= 2.0 / 3.0 - 0.05;
    out.detail = fmt("laplace rate %.2f (>=2), infinity rate %.2f (>=2/3)", lap_rate, inf_rate);
    return out;
}

} // namespace

int main() {
    std::printf("acceptance suite\n");
    const auto t0 = std::chrono::steady_clock::now();

    auto guard = [&](int id, const char* label, const std::function<Outcome()>& f) {
        Outcome out;
        try {
            out = f();
        } catch (const std::exception& e) {
            out.passed = false;
            out.detail = std::string("exception: ") + e.what();
        }
        report(id, label, out);
    };

    guard(1, "radial Laplacian eigenvalue vs Bessel oracle", criterion1);
    guard(2, "grid eigenvalue brackets (disk 1/64, square 1/32)", criterion2);
    guard(3, "scaling law lambda* R^gamma constant", criterion3);
    guard(4, "Pucci degeneration to the Laplacian", criterion4);
    guard(5, "threshold feasibility for every built-in on the disk", criterion5);
    guard(6, "blow-up lower bound along the continuation history", criterion6);
    guard(7, "Lipschitz-in-lambda slope window", criterion7);
    guard(8, "property suites on all converged fields", criterion8);
    guard(9, "scheme consistency orders", criterion9);

    std::printf("%d criteria failed, total %.1f s\n", failures, seconds_since(t0));
    return failures == 0 ? 0 : 1;
}
