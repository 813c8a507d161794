#include "degel/operators.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace degel {

// ---------------------------------------------------------------------------
// eigenvalues

namespace {

Vector eig2(const SymMat& m) {
    const double a = m(0, 0), b = m(0, 1), d = m(1, 1);
    const double tr = a + d;
    const double disc = std::sqrt(std::max(0.0, (a - d) * (a - d) + 4.0 * b * b));
    return {0.5 * (tr - disc), 0.5 * (tr + disc)};
}

// Trigonometric solution of the characteristic cubic (Smith's method).
Vector eig3(const SymMat& A) {
    const double p1 = A(0, 1) * A(0, 1) + A(0, 2) * A(0, 2) + A(1, 2) * A(1, 2);
    const double tr = A.trace();
    if (p1 == 0.0) {
        Vector e = {A(0, 0), A(1, 1), A(2, 2)};
        std::sort(e.begin(), e.end());
        return e;
    }
    const double mean = tr / 3.0;
    double p2 = p1 * 2.0;
    for (int i = 0; i < 3; ++i) {
        const double d = A(i, i) - mean;
        p2 += d * d;
    }
    const double s = std::sqrt(p2 / 6.0);
    // B = (A - mean I)/s; det(B)/2 in [-1, 1] up to rounding
    SymMat B = A;
    for (int i = 0; i < 3; ++i) B(i, i) -= mean;
    B.scale(1.0 / s);
    const double detB = B(0, 0) * (B(1, 1) * B(2, 2) - B(1, 2) * B(1, 2)) -
                        B(0, 1) * (B(0, 1) * B(2, 2) - B(1, 2) * B(0, 2)) +
                        B(0, 2) * (B(0, 1) * B(1, 2) - B(1, 1) * B(0, 2));
    const double r = std::clamp(detB / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double e1 = mean + 2.0 * s * std::cos(phi);
    const double e3 = mean + 2.0 * s * std::cos(phi + 2.0 * M_PI / 3.0);
    const double e2 = tr - e1 - e3;
    Vector e = {e1, e2, e3};
    std::sort(e.begin(), e.end());
    return e;
}

Vector eig_jacobi(SymMat m) {
    const int n = m.n();
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
        if (off < 1e-30) break;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (m(i, j) == 0.0) continue;
                const double theta = (m(j, j) - m(i, i)) / (2.0 * m(i, j));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double mik = m(i, k), mjk = m(j, k);
                    m(i, k) = c * mik - s * mjk;
                    m(j, k) = s * mik + c * mjk;
                }
                for (int k = 0; k < n; ++k) {
                    const double mki = m(k, i), mkj = m(k, j);
                    m(k, i) = c * mki - s * mkj;
                    m(k, j) = s * mki + c * mkj;
                }
            }
        }
    }
    Vector e(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) e[static_cast<size_t>(i)] = m(i, i);
    std::sort(e.begin(), e.end());
    return e;
}

} // namespace

Vector sym_eigenvalues(const SymMat& m) {
    switch (m.n()) {
        case 1: return {m(0, 0)};
        case 2: return eig2(m);
        case 3: return eig3(m);
        default: return eig_jacobi(m);
    }
}

// ---------------------------------------------------------------------------
// construction

HomogeneitySignature HomogeneitySignature::from_degrees(double k1, int k2) {
    if (k1 < 0.0) throw input_error("homogeneity degree k1 must be >= 0");
    if (k2 <= 0 || k2 % 2 == 0) throw input_error("homogeneity degree k2 must be an odd positive integer");
    HomogeneitySignature s;
    s.k1 = k1;
    s.k2 = k2;
    s.k = k1 + k2;
    s.gamma = k1 + 2.0 * k2;
    s.alpha = s.gamma / s.k;
    s.s_hat = k1 / s.k;
    return s;
}

std::string family_name(Family f) {
    switch (f) {
        case Family::PlapType: return "plap_type";
        case Family::PseudoPlap: return "pseudo_plap";
        case Family::InfType: return "inf_type";
        case Family::PucciPlus: return "pucci_plus";
        case Family::PucciMinus: return "pucci_minus";
    }
    return "?";
}

namespace {
void require_dim(int n) {
    if (n < 2) throw input_error("operator dimension must be >= 2");
}
} // namespace

OperatorSpec OperatorSpec::plap_type(int n, double q, double a) {
    require_dim(n);
    if (q < 0.0) throw input_error("plap_type requires q >= 0");
    if (a <= -1.0) throw input_error("plap_type requires a > -1");
    OperatorSpec op;
    op.family = Family::PlapType;
    op.n = n;
    op.q = q;
    op.a = a;
    op.signature = HomogeneitySignature::from_degrees(q, 1);
    op.symmetric = true;
    return op;
}

OperatorSpec OperatorSpec::pseudo_plap(int n, double p, double q) {
    require_dim(n);
    if (p < 0.0 || q < 0.0) throw input_error("pseudo_plap requires p, q >= 0");
    OperatorSpec op;
    op.family = Family::PseudoPlap;
    op.n = n;
    op.p = p;
    op.q = q;
    op.signature = HomogeneitySignature::from_degrees(q + p, 1);
    op.symmetric = false;
    return op;
}

OperatorSpec OperatorSpec::inf_type(int n, double q) {
    require_dim(n);
    if (q < 0.0) throw input_error("inf_type requires q >= 0");
    OperatorSpec op;
    op.family = Family::InfType;
    op.n = n;
    op.q = q;
    op.signature = HomogeneitySignature::from_degrees(2.0 * q + 2.0, 1);
    op.symmetric = (q == 0.0);
    return op;
}

namespace {
OperatorSpec make_pucci(Family f, int n, double lam, double Lam, double q) {
    require_dim(n);
    if (!(0.0 < lam && lam <= Lam)) throw input_error("pucci requires 0 < lam <= Lam");
    if (q < 0.0) throw input_error("pucci requires q >= 0");
    OperatorSpec op;
    op.family = f;
    op.n = n;
    op.q = q;
    op.lam = lam;
    op.Lam = Lam;
    op.signature = HomogeneitySignature::from_degrees(q, 1);
    op.symmetric = true;
    return op;
}
} // namespace

OperatorSpec OperatorSpec::pucci_plus(int n, double lam, double Lam, double q) {
    return make_pucci(Family::PucciPlus, n, lam, Lam, q);
}

OperatorSpec OperatorSpec::pucci_minus(int n, double lam, double Lam, double q) {
    return make_pucci(Family::PucciMinus, n, lam, Lam, q);
}

std::string OperatorSpec::name() const {
    std::string s = family_name(family) + "(n=" + std::to_string(n);
    auto add = [&s](const char* k, double v) {
        s += std::string(",") + k + "=" + std::to_string(v);
    };
    switch (family) {
        case Family::PlapType: add("q", q); add("a", a); break;
        case Family::PseudoPlap: add("p", p); add("q", q); break;
        case Family::InfType: add("q", q); break;
        case Family::PucciPlus:
        case Family::PucciMinus: add("lam", lam); add("Lam", Lam); add("q", q); break;
    }
    return s + ")";
}

// ---------------------------------------------------------------------------
// evaluation

namespace {

inline double pow_abs(double x, double e) {
    if (e == 0.0) return 1.0;
    return std::pow(std::abs(x), e);
}

double pucci_weight(const OperatorSpec& op, double eig) {
    if (op.family == Family::PucciPlus) return eig >= 0.0 ? op.Lam * eig : op.lam * eig;
    return eig >= 0.0 ? op.lam * eig : op.Lam * eig;
}

} // namespace

double eval(const OperatorSpec& op, const Vector& p, const SymMat& X) {
    const size_t n = static_cast<size_t>(op.n);
    if (p.size() != n || X.n() != op.n) throw input_error("eval: dimension mismatch");
    const double pn = norm2(p);
    switch (op.family) {
        case Family::PlapType: {
            const double tr = X.trace();
            if (pn == 0.0) {
                if (op.q > 0.0) return 0.0;
                // Gradient direction undefined; use the spherical average of e·Xe.
                return tr + op.a * tr / op.n;
            }
            double quad = X.quad(p) / (pn * pn);
            return pow_abs(pn, op.q) * (tr + op.a * quad);
        }
        case Family::PseudoPlap: {
            double s = 0.0;
            for (size_t i = 0; i < n; ++i) s += pow_abs(p[i], op.p) * X(static_cast<int>(i), static_cast<int>(i));
            return pow_abs(pn, op.q) * s;
        }
        case Family::InfType: {
            Vector w(n);
            for (size_t i = 0; i < n; ++i) w[i] = pow_abs(p[i], op.q) * p[i];
            return X.quad(w);
        }
        case Family::PucciPlus:
        case Family::PucciMinus: {
            const double pref = pow_abs(pn, op.q);
            if (pref == 0.0) return 0.0;
            double s = 0.0;
            for (double e : sym_eigenvalues(X)) s += pucci_weight(op, e);
            return pref * s;
        }
    }
    return 0.0;
}

double radial_eval(const OperatorSpec& op, double r, double v1, double v2) {
    if (!op.symmetric)
        throw unsupported_operator("radial_eval: " + op.name() + " is not rotation invariant");
    if (!(r > 0.0)) throw input_error("radial_eval requires r > 0");
    const double lat = v1 / r; // the n-1 lateral curvatures
    switch (op.family) {
        case Family::PlapType:
            return pow_abs(v1, op.q) * ((op.n - 1) * lat + (1.0 + op.a) * v2);
        case Family::InfType:
            return v1 * v1 * v2; // symmetric only when q == 0
        case Family::PucciPlus:
        case Family::PucciMinus:
            return pow_abs(v1, op.q) * ((op.n - 1) * pucci_weight(op, lat) + pucci_weight(op, v2));
        case Family::PseudoPlap: break;
    }
    throw unsupported_operator("radial_eval: unsupported family");
}

// ---------------------------------------------------------------------------
// coercivity

namespace {

// H(e, ±(I - s e⊗e)) as a function of t_i = e_i^2 on the probability simplex.
// Both non-symmetric families depend on e only through |e_i|.
double sphere_objective(const OperatorSpec& op, double s, int side, const Vector& t) {
    const size_t n = t.size();
    Vector e(n);
    for (size_t i = 0; i < n; ++i) e[i] = std::sqrt(std::max(0.0, t[i]));
    SymMat X = SymMat::identity(op.n);
    X.axpy(-s, SymMat::outer(e));
    if (side < 0) X.scale(-1.0);
    return eval(op, e, X);
}

// Multi-start minimization over the simplex by pairwise mass transfer.
double simplex_minimize(const OperatorSpec& op, double s, int side, bool maximize) {
    const int n = op.n;
    const double sign = maximize ? -1.0 : 1.0;
    auto f = [&](const Vector& t) { return sign * sphere_objective(op, s, side, t); };

    std::vector<Vector> starts;
    // sparse uniform candidates: j coordinates equal to 1/j
    for (int j = 1; j <= n; ++j) {
        Vector t(static_cast<size_t>(n), 0.0);
        for (int i = 0; i < j; ++i) t[static_cast<size_t>(i)] = 1.0 / j;
        starts.push_back(t);
    }
    // plus a few deterministic interior points
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int r = 0; r < 8; ++r) {
        Vector t(static_cast<size_t>(n));
        double sum = 0.0;
        for (auto& v : t) { v = -std::log(uni(rng) + 1e-300); sum += v; }
        for (auto& v : t) v /= sum;
        starts.push_back(t);
    }

    double best = std::numeric_limits<double>::infinity();
    for (auto t : starts) {
        double ft = f(t);
        double step = 0.25;
        for (int iter = 0; iter < 400 && step > 1e-14; ++iter) {
            bool improved = false;
            for (int i = 0; i < n && !improved; ++i) {
                for (int j = 0; j < n; ++j) {
                    if (i == j) continue;
                    const double d = std::min(step, t[static_cast<size_t>(i)]);
                    if (d <= 0.0) continue;
                    Vector t2 = t;
                    t2[static_cast<size_t>(i)] -= d;
                    t2[static_cast<size_t>(j)] += d;
                    const double f2 = f(t2);
                    if (f2 < ft - 1e-18) {
                        t = t2;
                        ft = f2;
                        improved = true;
                        break;
                    }
                }
            }
            if (!improved) step *= 0.5;
        }
        best = std::min(best, ft);
    }
    return sign * best;
}

} // namespace

std::array<double, 4> coercivity(const OperatorSpec& op, double s) {
    if (op.symmetric) {
        // H(e, I - s e⊗e) is independent of e: evaluate at e = e1.
        Vector e1(static_cast<size_t>(op.n), 0.0);
        e1[0] = 1.0;
        SymMat Xp = SymMat::identity(op.n);
        Xp.axpy(-s, SymMat::outer(e1));
        SymMat Xm = Xp;
        Xm.scale(-1.0);
        const double plus = eval(op, e1, Xp);
        const double minus = eval(op, e1, Xm);
        return {plus, plus, minus, minus};
    }
    const double m1 = simplex_minimize(op, s, +1, false);
    const double m2 = simplex_minimize(op, s, +1, true);
    const double m3 = simplex_minimize(op, s, -1, false);
    const double m4 = simplex_minimize(op, s, -1, true);
    return {m1, m2, m3, m4};
}

double coercivity_low(const OperatorSpec& op, double s) {
    const auto m = coercivity(op, s);
    return std::min(m[0], -m[3]);
}

double coercivity_high(const OperatorSpec& op, double s) {
    const auto m = coercivity(op, s);
    return std::max(m[1], -m[2]);
}

namespace {

// Smallest root of coercivity_high on [s_min, s_max]; coercivity_high is
// non-increasing in s under the monotonicity condition.
double high_sign_change(const OperatorSpec& op, double s_min, double s_max, int grid_points) {
    double prev_s = s_min;
    double prev_v = coercivity_high(op, s_min);
    if (prev_v < 0.0) return s_min;
    for (int i = 1; i <= grid_points; ++i) {
        const double s = s_min + (s_max - s_min) * i / grid_points;
        const double v = coercivity_high(op, s);
        if (v < 0.0) {
            double lo = prev_s, hi = s;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (coercivity_high(op, mid) < 0.0) hi = mid;
                else lo = mid;
            }
            return 0.5 * (lo + hi);
        }
        prev_s = s;
        prev_v = v;
    }
    throw numerical_error("classify_case: coercivity_high never negative on [" +
                          std::to_string(s_min) + ", " + std::to_string(s_max) + "] for " + op.name());
}

} // namespace

CaseTag classify_case(const OperatorSpec& op) {
    const double root = high_sign_change(op, -5.0, 10.0, 400);
    CaseTag tag;
    if (root < 2.0) {
        tag.kind = CaseTag::Kind::CaseI;
        tag.s_bar = 0.5 * (std::max(1.0, root) + 2.0);
    } else {
        tag.kind = CaseTag::Kind::CaseII;
        tag.s_bar = root;
    }
    return tag;
}

double sigma_constant(const OperatorSpec& op) {
    const auto& sig = op.signature;
    const double m1_hat = coercivity_low(op, sig.s_hat);
    if (!(m1_hat > 0.0)) throw numerical_error("sigma ill-defined: m1_hat <= 0 for " + op.name());
    return 1.0 / (sig.alpha * std::pow(m1_hat, 1.0 / sig.k));
}

CoercivityProfile coercivity_profile(const OperatorSpec& op, int grid_points, double s_min, double s_max) {
    CoercivityProfile prof;
    prof.samples.reserve(static_cast<size_t>(grid_points) + 16);
    auto add_sample = [&](double s) {
        const auto m = coercivity(op, s);
        prof.samples.push_back({s, m[0], m[1], m[2], m[3],
                                std::min(m[0], -m[3]), std::max(m[1], -m[2])});
    };
    for (int i = 0; i <= grid_points; ++i) add_sample(s_min + (s_max - s_min) * i / grid_points);
    // refine around the sign change of the upper envelope
    for (size_t i = 1; i < prof.samples.size(); ++i) {
        if (prof.samples[i - 1].mhigh >= 0.0 && prof.samples[i].mhigh < 0.0) {
            double lo = prof.samples[i - 1].s, hi = prof.samples[i].s;
            for (int it = 0; it < 8; ++it) {
                const double mid = 0.5 * (lo + hi);
                add_sample(mid);
                if (prof.samples.back().mhigh < 0.0) hi = mid;
                else lo = mid;
            }
            break;
        }
    }
    std::sort(prof.samples.begin(), prof.samples.end(),
              [](const CoercivityProfile::Sample& a, const CoercivityProfile::Sample& b) { return a.s < b.s; });
    const auto& sig = op.signature;
    prof.m1_hat = coercivity_low(op, sig.s_hat);
    prof.m4_at_s_hat = coercivity(op, sig.s_hat)[3];
    if (prof.m1_hat > 0.0) prof.sigma = 1.0 / (sig.alpha * std::pow(prof.m1_hat, 1.0 / sig.k));
    prof.case_tag = classify_case(op);

    // Witnesses for the coercivity window, read off the sampled grid.
    double s1 = std::numeric_limits<double>::quiet_NaN();
    for (const auto& smp : prof.samples) {
        if (smp.s > 1.0) break;
        if (smp.mlow > 0.0) s1 = smp.s;
        else break;
    }
    if (std::isfinite(s1)) prof.s1 = s1;
    for (const auto& smp : prof.samples) {
        if (smp.s >= 1.0 && smp.mhigh < 0.0) {
            prof.s0 = smp.s;
            prof.ell = -smp.mhigh / 2.0;
            break;
        }
    }
    return prof;
}

// ---------------------------------------------------------------------------
// randomized condition checks

namespace {

SymMat random_sym(std::mt19937_64& rng, int n, double scale) {
    std::normal_distribution<double> g(0.0, scale);
    SymMat m(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) m(i, j) = m(j, i) = g(rng);
    return m;
}

SymMat random_psd(std::mt19937_64& rng, int n, double scale) {
    SymMat g = random_sym(rng, n, scale);
    SymMat m(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += g(i, k) * g(j, k);
            m(i, j) = s;
        }
    return m;
}

Vector random_vec(std::mt19937_64& rng, int n, double scale) {
    std::normal_distribution<double> g(0.0, scale);
    Vector v(static_cast<size_t>(n));
    for (auto& x : v) x = g(rng);
    return v;
}

// Random orthogonal matrix via Gram-Schmidt of a Gaussian matrix; both
// rotations and reflections occur.
std::vector<Vector> random_orthogonal(std::mt19937_64& rng, int n) {
    std::vector<Vector> q;
    for (int c = 0; c < n; ++c) {
        Vector v = random_vec(rng, n, 1.0);
        for (const auto& u : q) {
            double dot = 0.0;
            for (int i = 0; i < n; ++i) dot += u[static_cast<size_t>(i)] * v[static_cast<size_t>(i)];
            for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] -= dot * u[static_cast<size_t>(i)];
        }
        const double nn = norm2(v);
        for (auto& x : v) x /= nn;
        q.push_back(v);
    }
    return q;
}

} // namespace

ConditionReport check_conditions(const OperatorSpec& op, std::uint64_t seed, int trials) {
    if (trials < 1) throw input_error("check_conditions requires trials >= 1");
    ConditionReport rep;
    rep.trials = trials;
    rep.seed = seed;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-3.0, 3.0);

    const double tol = 1e-9;
    bool mono = true, homo = true, symm = true;

    for (int t = 0; t < trials; ++t) {
        const Vector p = random_vec(rng, op.n, 1.0);
        const SymMat X = random_sym(rng, op.n, 1.0);
        const double h = eval(op, p, X);

        // monotonicity in X
        SymMat Y = X;
        Y.axpy(1.0, random_psd(rng, op.n, 0.7));
        const double dh = eval(op, p, Y) - h;
        rep.worst_monotonicity = std::min(rep.worst_monotonicity, dh);
        if (dh < -1e-12 * (1.0 + std::abs(h))) mono = false;

        // homogeneity in p (signed theta) and in X (positive theta)
        double th = uni(rng);
        if (std::abs(th) < 0.05) th = 0.5;
        Vector tp = p;
        for (auto& x : tp) x *= th;
        const double lawp = eval(op, tp, X) - pow_abs(th, op.signature.k1) * h;
        const double relp = std::abs(lawp) / (1.0 + std::abs(h) * pow_abs(th, op.signature.k1));
        rep.worst_homogeneity = std::max(rep.worst_homogeneity, relp);
        if (relp > tol) homo = false;

        const double thx = std::exp(uni(rng) / 2.0);
        SymMat tX = X;
        tX.scale(thx);
        const double lawx = eval(op, p, tX) - std::pow(thx, op.signature.k2) * h;
        const double relx = std::abs(lawx) / (1.0 + std::abs(h) * std::pow(thx, op.signature.k2));
        rep.worst_homogeneity = std::max(rep.worst_homogeneity, relx);
        if (relx > tol) homo = false;

        // invariance under orthogonal conjugation
        const auto Q = random_orthogonal(rng, op.n);
        Vector qp(static_cast<size_t>(op.n), 0.0);
        SymMat qxq(op.n);
        for (int i = 0; i < op.n; ++i) {
            for (int k = 0; k < op.n; ++k) qp[static_cast<size_t>(i)] += Q[static_cast<size_t>(i)][static_cast<size_t>(k)] * p[static_cast<size_t>(k)];
            for (int j = 0; j < op.n; ++j) {
                double s = 0.0;
                for (int k = 0; k < op.n; ++k)
                    for (int l = 0; l < op.n; ++l)
                        s += Q[static_cast<size_t>(i)][static_cast<size_t>(k)] * X(k, l) * Q[static_cast<size_t>(j)][static_cast<size_t>(l)];
                qxq(i, j) = s;
            }
        }
        const double dq = std::abs(eval(op, qp, qxq) - h) / (1.0 + std::abs(h));
        rep.worst_symmetry = std::max(rep.worst_symmetry, dq);
        if (dq > 1e-8) symm = false;
    }

    rep.monotonicity = mono;
    rep.homogeneity = homo;
    rep.symmetry = symm;
    rep.m1_hat = coercivity_low(op, op.signature.s_hat);
    rep.m4_at_s_hat = coercivity(op, op.signature.s_hat)[3];
    rep.coercivity = rep.m1_hat > 0.0 && rep.m4_at_s_hat < 0.0;
    return rep;
}

// ---------------------------------------------------------------------------
// JSON

void to_json(nlohmann::json& j, const OperatorSpec& op) {
    nlohmann::json params;
    switch (op.family) {
        case Family::PlapType: params = {{"q", op.q}, {"a", op.a}}; break;
        case Family::PseudoPlap: params = {{"p", op.p}, {"q", op.q}}; break;
        case Family::InfType: params = {{"q", op.q}}; break;
        case Family::PucciPlus:
        case Family::PucciMinus:
            params = {{"lam", op.lam}, {"Lam", op.Lam}, {"q", op.q}};
            break;
    }
    j = nlohmann::json{{"family", family_name(op.family)}, {"n", op.n}, {"params", params}};
}

void from_json(const nlohmann::json& j, OperatorSpec& op) {
    const std::string fam = j.at("family").get<std::string>();
    const int n = j.at("n").get<int>();
    const auto& params = j.at("params");
    auto need = [&params](const char* key) { return params.at(key).get<double>(); };
    auto opt = [&params](const char* key, double dflt) {
        return params.contains(key) ? params.at(key).get<double>() : dflt;
    };
    if (fam == "plap_type") op = OperatorSpec::plap_type(n, opt("q", 0.0), opt("a", 0.0));
    else if (fam == "pseudo_plap") op = OperatorSpec::pseudo_plap(n, need("p"), opt("q", 0.0));
    else if (fam == "inf_type") op = OperatorSpec::inf_type(n, opt("q", 0.0));
    else if (fam == "pucci_plus") op = OperatorSpec::pucci_plus(n, need("lam"), need("Lam"), opt("q", 0.0));
    else if (fam == "pucci_minus") op = OperatorSpec::pucci_minus(n, need("lam"), need("Lam"), opt("q", 0.0));
    else throw input_error("unknown operator family: " + fam);
}

} // namespace degel
