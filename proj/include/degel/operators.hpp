#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "degel/linalg.hpp"

namespace degel {

/// Degrees of homogeneity of H(p, X): k1 in the gradient slot, k2 in the
/// Hessian slot (k2 is an odd positive integer). Derived exponents:
///   k = k1 + k2, gamma = k1 + 2 k2, alpha = gamma / k in (1, 2],
///   s_hat = k1 / k in [0, 1).
struct HomogeneitySignature {
    double k1 = 0.0;
    int k2 = 1;
    double k = 1.0;
    double gamma = 2.0;
    double alpha = 2.0;
    double s_hat = 0.0;

    static HomogeneitySignature from_degrees(double k1, int k2);
};

enum class Family : std::uint8_t {
    PlapType,   // |Du|^q Δu + a |Du|^(q-2) Δ∞u,  q >= 0, a > -1
    PseudoPlap, // |Du|^q Σ_i |D_i u|^p D_ii u,   p, q >= 0
    InfType,    // Σ_ij |D_i u|^q |D_j u|^q D_i u D_j u D_ij u,  q >= 0
    PucciPlus,  // |Du|^q (Λ Σ_{e_i>=0} e_i + λ Σ_{e_i<=0} e_i),  eigenvalues e_i of X
    PucciMinus, // |Du|^q (λ Σ_{e_i>=0} e_i + Λ Σ_{e_i<=0} e_i)
};

std::string family_name(Family f);

/// One member of the built-in operator families together with its
/// homogeneity signature and whether it is invariant under rotations
/// and reflections (so that radial evaluation makes sense).
struct OperatorSpec {
    Family family = Family::PlapType;
    int n = 2;
    double q = 0.0;   // gradient exponent (all families)
    double p = 0.0;   // per-coordinate exponent (pseudo p-Laplacian)
    double a = 0.0;   // weight of the infinity-Laplacian term (plap_type)
    double lam = 0.0; // lower ellipticity constant (Pucci)
    double Lam = 0.0; // upper ellipticity constant (Pucci)
    HomogeneitySignature signature;
    bool symmetric = false;

    static OperatorSpec plap_type(int n, double q, double a);
    static OperatorSpec pseudo_plap(int n, double p, double q);
    static OperatorSpec inf_type(int n, double q);
    static OperatorSpec pucci_plus(int n, double lam, double Lam, double q);
    static OperatorSpec pucci_minus(int n, double lam, double Lam, double q);

    std::string name() const;
};

/// H(p, X). Exact closed form per family; Pucci uses eigenvalues of X.
/// Throws input_error on dimension mismatch.
double eval(const OperatorSpec& op, const Vector& p, const SymMat& X);

/// G(r, v', v'') = H(v' e, (v'/r)(I - e⊗e) + v'' e⊗e) for radial profiles,
/// independent of the unit vector e. Requires op.symmetric and r > 0.
double radial_eval(const OperatorSpec& op, double r, double v1, double v2);

inline const HomogeneitySignature& signature(const OperatorSpec& op) { return op.signature; }

/// Extremes of H over unit vectors e at a fixed pinch parameter s:
///   m1 = min H(e, I - s e⊗e),  m2 = max H(e, I - s e⊗e),
///   m3 = min H(e, s e⊗e - I), m4 = max H(e, s e⊗e - I).
/// Closed form for rotation-invariant families; sparse-candidate
/// enumeration with simplex refinement otherwise.
std::array<double, 4> coercivity(const OperatorSpec& op, double s);

/// min(m1, -m4) and max(m2, -m3): the one-sided envelopes that control
/// radial barrier signs.
double coercivity_low(const OperatorSpec& op, double s);
double coercivity_high(const OperatorSpec& op, double s);

struct CaseTag {
    // Case I: coercivity_high is already negative somewhere in (1,2), so
    // power barriers r^beta with beta = 2 - s_bar work on any domain.
    // Case II: it only turns negative at s_bar >= 2; inverse-power barriers
    // and an outer ball condition are needed.
    enum class Kind { CaseI, CaseII } kind = Kind::CaseII;
    double s_bar = 2.0;
    bool is_case_one() const { return kind == Kind::CaseI; }
};

/// Classify the operator by where coercivity_high turns negative.
/// Throws numerical_error if it never does on the scanned range.
CaseTag classify_case(const OperatorSpec& op);

/// Sampled coercivity data plus the derived constants used everywhere else:
///   m1_hat = coercivity_low(s_hat) and sigma = 1 / (alpha * m1_hat^(1/k)).
struct CoercivityProfile {
    struct Sample {
        double s, m1, m2, m3, m4, mlow, mhigh;
    };
    std::vector<Sample> samples;
    double m1_hat = 0.0;
    double m4_at_s_hat = 0.0;
    double sigma = 0.0;
    CaseTag case_tag;
    // Optional witnesses for the two-sided coercivity window:
    // mlow > 0 for s <= s1 and mhigh < -ell for s >= s0.
    std::optional<double> s0, s1, ell;
};

CoercivityProfile coercivity_profile(const OperatorSpec& op, int grid_points = 400,
                                     double s_min = -5.0, double s_max = 10.0);

/// sigma = 1 / (alpha * m1_hat^(1/k)) without building the whole profile.
double sigma_constant(const OperatorSpec& op);

/// Randomized verification of the structural conditions:
///   monotonicity  H(p, X+P) >= H(p, X) for P >= 0,
///   homogeneity   H(θp, X) = |θ|^k1 H(p,X) and H(p, θX) = θ^k2 H(p,X), θ>0,
///   coercivity    m1_hat > 0 and m4(s_hat) < 0,
///   symmetry      H(Qp, QXQᵀ) = H(p, X) for orthogonal Q.
/// Failures are report entries, never faults.
struct ConditionReport {
    bool monotonicity = false;
    bool homogeneity = false;
    bool coercivity = false;
    bool symmetry = false;
    double worst_monotonicity = 0.0; // most negative H(p,X+P)-H(p,X) seen
    double worst_homogeneity = 0.0;  // largest relative defect seen
    double worst_symmetry = 0.0;     // largest relative defect seen
    double m1_hat = 0.0;
    double m4_at_s_hat = 0.0;
    int trials = 0;
    std::uint64_t seed = 0;

    bool abc_pass() const { return monotonicity && homogeneity && coercivity; }
    bool all_pass() const { return abc_pass() && symmetry; }
};

ConditionReport check_conditions(const OperatorSpec& op, std::uint64_t seed, int trials);

// JSON form: {"family": ..., "n": ..., "params": {...}}; round-trips bit-exactly.
void to_json(nlohmann::json& j, const OperatorSpec& op);
void from_json(const nlohmann::json& j, OperatorSpec& op);

} // namespace degel
