#include <doctest.h>

#include <cmath>

#include "degel/barriers.hpp"
#include "degel/radial.hpp"
#include "oracles.hpp"

using namespace degel;

namespace {
const OperatorSpec kLap = OperatorSpec::plap_type(2, 0.0, 0.0);
const OperatorSpec kInf = OperatorSpec::inf_type(2, 0.0);
} // namespace

TEST_CASE("near-origin expansion") {
    auto [a_inf, c_inf] = near_origin_expansion(kInf, 1.0, 1.0, 1.0);
    CHECK(a_inf == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(c_inf == doctest::Approx(0.75 * std::cbrt(3.0)).epsilon(1e-13));
    // the cone residual cancels the reaction at the center
    CHECK(std::pow(c_inf * a_inf, 3) * (1.0 / 3.0) == doctest::Approx(1.0).epsilon(1e-12));

    auto [a0, c0] = near_origin_expansion(kInf, 2.0, 0.0, 1.0);
    CHECK(a0 == doctest::Approx(4.0 / 3.0));
    CHECK(c0 == 0.0);

    auto [a_lap, c_lap] = near_origin_expansion(kLap, 1.0, 1.0, 1.0);
    CHECK(a_lap == doctest::Approx(2.0));
    CHECK(c_lap == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("radial boundary-value problem against the Bessel solution") {
    RadialProblem prob;
    prob.op = kLap;
    prob.R = 1.0;
    prob.delta = 1.0;
    prob.a0 = 1.0;

    SUBCASE("lam = 0 gives the constant") {
        prob.lam = 0.0;
        const auto out = solve_radial_bvp(prob);
        REQUIRE(out.ok());
        CHECK(out.sol.v0 == doctest::Approx(1.0));
        for (double v : out.sol.v) CHECK(v == doctest::Approx(1.0));
    }

    SUBCASE("lam = 4 matches delta J0(sqrt(lam) r)/J0(sqrt(lam) R)") {
        prob.lam = 4.0;
        const auto out = solve_radial_bvp(prob);
        REQUIRE(out.ok());
        const double j02 = oracles::bessel_j0(2.0);
        CHECK(out.sol.v0 == doctest::Approx(1.0 / j02).epsilon(2e-5));
        CHECK(out.sol.v0 == doctest::Approx(4.4665).epsilon(1e-3));
        for (size_t i = 0; i < out.sol.r.size(); i += 257) {
            const double expect = oracles::bessel_j0(2.0 * out.sol.r[i]) / j02;
            CHECK(out.sol.v[i] == doctest::Approx(expect).epsilon(3e-5));
        }
        CHECK(out.sol.monotone);
        CHECK(out.sol.residual_sup <= prob.tol * (1.0 + out.sol.v0));
        // strong minimum: strictly above the boundary value inside
        for (size_t i = 0; i + 2 < out.sol.r.size(); ++i) CHECK(out.sol.v[i] > prob.delta);
    }

    SUBCASE("lam = 6 is past the first eigenvalue: infeasible") {
        prob.lam = 6.0;
        const auto out = solve_radial_bvp(prob);
        CHECK_FALSE(out.ok());
    }
}

TEST_CASE("radial solutions increase in lambda and satisfy the blow-up bound") {
    RadialProblem prob;
    prob.op = kLap;
    prob.R = 1.0;
    prob.delta = 1.0;

    std::vector<RadialSolution> sols;
    for (double lam : {1.0, 2.0, 4.0, 5.0}) {
        prob.lam = lam;
        const auto out = solve_radial_bvp(prob);
        REQUIRE(out.ok());
        sols.push_back(out.sol);
    }
    for (size_t c = 1; c < sols.size(); ++c)
        for (size_t i = 0; i < sols[c].v.size(); i += 64)
            CHECK(sols[c - 1].v[i] <= sols[c].v[i] + 1e-9);

    const double lam_star = oracles::laplace_disk_eigenvalue(1.0);
    for (const auto& s : sols) {
        const double m = s.v0;
        const double bound = s.delta * (1.0 + 1.0 * s.lam / (lam_star - s.lam));
        CHECK(m >= 0.95 * bound);
    }
}

TEST_CASE("first radial eigenvalue of the Laplacian on the disk") {
    const auto res = eigen_radial(kLap, 1.0, 1e-6);
    const double expect = oracles::laplace_disk_eigenvalue(1.0);
    CHECK(expect == doctest::Approx(5.783185962946785).epsilon(1e-9));
    CHECK(res.lambda_star == doctest::Approx(expect).epsilon(1e-4));
    // profile positive inside, zero at the end
    REQUIRE(res.profile.v.size() > 10);
    CHECK(res.profile.v.back() == doctest::Approx(0.0));
    for (size_t i = 0; i + 1 < res.profile.v.size(); ++i) CHECK(res.profile.v[i] > 0.0);

    const auto res2 = eigen_radial(kLap, 2.0, 1e-6);
    CHECK(res2.lambda_star == doctest::Approx(res.lambda_star / 4.0).epsilon(1e-4));
}

TEST_CASE("infinity-Laplacian ball eigenvalue pinned by the independent shooter") {
    // the oracle uses its own integrator and closed-form inversion; its
    // half-step agreement bounds its own discretization error
    const double coarse = oracles::inf_laplace_ball_eigenvalue(1.0, 2048);
    const double fine = oracles::inf_laplace_ball_eigenvalue(1.0, 4096);
    CHECK(std::abs(coarse - fine) / fine < 2e-4);

    const auto res = eigen_radial(kInf, 1.0, 1e-6);
    CHECK(res.lambda_star == doctest::Approx(fine).epsilon(5e-4));
    // frozen regression value from the oracle runs above
    CHECK(res.lambda_star == doctest::Approx(1.522016).epsilon(5e-5));
}

TEST_CASE("the universal lower bar Lambda sits below the radial eigenvalue") {
    // consistency of the solution-bracket constant with the blow-up threshold
    for (const auto& op : {kLap, kInf, OperatorSpec::plap_type(2, 1.0, 1.0),
                           OperatorSpec::pucci_plus(2, 1.0, 2.0, 0.0),
                           OperatorSpec::pucci_minus(2, 1.0, 2.0, 0.0)}) {
        const auto bounds = lambda_big_and_solution_bounds(op, 1.0, 1.0, 0.0, 1.0, 1.0);
        const auto res = eigen_radial(op, 1.0, 1e-5);
        INFO(op.name(), " Lambda=", bounds.Lambda, " lambda*=", res.lambda_star);
        CHECK(bounds.Lambda <= res.lambda_star * (1.0 + 1e-9));
    }
}

TEST_CASE("scaling invariant lambda* R^gamma") {
    const auto rep_lap = scaling_invariant_check(kLap, {1.0, 2.0}, 1e-3);
    CHECK(rep_lap.passed);

    const auto rep_inf = scaling_invariant_check(kInf, {0.5, 1.0, 2.0}, 1e-3);
    CHECK(rep_inf.passed);

    // radii that are not power-of-two multiples exercise the law beyond
    // float-exact rescaling of the integrator arithmetic
    const auto rep_odd = scaling_invariant_check(kLap, {0.7, 1.3}, 1e-3);
    CHECK(rep_odd.passed);
    CHECK(rep_odd.products.front() == doctest::Approx(5.783185963).epsilon(1e-5));

    const auto rep_single = scaling_invariant_check(kLap, {1.5}, 1e-3);
    CHECK(rep_single.passed);
    CHECK(rep_single.spread == 0.0);
}
