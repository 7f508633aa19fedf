#include <catch2/catch.hpp>

#include <cmath>

#include "compoisson/characterizations.hpp"
#include "oracles.hpp"

using namespace compoisson;

TEST_CASE("convolve") {
    SECTION("Poisson closure") {
        const auto z = convolve(poisson_pmf(1.0), poisson_pmf(2.0));
        for (long k = 0; k <= 25; ++k)
            REQUIRE(z.at(k) == Approx(oracle::poisson(3.0, k)).margin(1e-12));
    }
    SECTION("point masses add supports") {
        TruncatedPmf a, b;
        a.support_start = 2;
        a.probs = {1.0};
        b.support_start = 5;
        b.probs = {1.0};
        const auto z = convolve(a, b);
        REQUIRE(z.support_start == 7);
        REQUIRE(z.at(7) == Approx(1.0));
    }
    SECTION("CMP(1,2) self-convolution ratios carry the a_n tilt") {
        const auto x = cmp_pmf(CmpParams(1.0, 2.0));
        const auto z = convolve(x, x);
        REQUIRE(z.at(1) / z.at(0) == Approx(2.0).epsilon(1e-12));
        REQUIRE(z.at(2) / z.at(1) == Approx(0.75).epsilon(1e-12));
    }
    SECTION("commutative and associative on the window") {
        const auto a = cmp_pmf(CmpParams(1.0, 2.0));
        const auto b = geometric_pmf(0.5);
        const auto c = poisson_pmf(0.7);
        const auto ab_c = convolve(convolve(a, b), c);
        const auto a_bc = convolve(a, convolve(b, c));
        const auto ba = convolve(b, a);
        for (long k = 0; k <= 20; ++k) {
            REQUIRE(convolve(a, b).at(k) == Approx(ba.at(k)).margin(1e-13));
            REQUIRE(ab_c.at(k) == Approx(a_bc.at(k)).margin(1e-13));
        }
    }
}

TEST_CASE("conditional_given_sum") {
    SECTION("two CMP marginals give the COM-binomial, across the grid") {
        for (double l1 : {0.5, 1.0, 3.0})
            for (double l2 : {0.5, 1.0, 3.0})
                for (double nu : {0.5, 1.0, 2.0}) {
                    const auto x = cmp_pmf(CmpParams(l1, nu), 25);
                    const auto y = cmp_pmf(CmpParams(l2, nu), 25);
                    for (long s : {1L, 5L, 15L}) {
                        const auto cond = conditional_given_sum(x, y, s);
                        const auto cmb = cmb_pmf(CmbParams(s, l1 / (l1 + l2), nu));
                        for (long k = 0; k <= s; ++k)
                            REQUIRE(cond[static_cast<std::size_t>(k)] ==
                                    Approx(cmb.at(k)).margin(1e-12));
                    }
                }
    }
    SECTION("equal rates make it symmetric") {
        const auto x = cmp_pmf(CmpParams(1.3, 1.7));
        const auto cond = conditional_given_sum(x, x, 9);
        for (long k = 0; k <= 9; ++k)
            REQUIRE(cond[static_cast<std::size_t>(k)] ==
                    Approx(cond[static_cast<std::size_t>(9 - k)]).margin(1e-13));
    }
    SECTION("Poisson marginals give the binomial") {
        const auto x = poisson_pmf(1.0);
        const auto y = poisson_pmf(3.0);
        const auto cond = conditional_given_sum(x, y, 10);
        for (long k = 0; k <= 10; ++k)
            REQUIRE(cond[static_cast<std::size_t>(k)] ==
                    Approx(oracle::binomial(10, 0.25, k)).margin(1e-12));
    }
    SECTION("vanishing sum probability is an error") {
        TruncatedPmf a;
        a.support_start = 0;
        a.probs = {1.0};
        REQUIRE_THROWS_AS(conditional_given_sum(a, a, 3), numeric_error);
    }
}

TEST_CASE("a_sequence") {
    SECTION("hand values at (1,1,nu=2)") {
        const auto a = a_sequence(1.0, 1.0, 2.0, 2);
        REQUIRE(a[0] == 1.0);
        REQUIRE(a[1] == Approx(0.5).epsilon(1e-12));
        REQUIRE(a[2] == Approx(0.375).epsilon(1e-12));
    }
    SECTION("nu = 1 gives all ones") {
        for (double v : a_sequence(0.7, 2.3, 1.0, 20)) REQUIRE(v == Approx(1.0).epsilon(1e-13));
    }
    SECTION("nu = 1/2 at (1,1) starts at sqrt 2") {
        const auto a = a_sequence(1.0, 1.0, 0.5, 1);
        REQUIRE(a[1] == Approx(std::sqrt(2.0)).epsilon(1e-12));
    }
    SECTION("dichotomy: sign of a_n - 1 is the sign of 1 - nu") {
        for (double lx : {0.5, 1.0, 3.0})
            for (double ly : {0.5, 1.0, 3.0})
                for (double nu : {0.5, 1.0, 2.0, 5.0}) {
                    const auto a = a_sequence(lx, ly, nu, 30);
                    REQUIRE(a[0] == 1.0);
                    for (std::size_t n = 1; n < a.size(); ++n) {
                        if (nu < 1.0) REQUIRE(a[n] > 1.0);
                        if (nu > 1.0) REQUIRE(a[n] < 1.0);
                        if (nu == 1.0) REQUIRE(a[n] == Approx(1.0).epsilon(1e-12));
                    }
                }
    }
}

TEST_CASE("closure_test") {
    SECTION("Poisson case never violates") {
        const auto rep = closure_test(1.0, 1.0, 1.0, 20);
        REQUIRE_FALSE(rep.first_violation_n.has_value());
        REQUIRE_FALSE(rep.first_violation_vs_sum.has_value());
        REQUIRE(rep.max_ratio_deviation < 1e-10);
    }
    SECTION("nu = 2 breaks at n = 2 with ratio 0.75 against implied 0.5") {
        const auto rep = closure_test(1.0, 1.0, 2.0, 20);
        REQUIRE(rep.first_violation_n.has_value());
        REQUIRE(*rep.first_violation_n == 2);
        REQUIRE(rep.lambda_hat == Approx(2.0).epsilon(1e-12));
        REQUIRE(rep.max_ratio_deviation > 0.4);
    }
    SECTION("nu = 1/2 breaks at n = 2 as well") {
        const auto rep = closure_test(2.0, 3.0, 0.5, 20);
        REQUIRE(rep.first_violation_n.has_value());
        REQUIRE(*rep.first_violation_n == 2);
    }
    SECTION("closure iff nu = 1 across the dichotomy grid") {
        for (double nu : {0.5, 0.9, 1.0, 1.1, 2.0}) {
            const auto rep = closure_test(1.0, 1.0, nu, 20);
            if (nu == 1.0)
                REQUIRE_FALSE(rep.first_violation_n.has_value());
            else
                REQUIRE(rep.first_violation_n.has_value());
        }
    }
}

TEST_CASE("stein_residual") {
    SECTION("exact CMP input is annihilated") {
        for (double nu : {0.5, 1.0, 2.0}) {
            const auto w = cmp_pmf(CmpParams(1.3, nu));
            REQUIRE(stein_residual(w, 1.3, nu).max_residual < 1e-13);
        }
    }
    SECTION("Poisson(2) against (lambda=2, nu=1)") {
        REQUIRE(stein_residual(poisson_pmf(2.0), 2.0, 1.0).max_residual < 1e-13);
    }
    SECTION("geometric(1/2) against (lambda=1, nu=1) is far off") {
        const auto res = stein_residual(geometric_pmf(0.5), 1.0, 1.0);
        REQUIRE(res.max_residual >= 0.05);
        REQUIRE(res.max_residual == Approx(0.25).epsilon(1e-12));  // |P(0) - 1*P(1)| at j=1
        REQUIRE(res.argmax_j == 1);
    }
}

namespace {

// Independent construction of theta^z N(z, p, nu) / (z!)^nu, the law the
// damage-model lemma singles out (P_z / c_z geometric, c_z = N(z)/(z!)^nu).
TruncatedPmf damage_stable_oracle(double theta, double p, double nu, long zmax) {
    TruncatedPmf out;
    out.support_start = 0;
    out.probs.resize(static_cast<std::size_t>(zmax) + 1);
    double sum = 0.0;
    for (long z = 0; z <= zmax; ++z) {
        double n = 0.0;
        for (long i = 0; i <= z; ++i) {
            const double lb = std::lgamma(z + 1.0) - std::lgamma(i + 1.0) -
                              std::lgamma(z - i + 1.0);
            n += std::exp(nu * lb + i * std::log(p) + (z - i) * std::log1p(-p));
        }
        const double v = std::exp(z * std::log(theta) - nu * std::lgamma(z + 1.0)) * n;
        out.probs[static_cast<std::size_t>(z)] = v;
        sum += v;
    }
    for (auto& v : out.probs) v /= sum;
    return out;
}

}  // namespace

TEST_CASE("rao_rubin_gap") {
    SECTION("Poisson closes the gap at nu = 1 for any damage rate") {
        for (double theta : {0.5, 1.0, 3.0})
            for (double p : {0.3, 0.5}) {
                const auto x = cmp_pmf(CmpParams(theta, 1.0), 50);
                REQUIRE(rao_rubin_gap(x, p, 1.0) < 1e-10);
            }
    }
    SECTION("the lemma's stable law closes the gap at every nu") {
        for (double theta : {0.5, 1.0})
            for (double nu : {0.5, 1.0, 2.0}) {
                const auto x = damage_stable_oracle(theta, 0.5, nu, 60);
                REQUIRE(rao_rubin_gap(x, 0.5, nu) < 1e-12);
                const auto lib = damage_stable_law(theta, 0.5, nu, 60);
                for (long z = 0; z <= 60; ++z)
                    REQUIRE(lib.at(z) == Approx(x.at(z)).margin(1e-13));
            }
    }
    SECTION("cmp inputs with nu != 1 do not close the gap") {
        // the c_z of the CMB damage kernel carries N(z, p, nu), which is
        // constant in z only at nu = 1; away from that the gap is real.
        // Closed form at theta=1, nu=2, p=1/2: the kernel diagonal is
        // 1/binom(2z,z), so P(Y=0) = cosh(1)/I0(2) while
        // P(Y=0 | X=Y) = 1/cosh(1), a gap of 0.0288586.
        const double gap = rao_rubin_gap(cmp_pmf(CmpParams(1.0, 2.0), 40), 0.5, 2.0);
        const double i02 = static_cast<double>(oracle::cmp_z_brute(1.0, 2.0, 60));
        REQUIRE(gap == Approx(std::cosh(1.0) / i02 - 1.0 / std::cosh(1.0)).margin(1e-10));
        REQUIRE(rao_rubin_gap(cmp_pmf(CmpParams(1.0, 0.5), 40), 0.5, 0.5) > 1e-2);
    }
    SECTION("geometric input leaves a visible gap") {
        REQUIRE(rao_rubin_gap(geometric_pmf(0.5), 0.5, 1.0) > 1e-3);
    }
    SECTION("heavy windows are refused") {
        auto x = cmp_pmf(CmpParams(2.0, 1.0), 3);
        REQUIRE_THROWS_AS(rao_rubin_gap(x, 0.5, 1.0), numeric_error);
    }
}

TEST_CASE("tv_distance") {
    SECTION("identical inputs") {
        const auto x = cmp_pmf(CmpParams(1.0, 2.0));
        REQUIRE(tv_distance(x, x).lower == 0.0);
    }
    SECTION("disjoint point masses") {
        TruncatedPmf a, b;
        a.support_start = 0;
        a.probs = {1.0};
        b.support_start = 4;
        b.probs = {1.0};
        REQUIRE(tv_distance(a, b).lower == Approx(1.0));
    }
    SECTION("Poisson(1) vs Poisson(1.1) against the window oracle") {
        const auto a = poisson_pmf(1.0);
        const auto b = poisson_pmf(1.1);
        const auto d = tv_distance(a, b);
        REQUIRE(d.lower == Approx(oracle::tv(a.probs, 0, b.probs, 0)).margin(1e-12));
        REQUIRE(d.lower == Approx(0.036730).margin(1e-4));
        REQUIRE(d.upper >= d.lower);
    }
}

TEST_CASE("limit theorems") {
    SECTION("cmb curve decreases and lands under 0.01 at nu = 1") {
        const auto curve = limit_cmb_to_cmp(2.0, 1.0, {10, 100, 1000});
        REQUIRE(curve.tv[0] > curve.tv[1]);
        REQUIRE(curve.tv[1] > curve.tv[2]);
        REQUIRE(curve.tv[2] < 0.01);
    }
    SECTION("cmb curve decreases at nu = 2") {
        const auto curve = limit_cmb_to_cmp(1.0, 2.0, {10, 100, 1000});
        REQUIRE(curve.tv[0] > curve.tv[1]);
        REQUIRE(curve.tv[1] > curve.tv[2]);
    }
    SECTION("fixed m^nu p = lambda at m = 1e4 sits under 1e-3") {
        const auto curve = limit_cmb_to_cmp(2.0, 1.0, {10000});
        REQUIRE(curve.tv[0] < 1e-3);
    }
    SECTION("cmnb curve decreases and lands under 0.01 at nu = 1") {
        const auto curve = limit_cmnb_to_cmp(2.0, 1.0, {5.0, 50.0, 500.0});
        REQUIRE(curve.tv[0] > curve.tv[1]);
        REQUIRE(curve.tv[1] > curve.tv[2]);
        REQUIRE(curve.tv[2] < 0.01);
    }
    SECTION("cmnb curve decreases at nu = 2") {
        const auto curve = limit_cmnb_to_cmp(1.0, 2.0, {5.0, 50.0, 500.0});
        REQUIRE(curve.tv[0] > curve.tv[1]);
        REQUIRE(curve.tv[1] > curve.tv[2]);
    }
    SECTION("cmnb at r = 1e4, nu = 1 sits under 1e-3") {
        const auto curve = limit_cmnb_to_cmp(2.0, 1.0, {10000.0});
        REQUIRE(curve.tv[0] < 1e-3);
    }
    SECTION("grid preconditions") {
        REQUIRE_THROWS_AS(limit_cmb_to_cmp(2.0, 1.0, {1}), std::invalid_argument);
        REQUIRE_THROWS_AS(limit_cmnb_to_cmp(2.0, 1.0, {50.0, 5.0}), std::invalid_argument);
    }
}
