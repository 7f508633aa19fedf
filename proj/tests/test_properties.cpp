#include <catch2/catch.hpp>

#include <cmath>

#include "compoisson/characterizations.hpp"
#include "compoisson/com_transform.hpp"
#include "compoisson/entropy_info.hpp"
#include "oracles.hpp"

// Property-style sweeps: hand-rolled generators over the parameter spaces,
// seeded so failures replay.

using namespace compoisson;

namespace {

struct Gen {
    Rng rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    double uniform(double lo, double hi) { return lo + (hi - lo) * rng.uniform01(); }

    TruncatedPmf random_family_pmf() {
        switch (rng.next() % 4) {
            case 0: return cmp_pmf(CmpParams(uniform(0.2, 4.0), uniform(0.4, 3.0)));
            case 1: return geometric_pmf(uniform(0.15, 0.85));
            case 2: return poisson_pmf(uniform(0.3, 5.0));
            default: return cmnb_pmf(CmnbParams(uniform(0.5, 4.0), uniform(0.5, 2.5), uniform(0.1, 0.6)));
        }
    }
};

}  // namespace

TEST_CASE("property: every built pmf is normalized with a certified tail") {
    Gen gen(101);
    for (int trial = 0; trial < 60; ++trial) {
        const auto pmf = gen.random_family_pmf();
        REQUIRE_NOTHROW(validate_pmf(pmf, std::max(pmf.meta.tol, 1e-12)));
        REQUIRE(pmf.mass() + pmf.tail_bound == Approx(1.0).margin(1e-10));
    }
}

TEST_CASE("property: ecomp boundary alpha = beta stays normalized") {
    Gen gen(102);
    for (int trial = 0; trial < 20; ++trial) {
        const double b = gen.uniform(0.3, 2.0);
        const EcompParams ps(gen.uniform(0.3, 3.0), gen.uniform(0.1, 0.9), b, b);
        const auto pmf = ecomp_pmf(ps, 1e-10);
        REQUIRE(pmf.mass() + pmf.tail_bound == Approx(1.0).margin(1e-9));
        // consecutive ratio matches (r+k)^beta theta / (k+1)^alpha
        for (long k = 1; k <= std::min<long>(6, pmf.support_end()); ++k) {
            const double expect = std::pow(ps.r + static_cast<double>(k) - 1.0, ps.beta) *
                                  ps.theta / std::pow(static_cast<double>(k), ps.alpha);
            REQUIRE(pmf.at(k) / pmf.at(k - 1) == Approx(expect).epsilon(1e-11));
        }
    }
}

TEST_CASE("property: transform involution on random parameters") {
    Gen gen(103);
    for (int trial = 0; trial < 25; ++trial) {
        const auto pmf = gen.random_family_pmf();
        const double nu = gen.uniform(0.6, 2.8);
        const auto fwd = com_type(pmf, nu, nu < 1.0 ? 1e-4 : 1e-10);
        const auto back = com_type(fwd.pmf, 1.0 / nu, 1e-4);
        for (long x = pmf.support_start; x <= pmf.support_end(); ++x)
            REQUIRE(back.pmf.at(x) == Approx(pmf.at(x)).margin(1e-10));
    }
}

TEST_CASE("property: convolution is commutative on random pairs") {
    Gen gen(104);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = gen.random_family_pmf();
        const auto b = gen.random_family_pmf();
        const auto ab = convolve(a, b);
        const auto ba = convolve(b, a);
        REQUIRE(ab.support_start == ba.support_start);
        for (long k = ab.support_start; k <= ab.support_end(); ++k)
            REQUIRE(ab.at(k) == Approx(ba.at(k)).margin(1e-13));
    }
}

TEST_CASE("property: conditional of equal rates is palindromic") {
    Gen gen(105);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = cmp_pmf(CmpParams(gen.uniform(0.3, 3.0), gen.uniform(0.4, 2.5)), 25);
        const long s = 2 + static_cast<long>(gen.rng.next() % 14);
        const auto cond = conditional_given_sum(x, x, s);
        for (long k = 0; k <= s; ++k)
            REQUIRE(cond[static_cast<std::size_t>(k)] ==
                    Approx(cond[static_cast<std::size_t>(s - k)]).margin(1e-12));
    }
}

TEST_CASE("property: a-sequence dichotomy on random parameters") {
    Gen gen(106);
    for (int trial = 0; trial < 30; ++trial) {
        const double lx = gen.uniform(0.2, 4.0);
        const double ly = gen.uniform(0.2, 4.0);
        const double nu = gen.uniform(0.3, 4.0);
        const auto a = a_sequence(lx, ly, nu, 25);
        REQUIRE(a[0] == 1.0);
        for (std::size_t n = 1; n < a.size(); ++n) {
            if (nu < 1.0) REQUIRE(a[n] > 1.0);
            if (nu > 1.0) REQUIRE(a[n] < 1.0);
        }
    }
}

TEST_CASE("property: stam gap is never meaningfully negative at nu = 1") {
    Gen gen(107);
    for (int trial = 0; trial < 25; ++trial) {
        const auto a = gen.random_family_pmf();
        const auto b = gen.random_family_pmf();
        REQUIRE(stam_gap(a, b, 1.0).gap > -1e-8);
    }
}

TEST_CASE("property: stein residual vanishes exactly on the family it names") {
    Gen gen(108);
    for (int trial = 0; trial < 25; ++trial) {
        const double lam = gen.uniform(0.3, 3.5);
        const double nu = gen.uniform(0.4, 2.8);
        REQUIRE(stein_residual(cmp_pmf(CmpParams(lam, nu)), lam, nu).max_residual < 1e-13);
        // perturbing lambda by 10% must be visible
        REQUIRE(stein_residual(cmp_pmf(CmpParams(lam, nu)), lam * 1.1, nu).max_residual > 1e-3);
    }
}

TEST_CASE("property: sampling round-trips the law in total variation") {
    Gen gen(109);
    for (int trial = 0; trial < 3; ++trial) {
        const auto pmf = gen.random_family_pmf();
        const auto draws = sample(pmf, 400000, 1000 + trial);
        const auto emp = empirical_pmf(draws, 1000 + trial);
        REQUIRE(oracle::tv(emp.probs, emp.support_start, pmf.probs, pmf.support_start) < 0.01);
    }
}
