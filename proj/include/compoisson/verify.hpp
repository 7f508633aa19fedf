#pragma once

// The `verify` suite: every characterization in the library exercised as a
// tolerance-checked statistic. Deterministic for a fixed seed.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "compoisson/characterizations.hpp"
#include "compoisson/com_transform.hpp"
#include "compoisson/distributions.hpp"
#include "compoisson/dpcp.hpp"
#include "compoisson/entropy_info.hpp"
#include "compoisson/json_io.hpp"
#include "compoisson/queue_sim.hpp"
#include "compoisson/version.hpp"

namespace compoisson {

struct VerifyCheck {
    std::string name;
    bool pass = false;
    double statistic = 0.0;
    double tolerance = 0.0;
    json params = json::object();
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    bool overall = true;
    std::string version = kVersion;
    std::uint64_t seed = 0;
};

namespace detail {

inline VerifyCheck below(std::string name, double statistic, double tolerance, json params = {}) {
    VerifyCheck c;
    c.name = std::move(name);
    c.statistic = statistic;
    c.tolerance = tolerance;
    c.pass = statistic < tolerance;
    c.params = std::move(params);
    c.params["direction"] = "<";
    return c;
}

inline VerifyCheck above(std::string name, double statistic, double tolerance, json params = {}) {
    VerifyCheck c;
    c.name = std::move(name);
    c.statistic = statistic;
    c.tolerance = tolerance;
    c.pass = statistic > tolerance;
    c.params = std::move(params);
    c.params["direction"] = ">";
    return c;
}

}  // namespace detail

inline std::vector<VerifyCheck> run_verify_checks(std::uint64_t seed) {
    using detail::above;
    using detail::below;
    std::vector<VerifyCheck> out;

    {  // normalizer against the brute series and the closed form
        long double brute = 0.0L;
        for (int i = 0; i <= 200; ++i) brute += std::exp(-2.0L * std::lgamma(i + 1.0L));
        const double z12 = normalizer_series(CmpParams(1.0, 2.0), 1e-12).value;
        out.push_back(below("normalizer-brute",
                            std::abs(z12 - static_cast<double>(brute)) / static_cast<double>(brute),
                            1e-10, {{"lambda", 1.0}, {"nu", 2.0}}));
        double worst = 0.0;
        for (double lam : {0.5, 2.0, 10.0})
            worst = std::max(worst, std::abs(normalizer_series(CmpParams(lam, 1.0)).value -
                                             std::exp(lam)) /
                                        std::exp(lam));
        out.push_back(below("normalizer-exp", worst, 1e-12));
    }

    {  // recurrence law on seeded random parameters
        Rng rng(seed ^ 0x1b873593ULL);
        double worst = 0.0;
        for (int t = 0; t < 20; ++t) {
            const double lam = 0.2 + 5.0 * rng.uniform01();
            const double nu = 0.3 + 3.0 * rng.uniform01();
            const auto pmf = cmp_pmf(CmpParams(lam, nu));
            for (long k = 1; k <= pmf.support_end(); ++k) {
                const double prev = pmf.at(k - 1);
                if (prev <= 0.0) continue;
                const double dev =
                    std::abs(pmf.at(k) * std::pow(static_cast<double>(k), nu) - lam * prev) /
                    (lam * prev);
                worst = std::max(worst, dev);
            }
        }
        out.push_back(below("recurrence", worst, 1e-12, {{"trials", 20}}));
    }

    {  // conditional-given-sum vs COM-binomial
        double worst = 0.0;
        for (double l1 : {0.5, 1.0, 3.0})
            for (double l2 : {0.5, 1.0, 3.0})
                for (double nu : {0.5, 1.0, 2.0}) {
                    const auto x = cmp_pmf(CmpParams(l1, nu), 25);
                    const auto y = cmp_pmf(CmpParams(l2, nu), 25);
                    for (long s : {5L, 15L}) {
                        const auto cond = conditional_given_sum(x, y, s);
                        const auto ref = cmb_pmf(CmbParams(s, l1 / (l1 + l2), nu));
                        for (long k = 0; k <= s; ++k)
                            worst = std::max(
                                worst, std::abs(cond[static_cast<std::size_t>(k)] - ref.at(k)));
                    }
                }
        out.push_back(below("conditional-cmb", worst, 1e-12));
    }

    {  // damage model: Poisson forward direction, stable family, geometric gap
        double worst = 0.0;
        for (double theta : {0.5, 1.0, 3.0})
            for (double p : {0.3, 0.5})
                worst = std::max(worst, rao_rubin_gap(cmp_pmf(CmpParams(theta, 1.0), 50), p, 1.0));
        out.push_back(below("rao-rubin-poisson", worst, 1e-10));

        worst = 0.0;
        for (double theta : {0.5, 1.0})
            for (double nu : {0.5, 1.0, 2.0})
                worst = std::max(worst, rao_rubin_gap(damage_stable_law(theta, 0.5, nu, 60), 0.5, nu));
        out.push_back(below("rao-rubin-stable-law", worst, 1e-10));

        out.push_back(above("rao-rubin-geometric",
                            rao_rubin_gap(geometric_pmf(0.5), 0.5, 1.0), 1e-3,
                            {{"p", 0.5}, {"nu", 1.0}}));
    }

    {  // Stam: oracle information, equality family, strictness off it
        out.push_back(below("stam-poisson-oracle",
                            std::abs(score_and_fisher(poisson_pmf(2.0, kDefaultTol, 60)).fisher_info - 0.5),
                            1e-10, {{"lambda", 2.0}}));
        double worst = std::abs(stam_gap(poisson_pmf(1.0, kDefaultTol, 60),
                                         poisson_pmf(2.0, kDefaultTol, 60), 1.0)
                                    .gap);
        {
            const auto x2 = cmp_pmf(CmpParams(1.0, 2.0), 80);
            worst = std::max(worst, std::abs(stam_gap(x2, x2, 2.0).gap));
            const auto xh = cmp_pmf(CmpParams(1.0, 0.5), 80);
            const auto yh = cmp_pmf(CmpParams(std::sqrt(2.0), 0.5), 80);
            worst = std::max(worst, std::abs(stam_gap(xh, yh, 0.5).gap));
        }
        out.push_back(below("stam-equality", worst, 1e-8));
        const auto g = geometric_pmf(0.5);
        out.push_back(above("stam-geometric-gap", stam_gap(g, g, 1.0).gap, 1e-4));
    }

    {  // closure dichotomy and the hand values of the a-sequence
        long misbehaved = 0;
        for (double nu : {0.5, 0.9, 1.0, 1.1, 2.0}) {
            const auto rep = closure_test(1.0, 1.0, nu, 20, 1e-6);
            const bool closed = !rep.first_violation_n.has_value();
            if (closed != (nu == 1.0)) ++misbehaved;
        }
        out.push_back(below("closure-dichotomy", static_cast<double>(misbehaved), 0.5,
                            {{"grid", {0.5, 0.9, 1.0, 1.1, 2.0}}}));
        const auto a = a_sequence(1.0, 1.0, 2.0, 2);
        out.push_back(below("closure-hand-values",
                            std::max(std::abs(a[1] - 0.5), std::abs(a[2] - 0.375)), 1e-12));
    }

    {  // Stein identity
        double worst = 0.0;
        for (double nu : {0.5, 1.0, 2.0})
            worst = std::max(worst, stein_residual(cmp_pmf(CmpParams(1.3, nu)), 1.3, nu).max_residual);
        out.push_back(below("stein-cmp", worst, 1e-13));
        out.push_back(above("stein-geometric",
                            stein_residual(geometric_pmf(0.5), 1.0, 1.0).max_residual, 0.05));
    }

    {  // DPCP recovery, reconstruction, screening
        double worst = 0.0;
        for (double lam : {0.3, 0.8, 1.0})
            for (double nu : {0.5, 1.0, 2.0}) {
                const auto pmf = cmp_pmf(CmpParams(lam, nu), 60);
                const auto back = dpcp_reconstruct(dpcp_recover(pmf, 40), 25);
                for (long k = 0; k <= 25; ++k)
                    worst = std::max(worst, std::abs(back.at(k) - pmf.at(k)));
            }
        out.push_back(below("dpcp-roundtrip", worst, 1e-10));

        const auto params = dpcp_recover(cmp_pmf(CmpParams(0.8, 2.0), 70), 50);
        out.push_back(below("dpcp-weight-sum", std::abs(params.alpha_sum() - 1.0), 1e-6,
                            {{"lambda", 0.8}, {"nu", 2.0}, {"terms", 50}}));

        const auto pp = dpcp_recover(poisson_pmf(2.0, kDefaultTol, 40), 20);
        double pdev = std::max(std::abs(pp.lambda_tilde - 2.0), std::abs(pp.alphas[0] - 1.0));
        for (std::size_t k = 1; k < pp.alphas.size(); ++k)
            pdev = std::max(pdev, std::abs(pp.alphas[k]));
        out.push_back(below("dpcp-poisson", pdev, 1e-12));

        const auto bern = pgf_min_modulus(cmp_pmf(CmpParams(2.0, 1e6)), 256, 256);
        out.push_back(below("dpcp-bernoulli-zero", bern.min_mod, 0.01,
                            {{"argmin_re", bern.argmin.real()}, {"argmin_im", bern.argmin.imag()}}));
        double zf = std::numeric_limits<double>::infinity();
        for (double nu : {0.5, 1.0, 2.0, 5.0})
            zf = std::min(zf, pgf_min_modulus(cmp_pmf(CmpParams(1.0, nu)), 64, 64).min_mod);
        out.push_back(above("dpcp-zero-free", zf, 0.01, {{"lambda", 1.0}}));
    }

    {  // limit theorems
        const auto c1 = limit_cmb_to_cmp(2.0, 1.0, {10, 100, 1000});
        const auto c2 = limit_cmb_to_cmp(1.0, 2.0, {10, 100, 1000});
        const bool mono = c1.tv[0] > c1.tv[1] && c1.tv[1] > c1.tv[2] && c2.tv[0] > c2.tv[1] &&
                          c2.tv[1] > c2.tv[2];
        VerifyCheck c = below("limit-cmb", c1.tv[2], 0.01, {{"monotone", mono}});
        c.pass = c.pass && mono;
        out.push_back(c);
        const auto n1 = limit_cmnb_to_cmp(2.0, 1.0, {5.0, 50.0, 500.0});
        const auto n2 = limit_cmnb_to_cmp(1.0, 2.0, {5.0, 50.0, 500.0});
        const bool mono2 = n1.tv[0] > n1.tv[1] && n1.tv[1] > n1.tv[2] && n2.tv[0] > n2.tv[1] &&
                           n2.tv[1] > n2.tv[2];
        VerifyCheck c2n = below("limit-cmnb", n1.tv[2], 0.01, {{"monotone", mono2}});
        c2n.pass = c2n.pass && mono2;
        out.push_back(c2n);
    }

    {  // queue equilibrium: balance recursion vs cmp, then the simulator
        double worst = 0.0;
        const struct {
            double a, s, nu;
        } grid[] = {{2, 1, 1}, {2, 1, 2}, {1, 2, 0.5}, {3, 2, 1.5}, {0.5, 1, 0.7},
                    {4, 1, 3},  {1, 1, 1}, {2.5, 0.5, 2}, {0.8, 0.4, 0.5}};
        for (const auto& g : grid) {
            const auto eq = queue_exact_steady_state(g.a, g.s, g.nu);
            const auto ref = cmp_pmf(CmpParams(g.a / g.s, g.nu));
            for (long k = 0; k <= std::min(eq.support_end(), ref.support_end()); ++k)
                worst = std::max(worst, std::abs(eq.at(k) - ref.at(k)));
        }
        out.push_back(below("queue-exact", worst, 1e-12, {{"triples", 9}}));

        double tv_worst = 0.0;
        for (double nu : {1.0, 2.0}) {
            const auto est = queue_simulate(QueueConfig::make(2.0, 1.0, nu, 1e5, seed ^ 77));
            tv_worst = std::max(tv_worst, est.tv_to_cmp.upper);
        }
        out.push_back(below("queue-sim", tv_worst, 0.02, {{"horizon", 1e5}}));
    }

    {  // entropy identities against the transform normalizer
        double worst_r = 0.0, worst_t = 0.0;
        const auto probe = [&](const TruncatedPmf& pmf, double alpha, double tol_fwd) {
            const auto t = com_type(pmf, alpha, tol_fwd);
            worst_r = std::max(worst_r,
                               std::abs(t.log_norm_const - (alpha - 1.0) * renyi_entropy(pmf, alpha)));
            worst_t = std::max(
                worst_t, std::abs(std::exp(t.log_norm_const) -
                                  1.0 / (1.0 + (1.0 - alpha) * tsallis_entropy(pmf, alpha))));
        };
        for (double alpha : {0.5, 2.0, 3.0}) {
            probe(cmp_pmf(CmpParams(1.0, 2.0), 80), alpha, 1e-12);
            probe(cmp_pmf(CmpParams(3.0, 0.6), 120), alpha, 1e-12);
            probe(geometric_pmf(0.5, kDefaultTol, 200), alpha, 1e-12);
            probe(power_series_pmf(zeta_series(3.0), 1e-9), alpha, alpha < 1.0 ? 1e-3 : 1e-12);
        }
        out.push_back(below("entropy-renyi", worst_r, 1e-10));
        out.push_back(below("entropy-tsallis", worst_t, 1e-10));
    }

    {  // mean approximation
        double worst = 0.0, exact1 = 0.0;
        for (double lam : {4.0, 10.0, 50.0}) {
            for (double nu : {1.0, 2.0}) {
                const auto m = cmp_moments(CmpParams(lam, nu));
                worst = std::max(worst, std::abs(m.mean - m.mean_approx));
                if (nu == 1.0) exact1 = std::max(exact1, std::abs(m.mean - m.mean_approx));
            }
        }
        out.push_back(below("mean-approx", worst, 0.1));
        out.push_back(below("mean-exact-poisson", exact1, 1e-10));
    }

    return out;
}

inline VerifyReport run_verify(const std::string& target, std::uint64_t seed) {
    VerifyReport rep;
    rep.seed = seed;
    const auto all = run_verify_checks(seed);
    for (const auto& c : all) {
        if (target != "all" && c.name.rfind(target, 0) != 0) continue;
        rep.checks.push_back(c);
        rep.overall = rep.overall && c.pass;
    }
    if (rep.checks.empty()) throw std::invalid_argument("unknown verify target: " + target);
    return rep;
}

inline json to_json(const VerifyCheck& c) {
    json out;
    out["check"] = c.name;
    out["pass"] = c.pass;
    out["statistic"] = c.statistic;
    out["tolerance"] = c.tolerance;
    out["params"] = c.params;
    return out;
}

inline json to_json(const VerifyReport& rep) {
    json out;
    json checks = json::array();
    for (const auto& c : rep.checks) checks.push_back(to_json(c));
    out["checks"] = checks;
    out["overall"] = rep.overall;
    out["version"] = rep.version;
    out["seed"] = rep.seed;
    return out;
}

}  // namespace compoisson
