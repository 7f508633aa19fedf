#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "compoisson/characterizations.hpp"
#include "compoisson/distributions.hpp"
#include "compoisson/errors.hpp"
#include "compoisson/pmf.hpp"
#include "compoisson/rng.hpp"

namespace compoisson {

// Birth-death queue with Poisson arrivals at rate `arrival` and
// state-dependent service rate `service * n^nu`.
struct QueueConfig {
    double arrival = 1.0;
    double service = 1.0;
    double nu = 1.0;
    double horizon = 1e5;
    double burn_in = 1e3;  // horizon/100 by default
    std::uint64_t seed = 0;
    long state_cap = 10;

    static QueueConfig make(double arrival, double service, double nu, double horizon,
                            std::uint64_t seed);
};

// Equilibrium occupancy from the balance equations
//   0 = -(arrival + service n^nu) P_n + arrival P_{n-1} + service (n+1)^nu P_{n+1},
// run as the three-term forward recursion and normalized.
inline TruncatedPmf queue_exact_steady_state(double arrival, double service, double nu,
                                             double tol = kDefaultTol) {
    require_arg(arrival > 0.0 && service > 0.0, "arrival, service > 0");
    require_arg(nu > 0.0, "nu > 0");
    const double rho = arrival / service;

    std::vector<double> p = {1.0, rho};  // P_1 = (arrival/service) P_0 boundary equation
    KahanSum sum;
    sum.add(1.0);
    sum.add(rho);
    const long cap = 2'000'000;
    double residual = 0.0;
    for (long n = 1;; ++n) {
        const double npow = std::pow(static_cast<double>(n), nu);
        const double next = ((rho + npow) * p[static_cast<std::size_t>(n)] -
                             rho * p[static_cast<std::size_t>(n) - 1]) /
                            std::pow(static_cast<double>(n) + 1.0, nu);
        p.push_back(std::max(next, 0.0));
        sum.add(p.back());
        // term ratio beyond state n+1 is bounded by rho/(n+2)^nu, decreasing
        const double r = rho / std::pow(static_cast<double>(n) + 2.0, nu);
        if (r < 1.0) {
            residual = p.back() * r / (1.0 - r);
            if (residual <= detail::floor_tol(tol) * sum.value()) break;
        }
        if (n >= cap)
            throw_numeric(errkind::overflow, "queue steady state did not converge by the term cap");
    }

    const long n_states = static_cast<long>(p.size());
    std::vector<double> suffix(static_cast<std::size_t>(n_states) + 1, 0.0);
    {
        KahanSum acc;
        acc.add(residual);
        suffix[static_cast<std::size_t>(n_states)] = residual;
        for (long i = n_states - 1; i >= 0; --i) {
            suffix[static_cast<std::size_t>(i)] = acc.value();
            acc.add(p[static_cast<std::size_t>(i)]);
        }
    }
    const double total = sum.value();
    long end = 1;
    while (end < n_states - 1 && suffix[static_cast<std::size_t>(end)] > tol * total) ++end;

    TruncatedPmf out;
    out.support_start = 0;
    out.probs.resize(static_cast<std::size_t>(end) + 1);
    for (long i = 0; i <= end; ++i) out.probs[static_cast<std::size_t>(i)] = p[static_cast<std::size_t>(i)] / total;
    out.tail_bound = suffix[static_cast<std::size_t>(end)] / total;
    const double r_end = rho / std::pow(static_cast<double>(end) + 1.0, nu);
    if (out.tail_bound > 0.0 && r_end < 1.0) {
        out.tail.kind = TailKind::geometric;
        out.tail.a = (end + 1 < n_states ? p[static_cast<std::size_t>(end) + 1] / total
                                         : out.probs.back() * r_end);
        out.tail.s = r_end;
    }
    out.meta.family = "queue-exact";
    out.meta.params = {{"arrival", arrival}, {"service", service}, {"nu", nu}};
    out.meta.tol = tol;
    return out;
}

inline QueueConfig QueueConfig::make(double arrival, double service, double nu, double horizon,
                                     std::uint64_t seed) {
    QueueConfig cfg;
    cfg.arrival = arrival;
    cfg.service = service;
    cfg.nu = nu;
    cfg.horizon = horizon;
    cfg.burn_in = horizon / 100.0;
    cfg.seed = seed;
    const TruncatedPmf exact = queue_exact_steady_state(arrival, service, nu, 1e-12);
    cfg.state_cap = std::max<long>(10, 4 * exact.support_end());
    return cfg;
}

struct SteadyStateEstimate {
    TruncatedPmf occupancy;  // time-weighted over [burn_in, horizon]
    long transitions = 0;
    TvInterval tv_to_cmp;
    long cap_hits = 0;
    bool saturated = false;  // cap reached on more than 0.1% of transitions
    std::vector<double> balance_residual;  // |up-flux - down-flux| per state
    std::uint64_t seed = 0;
};

// Exact-event continuous-time simulation: exponential holding times with
// total rate arrival + service n^nu, upward jump with probability
// arrival/total. Deterministic for a fixed seed.
inline SteadyStateEstimate queue_simulate(const QueueConfig& cfg) {
    require_arg(cfg.horizon > cfg.burn_in && cfg.burn_in >= 0.0, "horizon > burn_in >= 0");
    require_arg(cfg.state_cap >= 10, "state_cap >= 10");
    require_arg(cfg.arrival > 0.0 && cfg.service > 0.0 && cfg.nu > 0.0,
                "arrival, service, nu > 0");

    Rng rng(cfg.seed);
    std::vector<double> dwell(static_cast<std::size_t>(cfg.state_cap) + 1, 0.0);
    double t = 0.0;
    long state = 0;
    long transitions = 0, cap_hits = 0;

    while (t < cfg.horizon) {
        const double down = (state > 0)
                                ? cfg.service * std::pow(static_cast<double>(state), cfg.nu)
                                : 0.0;
        const double total = cfg.arrival + down;
        const double hold = -std::log1p(-rng.uniform01()) / total;
        const double t_next = t + hold;
        const double a = std::max(t, cfg.burn_in);
        const double b = std::min(t_next, cfg.horizon);
        if (b > a) dwell[static_cast<std::size_t>(state)] += b - a;
        t = t_next;
        if (t >= cfg.horizon) break;

        ++transitions;
        if (rng.uniform01() * total < cfg.arrival) {
            if (state >= cfg.state_cap) {
                ++cap_hits;
            } else {
                ++state;
            }
        } else {
            --state;
        }
    }

    SteadyStateEstimate est;
    est.seed = cfg.seed;
    est.transitions = transitions;
    est.cap_hits = cap_hits;
    est.saturated = cap_hits * 1000 > transitions;

    long top = static_cast<long>(dwell.size()) - 1;
    while (top > 0 && dwell[static_cast<std::size_t>(top)] == 0.0) --top;
    KahanSum mass;
    for (long i = 0; i <= top; ++i) mass.add(dwell[static_cast<std::size_t>(i)]);
    est.occupancy.support_start = 0;
    est.occupancy.probs.resize(static_cast<std::size_t>(top) + 1);
    for (long i = 0; i <= top; ++i)
        est.occupancy.probs[static_cast<std::size_t>(i)] =
            dwell[static_cast<std::size_t>(i)] / mass.value();
    est.occupancy.meta.family = "queue-empirical";
    est.occupancy.meta.params = {{"arrival", cfg.arrival}, {"service", cfg.service}, {"nu", cfg.nu}};
    est.occupancy.meta.seed = static_cast<std::int64_t>(cfg.seed);

    const TruncatedPmf exact =
        queue_exact_steady_state(cfg.arrival, cfg.service, cfg.nu, 1e-12);
    est.tv_to_cmp = tv_distance(est.occupancy, exact);

    est.balance_residual.resize(static_cast<std::size_t>(top), 0.0);
    for (long s = 0; s < top; ++s) {
        const double up_flux = cfg.arrival * est.occupancy.probs[static_cast<std::size_t>(s)];
        const double down_flux = cfg.service * std::pow(static_cast<double>(s) + 1.0, cfg.nu) *
                                 est.occupancy.probs[static_cast<std::size_t>(s) + 1];
        est.balance_residual[static_cast<std::size_t>(s)] = std::abs(up_flux - down_flux);
    }
    return est;
}

}  // namespace compoisson
