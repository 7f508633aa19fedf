#include <catch2/catch.hpp>

#include <cmath>

#include "compoisson/queue_sim.hpp"
#include "oracles.hpp"

using namespace compoisson;

TEST_CASE("queue_exact_steady_state") {
    SECTION("M/M/inf at nu = 1 is Poisson(arrival/service)") {
        const auto eq = queue_exact_steady_state(2.0, 1.0, 1.0);
        for (long k = 0; k <= eq.support_end(); ++k)
            REQUIRE(eq.at(k) == Approx(oracle::poisson(2.0, k)).margin(1e-13));
    }
    SECTION("balance recursion lands on the cmp law across parameters") {
        const struct {
            double arrival, service, nu;
        } grid[] = {{2.0, 1.0, 1.0}, {2.0, 1.0, 2.0}, {1.0, 2.0, 0.5},
                    {3.0, 2.0, 1.5}, {0.5, 1.0, 0.7}, {4.0, 1.0, 3.0},
                    {1.0, 1.0, 1.0}, {2.5, 0.5, 2.0}, {0.8, 0.4, 0.5}};
        for (const auto& g : grid) {
            const auto eq = queue_exact_steady_state(g.arrival, g.service, g.nu);
            const auto cmp = cmp_pmf(CmpParams(g.arrival / g.service, g.nu));
            for (long k = 0; k <= std::min(eq.support_end(), cmp.support_end()); ++k)
                REQUIRE(eq.at(k) == Approx(cmp.at(k)).margin(1e-12));
        }
    }
    SECTION("window bookkeeping") {
        const auto eq = queue_exact_steady_state(2.0, 1.0, 2.0);
        REQUIRE(eq.mass() + eq.tail_bound == Approx(1.0).margin(1e-11));
    }
}

TEST_CASE("queue_simulate") {
    SECTION("fixed seed reproduces the estimate") {
        const auto cfg = QueueConfig::make(2.0, 1.0, 2.0, 2000.0, 11);
        const auto a = queue_simulate(cfg);
        const auto b = queue_simulate(cfg);
        REQUIRE(a.transitions == b.transitions);
        REQUIRE(a.occupancy.probs == b.occupancy.probs);
        REQUIRE(a.tv_to_cmp.upper == b.tv_to_cmp.upper);
    }
    SECTION("equilibrium reached for (2,1,1) by horizon 1e5") {
        const auto est = queue_simulate(QueueConfig::make(2.0, 1.0, 1.0, 1e5, 31));
        REQUIRE(est.tv_to_cmp.upper < 0.02);
        REQUIRE(est.cap_hits * 1000 < est.transitions);
    }
    SECTION("equilibrium reached for (2,1,2) by horizon 1e5") {
        const auto est = queue_simulate(QueueConfig::make(2.0, 1.0, 2.0, 1e5, 32));
        REQUIRE(est.tv_to_cmp.upper < 0.02);
    }
    SECTION("tv shrinks as the horizon grows, majority over seeds") {
        int improved = 0;
        for (std::uint64_t seed : {101, 102, 103}) {
            const auto small = queue_simulate(QueueConfig::make(2.0, 1.0, 2.0, 1e4, seed));
            const auto big = queue_simulate(QueueConfig::make(2.0, 1.0, 2.0, 1e6, seed));
            if (big.tv_to_cmp.upper < small.tv_to_cmp.upper) ++improved;
        }
        REQUIRE(improved >= 2);
    }
    SECTION("empirical detailed balance holds to sampling accuracy") {
        const auto est = queue_simulate(QueueConfig::make(2.0, 1.0, 2.0, 1e5, 33));
        for (std::size_t s = 0; s < est.balance_residual.size(); ++s) {
            const double flux = 2.0 * est.occupancy.probs[s];
            if (flux > 1e-3) REQUIRE(est.balance_residual[s] / flux < 0.2);
        }
    }
    SECTION("config invariants") {
        auto cfg = QueueConfig::make(2.0, 1.0, 1.0, 100.0, 1);
        cfg.burn_in = 200.0;
        REQUIRE_THROWS_AS(queue_simulate(cfg), std::invalid_argument);
    }
}
