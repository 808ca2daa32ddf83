#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "promarket/promarket.hpp"

using namespace promarket;

namespace {
const auto kUniform = ValueDistribution::uniform(2.0);
}

TEST_CASE("closed-form social welfare") {
    MarketConfig cfg(2, 0.125, kUniform);
    CHECK(social_welfare_closed_form(cfg).sw ==
          doctest::Approx(2.583333333).epsilon(1e-7));
    // SW(cbar) = E[v]
    MarketConfig near_bar(2, 0.499999, kUniform);
    CHECK(social_welfare_closed_form(near_bar).sw ==
          doctest::Approx(2.5).epsilon(1e-4));
    CHECK_THROWS_AS((void)social_welfare_closed_form(MarketConfig(3, 0.125, kUniform)),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)social_welfare_closed_form(MarketConfig(2, 0.7, kUniform)),
                    std::domain_error);
}

TEST_CASE("Monte Carlo welfare is price-invariant and matches closed form") {
    MarketConfig cfg(2, 0.125, kUniform);
    double closed = social_welfare_closed_form(cfg).sw;
    std::vector<SwResult> runs;
    for (double t : {0.1, 1.0}) {
        SwResult r = social_welfare_mc(cfg, t, 1000000, 2024, 0);
        CHECK(std::abs(r.sw - closed) < 3.0 * r.stderr_);
        runs.push_back(r);
    }
    double se = std::hypot(runs[0].stderr_, runs[1].stderr_);
    CHECK(std::abs(runs[0].sw - runs[1].sw) < 3.0 * se);
}

TEST_CASE("Monte Carlo welfare is worker-independent") {
    MarketConfig cfg(3, 0.2, kUniform);
    SwResult a = social_welfare_mc(cfg, 0.4, 300000, 7, 1);
    SwResult b = social_welfare_mc(cfg, 0.4, 300000, 7, 5);
    CHECK(a.sw == b.sw);
    CHECK(a.stderr_ == b.stderr_);
}

TEST_CASE("consumer surplus") {
    MarketConfig cfg(2, 0.125, kUniform);
    double sw = social_welfare_closed_form(cfg).sw;
    CHECK(consumer_surplus(cfg, 0.0) == doctest::Approx(sw).epsilon(1e-12));
    double ts = t_star(cfg);
    CHECK(consumer_surplus(cfg, ts) == doctest::Approx(sw - ts).epsilon(1e-12));

    // buyer-utility mean equals SW - t at a symmetric always-purchase profile
    double t = 0.5;
    std::vector<double> prices{t, t};
    long long n = 200000;
    double sum = 0.0, sq = 0.0;
    for (long long i = 0; i < n; ++i) {
        CounterRng rng = sample_stream(4242, static_cast<std::uint64_t>(i));
        int prom = static_cast<int>(rng.next_u64() % 2);
        std::vector<double> values{kUniform.sample(rng), kUniform.sample(rng)};
        std::vector<double> costs{0.125, 0.125};
        std::vector<std::uint8_t> known{0, 0};
        costs[prom] = 0.0;
        known[prom] = 1;
        auto out = simulate_search(kUniform, prices, costs, values, known);
        sum += out.buyer_utility;
        sq += out.buyer_utility * out.buyer_utility;
    }
    double mean = sum / n;
    double se = std::sqrt(std::max(sq / n - mean * mean, 0.0) / n);
    CHECK(std::abs(mean - (sw - t)) < 3.0 * se);
}

TEST_CASE("SW is nonincreasing in c") {
    double prev = 1e300;
    for (int i = 0; i < 50; ++i) {
        double c = 0.01 + 0.47 * i / 49.0;
        double sw = social_welfare_closed_form(MarketConfig(2, c, kUniform)).sw;
        CHECK(sw <= prev + 1e-10);
        prev = sw;
    }
}

TEST_CASE("d(SW)/d(theta0) = F (1 - F)") {
    for (double theta : {2.2, 2.5, 2.8}) {
        double h = 1e-5;
        auto sw_at_theta = [&](double th) {
            double c = kUniform.excess(th);
            return social_welfare_closed_form(MarketConfig(2, c, kUniform)).sw;
        };
        double fd = (sw_at_theta(theta + h) - sw_at_theta(theta - h)) / (2.0 * h);
        double F = kUniform.cdf(theta);
        CHECK(fd == doctest::Approx(F * (1.0 - F)).epsilon(1e-6));
    }
}

TEST_CASE("surplus curve") {
    std::vector<double> grid;
    for (int i = 0; i < 50; ++i) grid.push_back(0.02 + 0.46 * i / 49.0);
    auto rows = surplus_curve(kUniform, 2, grid);
    REQUIRE(rows.size() == 50);
    int rising = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].cs_at_tstar ==
              doctest::Approx(rows[i].sw - rows[i].t_star).epsilon(1e-12));
        if (rows[i].cs_at_tstar >= rows[i - 1].cs_at_tstar) ++rising;
    }
    CHECK(rising >= 40);  // frontier rises over most of the grid
    CHECK(rows.back().cs_at_tstar > rows.front().cs_at_tstar);

    auto single = surplus_curve(kUniform, 2, std::vector<double>{0.125});
    REQUIRE(single.size() == 1);
    MarketConfig cfg(2, 0.125, kUniform);
    CHECK(single[0].sw ==
          doctest::Approx(social_welfare_closed_form(cfg).sw).epsilon(1e-12));
    CHECK(single[0].cs_at_tstar ==
          doctest::Approx(consumer_surplus(cfg, single[0].t_star)).epsilon(1e-9));
}

TEST_CASE("surplus condition report") {
    auto uni = surplus_condition(kUniform);
    CHECK(uni.differentiable);
    CHECK(!uni.theorem_condition);
    CHECK(!uni.proof_condition);

    auto k1 = surplus_condition(ValueDistribution::tilted_exponential(1.0));
    CHECK(k1.f_at_V == doctest::Approx(1.0 / std::expm1(1.0)).epsilon(1e-10));
    CHECK(k1.fprime_at_V == doctest::Approx(1.0 / std::expm1(1.0)).epsilon(1e-10));
    CHECK(!k1.proof_condition);

    auto k3 = surplus_condition(ValueDistribution::tilted_exponential(3.0));
    CHECK(k3.proof_condition);  // e^3 > 14

    auto pw = surplus_condition(ValueDistribution::piecewise_linear(
        {{2.0, 0.0}, {2.4, 0.3}, {2.7, 0.8}, {3.0, 1.0}}));
    CHECK(pw.f_at_V == doctest::Approx(0.75).epsilon(1e-4));
    CHECK(std::abs(pw.fprime_at_V) < 1e-3);
}

TEST_CASE("proof condition flips at k = ln 14") {
    double kcrit = std::log(14.0);
    CHECK(!surplus_condition(ValueDistribution::tilted_exponential(kcrit - 0.05))
               .proof_condition);
    CHECK(surplus_condition(ValueDistribution::tilted_exponential(kcrit + 0.05))
              .proof_condition);
}

TEST_CASE("interior optimum flags") {
    // 3-point grid can never be interior
    auto o3 = find_interior_optimum(kUniform, 2,
                                    std::vector<double>{0.1, 0.2, 0.3});
    CHECK(!o3.interior);
}
