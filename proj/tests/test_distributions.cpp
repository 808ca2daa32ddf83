#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "promarket/promarket.hpp"

using namespace promarket;

// fixed-mesh Simpson split at the density's kink points (and extra cuts)
template <class F>
static double quad_split(const ValueDistribution& d, F&& f,
                         std::vector<double> cuts = {}) {
    for (const auto& kn : d.knots()) cuts.push_back(kn.first);
    cuts.push_back(d.lower());
    cuts.push_back(d.upper());
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double a = std::max(cuts[i], d.lower());
        double b = std::min(cuts[i + 1], d.upper());
        // inset so one-sided kink evaluations stay inside their segment
        if (b - a > 1e-9)
            total += oracles::simpson_fixed(f, a + 1e-10, b - 1e-10, 20000);
    }
    return total;
}

static std::vector<ValueDistribution> all_families() {
    return {ValueDistribution::uniform(2.0),
            ValueDistribution::tilted_exponential(1.0),
            ValueDistribution::tilted_exponential(3.0),
            ValueDistribution::piecewise_linear(
                {{2.0, 0.0}, {2.2, 0.15}, {2.6, 0.55}, {3.0, 1.0}})};
}

TEST_CASE("cdf closed forms and clamping") {
    auto u = ValueDistribution::uniform(2.0);
    CHECK(u.cdf(2.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(u.cdf(1.0) == 0.0);
    CHECK(u.cdf(4.0) == 1.0);

    auto te = ValueDistribution::tilted_exponential(1.0);
    CHECK(te.cdf(3.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(te.cdf(2.5) ==
          doctest::Approx((std::exp(0.5) - 1.0) / (std::exp(1.0) - 1.0))
              .epsilon(1e-10));
    CHECK(te.cdf(2.5) == doctest::Approx(0.37754067).epsilon(1e-6));

    for (const auto& d : all_families()) {
        CHECK(d.cdf(d.lower()) == 0.0);
        CHECK(d.cdf(d.upper()) == 1.0);
        double prev = -1.0;
        for (int i = 0; i <= 100; ++i) {
            double v = d.lower() + i / 100.0;
            double F = d.cdf(v);
            CHECK(F >= prev);
            prev = F;
        }
    }
}

TEST_CASE("pdf integrates to one") {
    for (const auto& d : all_families()) {
        double total = quad_split(d, [&](double v) { return d.pdf(v); });
        CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("excess expectation closed forms") {
    auto u = ValueDistribution::uniform(2.0);
    CHECK(u.excess(2.5) == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(u.excess(2.0) == doctest::Approx(0.5).epsilon(1e-12));
    for (const auto& d : all_families()) {
        CHECK(d.excess(d.upper()) == 0.0);
        CHECK(d.excess(d.lower()) ==
              doctest::Approx(d.mean() - d.lower()).epsilon(1e-10));
        // against direct quadrature of (v - theta)^+
        for (double theta : {2.1, 2.4, 2.75, 2.95}) {
            double direct = quad_split(
                d, [&](double v) { return std::max(v - theta, 0.0) * d.pdf(v); },
                {theta});
            CHECK(d.excess(theta) == doctest::Approx(direct).epsilon(1e-7));
        }
    }
}

TEST_CASE("excess derivative is -(1 - F)") {
    for (const auto& d : all_families()) {
        for (int i = 1; i <= 20; ++i) {
            double theta = d.lower() + i / 21.0;
            double h = 1e-6;
            double fd = (d.excess(theta + h) - d.excess(theta - h)) / (2.0 * h);
            CHECK(fd == doctest::Approx(-(1.0 - d.cdf(theta))).epsilon(1e-6));
        }
    }
}

TEST_CASE("mean and quantile") {
    auto u = ValueDistribution::uniform(2.0);
    CHECK(u.mean() == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(u.quantile(0.25) == doctest::Approx(2.25).epsilon(1e-12));
    auto te = ValueDistribution::tilted_exponential(1.0);
    double mean_quad = oracles::simpson_fixed(
        [&](double v) { return v * te.pdf(v); }, 2.0, 3.0, 20000);
    CHECK(te.mean() == doctest::Approx(mean_quad).epsilon(1e-9));
    CHECK(te.mean() == doctest::Approx(2.58198).epsilon(1e-5));
    for (const auto& d : all_families()) {
        CHECK(d.mean() > d.lower());
        CHECK(d.mean() < d.upper());
        CHECK_THROWS_AS((void)d.quantile(-0.1), std::domain_error);
        CHECK_THROWS_AS((void)d.quantile(1.1), std::domain_error);
    }
}

TEST_CASE("quantile composed with cdf is the identity") {
    for (const auto& d : all_families()) {
        for (int i = 1; i < 200; ++i) {
            double v = d.lower() + i / 200.0;
            CHECK(d.quantile(d.cdf(v)) == doctest::Approx(v).epsilon(1e-9));
        }
    }
}

TEST_CASE("sampling matches the cdf (Kolmogorov-Smirnov)") {
    for (const auto& d : all_families()) {
        std::vector<double> xs;
        xs.reserve(100000);
        for (long long i = 0; i < 100000; ++i) {
            CounterRng rng = sample_stream(12345, static_cast<std::uint64_t>(i));
            xs.push_back(d.sample(rng));
        }
        double ks = oracles::ks_statistic(std::move(xs),
                                          [&](double v) { return d.cdf(v); });
        CHECK(ks < 0.01);
    }
}

TEST_CASE("piecewise-linear construction rejects degenerate input") {
    CHECK_THROWS_AS(ValueDistribution::piecewise_linear({{2.0, 0.0}}),
                    std::domain_error);
    CHECK_THROWS_AS(
        ValueDistribution::piecewise_linear({{2.0, 0.0}, {2.5, 0.5}, {2.4, 1.0}}),
        std::domain_error);
    CHECK_THROWS_AS(
        ValueDistribution::piecewise_linear({{2.0, 0.0}, {2.5, 0.6}, {3.0, 0.4}}),
        std::domain_error);
    CHECK_THROWS_AS(ValueDistribution::piecewise_linear({{2.0, 0.0}, {3.5, 1.0}}),
                    std::domain_error);
    CHECK_THROWS_AS(ValueDistribution::piecewise_linear({{2.0, 0.2}, {3.0, 1.0}}),
                    std::domain_error);
}
