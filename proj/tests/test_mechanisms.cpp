#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <vector>

#include "promarket/promarket.hpp"

using namespace promarket;

TEST_CASE("allocation rules") {
    auto dict = Mechanism::dictator(0.5);
    auto x = allocate(dict, std::vector<double>{0.5, 0.5, 0.7});
    CHECK(x == std::vector<double>{0.5, 0.5, 0.0});
    CHECK(allocate(dict, std::vector<double>{0.6, 0.7}) ==
          std::vector<double>{0.0, 0.0});

    auto thr = Mechanism::threshold(0.5);
    CHECK(allocate(thr, std::vector<double>{0.6, 0.7}) ==
          std::vector<double>{0.0, 0.0});
    CHECK(allocate(thr, std::vector<double>{0.4, 0.5, 0.7}) ==
          std::vector<double>{0.5, 0.5, 0.0});

    CHECK(allocate(Mechanism::lpf(), std::vector<double>{0.3, 0.3}) ==
          std::vector<double>{0.5, 0.5});
    CHECK(allocate(Mechanism::lpf(), std::vector<double>{0.3, 0.2}) ==
          std::vector<double>{0.0, 1.0});
    CHECK(allocate(Mechanism::plain(), std::vector<double>{0.3, 0.2}) ==
          std::vector<double>{0.0, 0.0});

    // near-equal prices count as equal (tolerance 1e-12)
    auto xt = allocate(dict, std::vector<double>{0.5, 0.5 + 1e-13});
    CHECK(xt[0] == doctest::Approx(0.5));
    CHECK(xt[1] == doctest::Approx(0.5));
}

TEST_CASE("mechanism construction and parsing") {
    CHECK_THROWS_AS(Mechanism::dictator(0.0), std::domain_error);
    CHECK_THROWS_AS(Mechanism::threshold(-1.0), std::domain_error);
    CHECK(Mechanism::parse("plain").kind == Mechanism::Kind::Plain);
    CHECK(Mechanism::parse("lpf").kind == Mechanism::Kind::Lpf);
    auto d = Mechanism::parse("dictator:0.5");
    CHECK(d.kind == Mechanism::Kind::Dictator);
    CHECK(d.t == doctest::Approx(0.5));
    auto t = Mechanism::parse("threshold:1.25");
    CHECK(t.kind == Mechanism::Kind::Threshold);
    CHECK(t.t == doctest::Approx(1.25));
    CHECK_THROWS_AS(Mechanism::parse("dictator"), std::domain_error);
    CHECK_THROWS_AS(Mechanism::parse("dictator:abc"), std::domain_error);
    CHECK_THROWS_AS(Mechanism::parse("auction:1"), std::domain_error);
}

TEST_CASE("anonymity") {
    CHECK(check_anonymous(Mechanism::dictator(0.7), 3, 200, 5));
    CHECK(check_anonymous(Mechanism::threshold(0.7), 3, 200, 5));
    CHECK(check_anonymous(Mechanism::lpf(), 4, 200, 5));
    CHECK(check_anonymous(Mechanism::plain(), 4, 200, 5));
    // id-biased counterexample: prominence always to seller 0
    auto biased = [](std::span<const double> p) {
        std::vector<double> x(p.size(), 0.0);
        x[0] = 1.0;
        return x;
    };
    CHECK(!check_anonymous_fn(biased, 3, 200, 5));
    CHECK_THROWS_AS(check_anonymous(Mechanism::lpf(), 2, 0, 5), std::domain_error);
}

TEST_CASE("always allocating at the symmetric profile") {
    CHECK(check_allocating_at(Mechanism::dictator(0.8), 0.8, 3));
    CHECK(!check_allocating_at(Mechanism::dictator(0.8), 0.9, 3));
    CHECK(check_allocating_at(Mechanism::threshold(0.8), 0.8, 3));
    CHECK(check_allocating_at(Mechanism::threshold(0.8), 0.5, 3));
    CHECK(!check_allocating_at(Mechanism::plain(), 0.8, 3));
}

TEST_CASE("allocation vectors stay within bounds under fuzzing") {
    std::vector<Mechanism> mechs{Mechanism::plain(), Mechanism::lpf(),
                                 Mechanism::dictator(0.9),
                                 Mechanism::threshold(0.9)};
    for (const auto& mech : mechs) {
        for (int trial = 0; trial < 10000; ++trial) {
            CounterRng rng = sample_stream(42, static_cast<std::uint64_t>(trial));
            int m = 2 + static_cast<int>(rng.next_u64() % 5);
            std::vector<double> p(m);
            for (double& pi : p) pi = 0.05 + 2.5 * rng.next_double();
            if (trial % 3 == 0) p[0] = 0.9;  // hit the dictator/threshold target
            auto x = allocate(mech, p);
            double sum = std::accumulate(x.begin(), x.end(), 0.0);
            REQUIRE(sum <= 1.0 + 1e-12);
            for (double xi : x) {
                REQUIRE(xi >= 0.0);
                REQUIRE(xi <= 1.0);
            }
        }
    }
}

TEST_CASE("allocations are permutation invariant") {
    std::vector<double> p{0.9, 0.4, 1.3};
    std::vector<double> perm{0.4, 1.3, 0.9};  // sigma: 0->2, 1->0, 2->1
    for (const auto& mech :
         {Mechanism::dictator(0.9), Mechanism::threshold(0.9)}) {
        auto x = allocate(mech, p);
        auto xp = allocate(mech, perm);
        CHECK(x[0] == xp[2]);
        CHECK(x[1] == xp[0]);
        CHECK(x[2] == xp[1]);
    }
}

TEST_CASE("sampling prominence from an allocation") {
    std::vector<double> alloc{0.25, 0.25, 0.0};
    CHECK(sample_prominent(alloc, 0.1) == 0);
    CHECK(sample_prominent(alloc, 0.3) == 1);
    CHECK(sample_prominent(alloc, 0.9) == -1);
}
