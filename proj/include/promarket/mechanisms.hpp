#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "promarket/rng.hpp"

namespace promarket {

// Absolute tolerance for price comparisons in allocations; exact float
// equality on user-supplied prices is brittle.
inline constexpr double kPriceTol = 1e-12;

struct Mechanism {
    enum class Kind { Plain, Lpf, Dictator, Threshold };

    Kind kind = Kind::Plain;
    double t = 0.0;  // target price for dictator/threshold

    static Mechanism plain() { return {Kind::Plain, 0.0}; }
    static Mechanism lpf() { return {Kind::Lpf, 0.0}; }
    static Mechanism dictator(double t) {
        if (!(t > 0.0)) throw std::domain_error("dictator target price must be positive");
        return {Kind::Dictator, t};
    }
    static Mechanism threshold(double t) {
        if (!(t > 0.0)) throw std::domain_error("threshold price must be positive");
        return {Kind::Threshold, t};
    }

    // "plain" | "lpf" | "dictator:<t>" | "threshold:<t>"
    static Mechanism parse(const std::string& s) {
        if (s == "plain") return plain();
        if (s == "lpf") return lpf();
        auto colon = s.find(':');
        std::string kind = s.substr(0, colon);
        double t = 0.0;
        if (colon != std::string::npos) {
            try {
                std::size_t used = 0;
                t = std::stod(s.substr(colon + 1), &used);
                if (used != s.size() - colon - 1) throw std::invalid_argument(s);
            } catch (const std::exception&) {
                throw std::domain_error("bad mechanism target price in '" + s + "'");
            }
        }
        if (kind == "dictator") {
            if (colon == std::string::npos)
                throw std::domain_error("dictator mechanism needs a target price");
            return dictator(t);
        }
        if (kind == "threshold") {
            if (colon == std::string::npos)
                throw std::domain_error("threshold mechanism needs a target price");
            return threshold(t);
        }
        throw std::domain_error("unknown mechanism '" + s + "'");
    }

    std::string to_string() const {
        switch (kind) {
            case Kind::Plain: return "plain";
            case Kind::Lpf: return "lpf";
            case Kind::Dictator: return "dictator:" + std::to_string(t);
            case Kind::Threshold: return "threshold:" + std::to_string(t);
        }
        return "?";
    }
};

// Prominence-win probabilities for each seller; sums to at most 1.
inline std::vector<double> allocate(const Mechanism& mech,
                                    std::span<const double> prices) {
    std::size_t m = prices.size();
    std::vector<double> x(m, 0.0);
    switch (mech.kind) {
        case Mechanism::Kind::Plain:
            break;
        case Mechanism::Kind::Lpf: {
            double pmin = *std::min_element(prices.begin(), prices.end());
            int n = 0;
            for (double p : prices) n += std::abs(p - pmin) <= kPriceTol;
            for (std::size_t i = 0; i < m; ++i)
                if (std::abs(prices[i] - pmin) <= kPriceTol) x[i] = 1.0 / n;
            break;
        }
        case Mechanism::Kind::Dictator: {
            int n = 0;
            for (double p : prices) n += std::abs(p - mech.t) <= kPriceTol;
            if (n == 0) break;
            for (std::size_t i = 0; i < m; ++i)
                if (std::abs(prices[i] - mech.t) <= kPriceTol) x[i] = 1.0 / n;
            break;
        }
        case Mechanism::Kind::Threshold: {
            int n = 0;
            for (double p : prices) n += p <= mech.t + kPriceTol;
            if (n == 0) break;
            for (std::size_t i = 0; i < m; ++i)
                if (prices[i] <= mech.t + kPriceTol) x[i] = 1.0 / n;
            break;
        }
    }
    return x;
}

// Sample a prominent seller id (or -1) from an allocation vector using one
// uniform draw.
inline int sample_prominent(std::span<const double> alloc, double u) {
    double acc = 0.0;
    for (std::size_t i = 0; i < alloc.size(); ++i) {
        acc += alloc[i];
        if (u < acc) return static_cast<int>(i);
    }
    return -1;
}

// Anonymity check over random profiles and random permutations:
// x_i(p) == x_{sigma(i)}(sigma applied to p), exactly.
template <class Alloc>
bool check_anonymous_fn(Alloc&& alloc_fn, int m, int trials, std::uint64_t seed) {
    if (trials < 1) throw std::domain_error("trials must be >= 1");
    for (int trial = 0; trial < trials; ++trial) {
        CounterRng rng = sample_stream(seed, static_cast<std::uint64_t>(trial));
        std::vector<double> p(m);
        for (double& pi : p) pi = 0.1 + 3.0 * rng.next_double();
        std::vector<int> sigma(m);
        std::iota(sigma.begin(), sigma.end(), 0);
        for (int i = m - 1; i > 0; --i) {
            int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
            std::swap(sigma[i], sigma[j]);
        }
        std::vector<double> pp(m);
        for (int i = 0; i < m; ++i) pp[sigma[i]] = p[i];
        std::vector<double> x = alloc_fn(std::span<const double>(p));
        std::vector<double> xp = alloc_fn(std::span<const double>(pp));
        for (int i = 0; i < m; ++i)
            if (x[i] != xp[sigma[i]]) return false;
    }
    return true;
}

inline bool check_anonymous(const Mechanism& mech, int m, int trials,
                            std::uint64_t seed) {
    return check_anonymous_fn(
        [&](std::span<const double> p) { return allocate(mech, p); }, m, trials, seed);
}

// Always-allocating at a symmetric profile (t, ..., t).
inline bool check_allocating_at(const Mechanism& mech, double t, int m) {
    std::vector<double> p(static_cast<std::size_t>(m), t);
    std::vector<double> x = allocate(mech, p);
    double sum = std::accumulate(x.begin(), x.end(), 0.0);
    return std::abs(sum - 1.0) <= 1e-12;
}

}  // namespace promarket
