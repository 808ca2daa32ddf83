#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <thread>
#include <vector>

#include "promarket/market.hpp"
#include "promarket/mechanisms.hpp"
#include "promarket/numeric.hpp"
#include "promarket/rng.hpp"
#include "promarket/search.hpp"

namespace promarket {

inline constexpr double kDemandQuadTol = 1e-10;

struct ProminenceAssignment {
    int prominent = -1;  // seller id, or -1 for none
};

struct DemandEstimate {
    std::vector<double> demand;
    std::vector<double> stderr_;
    long long n = 0;
    std::uint64_t seed = 0;

    double total() const {
        double s = 0.0;
        for (double d : demand) s += d;
        return s;
    }
};

namespace detail {

inline int resolve_workers(int workers) {
    if (workers > 0) return workers;
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

// Shard samples into fixed-size blocks assigned round-robin to workers, so
// per-seller purchase counts are independent of the worker count.
template <class PerSample>
void run_sharded(long long n, int workers, PerSample&& body) {
    constexpr long long kBlock = 1 << 14;
    long long n_blocks = (n + kBlock - 1) / kBlock;
    workers = std::min<long long>(resolve_workers(workers), n_blocks);
    auto run_range = [&](int w) {
        for (long long b = w; b < n_blocks; b += workers) {
            long long lo = b * kBlock, hi = std::min(n, lo + kBlock);
            for (long long i = lo; i < hi; ++i) body(i, w);
        }
    };
    if (workers <= 1) {
        run_range(0);
        return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_range, w);
    for (auto& th : pool) th.join();
}

}  // namespace detail

// Monte Carlo purchase frequencies under the index policy. `prominent_of`
// picks the prominent seller id (or -1) per draw; it always consumes exactly
// one uniform so draws stay aligned across prominence rules.
inline DemandEstimate demand_mc_impl(
    const MarketConfig& cfg, std::span<const double> prices,
    const std::function<int(double)>& prominent_of, long long n,
    std::uint64_t seed, int workers) {
    if (n < 1) throw std::domain_error("sample count must be >= 1");
    int m = cfg.m;
    if (static_cast<int>(prices.size()) != m)
        throw std::domain_error("price profile length must equal m");
    std::vector<double> indices(m);
    for (int i = 0; i < m; ++i)
        indices[i] = weitzman_index(cfg.dist, cfg.c, prices[i]);
    std::vector<double> costs(m, cfg.c);

    int nworkers = detail::resolve_workers(workers);
    std::vector<std::vector<long long>> counts(
        nworkers, std::vector<long long>(m, 0));
    const ValueDistribution& dist = cfg.dist;

    detail::run_sharded(n, nworkers, [&](long long i, int w) {
        CounterRng rng = sample_stream(seed, static_cast<std::uint64_t>(i));
        int prom = prominent_of(rng.next_double());
        double values[64];
        double idx[64];
        double cost[64];
        std::uint8_t known[64];
        for (int s = 0; s < m; ++s) {
            values[s] = dist.quantile(rng.next_double());
            idx[s] = indices[s];
            cost[s] = costs[s];
            known[s] = 0;
        }
        if (prom >= 0 && prom < m) {
            known[prom] = 1;
            cost[prom] = 0.0;
        }
        int order[64];
        int purchase = -1;
        double utility = 0.0;
        run_index_policy(m, values, prices.data(), cost, idx, known, order,
                         &purchase, &utility);
        if (purchase >= 0) ++counts[w][purchase];
    });

    DemandEstimate est;
    est.n = n;
    est.seed = seed;
    est.demand.resize(m);
    est.stderr_.resize(m);
    for (int s = 0; s < m; ++s) {
        long long c = 0;
        for (int w = 0; w < nworkers; ++w) c += counts[w][s];
        double d = static_cast<double>(c) / static_cast<double>(n);
        est.demand[s] = d;
        est.stderr_[s] = std::sqrt(d * (1.0 - d) / static_cast<double>(n));
    }
    return est;
}

inline DemandEstimate demand_mc(const MarketConfig& cfg,
                                std::span<const double> prices,
                                ProminenceAssignment prom, long long n,
                                std::uint64_t seed, int workers = 0) {
    int fixed = prom.prominent;
    if (fixed >= cfg.m) throw std::domain_error("prominent id out of range");
    return demand_mc_impl(cfg, prices, [fixed](double) { return fixed; }, n,
                          seed, workers);
}

// Prominence sampled per draw from the mechanism's allocation vector.
inline DemandEstimate demand_mc(const MarketConfig& cfg,
                                std::span<const double> prices,
                                const Mechanism& mech, long long n,
                                std::uint64_t seed, int workers = 0) {
    std::vector<double> alloc = allocate(mech, prices);
    return demand_mc_impl(
        cfg, prices, [&alloc](double u) { return sample_prominent(alloc, u); },
        n, seed, workers);
}

// D_c(x): demand of a seller deviating to t + x under the dictator mechanism
// while the other m-1 sellers hold t (independent of t). Piecewise:
//   1 for x <= -1; two-scenario double integral for -1 < x < 0;
//   int_V^{theta0 - x} (1 - F(v + x)) dF^{m-1}(v) for 0 <= x < theta0 - V;
//   0 for x >= theta0 - V.
inline double demand_deviation_dictator(const MarketConfig& cfg, double x) {
    cfg.require_main_regime();
    const ValueDistribution& F = cfg.dist;
    double V = F.lower(), Vh = F.upper(), th = cfg.theta0;
    int m = cfg.m;
    if (x <= -1.0) return 1.0;
    if (x >= th - V) return 0.0;
    if (x >= 0.0) {
        double hi = std::min(th - x, Vh);
        auto g = [&](double v) {
            return (1.0 - F.cdf(v + x)) * (m - 1) *
                   std::pow(F.cdf(v), m - 2) * F.pdf(v);
        };
        return num::integrate_split(g, V, hi, {th + x - 1.0, Vh - x}, kDemandQuadTol);
    }
    // -1 < x < 0: prominent rival's value is v2; scenario 1 buys after
    // inspecting only the deviator, scenario 2 buys after inspecting everyone.
    double outer_hi = std::min(th - x, Vh);
    auto integrand = [&](double v2) {
        double a = std::max(th + x, v2 + x);
        double s1 = 1.0 - F.cdf(a);
        double s2;
        if (m == 2) {
            s2 = F.cdf(a) - F.cdf(v2 + x);
        } else {
            double lo = std::max(v2 + x, V);
            double hi = std::min(a, Vh);
            auto inner = [&](double v1) {
                return std::pow(F.cdf(v1 - x), m - 2) * F.pdf(v1);
            };
            s2 = num::integrate_split(inner, lo, hi, {V - x, Vh + x},
                                      kDemandQuadTol * 0.1);
        }
        return (s1 + s2) * F.pdf(v2);
    };
    return num::integrate_split(integrand, V, outer_hi,
                                {th, V - x, Vh + x, th + x, Vh - 1.0 - x},
                                kDemandQuadTol);
}

// D_BB(x): demand of the prominent seller priced at t + x, others at t.
// Kappa characterization: P[v1 - x >= min(W, theta0)], W the max of the
// other m-1 values.
inline double demand_bb(const MarketConfig& cfg, double x) {
    cfg.require_main_regime();
    const ValueDistribution& F = cfg.dist;
    double V = F.lower(), th = cfg.theta0;
    int m = cfg.m;
    if (x <= -1.0) return 1.0;
    auto g = [&](double w) {
        return (1.0 - F.cdf(w + x)) * (m - 1) * std::pow(F.cdf(w), m - 2) *
               F.pdf(w);
    };
    double tail = (1.0 - std::pow(F.cdf(th), m - 1)) * (1.0 - F.cdf(th + x));
    return num::integrate_split(g, V, th, {F.upper() - x, V - x}, kDemandQuadTol) + tail;
}

// Deviation demand under the threshold mechanism: the undercutting seller
// wins prominence with probability 1/m, otherwise faces the dictator-case
// demand; upward deviations forfeit prominence entirely.
inline double demand_deviation_threshold(const MarketConfig& cfg, double x) {
    cfg.require_main_regime();
    if (x >= 0.0) return demand_deviation_dictator(cfg, x);
    double inv_m = 1.0 / cfg.m;
    return inv_m * demand_bb(cfg, x) +
           (1.0 - inv_m) * demand_deviation_dictator(cfg, x);
}

}  // namespace promarket
