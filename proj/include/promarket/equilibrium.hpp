#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "promarket/demand.hpp"
#include "promarket/market.hpp"
#include "promarket/mechanisms.hpp"
#include "promarket/numeric.hpp"

namespace promarket {

struct PriceInterval {
    double lo = 0.0;
    double hi = 0.0;
    bool empty = true;
};

struct DeviationWitness {
    int seller = 0;
    double deviating_price = 0.0;
    double baseline_revenue = 0.0;
    double deviation_revenue = 0.0;
    double gain = 0.0;
};

struct VerifyResult {
    bool equilibrium = false;
    std::optional<DeviationWitness> witness;
};

inline constexpr int kOptGridPoints = 2000;
inline constexpr double kOptXTol = 1e-8;

namespace detail {

// Objective edge: keep strictly inside the open domain of the sup/inf.
inline constexpr double kEdge = 1e-6;

}  // namespace detail

// t*(c) = sup over x > 0 of x D_c(x) / (1/m - D_c(x)).
inline double t_star(const MarketConfig& cfg) {
    cfg.require_main_regime();
    double span = cfg.theta0 - cfg.dist.lower();
    double inv_m = 1.0 / cfg.m;
    auto obj = [&](double x) {
        double d = demand_deviation_dictator(cfg, x);
        double den = std::max(inv_m - d, 1e-14);
        return x * d / den;
    };
    double lo = detail::kEdge * span, hi = span * (1.0 - detail::kEdge);
    num::Optimum o = num::maximize_grid_golden(obj, lo, hi, kOptGridPoints,
                                               {cfg.theta0 + 0.0 - 1.0 - cfg.dist.lower()},
                                               kOptXTol);
    return std::max(o.value, 0.0);
}

namespace detail {

// inf over x < 0 (where D(x) > 1/m) of (-x) D(x) / (D(x) - 1/m), with the
// x <= -1 branch (D = 1) handled analytically: its infimum is m/(m-1) as
// x -> -1.
template <class Demand>
double upper_endpoint(const MarketConfig& cfg, Demand&& demand) {
    cfg.require_main_regime();
    double inv_m = 1.0 / cfg.m;
    double best = cfg.m / (cfg.m - 1.0);
    auto obj = [&](double x) {
        double d = demand(x);
        if (d <= inv_m + 1e-14) return std::numeric_limits<double>::infinity();
        return (-x) * d / (d - inv_m);
    };
    std::vector<double> nodes;
    double V = cfg.dist.lower();
    for (double b : {cfg.theta0 - V - 1.0, V - cfg.theta0, -(cfg.theta0 - V)})
        if (b > -1.0 && b < 0.0) nodes.push_back(b);
    num::Optimum o = num::minimize_grid_golden(obj, -1.0 + kEdge, -kEdge,
                                               kOptGridPoints, nodes, kOptXTol);
    return std::min(best, o.value);
}

}  // namespace detail

inline double t_bar(const MarketConfig& cfg) {
    return detail::upper_endpoint(
        cfg, [&](double x) { return demand_deviation_dictator(cfg, x); });
}

inline double t_hat(const MarketConfig& cfg) {
    return detail::upper_endpoint(
        cfg, [&](double x) { return demand_deviation_threshold(cfg, x); });
}

inline PriceInterval make_interval(double lo, double hi) {
    if (lo <= hi + 1e-9) return {lo, hi, false};
    return {0.0, 0.0, true};
}

inline PriceInterval dictator_range(const MarketConfig& cfg) {
    return make_interval(t_star(cfg), t_bar(cfg));
}

inline PriceInterval threshold_range(const MarketConfig& cfg) {
    return make_interval(t_star(cfg), t_hat(cfg));
}

// Checks (x + t) D_dev(x) <= t/m on a deviation grid over
// x in [max(-1, -t), theta0 - V]; D_dev is the mechanism's deviation demand.
inline VerifyResult verify_symmetric_equilibrium(const MarketConfig& cfg,
                                                 const Mechanism& mech,
                                                 double t,
                                                 int grid_points = 801) {
    cfg.require_main_regime();
    if (!(t > 0.0)) throw std::domain_error("symmetric price must be positive");
    std::function<double(double)> demand;
    switch (mech.kind) {
        case Mechanism::Kind::Dictator:
            demand = [&](double x) { return demand_deviation_dictator(cfg, x); };
            break;
        case Mechanism::Kind::Threshold:
            demand = [&](double x) { return demand_deviation_threshold(cfg, x); };
            break;
        default:
            throw std::domain_error(
                "equilibrium verification supports dictator and threshold mechanisms");
    }
    double V = cfg.dist.lower();
    double lo = std::max(-1.0, -t), hi = cfg.theta0 - V;
    double baseline = t / cfg.m;
    auto gain_at = [&](double x) { return (x + t) * demand(x) - baseline; };

    double worst_gain = -std::numeric_limits<double>::infinity();
    double worst_x = lo;
    for (int i = 0; i <= grid_points; ++i) {
        double x = lo + (hi - lo) * i / double(grid_points);
        if (std::abs(x) < 1e-7) continue;  // x = 0 is no deviation
        double g = gain_at(x);
        if (g > worst_gain) {
            worst_gain = g;
            worst_x = x;
        }
    }
    double step = (hi - lo) / grid_points;
    num::Optimum o = num::golden_max(gain_at, std::max(lo, worst_x - step),
                                     std::min(hi, worst_x + step), 1e-9);
    if (o.value > worst_gain) {
        worst_gain = o.value;
        worst_x = o.x;
    }
    VerifyResult res;
    res.equilibrium = worst_gain <= 1e-9;
    if (!res.equilibrium) {
        DeviationWitness w;
        w.seller = 0;
        w.deviating_price = t + worst_x;
        w.baseline_revenue = baseline;
        w.deviation_revenue = baseline + worst_gain;
        w.gain = worst_gain;
        res.witness = w;
    }
    return res;
}

// Best-response scan for each seller with revenues estimated by Monte Carlo.
// One-sided certificate: a returned witness proves non-equilibrium; none is
// inconclusive.
inline std::optional<DeviationWitness> find_undercut_deviation(
    const MarketConfig& cfg, const Mechanism& mech,
    std::span<const double> prices, long long n = 400000,
    std::uint64_t seed = 1, int workers = 0) {
    int m = cfg.m;
    if (static_cast<int>(prices.size()) != m)
        throw std::domain_error("price profile length must equal m");
    DemandEstimate base = demand_mc(cfg, prices, mech, n, seed, workers);

    double pmax = *std::max_element(prices.begin(), prices.end());
    double hi_price = std::max(pmax + 0.5, cfg.theta0 - cfg.dist.lower());
    std::vector<double> candidates;
    for (int i = 0; i < 24; ++i)
        candidates.push_back(0.02 + (hi_price - 0.02) * i / 23.0);
    for (double p : prices)
        for (double d : {1e-4, 1e-3, 1e-2, 0.05, 0.1})
            for (double s : {-1.0, 1.0}) {
                double cand = p + s * d;
                if (cand > 0.0) candidates.push_back(cand);
            }

    long long n_scan = std::max<long long>(n / 10, 20000);
    std::optional<DeviationWitness> best;
    std::vector<double> work(prices.begin(), prices.end());
    for (int s = 0; s < m; ++s) {
        double base_rev = prices[s] * base.demand[s];
        double base_se = prices[s] * base.stderr_[s];
        double best_scan_rev = -1.0, best_scan_p = 0.0;
        for (double cand : candidates) {
            if (std::abs(cand - prices[s]) < 1e-12) continue;
            work[s] = cand;
            DemandEstimate dev =
                demand_mc(cfg, work, mech, n_scan, seed + 7777, workers);
            double rev = cand * dev.demand[s];
            if (rev > best_scan_rev) {
                best_scan_rev = rev;
                best_scan_p = cand;
            }
        }
        work[s] = prices[s];
        if (best_scan_rev <= base_rev) continue;
        // confirm the best candidate at full sample size
        work[s] = best_scan_p;
        DemandEstimate dev = demand_mc(cfg, work, mech, n, seed + 31337, workers);
        work[s] = prices[s];
        double rev = best_scan_p * dev.demand[s];
        double se = best_scan_p * dev.stderr_[s];
        double gain = rev - base_rev;
        double combined = std::sqrt(se * se + base_se * base_se);
        if (gain > 4.0 * combined && (!best || gain > best->gain)) {
            DeviationWitness w;
            w.seller = s;
            w.deviating_price = best_scan_p;
            w.baseline_revenue = base_rev;
            w.deviation_revenue = rev;
            w.gain = gain;
            best = w;
        }
    }
    return best;
}

// Epsilon-equilibrium slack for the plain presentation:
// Delta = min(r(x*)/m, (m-1) r(x*) (P[B0 and A0] - P[A0]/m)), where
// r(x) = x * int_V^{theta0-x} (1-F(v+x)) dF^{m-1}(v) and x* maximizes r;
// A0 = at least two values >= theta0, B0 = a fixed seller's value >= theta0.
inline double epsilon_bound(const MarketConfig& cfg) {
    cfg.require_main_regime();
    double span = cfg.theta0 - cfg.dist.lower();
    auto r = [&](double x) { return x * demand_deviation_dictator(cfg, x); };
    num::Optimum o = num::maximize_grid_golden(
        r, detail::kEdge * span, span * (1.0 - detail::kEdge), kOptGridPoints,
        {}, kOptXTol);
    double rstar = o.value;
    double q = 1.0 - cfg.dist.cdf(cfg.theta0);
    int m = cfg.m;
    double pa = 1.0 - std::pow(1.0 - q, m) -
                m * q * std::pow(1.0 - q, m - 1);
    double pba = q * (1.0 - std::pow(1.0 - q, m - 1));
    return std::min(rstar / m, (m - 1.0) * rstar * (pba - pa / m));
}

struct MonopolyCheck {
    double p_star = 0.0;
    bool holds = false;
};

// p* = argmax p (1 - F(p)); for p <= V revenue is p itself, so the maximizer
// never falls below V. Holds iff c > E[v] - p*/m.
inline MonopolyCheck monopoly_price_equilibrium_check(const MarketConfig& cfg) {
    const ValueDistribution& F = cfg.dist;
    auto rev = [&](double p) { return p * (1.0 - F.cdf(p)); };
    num::Optimum o =
        num::maximize_grid_golden(rev, F.lower(), F.upper(), kOptGridPoints,
                                  {}, kOptXTol);
    MonopolyCheck out;
    out.p_star = o.x;
    out.holds = cfg.c > F.mean() - out.p_star / cfg.m;
    return out;
}

}  // namespace promarket
