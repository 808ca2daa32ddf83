#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "promarket/demand.hpp"
#include "promarket/equilibrium.hpp"
#include "promarket/market.hpp"
#include "promarket/numeric.hpp"
#include "promarket/rng.hpp"
#include "promarket/search.hpp"

namespace promarket {

struct SwResult {
    double sw = 0.0;
    double stderr_ = 0.0;
};

// Closed form for m = 2: SW(c) = int_V^{theta0} F(s)(1 - F(s)) ds + E[v].
// Independent of the symmetric price t.
inline SwResult social_welfare_closed_form(const MarketConfig& cfg) {
    cfg.require_main_regime();
    if (cfg.m != 2)
        throw std::invalid_argument("closed-form social welfare requires m = 2");
    const ValueDistribution& F = cfg.dist;
    auto g = [&](double s) {
        double Fs = F.cdf(s);
        return Fs * (1.0 - Fs);
    };
    double integral = num::integrate(g, F.lower(), cfg.theta0, 1e-10);
    return {integral + F.mean(), 0.0};
}

// Monte Carlo social welfare at a symmetric profile (t, ..., t) with a
// uniformly random prominent seller per draw.
inline SwResult social_welfare_mc(const MarketConfig& cfg, double t,
                                  long long n, std::uint64_t seed,
                                  int workers = 0) {
    cfg.require_main_regime();
    if (n < 1) throw std::domain_error("sample count must be >= 1");
    int m = cfg.m;
    double idx_sym = weitzman_index(cfg.dist, cfg.c, t);
    const ValueDistribution& dist = cfg.dist;

    constexpr long long kBlock = 1 << 14;
    long long n_blocks = (n + kBlock - 1) / kBlock;
    // per-block partial sums, reduced in block order: results do not depend
    // on the worker count
    std::vector<double> block_sum(n_blocks, 0.0), block_sq(n_blocks, 0.0);

    int nworkers = detail::resolve_workers(workers);
    nworkers = static_cast<int>(std::min<long long>(nworkers, n_blocks));
    auto run_range = [&](int w) {
        double prices[64], values[64], idx[64], cost[64];
        std::uint8_t known[64];
        int order[64];
        for (int s = 0; s < m; ++s) prices[s] = t;
        for (long long b = w; b < n_blocks; b += nworkers) {
            long long lo = b * kBlock, hi = std::min(n, lo + kBlock);
            double sum = 0.0, sq = 0.0;
            for (long long i = lo; i < hi; ++i) {
                CounterRng rng = sample_stream(seed, static_cast<std::uint64_t>(i));
                int prom = static_cast<int>(rng.next_u64() %
                                            static_cast<std::uint64_t>(m));
                for (int s = 0; s < m; ++s) {
                    values[s] = dist.quantile(rng.next_double());
                    idx[s] = idx_sym;
                    cost[s] = cfg.c;
                    known[s] = 0;
                }
                known[prom] = 1;
                cost[prom] = 0.0;
                int purchase = -1;
                double utility = 0.0;
                int n_ins = run_index_policy(m, values, prices, cost, idx, known,
                                             order, &purchase, &utility);
                double welfare = (purchase >= 0 ? values[purchase] : 0.0) -
                                 cfg.c * n_ins;
                sum += welfare;
                sq += welfare * welfare;
            }
            block_sum[b] = sum;
            block_sq[b] = sq;
        }
    };
    if (nworkers <= 1) {
        run_range(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < nworkers; ++w) pool.emplace_back(run_range, w);
        for (auto& th : pool) th.join();
    }
    double sum = 0.0, sq = 0.0;
    for (long long b = 0; b < n_blocks; ++b) {
        sum += block_sum[b];
        sq += block_sq[b];
    }
    double mean = sum / static_cast<double>(n);
    double var = std::max(sq / static_cast<double>(n) - mean * mean, 0.0);
    return {mean, std::sqrt(var / static_cast<double>(n))};
}

inline double consumer_surplus(const MarketConfig& cfg, double t) {
    return social_welfare_closed_form(cfg).sw - t;
}

struct WelfareRow {
    double c = 0.0;
    double theta0 = 0.0;
    double t_star = 0.0;
    double sw = 0.0;
    double cs_at_tstar = 0.0;
    double sw_stderr = 0.0;  // 0 for closed form
};

// Frontier sweep: for each c, the symmetric-equilibrium welfare and the
// consumer surplus at the lowest implementable price t*(c). Closed form for
// m = 2; Monte Carlo (mc_n samples) otherwise.
inline std::vector<WelfareRow> surplus_curve(const ValueDistribution& dist,
                                             int m,
                                             std::span<const double> c_grid,
                                             long long mc_n = 200000,
                                             std::uint64_t seed = 1,
                                             int workers = 0) {
    std::vector<WelfareRow> rows;
    rows.reserve(c_grid.size());
    for (double c : c_grid) {
        MarketConfig cfg(m, c, dist);
        cfg.require_main_regime();
        WelfareRow row;
        row.c = c;
        row.theta0 = cfg.theta0;
        row.t_star = t_star(cfg);
        SwResult sw = (m == 2) ? social_welfare_closed_form(cfg)
                               : social_welfare_mc(cfg, row.t_star, mc_n, seed,
                                                   workers);
        row.sw = sw.sw;
        row.sw_stderr = sw.stderr_;
        row.cs_at_tstar = row.sw - row.t_star;
        rows.push_back(row);
    }
    return rows;
}

struct SurplusConditionReport {
    double f_at_V = 0.0;
    double fprime_at_V = 0.0;
    bool differentiable = false;
    bool theorem_condition = false;  // f(V+) < f'(V+)/13
    bool proof_condition = false;    // 13 f(V+)^2 < f'(V+)
};

inline SurplusConditionReport surplus_condition(const ValueDistribution& dist) {
    SurplusConditionReport rep;
    double V = dist.lower();
    switch (dist.family()) {
        case Family::Uniform:
            rep.f_at_V = 1.0;
            rep.fprime_at_V = 0.0;
            rep.differentiable = true;
            break;
        case Family::TiltedExponential: {
            double k = dist.k();
            rep.f_at_V = k / std::expm1(k);
            rep.fprime_at_V = k * k / std::expm1(k);
            rep.differentiable = true;
            break;
        }
        case Family::PiecewiseLinearCdf: {
            // one-sided second-order finite difference inside the support
            double seg = dist.knots()[1].first - V;
            double h = std::min(1e-6, seg / 4.0);
            double f0 = dist.pdf(V + h * 1e-3);
            double f1 = dist.pdf(V + h);
            double f2 = dist.pdf(V + 2.0 * h);
            rep.f_at_V = f0;
            rep.fprime_at_V = (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h);
            rep.differentiable = std::isfinite(rep.fprime_at_V);
            break;
        }
    }
    if (rep.differentiable) {
        rep.theorem_condition = rep.f_at_V < rep.fprime_at_V / 13.0;
        rep.proof_condition = 13.0 * rep.f_at_V * rep.f_at_V < rep.fprime_at_V;
    }
    return rep;
}

struct InteriorOptimum {
    double c_star = 0.0;
    double cs_star = 0.0;
    bool interior = false;
    std::size_t index = 0;
};

// Argmax of cs_at_tstar over the sweep; interior iff it sits at least two
// grid steps away from both ends.
inline InteriorOptimum find_interior_optimum(const ValueDistribution& dist,
                                             int m,
                                             std::span<const double> c_grid,
                                             long long mc_n = 200000,
                                             std::uint64_t seed = 1,
                                             int workers = 0) {
    std::vector<WelfareRow> rows =
        surplus_curve(dist, m, c_grid, mc_n, seed, workers);
    InteriorOptimum opt;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i == 0 || rows[i].cs_at_tstar > opt.cs_star) {
            opt.index = i;
            opt.c_star = rows[i].c;
            opt.cs_star = rows[i].cs_at_tstar;
        }
    }
    opt.interior = rows.size() >= 5 && opt.index >= 2 &&
                   opt.index + 2 < rows.size();
    return opt;
}

}  // namespace promarket
