#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "promarket/market.hpp"

namespace promarket {

struct SearchOutcome {
    std::vector<int> inspected;  // costly inspections, in order
    int purchase = -1;           // seller id, or -1 for none
    double buyer_utility = 0.0;
};

// Index-policy core. `indices` holds the Weitzman index of each seller
// (ignored where known[i] != 0: a known value carries tag v_i - p_i directly).
// Writes costly-inspection order into `inspect_order` (size >= m) and returns
// the number of inspections. Ties broken by lowest seller id.
inline int run_index_policy(int m, const double* values, const double* prices,
                            const double* costs, const double* indices,
                            const std::uint8_t* known, int* inspect_order,
                            int* purchase, double* buyer_utility) {
    constexpr int kMax = 64;
    if (m > kMax) throw std::domain_error("too many sellers");
    double util[kMax];
    bool revealed[kMax];
    for (int i = 0; i < m; ++i) {
        revealed[i] = known[i] != 0;
        util[i] = values[i] - prices[i];
    }
    int n_inspect = 0;
    double cost_paid = 0.0;
    *purchase = -1;
    *buyer_utility = 0.0;
    for (;;) {
        int best = -1;
        double best_tag = 0.0;
        bool best_revealed = false;
        for (int i = 0; i < m; ++i) {
            double tag = revealed[i] ? util[i] : indices[i];
            if (best < 0 || tag > best_tag) {
                best = i;
                best_tag = tag;
                best_revealed = revealed[i];
            }
        }
        if (best_tag < 0.0) break;  // nothing worth pursuing
        if (best_revealed) {        // highest tag is a realized utility: buy
            *purchase = best;
            *buyer_utility = util[best] - cost_paid;
            return n_inspect;
        }
        revealed[best] = true;
        cost_paid += costs[best];
        inspect_order[n_inspect++] = best;
    }
    *buyer_utility = -cost_paid;  // walked away after any paid inspections
    return n_inspect;
}

// Full index-policy simulation for one realization.
inline SearchOutcome simulate_search(const ValueDistribution& dist,
                                     std::span<const double> prices,
                                     std::span<const double> inspection_costs,
                                     std::span<const double> values,
                                     std::span<const std::uint8_t> known_mask) {
    std::size_t m = prices.size();
    if (inspection_costs.size() != m || values.size() != m || known_mask.size() != m)
        throw std::domain_error("input lists must all have length m");
    std::vector<double> indices(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (!known_mask[i])
            indices[i] = weitzman_index(dist, inspection_costs[i], prices[i]);
    SearchOutcome out;
    std::vector<int> order(m);
    int purchase = -1;
    double utility = 0.0;
    int n = run_index_policy(static_cast<int>(m), values.data(), prices.data(),
                             inspection_costs.data(), indices.data(),
                             known_mask.data(), order.data(), &purchase, &utility);
    out.inspected.assign(order.begin(), order.begin() + n);
    out.purchase = purchase;
    out.buyer_utility = utility;
    return out;
}

// Kappa characterization: buy from the argmax of min(v_i - p_i, theta_i)
// when the max is nonnegative. Returns (seller id or -1, gross utility).
inline std::pair<int, double> winner_via_kappa(std::span<const double> values,
                                               std::span<const double> prices,
                                               std::span<const double> indices) {
    std::size_t m = values.size();
    if (prices.size() != m || indices.size() != m)
        throw std::domain_error("input lists must all have length m");
    int best = -1;
    double best_kappa = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double kappa = std::min(values[i] - prices[i], indices[i]);
        if (best < 0 || kappa > best_kappa) {
            best = static_cast<int>(i);
            best_kappa = kappa;
        }
    }
    if (best_kappa < 0.0) return {-1, 0.0};
    return {best, best_kappa};
}

}  // namespace promarket
