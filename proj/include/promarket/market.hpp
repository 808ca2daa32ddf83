#pragma once

#include <stdexcept>

#include "promarket/distributions.hpp"
#include "promarket/numeric.hpp"

namespace promarket {

inline double compute_cbar(const ValueDistribution& dist) {
    return dist.mean() - dist.lower();
}

// Root of excess(theta) = c; unique since excess is strictly decreasing
// below V+1.
inline double solve_theta0(const ValueDistribution& dist, double c) {
    if (!(c > 0.0)) throw std::domain_error("inspection cost must be positive");
    double cbar = compute_cbar(dist);
    if (c >= cbar) return dist.mean() - c;  // excess(theta) = mean - theta for theta <= V
    return num::find_root([&](double th) { return dist.excess(th) - c; },
                          dist.lower(), dist.upper(), 1e-12);
}

// Weitzman index of a seller at price p; may be negative.
inline double weitzman_index(const ValueDistribution& dist, double c, double p) {
    if (c == 0.0) return dist.upper() - p;
    double th = solve_theta0(dist, c) - p;
    if (th >= 0.0) return th;
    // negative branch: ([v-p]^+ - theta)^+ = (v-p)^+ - theta when theta < 0
    return dist.excess(p) - c;
}

struct MarketConfig {
    int m;
    double c;
    ValueDistribution dist;
    double cbar;
    double theta0;
    bool theta0_positive;
    bool main_regime;     // c < cbar, i.e. theta0 > V
    bool v_at_least_two;

    MarketConfig(int m_, double c_, ValueDistribution dist_)
        : m(m_), c(c_), dist(std::move(dist_)), cbar(compute_cbar(dist)),
          theta0(solve_theta0(dist, c_)) {
        if (m < 2) throw std::domain_error("at least two sellers required");
        theta0_positive = theta0 > 0.0;
        main_regime = c < cbar;
        v_at_least_two = dist.lower() >= 2.0;
    }

    void require_main_regime() const {
        if (!main_regime)
            throw std::domain_error("requires c < cbar (non-degenerate regime)");
    }
};

}  // namespace promarket
