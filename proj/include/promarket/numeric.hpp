#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace promarket::num {

namespace detail {

template <class F>
double simpson_rec(F&& f, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol || b - a < 1e-14 * (1.0 + std::abs(a)))
        return left + right + delta / 15.0;
    if (depth <= 0) throw std::runtime_error("quadrature did not converge");
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson with absolute tolerance.
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-9) {
    if (!(b > a)) return 0.0;
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Integrate splitting at known breakpoints of the integrand.
template <class F>
double integrate_split(F&& f, double a, double b, std::vector<double> cuts,
                       double tol = 1e-9) {
    if (!(b > a)) return 0.0;
    cuts.push_back(a);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> pts;
    for (double p : cuts) {
        if (p < a || p > b) continue;
        if (pts.empty() || p - pts.back() > 1e-13) pts.push_back(p);
    }
    if (pts.size() < 2) return integrate(f, a, b, tol);
    double seg_tol = tol / static_cast<double>(pts.size() - 1);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        total += integrate(f, pts[i], pts[i + 1], seg_tol);
    return total;
}

// Bracketed root finder (alternating regula falsi / bisection). f must change
// sign on [lo, hi].
template <class F>
double find_root(F&& f, double lo, double hi, double xtol = 1e-12) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0))
        throw std::domain_error("root is not bracketed");
    for (int it = 0; it < 200 && hi - lo > xtol; ++it) {
        double mid;
        double denom = fhi - flo;
        if (it % 2 == 0 && denom != 0.0)
            mid = (lo * fhi - hi * flo) / denom;
        else
            mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    return 0.5 * (lo + hi);
}

struct Optimum {
    double x = 0.0;
    double value = 0.0;
};

template <class F>
Optimum golden_max(F&& f, double a, double b, double xtol = 1e-8) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    const double invphi2 = 1.0 - invphi;
    double c = a + invphi2 * (b - a), d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > xtol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = a + invphi2 * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    double xm = 0.5 * (a + b);
    return {xm, f(xm)};
}

// Coarse grid bracket followed by golden-section refinement. Extra nodes let
// callers pin known kinks of piecewise-smooth objectives onto the grid.
template <class F>
Optimum maximize_grid_golden(F&& f, double lo, double hi, int grid_points,
                             std::vector<double> extra_nodes = {},
                             double xtol = 1e-8) {
    if (!(hi > lo)) return {lo, f(lo)};
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(grid_points) + extra_nodes.size());
    for (int i = 0; i < grid_points; ++i)
        xs.push_back(lo + (hi - lo) * i / double(grid_points - 1));
    for (double e : extra_nodes)
        if (e > lo && e < hi) xs.push_back(e);
    std::sort(xs.begin(), xs.end());
    std::size_t best = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    std::vector<double> vs(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        vs[i] = f(xs[i]);
        if (vs[i] > best_v) {
            best_v = vs[i];
            best = i;
        }
    }
    double a = best > 0 ? xs[best - 1] : xs[best];
    double b = best + 1 < xs.size() ? xs[best + 1] : xs[best];
    Optimum refined = (b > a) ? golden_max(f, a, b, xtol) : Optimum{xs[best], best_v};
    if (refined.value >= best_v) return refined;
    return {xs[best], best_v};
}

template <class F>
Optimum minimize_grid_golden(F&& f, double lo, double hi, int grid_points,
                             std::vector<double> extra_nodes = {},
                             double xtol = 1e-8) {
    auto neg = [&](double x) { return -f(x); };
    Optimum o = maximize_grid_golden(neg, lo, hi, grid_points,
                                     std::move(extra_nodes), xtol);
    return {o.x, -o.value};
}

}  // namespace promarket::num
