#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace promarket {

enum class Family { Uniform, TiltedExponential, PiecewiseLinearCdf };

// Continuous value prior supported on [V, V+1].
class ValueDistribution {
public:
    static ValueDistribution uniform(double V) {
        if (!(V > 0.0)) throw std::domain_error("support lower bound must be positive");
        ValueDistribution d;
        d.family_ = Family::Uniform;
        d.V_ = V;
        d.mean_ = V + 0.5;
        return d;
    }

    // pdf proportional to e^{k(v-2)} on [2, 3]
    static ValueDistribution tilted_exponential(double k) {
        if (!(k > 0.0)) throw std::domain_error("tilt parameter must be positive");
        ValueDistribution d;
        d.family_ = Family::TiltedExponential;
        d.V_ = 2.0;
        d.k_ = k;
        double ek = std::exp(k);
        d.mean_ = (3.0 * ek - 2.0 - (ek - 1.0) / k) / (ek - 1.0);
        return d;
    }

    // knots: (v, F(v)) pairs, first (V, 0), last (V+1, 1), strictly increasing
    static ValueDistribution piecewise_linear(std::vector<std::pair<double, double>> knots) {
        if (knots.size() < 2)
            throw std::domain_error("piecewise-linear cdf needs at least 2 knots");
        for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
            if (!(knots[i + 1].first > knots[i].first) ||
                !(knots[i + 1].second > knots[i].second))
                throw std::domain_error("knots must be strictly increasing in both coordinates");
        }
        if (std::abs(knots.front().second) > 1e-12 ||
            std::abs(knots.back().second - 1.0) > 1e-12)
            throw std::domain_error("cdf knots must start at F=0 and end at F=1");
        if (std::abs(knots.back().first - knots.front().first - 1.0) > 1e-9)
            throw std::domain_error("support must have unit width [V, V+1]");
        if (!(knots.front().first > 0.0))
            throw std::domain_error("support lower bound must be positive");
        ValueDistribution d;
        d.family_ = Family::PiecewiseLinearCdf;
        d.V_ = knots.front().first;
        d.knots_ = std::move(knots);
        d.knots_.front().second = 0.0;
        d.knots_.back().second = 1.0;
        d.slopes_.resize(d.knots_.size() - 1);
        double mean = 0.0;
        for (std::size_t i = 0; i + 1 < d.knots_.size(); ++i) {
            double a = d.knots_[i].first, b = d.knots_[i + 1].first;
            d.slopes_[i] = (d.knots_[i + 1].second - d.knots_[i].second) / (b - a);
            mean += d.slopes_[i] * (b * b - a * a) / 2.0;
        }
        d.mean_ = mean;
        return d;
    }

    Family family() const { return family_; }
    double lower() const { return V_; }
    double upper() const { return V_ + 1.0; }
    double mean() const { return mean_; }
    double k() const { return k_; }
    const std::vector<std::pair<double, double>>& knots() const { return knots_; }

    double cdf(double v) const {
        if (v <= V_) return 0.0;
        if (v >= V_ + 1.0) return 1.0;
        switch (family_) {
            case Family::Uniform:
                return v - V_;
            case Family::TiltedExponential:
                return std::expm1(k_ * (v - 2.0)) / std::expm1(k_);
            case Family::PiecewiseLinearCdf: {
                std::size_t i = segment_by_v(v);
                return knots_[i].second + slopes_[i] * (v - knots_[i].first);
            }
        }
        return 0.0;
    }

    double pdf(double v) const {
        if (v < V_ || v > V_ + 1.0) return 0.0;
        switch (family_) {
            case Family::Uniform:
                return 1.0;
            case Family::TiltedExponential:
                return k_ * std::exp(k_ * (v - 2.0)) / std::expm1(k_);
            case Family::PiecewiseLinearCdf:
                return slopes_[segment_by_v(std::min(v, V_ + 1.0 - 1e-15))];
        }
        return 0.0;
    }

    double quantile(double u) const {
        if (!(u >= 0.0 && u <= 1.0))
            throw std::domain_error("quantile argument outside [0, 1]");
        switch (family_) {
            case Family::Uniform:
                return V_ + u;
            case Family::TiltedExponential:
                return 2.0 + std::log1p(u * std::expm1(k_)) / k_;
            case Family::PiecewiseLinearCdf: {
                std::size_t lo = 0, hi = knots_.size() - 1;
                while (hi - lo > 1) {
                    std::size_t mid = (lo + hi) / 2;
                    if (knots_[mid].second <= u)
                        lo = mid;
                    else
                        hi = mid;
                }
                return knots_[lo].first + (u - knots_[lo].second) / slopes_[lo];
            }
        }
        return V_;
    }

    // E[(v - theta)^+]
    double excess(double theta) const {
        double hi = V_ + 1.0;
        if (theta >= hi) return 0.0;
        if (theta <= V_) return mean_ - theta;
        switch (family_) {
            case Family::Uniform:
                return (hi - theta) * (hi - theta) / 2.0;
            case Family::TiltedExponential: {
                double ek = std::expm1(k_);  // e^k - 1
                return ((ek + 1.0) * (3.0 - theta) -
                        (ek + 1.0 - std::exp(k_ * (theta - 2.0))) / k_) /
                       ek;
            }
            case Family::PiecewiseLinearCdf: {
                // integral of (1 - F) from theta to V+1, exact per segment
                double total = 0.0;
                for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
                    double a = knots_[i].first, b = knots_[i + 1].first;
                    if (b <= theta) continue;
                    double lo2 = std::max(a, theta);
                    double fa = knots_[i].second, d = slopes_[i];
                    total += (1.0 - fa) * (b - lo2) -
                             d * ((b - a) * (b - a) - (lo2 - a) * (lo2 - a)) / 2.0;
                }
                return total;
            }
        }
        return 0.0;
    }

    template <class Rng>
    double sample(Rng& rng) const {
        if constexpr (requires(Rng& r) { r.next_double(); }) {
            return quantile(rng.next_double());
        } else {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            return quantile(u(rng));
        }
    }

    std::string family_name() const {
        switch (family_) {
            case Family::Uniform: return "uniform";
            case Family::TiltedExponential: return "tiltedexp";
            case Family::PiecewiseLinearCdf: return "pwl";
        }
        return "?";
    }

private:
    ValueDistribution() = default;

    std::size_t segment_by_v(double v) const {
        std::size_t lo = 0, hi = knots_.size() - 1;
        while (hi - lo > 1) {
            std::size_t mid = (lo + hi) / 2;
            if (knots_[mid].first <= v)
                lo = mid;
            else
                hi = mid;
        }
        return lo;
    }

    Family family_ = Family::Uniform;
    double V_ = 2.0;
    double k_ = 0.0;
    double mean_ = 2.5;
    std::vector<std::pair<double, double>> knots_;
    std::vector<double> slopes_;
};

}  // namespace promarket
