#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "promarket/distributions.hpp"

namespace promarket {

// 12 significant digits, '.' decimal separator, no exponent surprises beyond
// what %g produces; used for both CSV cells and JSON number-strings so golden
// outputs are platform-stable.
inline std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline ValueDistribution load_piecewise_linear_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::domain_error("cannot open prior file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::domain_error("bad prior JSON in " + path + ": " + e.what());
    }
    if (!doc.contains("V") || !doc.contains("knots"))
        throw std::domain_error("prior JSON needs fields V and knots");
    std::vector<std::pair<double, double>> knots;
    for (const auto& kn : doc["knots"]) {
        if (!kn.is_array() || kn.size() != 2)
            throw std::domain_error("each knot must be a [v, F] pair");
        knots.emplace_back(kn[0].get<double>(), kn[1].get<double>());
    }
    ValueDistribution d = ValueDistribution::piecewise_linear(std::move(knots));
    double V = doc["V"].get<double>();
    if (std::abs(V - d.lower()) > 1e-9)
        throw std::domain_error("V field disagrees with the first knot");
    return d;
}

// "lo:hi:n" -> n points, endpoints included (n == 1 yields lo).
inline std::vector<double> parse_grid(const std::string& s) {
    double lo = 0.0, hi = 0.0;
    long n = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(s);
    if (!(in >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' ||
        !in.eof() || n < 1)
        throw std::domain_error("bad grid spec '" + s + "' (want lo:hi:n)");
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(n));
    if (n == 1) {
        pts.push_back(lo);
        return pts;
    }
    for (long i = 0; i < n; ++i)
        pts.push_back(lo + (hi - lo) * static_cast<double>(i) /
                               static_cast<double>(n - 1));
    return pts;
}

}  // namespace promarket
