#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "promarket/promarket.hpp"

using json = nlohmann::ordered_json;
using namespace promarket;

namespace {

struct DistOpts {
    std::string spec = "uniform";
    double V = 2.0;
    double k = 1.0;
};

void add_dist_options(CLI::App* cmd, DistOpts& d) {
    cmd->add_option("--dist", d.spec,
                    "value prior: uniform | tiltedexp | pwl:<file>")
        ->capture_default_str();
    cmd->add_option("--V", d.V, "support lower bound for the uniform family")
        ->capture_default_str();
    cmd->add_option("--k", d.k, "tilt parameter for the tiltedexp family")
        ->capture_default_str();
}

ValueDistribution make_dist(const DistOpts& d) {
    if (d.spec == "uniform") return ValueDistribution::uniform(d.V);
    if (d.spec == "tiltedexp") return ValueDistribution::tilted_exponential(d.k);
    if (d.spec.rfind("pwl:", 0) == 0)
        return load_piecewise_linear_json(d.spec.substr(4));
    throw std::domain_error("unknown distribution spec '" + d.spec + "'");
}

std::string regime_of(const MarketConfig& cfg) {
    return cfg.main_regime ? "main" : "degenerate";
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::domain_error("cannot open output file: " + out_path);
    f << text;
}

std::vector<double> parse_prices(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw std::domain_error("bad price list '" + s + "'");
        }
    }
    if (out.empty()) throw std::domain_error("empty price list");
    return out;
}

json witness_json(const DeviationWitness& w) {
    json j;
    j["seller"] = w.seller;
    j["deviating_price"] = fmt12(w.deviating_price);
    j["baseline_revenue"] = fmt12(w.baseline_revenue);
    j["deviation_revenue"] = fmt12(w.deviation_revenue);
    j["gain"] = fmt12(w.gain);
    return j;
}

int run(int argc, char** argv) {
    CLI::App app{"search-market equilibrium toolkit"};
    app.require_subcommand(1);

    // theta ------------------------------------------------------------
    auto* theta = app.add_subcommand("theta", "reservation threshold and regime flags");
    DistOpts theta_dist;
    double theta_c = 0.0;
    int theta_m = 2;
    std::string theta_fmt = "json", theta_out;
    add_dist_options(theta, theta_dist);
    theta->add_option("--c", theta_c, "inspection cost")->required();
    theta->add_option("--m", theta_m, "seller count")->capture_default_str();
    theta->add_option("--format", theta_fmt)->check(CLI::IsMember({"csv", "json"}));
    theta->add_option("--out", theta_out, "output path (default stdout)");

    // demand -----------------------------------------------------------
    auto* demand = app.add_subcommand("demand", "deviation demand curves vs Monte Carlo");
    DistOpts demand_dist;
    double demand_c = 0.0, demand_t = -1.0;
    int demand_m = 2, demand_workers = 0;
    long long demand_n = 100000;
    std::uint64_t demand_seed = 0;
    std::string demand_xgrid, demand_fmt = "csv", demand_out;
    add_dist_options(demand, demand_dist);
    demand->add_option("--c", demand_c)->required();
    demand->add_option("--m", demand_m)->capture_default_str();
    demand->add_option("--x-grid", demand_xgrid, "deviation grid lo:hi:n")->required();
    demand->add_option("--t", demand_t, "symmetric price held by rivals (default V/2)");
    demand->add_option("--n", demand_n, "Monte Carlo samples per row")->capture_default_str();
    demand->add_option("--seed", demand_seed)->required();
    demand->add_option("--workers", demand_workers)->capture_default_str();
    demand->add_option("--format", demand_fmt)->check(CLI::IsMember({"csv", "json"}));
    demand->add_option("--out", demand_out);

    // range ------------------------------------------------------------
    auto* range = app.add_subcommand("range", "implementable-price interval");
    DistOpts range_dist;
    std::string range_mech = "dictator";
    double range_c = -1.0;
    int range_m = 2;
    std::string range_cgrid, range_fmt = "json", range_out;
    add_dist_options(range, range_dist);
    range->add_option("--mech", range_mech, "dictator | threshold")->capture_default_str();
    range->add_option("--c", range_c, "inspection cost");
    range->add_option("--c-grid", range_cgrid, "cost grid lo:hi:n");
    range->add_option("--m", range_m)->capture_default_str();
    range->add_option("--format", range_fmt)->check(CLI::IsMember({"csv", "json"}));
    range->add_option("--out", range_out);

    // verify -----------------------------------------------------------
    auto* verify = app.add_subcommand("verify", "symmetric-equilibrium check at price t");
    DistOpts verify_dist;
    std::string verify_mech;
    double verify_c = 0.0, verify_t = -1.0;
    int verify_m = 2;
    std::string verify_out;
    add_dist_options(verify, verify_dist);
    verify->add_option("--mech", verify_mech, "dictator:<t> | threshold:<t>")->required();
    verify->add_option("--c", verify_c)->required();
    verify->add_option("--t", verify_t, "symmetric price (defaults to the mechanism target)");
    verify->add_option("--m", verify_m)->capture_default_str();
    verify->add_option("--out", verify_out);

    // sweep ------------------------------------------------------------
    auto* sweep = app.add_subcommand("sweep", "welfare/consumer-surplus frontier sweep");
    DistOpts sweep_dist;
    std::string sweep_cgrid;
    int sweep_m = 2, sweep_workers = 0;
    long long sweep_n = 200000;
    std::uint64_t sweep_seed = 0;
    bool sweep_has_seed = false;
    std::string sweep_fmt = "csv", sweep_out;
    add_dist_options(sweep, sweep_dist);
    sweep->add_option("--c-grid", sweep_cgrid)->required();
    sweep->add_option("--m", sweep_m)->capture_default_str();
    sweep->add_option("--n", sweep_n, "Monte Carlo samples (m != 2 only)")->capture_default_str();
    auto* sweep_seed_opt = sweep->add_option("--seed", sweep_seed);
    sweep->add_option("--workers", sweep_workers)->capture_default_str();
    sweep->add_option("--format", sweep_fmt)->check(CLI::IsMember({"csv", "json"}));
    sweep->add_option("--out", sweep_out);
    (void)sweep_has_seed;

    // simulate ---------------------------------------------------------
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo demand for a price profile");
    DistOpts sim_dist;
    double sim_c = 0.0;
    std::string sim_prices, sim_prom = "none", sim_mech;
    long long sim_n = 100000;
    std::uint64_t sim_seed = 0;
    int sim_workers = 0;
    std::string sim_out;
    add_dist_options(simulate, sim_dist);
    simulate->add_option("--c", sim_c)->required();
    simulate->add_option("--prices", sim_prices, "comma-separated price profile")->required();
    simulate->add_option("--prom", sim_prom, "prominent seller id or 'none'")->capture_default_str();
    simulate->add_option("--mech", sim_mech, "sample prominence from a mechanism instead");
    simulate->add_option("--n", sim_n)->capture_default_str();
    simulate->add_option("--seed", sim_seed)->required();
    simulate->add_option("--workers", sim_workers)->capture_default_str();
    simulate->add_option("--out", sim_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage errors map to exit code 2
    }

    if (theta->parsed()) {
        MarketConfig cfg(theta_m, theta_c, make_dist(theta_dist));
        if (theta_fmt == "json") {
            json j;
            j["regime"] = regime_of(cfg);
            j["theta0"] = fmt12(cfg.theta0);
            j["cbar"] = fmt12(cfg.cbar);
            j["theta0_positive"] = cfg.theta0_positive;
            j["main_regime"] = cfg.main_regime;
            j["v_at_least_two"] = cfg.v_at_least_two;
            emit(theta_out, j.dump(2) + "\n");
        } else {
            std::string s = "# regime=" + regime_of(cfg) + "\n";
            s += "theta0,cbar,theta0_positive,main_regime,v_at_least_two\n";
            s += fmt12(cfg.theta0) + "," + fmt12(cfg.cbar) + "," +
                 std::to_string(int(cfg.theta0_positive)) + "," +
                 std::to_string(int(cfg.main_regime)) + "," +
                 std::to_string(int(cfg.v_at_least_two)) + "\n";
            emit(theta_out, s);
        }
        return 0;
    }

    if (demand->parsed()) {
        MarketConfig cfg(demand_m, demand_c, make_dist(demand_dist));
        cfg.require_main_regime();
        std::vector<double> xs = parse_grid(demand_xgrid);
        double t = demand_t >= 0.0 ? demand_t : cfg.dist.lower() / 2.0;
        std::string header = "x,D_c,D_tilde,D_bb,D_mc,D_mc_stderr";
        std::vector<std::vector<std::string>> rows;
        for (double x : xs) {
            std::vector<double> prices(static_cast<std::size_t>(cfg.m), t);
            prices[0] = t + x;
            DemandEstimate mc = demand_mc(cfg, prices, ProminenceAssignment{1},
                                          demand_n, demand_seed, demand_workers);
            rows.push_back({fmt12(x), fmt12(demand_deviation_dictator(cfg, x)),
                            fmt12(demand_deviation_threshold(cfg, x)),
                            fmt12(demand_bb(cfg, x)), fmt12(mc.demand[0]),
                            fmt12(mc.stderr_[0])});
        }
        if (demand_fmt == "csv") {
            std::string s = "# regime=" + regime_of(cfg) + "\n" + header + "\n";
            for (const auto& r : rows) {
                for (std::size_t i = 0; i < r.size(); ++i)
                    s += (i ? "," : "") + r[i];
                s += "\n";
            }
            emit(demand_out, s);
        } else {
            json j;
            j["regime"] = regime_of(cfg);
            j["rows"] = json::array();
            for (const auto& r : rows)
                j["rows"].push_back({{"x", r[0]}, {"D_c", r[1]}, {"D_tilde", r[2]},
                                     {"D_bb", r[3]}, {"D_mc", r[4]},
                                     {"D_mc_stderr", r[5]}});
            emit(demand_out, j.dump(2) + "\n");
        }
        return 0;
    }

    if (range->parsed()) {
        if ((range_c >= 0.0) == !range_cgrid.empty())
            throw std::domain_error("give exactly one of --c / --c-grid");
        ValueDistribution dist = make_dist(range_dist);
        std::string kind = range_mech.substr(0, range_mech.find(':'));
        if (kind != "dictator" && kind != "threshold")
            throw std::domain_error("range supports dictator and threshold mechanisms");
        std::vector<double> cs = range_cgrid.empty()
                                     ? std::vector<double>{range_c}
                                     : parse_grid(range_cgrid);
        struct Row { double c, lo, hi; bool empty; };
        std::vector<Row> rows;
        for (double c : cs) {
            MarketConfig cfg(range_m, c, dist);
            cfg.require_main_regime();
            PriceInterval iv = kind == "dictator" ? dictator_range(cfg)
                                                  : threshold_range(cfg);
            rows.push_back({c, iv.lo, iv.hi, iv.empty});
        }
        if (range_fmt == "json" && rows.size() == 1) {
            json j;
            j["regime"] = "main";
            j["mechanism"] = kind;
            j["c"] = fmt12(rows[0].c);
            j["t_star"] = fmt12(rows[0].lo);
            j["upper"] = fmt12(rows[0].hi);
            j["empty"] = rows[0].empty;
            emit(range_out, j.dump(2) + "\n");
        } else if (range_fmt == "json") {
            json j;
            j["regime"] = "main";
            j["mechanism"] = kind;
            j["rows"] = json::array();
            for (const Row& r : rows)
                j["rows"].push_back({{"c", fmt12(r.c)}, {"t_star", fmt12(r.lo)},
                                     {"upper", fmt12(r.hi)}, {"empty", r.empty}});
            emit(range_out, j.dump(2) + "\n");
        } else {
            std::string s = "# regime=main\nmechanism,c,t_star,upper,empty\n";
            for (const Row& r : rows)
                s += kind + "," + fmt12(r.c) + "," + fmt12(r.lo) + "," +
                     fmt12(r.hi) + "," + std::to_string(int(r.empty)) + "\n";
            emit(range_out, s);
        }
        return 0;
    }

    if (verify->parsed()) {
        Mechanism mech = Mechanism::parse(verify_mech);
        double t = verify_t >= 0.0 ? verify_t : mech.t;
        MarketConfig cfg(verify_m, verify_c, make_dist(verify_dist));
        cfg.require_main_regime();
        VerifyResult res = verify_symmetric_equilibrium(cfg, mech, t);
        json j;
        j["regime"] = regime_of(cfg);
        j["mechanism"] = verify_mech;
        j["t"] = fmt12(t);
        j["equilibrium"] = res.equilibrium;
        j["witness"] = res.witness ? witness_json(*res.witness) : json(nullptr);
        emit(verify_out, j.dump(2) + "\n");
        return 0;
    }

    if (sweep->parsed()) {
        ValueDistribution dist = make_dist(sweep_dist);
        std::vector<double> cs = parse_grid(sweep_cgrid);
        if (sweep_m != 2 && sweep_seed_opt->count() == 0)
            throw std::domain_error("--seed required for Monte Carlo sweeps (m != 2)");
        std::vector<WelfareRow> rows =
            surplus_curve(dist, sweep_m, cs, sweep_n, sweep_seed, sweep_workers);
        if (sweep_fmt == "csv") {
            std::string s = "# regime=main\nc,theta0,t_star,sw,cs_at_tstar,sw_stderr\n";
            for (const WelfareRow& r : rows)
                s += fmt12(r.c) + "," + fmt12(r.theta0) + "," + fmt12(r.t_star) +
                     "," + fmt12(r.sw) + "," + fmt12(r.cs_at_tstar) + "," +
                     fmt12(r.sw_stderr) + "\n";
            emit(sweep_out, s);
        } else {
            json j;
            j["regime"] = "main";
            j["rows"] = json::array();
            for (const WelfareRow& r : rows)
                j["rows"].push_back({{"c", fmt12(r.c)}, {"theta0", fmt12(r.theta0)},
                                     {"t_star", fmt12(r.t_star)}, {"sw", fmt12(r.sw)},
                                     {"cs_at_tstar", fmt12(r.cs_at_tstar)},
                                     {"sw_stderr", fmt12(r.sw_stderr)}});
            emit(sweep_out, j.dump(2) + "\n");
        }
        return 0;
    }

    if (simulate->parsed()) {
        std::vector<double> prices = parse_prices(sim_prices);
        MarketConfig cfg(static_cast<int>(prices.size()), sim_c, make_dist(sim_dist));
        DemandEstimate est;
        if (!sim_mech.empty()) {
            est = demand_mc(cfg, prices, Mechanism::parse(sim_mech), sim_n,
                            sim_seed, sim_workers);
        } else {
            int prom = -1;
            if (sim_prom != "none") {
                try {
                    prom = std::stoi(sim_prom);
                } catch (const std::exception&) {
                    throw std::domain_error("bad --prom value '" + sim_prom + "'");
                }
            }
            est = demand_mc(cfg, prices, ProminenceAssignment{prom}, sim_n,
                            sim_seed, sim_workers);
        }
        json j;
        j["regime"] = regime_of(cfg);
        j["n"] = est.n;
        j["seed"] = est.seed;
        j["demand"] = json::array();
        j["stderr"] = json::array();
        for (int s = 0; s < cfg.m; ++s) {
            j["demand"].push_back(fmt12(est.demand[s]));
            j["stderr"].push_back(fmt12(est.stderr_[s]));
        }
        j["total_purchase_rate"] = fmt12(est.total());
        emit(sim_out, j.dump(2) + "\n");
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    }
}
