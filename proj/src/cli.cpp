#include "d2dsim/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "d2dsim/analytic.hpp"
#include "d2dsim/mobility.hpp"

namespace d2d {

namespace {

std::string fmtNum(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::vector<Point> parseStationList(const std::string& text) {
    std::vector<Point> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ';')) {
        const auto comma = part.find(',');
        if (comma == std::string::npos) {
            throw UsageError("--bs expects x,y pairs separated by ';'");
        }
        try {
            std::size_t used = 0;
            const double x = std::stod(part.substr(0, comma), &used);
            const double y = std::stod(part.substr(comma + 1), &used);
            out.push_back({x, y});
        } catch (const std::exception&) {
            throw UsageError("--bs: malformed coordinate in \"" + part + "\"");
        }
    }
    if (out.empty()) throw UsageError("--bs: no coordinates given");
    return out;
}

double asNumber(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number()) throw UsageError("config key \"" + key + "\" must be a number");
    return v.get<double>();
}

int asInt(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number_integer()) {
        throw UsageError("config key \"" + key + "\" must be an integer");
    }
    return v.get<int>();
}

void applyConfigFile(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read config file: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("malformed config JSON: " + std::string(e.what()));
    }
    if (!doc.is_object()) throw UsageError("config file must hold a JSON object");

    for (const auto& [key, val] : doc.items()) {
        if (key == "scenario") {
            if (!val.is_string()) throw UsageError("config key \"scenario\" must be a string");
            const std::string s = val.get<std::string>();
            if (s == "analytic") cfg.scenario = Scenario::Analytic;
            else if (s == "coverage") cfg.scenario = Scenario::Coverage;
            else if (s == "streets") cfg.scenario = Scenario::Streets;
            else if (s == "mobility-check") cfg.scenario = Scenario::MobilityCheck;
            else throw UsageError("unknown scenario \"" + s + "\" in config file");
        } else if (key == "seed") {
            if (!val.is_number_integer()) throw UsageError("config key \"seed\" must be an integer");
            cfg.params.seed = val.get<std::uint64_t>();
        } else if (key == "reps") {
            cfg.reps = asInt(val, key);
        } else if (key == "probes") {
            cfg.probes = asInt(val, key);
        } else if (key == "lambda") {
            cfg.lambda = asNumber(val, key);
        } else if (key == "lambda_d") {
            cfg.params.lambda_d = asNumber(val, key);
        } else if (key == "lambda_b") {
            cfg.params.lambda_b = asNumber(val, key);
        } else if (key == "hmax") {
            cfg.params.h_max = asInt(val, key);
        } else if (key == "rb") {
            cfg.params.r_b = asNumber(val, key);
        } else if (key == "rd") {
            cfg.params.r_d = asNumber(val, key);
        } else if (key == "speed") {
            cfg.params.v = asNumber(val, key);
        } else if (key == "dt") {
            cfg.params.dt = asNumber(val, key);
        } else if (key == "kmax") {
            cfg.params.k_max = asInt(val, key);
        } else if (key == "map") {
            if (!val.is_string()) throw UsageError("config key \"map\" must be a string");
            cfg.map_path = val.get<std::string>();
        } else if (key == "out") {
            if (!val.is_string()) throw UsageError("config key \"out\" must be a string");
            cfg.out_path = val.get<std::string>();
        } else if (key == "bs") {
            if (!val.is_array()) throw UsageError("config key \"bs\" must be an array of [x, y]");
            cfg.stations.clear();
            for (const auto& pt : val) {
                if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number()) {
                    throw UsageError("config key \"bs\" must be an array of [x, y]");
                }
                cfg.stations.push_back({pt[0].get<double>(), pt[1].get<double>()});
            }
        } else if (key == "sweep") {
            if (!val.is_array()) throw UsageError("config key \"sweep\" must be an array of [lambda, hmax]");
            cfg.sweep.clear();
            for (const auto& entry : val) {
                if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
                    !entry[1].is_number_integer()) {
                    throw UsageError("config key \"sweep\" must be an array of [lambda, hmax]");
                }
                cfg.sweep.emplace_back(entry[0].get<double>(), entry[1].get<int>());
            }
        } else {
            throw UsageError("unknown config key: \"" + key + "\"");
        }
    }
}

void validateConfig(const RunConfig& cfg) {
    const Params& p = cfg.params;
    if (!(p.dt > 0.0)) throw UsageError("dt must be positive");
    if (!(p.r_b > 0.0) || !(p.r_d > 0.0)) throw UsageError("radii must be positive");
    if (p.v < 0.0) throw UsageError("speed must be non-negative");
    if (p.h_max < 0) throw UsageError("hmax must be non-negative");
    if (p.k_max < 1) throw UsageError("kmax must be at least 1");
    if (p.lambda_b < 0.0 || p.lambda_d < 0.0 || cfg.lambda < 0.0) {
        throw UsageError("intensities must be non-negative");
    }
    if (cfg.reps < 1) throw UsageError("reps must be at least 1");
    if (cfg.probes < 1) throw UsageError("probes must be at least 1");
    for (const auto& [lam, h] : cfg.sweep) {
        if (lam < 0.0) throw UsageError("sweep intensities must be non-negative");
        if (h < 0) throw UsageError("sweep hmax values must be non-negative");
    }
    if ((cfg.scenario == Scenario::Streets || cfg.scenario == Scenario::MobilityCheck) &&
        cfg.map_path.empty()) {
        throw UsageError("this scenario requires --map <geojson>");
    }
    if (cfg.scenario == Scenario::Streets && cfg.stations.empty()) {
        throw UsageError("scenario streets requires station coordinates (--bs)");
    }
}

// ---- scenario emitters ------------------------------------------------

void emitAnalytic(const RunConfig& cfg, std::ostream& csv, std::string& summary) {
    std::vector<double> lambdas;
    if (cfg.sweep.empty()) {
        lambdas.push_back(cfg.lambda);
    } else {
        for (const auto& [lam, h] : cfg.sweep) lambdas.push_back(lam);
    }
    csv << "lambda,r_b,r_d,area_m2\n";
    for (double lam : lambdas) {
        CoverageQuery q;
        q.lambda = perKm2ToPerM2(lam);
        q.r_b = cfg.params.r_b;
        q.r_d = cfg.params.r_d;
        const double area = expectedOneHopArea(q);
        csv << fmtNum(lam) << ',' << fmtNum(q.r_b) << ',' << fmtNum(q.r_d) << ','
            << fmtNum(area) << '\n';
    }
    summary = "analytic: " + std::to_string(lambdas.size()) + " lambda value(s), r_b=" +
              fmtNum(cfg.params.r_b) + " r_d=" + fmtNum(cfg.params.r_d);
}

void emitCoverage(const RunConfig& cfg, std::ostream& csv, std::string& summary) {
    // Sweep entries sharing a lambda run on shared replications so hop-limit
    // curves are paired; rows come out grouped by lambda in first-appearance
    // order.
    std::vector<std::pair<double, std::vector<int>>> groups;
    if (cfg.sweep.empty()) {
        groups.emplace_back(cfg.lambda, std::vector<int>{cfg.params.h_max});
    } else {
        for (const auto& [lam, h] : cfg.sweep) {
            auto it = std::find_if(groups.begin(), groups.end(),
                                   [&](const auto& g) { return g.first == lam; });
            if (it == groups.end()) {
                groups.emplace_back(lam, std::vector<int>{h});
            } else {
                it->second.push_back(h);
            }
        }
    }
    csv << "lambda,h_max,reps,probes,area_mean_m2,area_stderr_m2,seed\n";
    std::size_t rows = 0;
    for (const auto& [lam, hs] : groups) {
        const auto est = runCoverageSweep(perKm2ToPerM2(lam), hs, cfg.params.r_b,
                                          cfg.params.r_d, cfg.reps, cfg.probes,
                                          cfg.params.seed);
        for (const auto& e : est) {
            csv << fmtNum(lam) << ',' << e.h_max << ',' << cfg.reps << ',' << cfg.probes
                << ',' << fmtNum(e.area_mean_m2) << ',' << fmtNum(e.area_stderr_m2)
                << ',' << cfg.params.seed << '\n';
            ++rows;
        }
    }
    summary = "coverage: " + std::to_string(rows) + " grid point(s), reps=" +
              std::to_string(cfg.reps) + " probes=" + std::to_string(cfg.probes);
}

void emitStreets(const RunConfig& cfg, std::ostream& csv, std::string& summary) {
    const StreetGraph g = loadStreetGraphFile(cfg.map_path);
    const double total = g.totalLength();
    const double covered = coveredStreetLength(g, cfg.stations, cfg.params.r_b);

    std::vector<std::pair<double, int>> entries = cfg.sweep;
    if (entries.empty()) {
        entries.emplace_back(cfg.params.lambda_d, cfg.params.h_max);
    }
    csv << "map,lambda_d,h_max,reps,mean_conn_time_s,stderr_s,covered_len_m,"
           "total_len_m,seed\n";
    for (const auto& [lam, h] : entries) {
        Params p = cfg.params;
        p.lambda_d = lam;
        p.h_max = h;
        const RunSummary s = runStreets(p, g, cfg.stations, cfg.reps);
        csv << cfg.map_path << ',' << fmtNum(lam) << ',' << h << ',' << cfg.reps << ','
            << fmtNum(s.mean_connection_time_s) << ','
            << fmtNum(s.stderr_connection_time_s) << ',' << fmtNum(covered) << ','
            << fmtNum(total) << ',' << cfg.params.seed << '\n';
    }
    summary = "streets: " + std::to_string(entries.size()) + " run(s) on " +
              cfg.map_path + ", covered/total = " + fmtNum(covered) + "/" + fmtNum(total);
}

// Empirical turn-frequency check: for every (node, arrival edge) pair of the
// map, sample stepMove transitions through the node and report observed
// frequencies next to the turn-distribution probabilities (or the
// deterministic reversal at dead ends).
void emitMobilityCheck(const RunConfig& cfg, std::ostream& csv, std::string& summary) {
    const StreetGraph g = loadStreetGraphFile(cfg.map_path);
    const int trials = cfg.probes;
    RandomSource rng(cfg.params.seed);

    csv << "map,node,arrival_edge,edge,kind,expected,observed,transitions\n";
    double worst = 0.0;
    for (NodeId node = 0; node < g.nodes.size(); ++node) {
        for (EdgeId arrival : g.incident[node]) {
            // Expected outgoing probabilities.
            std::map<EdgeId, std::pair<std::string, double>> expected;
            const bool dead_end = g.degree(node) == 1;
            if (dead_end) {
                expected[arrival] = {"reverse", 1.0};
            } else {
                const TurnDistribution td = turnDistribution(g, node, arrival);
                if (td.straight) {
                    expected[td.straight->first] = {"straight", td.straight->second};
                }
                for (const auto& [e, p] : td.turns) expected[e] = {"turn", p};
            }

            // Observed frequencies from stepMove through the node.
            const StreetEdge& ae = g.edges[arrival];
            const double eps = std::min(0.5, ae.length / 4.0);
            double shortest_exit = ae.length;
            for (EdgeId e : g.incident[node]) {
                shortest_exit = std::min(shortest_exit, g.edges[e].length);
            }
            const double overshoot = std::min(0.25, shortest_exit / 4.0);
            GraphPosition start;
            if (ae.u == node) {
                start = {arrival, eps, Heading::TowardU};
            } else {
                start = {arrival, ae.length - eps, Heading::TowardV};
            }
            std::map<EdgeId, std::int64_t> observed;
            for (int t = 0; t < trials; ++t) {
                const GraphPosition end =
                    stepMove(g, start, 1.0, eps + overshoot, rng);
                ++observed[end.edge];
            }

            for (const auto& [e, exp] : expected) {
                const double obs = static_cast<double>(observed[e]) /
                                   static_cast<double>(trials);
                worst = std::max(worst, std::abs(obs - exp.second));
                csv << cfg.map_path << ',' << node << ',' << arrival << ',' << e << ','
                    << exp.first << ',' << fmtNum(exp.second) << ',' << fmtNum(obs)
                    << ',' << trials << '\n';
            }
        }
    }
    summary = "mobility-check: " + cfg.map_path +
              ", max |observed - expected| = " + fmtNum(worst);
}

} // namespace

RunConfig parseConfig(const std::vector<std::string>& args) {
    CLI::App app{"d2dsim: multi-hop device-to-device coverage and street-mobility simulator"};
    app.require_subcommand(1);

    auto* sc_analytic =
        app.add_subcommand("analytic", "closed-form expected one-hop covered area");
    auto* sc_coverage =
        app.add_subcommand("coverage", "Monte Carlo covered-area estimate, one station");
    auto* sc_streets =
        app.add_subcommand("streets", "connection-time runs on a street map");
    auto* sc_mobility = app.add_subcommand(
        "mobility-check", "empirical turn frequencies vs. the mobility law");
    for (auto* sc : {sc_analytic, sc_coverage, sc_streets, sc_mobility}) {
        sc->fallthrough();
    }

    std::string config_path, map_path, bs_text, out_path;
    std::uint64_t seed = 0;
    int reps = 0, probes = 0, hmax = 0, kmax = 0;
    double lambda = 0.0, lambda_d = 0.0, rb = 0.0, rd = 0.0, speed = 0.0, dt = 0.0;

    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--seed", seed, "run seed");
    app.add_option("--reps", reps, "replications");
    app.add_option("--probes", probes, "area probes / sampled transitions");
    app.add_option("--lambda", lambda, "device intensity, per km^2 (analytic/coverage)");
    app.add_option("--lambda-d", lambda_d, "device intensity, per km of street");
    app.add_option("--hmax", hmax, "maximum relaying hops");
    app.add_option("--rb", rb, "station radius, m");
    app.add_option("--rd", rd, "device radius, m");
    app.add_option("--speed", speed, "device speed, km/h");
    app.add_option("--dt", dt, "step length, s");
    app.add_option("--kmax", kmax, "steps per replication");
    app.add_option("--map", map_path, "GeoJSON street map");
    app.add_option("--bs", bs_text, "station coordinates \"x,y[;x,y...]\"");
    app.add_option("--out", out_path, "output CSV path (default: stdout)");

    std::vector<const char*> argv;
    argv.push_back("d2dsim");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested{app.help()};
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    RunConfig cfg;
    if (app.got_subcommand(sc_analytic)) cfg.scenario = Scenario::Analytic;
    if (app.got_subcommand(sc_coverage)) cfg.scenario = Scenario::Coverage;
    if (app.got_subcommand(sc_streets)) cfg.scenario = Scenario::Streets;
    if (app.got_subcommand(sc_mobility)) cfg.scenario = Scenario::MobilityCheck;
    const Scenario from_subcommand = cfg.scenario;

    if (app.count("--config") > 0) applyConfigFile(cfg, config_path);
    cfg.scenario = from_subcommand; // the subcommand always wins

    if (app.count("--seed") > 0) cfg.params.seed = seed;
    if (app.count("--reps") > 0) cfg.reps = reps;
    if (app.count("--probes") > 0) cfg.probes = probes;
    if (app.count("--lambda") > 0) cfg.lambda = lambda;
    if (app.count("--lambda-d") > 0) cfg.params.lambda_d = lambda_d;
    if (app.count("--hmax") > 0) cfg.params.h_max = hmax;
    if (app.count("--rb") > 0) cfg.params.r_b = rb;
    if (app.count("--rd") > 0) cfg.params.r_d = rd;
    if (app.count("--speed") > 0) cfg.params.v = speed;
    if (app.count("--dt") > 0) cfg.params.dt = dt;
    if (app.count("--kmax") > 0) cfg.params.k_max = kmax;
    if (app.count("--map") > 0) cfg.map_path = map_path;
    if (app.count("--bs") > 0) cfg.stations = parseStationList(bs_text);
    if (app.count("--out") > 0) cfg.out_path = out_path;

    validateConfig(cfg);
    return cfg;
}

int runAndEmit(const RunConfig& cfg) {
    std::ostringstream csv;
    std::string summary;
    switch (cfg.scenario) {
    case Scenario::Analytic:
        emitAnalytic(cfg, csv, summary);
        break;
    case Scenario::Coverage:
        emitCoverage(cfg, csv, summary);
        break;
    case Scenario::Streets:
        emitStreets(cfg, csv, summary);
        break;
    case Scenario::MobilityCheck:
        emitMobilityCheck(cfg, csv, summary);
        break;
    }
    if (cfg.out_path.empty()) {
        std::cout << csv.str();
        std::cerr << summary << '\n';
    } else {
        std::ofstream out(cfg.out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open output file: " + cfg.out_path);
        out << csv.str();
        out.flush();
        if (!out) throw std::runtime_error("failed writing output file: " + cfg.out_path);
        std::cout << summary << " -> " << cfg.out_path << '\n';
    }
    return 0;
}

} // namespace d2d
