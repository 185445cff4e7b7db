#include "d2dsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "d2dsim/mobility.hpp"

namespace d2d {

namespace {

void validateParams(const Params& p) {
    if (!(p.dt > 0.0)) throw std::invalid_argument("Params: dt must be positive");
    if (!(p.r_b > 0.0) || !(p.r_d > 0.0)) {
        throw std::invalid_argument("Params: radii must be positive");
    }
    if (p.lambda_b < 0.0 || p.lambda_d < 0.0) {
        throw std::invalid_argument("Params: negative intensity");
    }
    if (p.v < 0.0) throw std::invalid_argument("Params: negative speed");
    if (p.h_max < 0) throw std::invalid_argument("Params: h_max must be non-negative");
    if (p.k_max < 1) throw std::invalid_argument("Params: k_max must be at least 1");
}

// Runs fn(0..n-1) on up to `threads` workers. Each index is processed exactly
// once; callers own any ordering of the results.
template <typename Fn>
void parallelFor(int n, int threads, Fn&& fn) {
    if (threads <= 0) {
        threads = static_cast<int>(std::thread::hardware_concurrency());
    }
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            try {
                fn(i);
            } catch (...) {
                std::scoped_lock lock(error_mu);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// Sample mean and standard error of the mean, in index order.
std::pair<double, double> meanStderr(const std::vector<double>& xs) {
    if (xs.empty()) return {0.0, 0.0};
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / static_cast<double>(xs.size());
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const auto n = static_cast<double>(xs.size());
    return {mean, std::sqrt(ss / (n * (n - 1.0)))};
}

} // namespace

ModelState initModel(const Params& p, const Window& w,
                     const std::vector<Point>& explicit_stations) {
    validateParams(p);
    if (!(w.area() > 0.0)) {
        throw std::invalid_argument("initModel: empty environment (window has no area)");
    }
    ModelState m;
    m.window = w;
    m.params = p;
    m.rng = RandomSource(p.seed);
    if (!explicit_stations.empty()) {
        for (const auto& pt : explicit_stations) m.stations.push_back({pt});
    } else {
        for (const auto& pt : samplePlanarPpp(perKm2ToPerM2(p.lambda_b), w, m.rng)) {
            m.stations.push_back({pt});
        }
    }
    for (const auto& pt : samplePlanarPpp(perKm2ToPerM2(p.lambda_d), w, m.rng)) {
        m.devices.push_back({pt, std::nullopt, std::nullopt});
    }
    return m;
}

ModelState initModel(const Params& p, const StreetGraph& g,
                     const std::vector<Point>& explicit_stations) {
    validateParams(p);
    if (g.edges.empty()) {
        throw std::invalid_argument("initModel: empty environment (street graph has no edges)");
    }
    ModelState m;
    m.graph = &g;
    m.params = p;
    m.rng = RandomSource(p.seed);
    if (!explicit_stations.empty()) {
        for (const auto& pt : explicit_stations) m.stations.push_back({pt});
    } else {
        for (const auto& gp : sampleLinearPpp(perKmToPerM(p.lambda_b), g, m.rng)) {
            m.stations.push_back({pointAt(g, gp)});
        }
    }
    for (const auto& gp : sampleLinearPpp(perKmToPerM(p.lambda_d), g, m.rng)) {
        m.devices.push_back({pointAt(g, gp), gp, std::nullopt});
    }
    return m;
}

void step(ModelState& m) {
    if (m.graph) {
        const double v = kmhToMps(m.params.v);
        for (auto& d : m.devices) {
            d.walk = stepMove(*m.graph, *d.walk, v, m.params.dt, m.rng);
            d.pos = pointAt(*m.graph, *d.walk);
        }
    }
    updateDisconnections(m.devices, m.stations, m.params.r_b, m.params.r_d);
    discoverAndConnect(m.devices, m.stations, m.params.r_b, m.params.r_d,
                       m.params.h_max);
    ++m.k;
}

std::vector<CoverageEstimate> runCoverageSweep(double lambda_per_m2,
                                               const std::vector<int>& h_values,
                                               double r_b, double r_d, int reps,
                                               int probes, std::uint64_t seed,
                                               int threads) {
    if (lambda_per_m2 < 0.0) {
        throw std::invalid_argument("runCoverageSweep: negative intensity");
    }
    if (h_values.empty()) {
        throw std::invalid_argument("runCoverageSweep: no hop limits given");
    }
    for (int h : h_values) {
        if (h < 0) throw std::invalid_argument("runCoverageSweep: negative h_max");
    }
    if (!(r_b > 0.0) || !(r_d > 0.0)) {
        throw std::invalid_argument("runCoverageSweep: radii must be positive");
    }
    if (reps < 1 || probes < 1) {
        throw std::invalid_argument("runCoverageSweep: reps and probes must be positive");
    }

    const int max_h = *std::max_element(h_values.begin(), h_values.end());
    const double half = r_b + static_cast<double>(max_h) * r_d + r_d;
    const Window w = Window::centeredSquare({0.0, 0.0}, half);
    const Point center{0.0, 0.0};
    const double area = w.area();
    const std::size_t nh = h_values.size();

    std::vector<std::vector<double>> per_rep(reps, std::vector<double>(nh, 0.0));
    parallelFor(reps, threads, [&](int rep) {
        RandomSource dev_rng = RandomSource::substream(seed, rep, 0);
        RandomSource probe_rng = RandomSource::substream(seed, rep, 1);
        const auto devs = samplePlanarPpp(lambda_per_m2, w, dev_rng);

        // Relay eligibility only needs levels up to max_h - 1.
        HopLevels levels;
        SpatialGrid grid;
        if (max_h >= 1 && !devs.empty()) {
            levels = computeHopLevels(devs, {center}, r_b, r_d, max_h - 1);
            grid = SpatialGrid(devs, std::max(r_b, r_d));
        }

        std::vector<std::int64_t> covered(nh, 0);
        std::vector<std::size_t> buf;
        const double rb2 = r_b * r_b;
        for (int p = 0; p < probes; ++p) {
            const double x = probe_rng.uniform(w.x_min, w.x_max);
            const double y = probe_rng.uniform(w.y_min, w.y_max);
            const Point probe{x, y};
            if (squaredDistance(probe, center) <= rb2) {
                for (std::size_t hi = 0; hi < nh; ++hi) ++covered[hi];
                continue;
            }
            int min_level = std::numeric_limits<int>::max();
            if (max_h >= 1 && !devs.empty()) {
                grid.query(probe, r_d, buf);
                for (std::size_t j : buf) {
                    if (levels.level[j] && *levels.level[j] < min_level) {
                        min_level = *levels.level[j];
                    }
                }
            }
            if (min_level == std::numeric_limits<int>::max()) continue;
            for (std::size_t hi = 0; hi < nh; ++hi) {
                if (min_level <= h_values[hi] - 1) ++covered[hi];
            }
        }
        for (std::size_t hi = 0; hi < nh; ++hi) {
            per_rep[rep][hi] =
                static_cast<double>(covered[hi]) / static_cast<double>(probes) * area;
        }
    });

    std::vector<CoverageEstimate> out(nh);
    std::vector<double> column(reps);
    for (std::size_t hi = 0; hi < nh; ++hi) {
        for (int rep = 0; rep < reps; ++rep) column[rep] = per_rep[rep][hi];
        const auto [mean, se] = meanStderr(column);
        out[hi] = {h_values[hi], mean, se};
    }
    return out;
}

RunSummary runCoverage(double lambda_per_m2, int h_max, double r_b, double r_d,
                       int reps, int probes, std::uint64_t seed, int threads) {
    const auto est =
        runCoverageSweep(lambda_per_m2, {h_max}, r_b, r_d, reps, probes, seed, threads);
    RunSummary s;
    s.area_mean_m2 = est[0].area_mean_m2;
    s.area_stderr_m2 = est[0].area_stderr_m2;
    s.replications = reps;
    return s;
}

RunSummary runStreets(const Params& p, const StreetGraph& g,
                      const std::vector<Point>& stations, int reps, int threads) {
    validateParams(p);
    if (stations.empty()) {
        throw std::invalid_argument("runStreets: station list must be non-empty");
    }
    if (reps < 1) throw std::invalid_argument("runStreets: reps must be positive");

    struct RepResult {
        std::vector<double> times_s;
        std::vector<std::int64_t> connected_per_step;
    };
    std::vector<RepResult> results(reps);

    parallelFor(reps, threads, [&](int rep) {
        Params pr = p;
        pr.seed = substreamSeed(p.seed, rep, 0);
        ModelState m = initModel(pr, g, stations);
        std::vector<int> connected_steps(m.devices.size(), 0);
        RepResult& r = results[rep];
        r.connected_per_step.assign(p.k_max, 0);
        for (int k = 0; k < p.k_max; ++k) {
            step(m);
            std::int64_t c = 0;
            for (std::size_t i = 0; i < m.devices.size(); ++i) {
                if (m.devices[i].connected()) {
                    ++connected_steps[i];
                    ++c;
                }
            }
            r.connected_per_step[k] = c;
        }
        r.times_s.reserve(connected_steps.size());
        for (int s : connected_steps) {
            r.times_s.push_back(static_cast<double>(s) * p.dt);
        }
    });

    RunSummary out;
    out.replications = reps;
    out.mean_connected_per_step.assign(p.k_max, 0.0);
    std::vector<double> rep_means;
    for (int rep = 0; rep < reps; ++rep) {
        const RepResult& r = results[rep];
        out.device_connection_times_s.insert(out.device_connection_times_s.end(),
                                             r.times_s.begin(), r.times_s.end());
        for (int k = 0; k < p.k_max; ++k) {
            out.mean_connected_per_step[k] +=
                static_cast<double>(r.connected_per_step[k]) / static_cast<double>(reps);
        }
        if (!r.times_s.empty()) {
            double sum = 0.0;
            for (double t : r.times_s) sum += t;
            rep_means.push_back(sum / static_cast<double>(r.times_s.size()));
        }
    }
    const auto [mean, se] = meanStderr(rep_means);
    out.mean_connection_time_s = mean;
    out.stderr_connection_time_s = se;
    return out;
}

} // namespace d2d
