#pragma once

#include <cstdint>
#include <vector>

#include "d2dsim/agents.hpp"
#include "d2dsim/geom.hpp"
#include "d2dsim/rng.hpp"
#include "d2dsim/streets.hpp"

namespace d2d {

// Model parameters in interface units: lengths in meters, times in seconds,
// intensities per km^2 (planar scenarios) or per km of street (linear), speed
// in km/h. Conversions to SI happen at the point of use.
struct Params {
    double dt = 1.0;       // s
    double r_b = 300.0;    // m
    double r_d = 100.0;    // m
    double lambda_b = 0.0; // stations per km^2 / per km
    double lambda_d = 0.0; // devices per km^2 / per km
    double v = 5.0;        // km/h
    int h_max = 1;
    int k_max = 600;
    std::uint64_t seed = 1;
};

inline double kmhToMps(double v_kmh) { return v_kmh * (1000.0 / 3600.0); }
inline double perKm2ToPerM2(double lam) { return lam * 1e-6; }
inline double perKmToPerM(double lam) { return lam * 1e-3; }

// Full simulation snapshot at step k. The street graph, when present, is
// borrowed and must outlive the state.
struct ModelState {
    int k = 0;
    const StreetGraph* graph = nullptr; // nullptr = planar window environment
    Window window;
    std::vector<BaseStation> stations;
    std::vector<DeviceAgent> devices;
    Params params;
    RandomSource rng;
};

// Samples stations and devices into a fresh model: stations from the explicit
// list when given, otherwise from a PPP of intensity lambda_b; devices always
// from a PPP of intensity lambda_d (planar in the window, linear on streets).
// All devices start disconnected. Draw order: stations first, then devices.
ModelState initModel(const Params& p, const Window& w,
                     const std::vector<Point>& explicit_stations = {});
ModelState initModel(const Params& p, const StreetGraph& g,
                     const std::vector<Point>& explicit_stations = {});

// One simulation step: every device moves (street scenarios; planar snapshots
// hold still), then disconnection rules run over all devices, then the
// connection pass runs over the disconnected ones.
void step(ModelState& m);

// Aggregated results of a replicated experiment. Coverage runs fill the area
// fields, street runs the connection-time fields.
struct RunSummary {
    double area_mean_m2 = 0.0;
    double area_stderr_m2 = 0.0;

    double mean_connection_time_s = 0.0;
    double stderr_connection_time_s = 0.0;
    std::vector<double> device_connection_times_s; // pooled, replication-major
    std::vector<double> mean_connected_per_step;   // replication average per step

    int replications = 0;
};

struct CoverageEstimate {
    int h_max = 0;
    double area_mean_m2 = 0.0;
    double area_stderr_m2 = 0.0;
};

// Static-snapshot covered-area estimate for one station at the origin and a
// planar device PPP of intensity lambda (per m^2). All requested hop limits
// are evaluated on shared device and probe realizations, so estimates are
// pointwise non-decreasing in h within a call. The window is a square of
// half-width r_b + max(h) r_d + r_d; the area is (covered probe fraction) x
// (window area), averaged over replications. Replication r draws devices from
// substream (seed, r, 0) and probes from (seed, r, 1).
std::vector<CoverageEstimate> runCoverageSweep(double lambda_per_m2,
                                               const std::vector<int>& h_values,
                                               double r_b, double r_d, int reps,
                                               int probes, std::uint64_t seed,
                                               int threads = 0);

RunSummary runCoverage(double lambda_per_m2, int h_max, double r_b, double r_d,
                       int reps, int probes, std::uint64_t seed, int threads = 0);

// Replicated street run: devices from a linear PPP on g, stations at the given
// coordinates, k_max steps per replication. A device counts as connected at
// step k when its state after the step-k update is connected; its connection
// time is that step count times dt. The summary averages per-device times
// within each replication, then across replications (replications that drew
// zero devices contribute no sample).
RunSummary runStreets(const Params& p, const StreetGraph& g,
                      const std::vector<Point>& stations, int reps,
                      int threads = 0);

} // namespace d2d
