#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "d2dsim/engine.hpp"

namespace d2d {

enum class Scenario { Analytic, Coverage, Streets, MobilityCheck };

struct RunConfig {
    Scenario scenario = Scenario::Analytic;
    Params params;
    double lambda = 20.0; // coverage/analytic device intensity, per km^2
    std::string map_path;
    std::vector<Point> stations;
    std::vector<std::pair<double, int>> sweep; // (lambda, h_max) grid points
    int reps = 200;
    int probes = 10000;
    std::string out_path; // empty = CSV to stdout
};

// Bad command line or config file; maps to exit status 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --help was requested; the caller prints `text` and exits 0.
struct HelpRequested {
    std::string text;
};

// Builds a RunConfig from argv-style arguments (without the program name).
// Values resolve as: built-in defaults, then the --config JSON file, then
// explicit flags. Unknown config keys are rejected.
RunConfig parseConfig(const std::vector<std::string>& args);

// Dispatches the configured scenario, writes the CSV, prints a one-line
// summary. Returns 0; throws on runtime failure.
int runAndEmit(const RunConfig& cfg);

} // namespace d2d
