#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "d2dsim/cli.hpp"
#include "testutil.hpp"

using d2d::RunConfig;
using d2d::Scenario;
using d2d::UsageError;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / "d2dsim_cli_test";
        fs::create_directories(path);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string writeText(const TempDir& dir, const std::string& name, const std::string& text) {
    const std::string p = dir.file(name);
    std::ofstream out(p, std::ios::binary);
    out << text;
    return p;
}

std::vector<std::string> splitLines(const std::string& text) {
    std::vector<std::string> lines;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) lines.push_back(line);
    return lines;
}

} // namespace

TEST_CASE("defaults follow the documented parameter set") {
    const RunConfig cfg = d2d::parseConfig({"analytic"});
    CHECK(cfg.scenario == Scenario::Analytic);
    CHECK(cfg.params.v == 5.0);
    CHECK(cfg.params.r_b == 300.0);
    CHECK(cfg.params.r_d == 100.0);
    CHECK(cfg.params.dt == 1.0);
    CHECK(cfg.params.k_max == 600);
    CHECK(cfg.reps == 200);
    CHECK(cfg.probes == 10000);
}

TEST_CASE("flags override config file values which override defaults") {
    TempDir dir;
    const std::string cfg_path =
        writeText(dir, "cfg.json", R"({"rd": 50, "seed": 42, "lambda": 7.5})");
    const RunConfig cfg =
        d2d::parseConfig({"coverage", "--config", cfg_path, "--rd", "100"});
    CHECK(cfg.params.r_d == 100.0); // flag wins
    CHECK(cfg.params.seed == 42);   // file value survives
    CHECK(cfg.lambda == 7.5);
}

TEST_CASE("config file rejections") {
    TempDir dir;
    const std::string unknown = writeText(dir, "u.json", R"({"bogus": 1})");
    CHECK_THROWS_AS(d2d::parseConfig({"analytic", "--config", unknown}), UsageError);

    const std::string malformed = writeText(dir, "m.json", "{not json");
    CHECK_THROWS_AS(d2d::parseConfig({"analytic", "--config", malformed}), UsageError);

    CHECK_THROWS_AS(d2d::parseConfig({"analytic", "--config", dir.file("absent.json")}),
                    UsageError);
}

TEST_CASE("usage validation") {
    CHECK_THROWS_AS(d2d::parseConfig({"streets"}), UsageError); // no map
    CHECK_THROWS_AS(d2d::parseConfig({"streets", "--map", "x.geojson"}),
                    UsageError); // no stations
    CHECK_THROWS_AS(d2d::parseConfig({"coverage", "--rb", "-10"}), UsageError);
    CHECK_THROWS_AS(d2d::parseConfig({"coverage", "--lambda", "-1"}), UsageError);
    CHECK_THROWS_AS(d2d::parseConfig({"coverage", "--reps", "0"}), UsageError);
    CHECK_THROWS_AS(d2d::parseConfig({}), UsageError); // missing subcommand
    CHECK_THROWS_AS(d2d::parseConfig({"coverage", "--bs", "12;34"}), UsageError);
}

TEST_CASE("--bs parses semicolon-separated coordinate pairs") {
    const RunConfig cfg = d2d::parseConfig(
        {"streets", "--map", testutil::dataPath("grid3x3.geojson"), "--bs", "350,50;-20,7.5"});
    REQUIRE(cfg.stations.size() == 2);
    CHECK(cfg.stations[0].x == 350.0);
    CHECK(cfg.stations[0].y == 50.0);
    CHECK(cfg.stations[1].x == -20.0);
    CHECK(cfg.stations[1].y == 7.5);
}

TEST_CASE("analytic sweep emits one row per lambda") {
    TempDir dir;
    const std::string cfg_path =
        writeText(dir, "sweep.json", R"({"sweep": [[5, 1], [20, 1], [100, 1]]})");
    const std::string out = dir.file("analytic.csv");
    const RunConfig cfg =
        d2d::parseConfig({"analytic", "--config", cfg_path, "--out", out});
    CHECK(d2d::runAndEmit(cfg) == 0);
    const auto lines = splitLines(testutil::readFile(out));
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "lambda,r_b,r_d,area_m2");
    CHECK(lines[1].rfind("5,300,100,", 0) == 0);
    CHECK(lines[2].rfind("20,300,100,", 0) == 0);
    CHECK(lines[3].rfind("100,300,100,", 0) == 0);
}

TEST_CASE("coverage CSV carries the documented schema and reruns bit-identically") {
    TempDir dir;
    const std::string out1 = dir.file("cov1.csv");
    const std::string out2 = dir.file("cov2.csv");
    const std::vector<std::string> base = {"coverage", "--lambda", "20",   "--hmax", "2",
                                           "--reps",   "4",        "--probes", "200",
                                           "--seed",   "31"};
    auto run = [&](const std::string& out) {
        auto args = base;
        args.push_back("--out");
        args.push_back(out);
        return d2d::runAndEmit(d2d::parseConfig(args));
    };
    CHECK(run(out1) == 0);
    CHECK(run(out2) == 0);
    const std::string a = testutil::readFile(out1);
    CHECK(a == testutil::readFile(out2));
    const auto lines = splitLines(a);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "lambda,h_max,reps,probes,area_mean_m2,area_stderr_m2,seed");
    CHECK(lines[1].rfind("20,2,4,200,", 0) == 0);
}

TEST_CASE("streets CSV carries the documented schema") {
    TempDir dir;
    const std::string out = dir.file("streets.csv");
    const RunConfig cfg = d2d::parseConfig(
        {"streets", "--map", testutil::dataPath("grid3x3.geojson"), "--bs", "350,50",
         "--lambda-d", "20", "--hmax", "1", "--reps", "2", "--kmax", "20", "--out", out});
    CHECK(d2d::runAndEmit(cfg) == 0);
    const auto lines = splitLines(testutil::readFile(out));
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] ==
          "map,lambda_d,h_max,reps,mean_conn_time_s,stderr_s,covered_len_m,total_len_m,seed");
    CHECK(lines[1].find("grid3x3.geojson,20,1,2,") != std::string::npos);
    CHECK(lines[1].rfind(",600,1") != std::string::npos); // total length echoes 600 m
}

TEST_CASE("streets sweep reuses replication seeds across entries") {
    TempDir dir;
    const std::string cfg_path = writeText(
        dir, "s.json", R"({"sweep": [[10, 0], [10, 0]], "kmax": 30, "reps": 3})");
    const std::string out = dir.file("paired.csv");
    const RunConfig cfg = d2d::parseConfig(
        {"streets", "--map", testutil::dataPath("grid3x3.geojson"), "--bs", "350,50",
         "--config", cfg_path, "--out", out});
    CHECK(d2d::runAndEmit(cfg) == 0);
    const auto lines = splitLines(testutil::readFile(out));
    REQUIRE(lines.size() == 3);
    CHECK(lines[1] == lines[2]); // identical entries -> identical rows
}

TEST_CASE("mobility-check reports dead-end reversal as certain") {
    TempDir dir;
    const std::string out = dir.file("mob.csv");
    const RunConfig cfg = d2d::parseConfig(
        {"mobility-check", "--map", testutil::dataPath("dead_end.geojson"), "--probes",
         "200", "--out", out});
    CHECK(d2d::runAndEmit(cfg) == 0);
    const auto lines = splitLines(testutil::readFile(out));
    REQUIRE(lines.size() >= 2);
    CHECK(lines[0] == "map,node,arrival_edge,edge,kind,expected,observed,transitions");
    int reversals = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].find(",reverse,1,1,200") != std::string::npos) ++reversals;
    }
    CHECK(reversals == 2); // both dead ends reverse with frequency exactly 1
}
