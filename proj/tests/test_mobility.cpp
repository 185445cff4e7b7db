#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "d2dsim/mobility.hpp"
#include "testutil.hpp"

using d2d::EdgeId;
using d2d::GraphPosition;
using d2d::Heading;
using d2d::NodeId;
using d2d::Point;
using d2d::RandomSource;
using d2d::StreetGraph;

namespace {

NodeId nodeAt(const StreetGraph& g, Point p) {
    for (NodeId n = 0; n < g.nodes.size(); ++n) {
        if (d2d::distance(g.nodes[n], p) < 1e-6) return n;
    }
    REQUIRE(false);
    return 0;
}

EdgeId edgeBetween(const StreetGraph& g, Point a, Point b) {
    for (EdgeId e = 0; e < g.edges.size(); ++e) {
        const Point pu = g.nodes[g.edges[e].u];
        const Point pv = g.nodes[g.edges[e].v];
        if ((d2d::distance(pu, a) < 1e-6 && d2d::distance(pv, b) < 1e-6) ||
            (d2d::distance(pu, b) < 1e-6 && d2d::distance(pv, a) < 1e-6)) {
            return e;
        }
    }
    REQUIRE(false);
    return 0;
}

// Position on `arrival` heading into `node`, eps meters short of it.
GraphPosition approach(const StreetGraph& g, EdgeId arrival, NodeId node, double eps) {
    const auto& e = g.edges[arrival];
    if (e.u == node) return {arrival, eps, Heading::TowardU};
    return {arrival, e.length - eps, Heading::TowardV};
}

} // namespace

TEST_CASE("straight continuation at a right-angle 4-way crossing") {
    const StreetGraph g = d2d::loadStreetGraphFile(testutil::dataPath("grid3x3.geojson"));
    const NodeId center = nodeAt(g, {50, 50});
    const EdgeId from_west = edgeBetween(g, {0, 50}, {50, 50});
    const EdgeId to_east = edgeBetween(g, {50, 50}, {100, 50});
    const auto s = d2d::straightContinuation(g, center, from_west);
    REQUIRE(s.has_value());
    CHECK(*s == to_east);
}

TEST_CASE("no straight continuation when arriving on the stem of a T") {
    const StreetGraph g = d2d::loadStreetGraphFile(testutil::dataPath("t_junction.geojson"));
    const NodeId junction = nodeAt(g, {0, 0});
    const EdgeId stem = edgeBetween(g, {0, -100}, {0, 0});
    CHECK(!d2d::straightContinuation(g, junction, stem).has_value());
}

TEST_CASE("gentle bend at a degree-2 node counts as straight") {
    const double rad = 10.0 * std::numbers::pi / 180.0;
    const Point bend{100, 0};
    const Point far{100 + 100 * std::cos(rad), 100 * std::sin(rad)};
    const StreetGraph g =
        d2d::loadStreetGraph(testutil::makeGeojson({{{0, 0}, bend}, {bend, far}}));
    const NodeId n = nodeAt(g, bend);
    const auto s = d2d::straightContinuation(g, n, 0);
    REQUIRE(s.has_value());
    CHECK(*s == 1);
}

TEST_CASE("sharp 90-degree corner is not a straight continuation") {
    const StreetGraph g = d2d::loadStreetGraphFile(testutil::dataPath("dead_end.geojson"));
    const NodeId corner = nodeAt(g, {100, 0});
    CHECK(!d2d::straightContinuation(g, corner, 0).has_value());
    // ... but it is still the only candidate, so the walker always takes it.
    const auto td = d2d::turnDistribution(g, corner, 0);
    CHECK(!td.straight.has_value());
    REQUIRE(td.turns.size() == 1);
    CHECK(td.turns[0].second == doctest::Approx(1.0));
}

TEST_CASE("turn distribution splits per the keep-direction rule") {
    const StreetGraph grid = d2d::loadStreetGraphFile(testutil::dataPath("grid3x3.geojson"));
    const NodeId center = nodeAt(grid, {50, 50});
    const EdgeId from_west = edgeBetween(grid, {0, 50}, {50, 50});
    const EdgeId to_east = edgeBetween(grid, {50, 50}, {100, 50});

    const auto td = d2d::turnDistribution(grid, center, from_west);
    REQUIRE(td.straight.has_value());
    CHECK(td.straight->first == to_east);
    CHECK(td.straight->second == doctest::Approx(0.5));
    REQUIRE(td.turns.size() == 2);
    CHECK(td.turns[0].second == doctest::Approx(0.25));
    CHECK(td.turns[1].second == doctest::Approx(0.25));

    const StreetGraph tj = d2d::loadStreetGraphFile(testutil::dataPath("t_junction.geojson"));
    const NodeId junction = nodeAt(tj, {0, 0});
    const EdgeId stem = edgeBetween(tj, {0, -100}, {0, 0});
    const auto tt = d2d::turnDistribution(tj, junction, stem);
    CHECK(!tt.straight.has_value());
    REQUIRE(tt.turns.size() == 2);
    CHECK(tt.turns[0].second == doctest::Approx(0.5));
    CHECK(tt.turns[1].second == doctest::Approx(0.5));

    // degree-1 nodes are the caller's dead-end case
    const StreetGraph lane = d2d::loadStreetGraph(testutil::makeGeojson({{{0, 0}, {80, 0}}}));
    CHECK_THROWS_AS(d2d::turnDistribution(lane, 0, 0), std::invalid_argument);
}

TEST_CASE("turn probabilities sum to 1 at every node of every fixture") {
    for (const char* name :
         {"grid3x3.geojson", "t_junction.geojson", "dead_end.geojson", "irregular.geojson"}) {
        const StreetGraph g = d2d::loadStreetGraphFile(testutil::dataPath(name));
        for (NodeId n = 0; n < g.nodes.size(); ++n) {
            if (g.degree(n) < 2) continue;
            for (EdgeId arrival : g.incident[n]) {
                const auto td = d2d::turnDistribution(g, n, arrival);
                double sum = td.straight ? td.straight->second : 0.0;
                for (const auto& [e, p] : td.turns) {
                    CHECK(p >= 0.0);
                    CHECK(p <= 1.0);
                    sum += p;
                }
                CHECK(std::abs(sum - 1.0) <= 1e-12);
            }
        }
    }
}

TEST_CASE("stepMove mid-edge consumes no randomness") {
    const StreetGraph g = d2d::loadStreetGraph(testutil::makeGeojson({{{0, 0}, {100, 0}}}));
    RandomSource rng(4);
    RandomSource before = rng;
    const GraphPosition out = d2d::stepMove(g, {0, 10.0, Heading::TowardV}, 1.389, 1.0, rng);
    CHECK(out.offset == doctest::Approx(11.389));
    CHECK(out.heading == Heading::TowardV);
    CHECK(rng.uniform() == before.uniform());
}

TEST_CASE("stepMove reverses at dead ends without a draw") {
    const StreetGraph g = d2d::loadStreetGraph(testutil::makeGeojson({{{0, 0}, {100, 0}}}));
    RandomSource rng(4);
    RandomSource before = rng;
    const GraphPosition out = d2d::stepMove(g, {0, 99.0, Heading::TowardV}, 1.0, 1.5, rng);
    CHECK(out.edge == 0);
    CHECK(out.heading == Heading::TowardU);
    CHECK(out.offset == doctest::Approx(99.5)); // 0.5 m back from the dead end
    CHECK(rng.uniform() == before.uniform());
}

TEST_CASE("stepMove consumes one draw per intersection traversal") {
    const StreetGraph g = d2d::loadStreetGraphFile(testutil::dataPath("grid3x3.geojson"));
    const NodeId center = nodeAt(g, {50, 50});
    const EdgeId from_west = edgeBetween(g, {0, 50}, {50, 50});
    RandomSource rng(21);
    RandomSource replay = rng;
    (void)d2d::stepMove(g, approach(g, from_west, center, 1.0), 1.0, 3.0, rng);
    (void)replay.uniform();
    CHECK(rng.uniform() == replay.uniform());
}

TEST_CASE("empirical 4-way turn frequencies match the distribution") {
    const StreetGraph g = d2d::loadStreetGraphFile(testutil::dataPath("grid3x3.geojson"));
    const NodeId center = nodeAt(g, {50, 50});
    const EdgeId from_west = edgeBetween(g, {0, 50}, {50, 50});
    const auto td = d2d::turnDistribution(g, center, from_west);

    RandomSource rng(2024);
    std::map<EdgeId, int> hits;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) {
        const GraphPosition out =
            d2d::stepMove(g, approach(g, from_west, center, 1.0), 1.0, 1.5, rng);
        ++hits[out.edge];
    }
    const double straight_freq =
        static_cast<double>(hits[td.straight->first]) / trials;
    CHECK(std::abs(straight_freq - 0.5) < 0.02);
    for (const auto& [e, p] : td.turns) {
        const double f = static_cast<double>(hits[e]) / trials;
        CHECK(std::abs(f - 0.25) < 0.02);
    }
}

TEST_CASE("distance is conserved across multi-node steps") {
    // Three collinear edges: straight continuation holds probability 1 at
    // both interior nodes, so the walk is deterministic.
    const StreetGraph g = d2d::loadStreetGraph(testutil::makeGeojson(
        {{{0, 0}, {40, 0}}, {{40, 0}, {90, 0}}, {{90, 0}, {150, 0}}}));
    RandomSource rng(5);
    const GraphPosition out = d2d::stepMove(g, {0, 5.0, Heading::TowardV}, 2.0, 50.0, rng);
    // 100 m of travel from x=5 lands at x=105: edge 2, offset 15.
    CHECK(out.edge == 2);
    CHECK(out.offset == doctest::Approx(15.0));
    CHECK(out.heading == Heading::TowardV);
}

TEST_CASE("stepMove determinism and position validity on fixtures") {
    for (const char* name : {"grid3x3.geojson", "irregular.geojson"}) {
        const StreetGraph g = d2d::loadStreetGraphFile(testutil::dataPath(name));
        RandomSource rng(77);
        RandomSource rng_twin(77);
        GraphPosition a{0, g.edges[0].length / 3.0, Heading::TowardV};
        GraphPosition b = a;
        for (int k = 0; k < 2000; ++k) {
            const Point before = d2d::pointAt(g, a);
            a = d2d::stepMove(g, a, 1.389, 1.0, rng);
            b = d2d::stepMove(g, b, 1.389, 1.0, rng_twin);
            CHECK(a.edge == b.edge);
            CHECK(a.offset == b.offset);
            CHECK(a.heading == b.heading);
            CHECK(a.offset >= 0.0);
            CHECK(a.offset <= g.edges[a.edge].length);
            // straight-line displacement cannot exceed the arc traveled
            CHECK(d2d::distance(before, d2d::pointAt(g, a)) <= 1.389 + 1e-9);
        }
    }
}
