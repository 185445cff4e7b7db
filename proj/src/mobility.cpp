#include "d2dsim/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace d2d {

namespace {

// Unit tangent of edge e at `node`, pointing away from the node into the edge.
Point leavingDirection(const StreetGraph& g, EdgeId e, NodeId node) {
    const StreetEdge& edge = g.edges[e];
    Point a, b;
    if (edge.u == node) {
        a = edge.polyline[0];
        b = edge.polyline[1];
    } else {
        a = edge.polyline[edge.polyline.size() - 1];
        b = edge.polyline[edge.polyline.size() - 2];
    }
    const double len = distance(a, b);
    return {(b.x - a.x) / len, (b.y - a.y) / len};
}

double angleBetweenDeg(Point a, Point b) {
    const double dot = std::clamp(a.x * b.x + a.y * b.y, -1.0, 1.0);
    return std::acos(dot) * 180.0 / std::numbers::pi;
}

GraphPosition enterEdge(const StreetGraph& g, EdgeId e, NodeId node) {
    if (g.edges[e].u == node) return {e, 0.0, Heading::TowardV};
    return {e, g.edges[e].length, Heading::TowardU};
}

bool incidentTo(const StreetGraph& g, EdgeId e, NodeId node) {
    return g.edges[e].u == node || g.edges[e].v == node;
}

} // namespace

std::optional<EdgeId> straightContinuation(const StreetGraph& g, NodeId node,
                                           EdgeId arrival) {
    if (g.degree(node) == 0) {
        throw std::invalid_argument("straightContinuation: isolated node");
    }
    if (!incidentTo(g, arrival, node)) {
        throw std::invalid_argument("straightContinuation: arrival edge not incident");
    }
    // Direction of travel into the node is the reverse of leaving back out
    // along the arrival edge.
    const Point back = leavingDirection(g, arrival, node);
    const Point dir_in{-back.x, -back.y};

    std::optional<EdgeId> best;
    double best_change = kStraightMaxBearingDeg;
    for (EdgeId e : g.incident[node]) {
        if (e == arrival) continue;
        const double change = angleBetweenDeg(dir_in, leavingDirection(g, e, node));
        if (change < best_change || (change == best_change && !best)) {
            best = e;
            best_change = change;
        }
    }
    return best;
}

TurnDistribution turnDistribution(const StreetGraph& g, NodeId node, EdgeId arrival) {
    if (!incidentTo(g, arrival, node)) {
        throw std::invalid_argument("turnDistribution: arrival edge not incident");
    }
    std::vector<EdgeId> candidates;
    for (EdgeId e : g.incident[node]) {
        if (e != arrival) candidates.push_back(e);
    }
    if (candidates.empty()) {
        throw std::invalid_argument(
            "turnDistribution: dead end; caller must reverse instead");
    }
    TurnDistribution td;
    const auto straight = straightContinuation(g, node, arrival);
    if (straight) {
        if (candidates.size() == 1) {
            td.straight = {*straight, 1.0};
            return td;
        }
        td.straight = {*straight, kKeepDirectionProb};
        const double p = (1.0 - kKeepDirectionProb) /
                         static_cast<double>(candidates.size() - 1);
        for (EdgeId e : candidates) {
            if (e != *straight) td.turns.emplace_back(e, p);
        }
    } else {
        const double p = 1.0 / static_cast<double>(candidates.size());
        for (EdgeId e : candidates) td.turns.emplace_back(e, p);
    }
    return td;
}

GraphPosition stepMove(const StreetGraph& g, GraphPosition pos, double v_mps,
                       double dt_s, RandomSource& rng) {
    double remaining = v_mps * dt_s;
    while (true) {
        const AdvanceResult r = advance(g, pos, remaining);
        pos = r.pos;
        if (!r.reached) return pos;
        const NodeId node = *r.reached;
        remaining = r.residual;

        bool has_exit = false;
        for (EdgeId e : g.incident[node]) {
            if (e != pos.edge) {
                has_exit = true;
                break;
            }
        }
        if (!has_exit) {
            // Dead end: move backward, no randomness involved.
            pos.heading = reversed(pos.heading);
            continue;
        }

        const TurnDistribution td = turnDistribution(g, node, pos.edge);
        const double u = rng.uniform();
        double acc = 0.0;
        EdgeId chosen = td.straight ? td.straight->first : td.turns.back().first;
        bool decided = false;
        if (td.straight) {
            acc += td.straight->second;
            if (u < acc) {
                chosen = td.straight->first;
                decided = true;
            }
        }
        if (!decided) {
            for (const auto& [e, p] : td.turns) {
                acc += p;
                chosen = e;
                if (u < acc) break;
            }
        }
        pos = enterEdge(g, chosen, node);
    }
}

} // namespace d2d
