#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "d2dsim/streets.hpp"

namespace d2d {

// Probability split over the outgoing edges at a node for a walker that just
// arrived on `arrival`. Probabilities sum to 1.
struct TurnDistribution {
    std::optional<std::pair<EdgeId, double>> straight;
    std::vector<std::pair<EdgeId, double>> turns;
};

// Probability of keeping direction at an intersection that offers a straight
// continuation.
inline constexpr double kKeepDirectionProb = 0.5;

// Largest bearing change (degrees) still counted as "keeping direction".
// Right-angle branches are new directions; gentle curves are not.
inline constexpr double kStraightMaxBearingDeg = 30.0;

// The non-arrival edge at `node` that best preserves the walker's direction of
// travel, accepted only when its bearing change is within
// kStraightMaxBearingDeg. Empty e.g. when arriving on the stem of a T.
std::optional<EdgeId> straightContinuation(const StreetGraph& g, NodeId node,
                                           EdgeId arrival);

// Outgoing distribution at an intersection: the straight continuation (when it
// exists) takes kKeepDirectionProb and the rest is split uniformly over the
// other candidates; with no straight continuation all candidates are uniform.
// U-turns are never candidates. Degree-1 nodes are the caller's dead-end case.
TurnDistribution turnDistribution(const StreetGraph& g, NodeId node, EdgeId arrival);

// One mobility step of v*dt meters, resolving every node met on the way:
// intersections consume exactly one rng draw (straight first, then turns in
// ascending edge id); dead ends reverse the heading without a draw.
GraphPosition stepMove(const StreetGraph& g, GraphPosition pos, double v_mps,
                       double dt_s, RandomSource& rng);

} // namespace d2d
