#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "d2dsim/geom.hpp"
#include "d2dsim/rng.hpp"

namespace d2d {

using NodeId = std::size_t;
using EdgeId = std::size_t;

enum class Heading : std::uint8_t { TowardV, TowardU };

inline Heading reversed(Heading h) {
    return h == Heading::TowardV ? Heading::TowardU : Heading::TowardV;
}

struct StreetEdge {
    NodeId u = 0;
    NodeId v = 0;
    std::vector<Point> polyline; // from u to v; endpoints coincide with node coords
    std::vector<double> cumlen;  // arc length from u at each polyline vertex
    double length = 0.0;
};

// Immutable embedded street network. Node and edge ids are dense indices in
// insertion order.
struct StreetGraph {
    std::vector<Point> nodes;
    std::vector<StreetEdge> edges;
    std::vector<std::vector<EdgeId>> incident; // per node, ascending edge ids

    std::size_t degree(NodeId n) const { return incident.at(n).size(); }
    double totalLength() const;
};

// A location on the network: `offset` meters of arc length from node u along
// the edge's polyline, moving in `heading` direction.
struct GraphPosition {
    EdgeId edge = 0;
    double offset = 0.0;
    Heading heading = Heading::TowardV;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Builds a street graph from a GeoJSON FeatureCollection of LineString
// centerlines. Coordinates are WGS84 lon/lat unless the document carries a
// top-level "projected": true, in which case they are planar meters already.
// Lon/lat is projected equirectangularly about the bounding-box centroid.
// Feature endpoints within 0.5 m of an existing node merge into that node.
StreetGraph loadStreetGraph(const std::string& geojson_text);
StreetGraph loadStreetGraphFile(const std::string& path);

Point pointAt(const StreetGraph& g, const GraphPosition& pos);

struct AdvanceResult {
    GraphPosition pos;
    std::optional<NodeId> reached;
    double residual = 0.0; // unspent distance once a node is reached
};

// Moves up to dist meters (dist >= 0) along the current edge in the heading
// direction, stopping exactly at the edge's end node if it is reached first.
AdvanceResult advance(const StreetGraph& g, GraphPosition pos, double dist);

// Total arc length of street within r_b of at least one station. Each edge is
// probed at midpoints of equal arc slices close to 1 m long (the slice count
// divides the edge length evenly, so a fully covered network sums exactly to
// its total length).
double coveredStreetLength(const StreetGraph& g, const std::vector<Point>& stations,
                           double r_b);

// Homogeneous linear Poisson point process of intensity lambda (per m) on the
// street network. Draw order: edges in ascending id; per edge one Poisson
// count, then per point an offset followed by a heading flip.
std::vector<GraphPosition> sampleLinearPpp(double lambda, const StreetGraph& g,
                                           RandomSource& rng);

} // namespace d2d
