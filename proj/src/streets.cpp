#include "d2dsim/streets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace d2d {

namespace {

constexpr double kEarthRadiusM = 6371000.0;
constexpr double kSnapToleranceM = 0.5;
constexpr double kArcSampleStepM = 1.0;
constexpr double kDegToRad = std::numbers::pi / 180.0;

std::string featureLabel(const nlohmann::json& feature, std::size_t index) {
    std::ostringstream os;
    os << "feature #" << index;
    if (feature.is_object() && feature.contains("properties") &&
        feature["properties"].is_object()) {
        const auto& props = feature["properties"];
        if (props.contains("name") && props["name"].is_string()) {
            os << " (\"" << props["name"].get<std::string>() << "\")";
        }
    }
    return os.str();
}

double polylineLength(const std::vector<Point>& pts) {
    double len = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        len += distance(pts[i - 1], pts[i]);
    }
    return len;
}

} // namespace

double StreetGraph::totalLength() const {
    double len = 0.0;
    for (const auto& e : edges) len += e.length;
    return len;
}

StreetGraph loadStreetGraph(const std::string& geojson_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(geojson_text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid GeoJSON: ") + e.what());
    }
    if (!doc.is_object() || doc.value("type", std::string()) != "FeatureCollection") {
        throw ParseError("expected a GeoJSON FeatureCollection");
    }
    if (!doc.contains("features") || !doc["features"].is_array() ||
        doc["features"].empty()) {
        throw ParseError("empty document: no features");
    }
    const bool projected = doc.value("projected", false);

    // Extract raw polylines.
    std::vector<std::vector<Point>> raw;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < doc["features"].size(); ++i) {
        const auto& feature = doc["features"][i];
        const std::string label = featureLabel(feature, i);
        if (!feature.is_object() || !feature.contains("geometry") ||
            !feature["geometry"].is_object()) {
            throw ParseError(label + ": missing geometry");
        }
        const auto& geom = feature["geometry"];
        const std::string type = geom.value("type", std::string());
        if (type != "LineString") {
            throw ParseError(label + ": expected LineString geometry, got \"" + type + "\"");
        }
        if (!geom.contains("coordinates") || !geom["coordinates"].is_array() ||
            geom["coordinates"].size() < 2) {
            throw ParseError(label + ": LineString needs at least two coordinates");
        }
        std::vector<Point> pts;
        pts.reserve(geom["coordinates"].size());
        for (const auto& c : geom["coordinates"]) {
            if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number()) {
                throw ParseError(label + ": malformed coordinate pair");
            }
            pts.push_back({c[0].get<double>(), c[1].get<double>()});
        }
        raw.push_back(std::move(pts));
        labels.push_back(label);
    }

    // Project lon/lat to local planar meters about the bounding-box centroid.
    if (!projected) {
        double lon_min = raw[0][0].x, lon_max = lon_min;
        double lat_min = raw[0][0].y, lat_max = lat_min;
        for (const auto& line : raw) {
            for (const auto& p : line) {
                lon_min = std::min(lon_min, p.x);
                lon_max = std::max(lon_max, p.x);
                lat_min = std::min(lat_min, p.y);
                lat_max = std::max(lat_max, p.y);
            }
        }
        const double lon0 = 0.5 * (lon_min + lon_max);
        const double lat0 = 0.5 * (lat_min + lat_max);
        const double k_x = kEarthRadiusM * std::cos(lat0 * kDegToRad) * kDegToRad;
        const double k_y = kEarthRadiusM * kDegToRad;
        for (auto& line : raw) {
            for (auto& p : line) {
                p = {(p.x - lon0) * k_x, (p.y - lat0) * k_y};
            }
        }
    }

    StreetGraph g;
    auto nodeFor = [&g](Point p) -> NodeId {
        for (NodeId n = 0; n < g.nodes.size(); ++n) {
            if (distance(g.nodes[n], p) <= kSnapToleranceM) return n;
        }
        g.nodes.push_back(p);
        g.incident.emplace_back();
        return g.nodes.size() - 1;
    };

    for (std::size_t i = 0; i < raw.size(); ++i) {
        auto& pts = raw[i];
        // Collapse consecutive duplicate vertices.
        pts.erase(std::unique(pts.begin(), pts.end(),
                              [](Point a, Point b) { return distance(a, b) < 1e-9; }),
                  pts.end());
        if (pts.size() < 2 || polylineLength(pts) < kSnapToleranceM) {
            throw ParseError(labels[i] + ": degenerate (near-zero length) feature");
        }
        const NodeId u = nodeFor(pts.front());
        const NodeId v = nodeFor(pts.back());
        pts.front() = g.nodes[u];
        pts.back() = g.nodes[v];

        StreetEdge e;
        e.u = u;
        e.v = v;
        e.polyline = std::move(pts);
        e.cumlen.resize(e.polyline.size());
        e.cumlen[0] = 0.0;
        for (std::size_t j = 1; j < e.polyline.size(); ++j) {
            e.cumlen[j] = e.cumlen[j - 1] + distance(e.polyline[j - 1], e.polyline[j]);
        }
        e.length = e.cumlen.back();
        if (!(e.length > 0.0)) {
            throw ParseError(labels[i] + ": degenerate (near-zero length) feature");
        }

        const EdgeId id = g.edges.size();
        g.incident[u].push_back(id);
        if (v != u) g.incident[v].push_back(id);
        g.edges.push_back(std::move(e));
    }
    return g;
}

StreetGraph loadStreetGraphFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open map file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return loadStreetGraph(buf.str());
}

Point pointAt(const StreetGraph& g, const GraphPosition& pos) {
    const StreetEdge& e = g.edges.at(pos.edge);
    if (pos.offset < 0.0 || pos.offset > e.length) {
        throw std::invalid_argument("pointAt: offset outside edge");
    }
    // Segment containing the offset, then linear interpolation inside it.
    const auto it = std::upper_bound(e.cumlen.begin(), e.cumlen.end(), pos.offset);
    const std::size_t seg = std::min<std::size_t>(
        it == e.cumlen.begin() ? 0 : static_cast<std::size_t>(it - e.cumlen.begin()) - 1,
        e.polyline.size() - 2);
    const double seg_len = e.cumlen[seg + 1] - e.cumlen[seg];
    const double t = seg_len > 0.0 ? (pos.offset - e.cumlen[seg]) / seg_len : 0.0;
    const Point a = e.polyline[seg];
    const Point b = e.polyline[seg + 1];
    return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
}

AdvanceResult advance(const StreetGraph& g, GraphPosition pos, double dist) {
    const StreetEdge& e = g.edges.at(pos.edge);
    if (pos.heading == Heading::TowardV) {
        const double remaining = e.length - pos.offset;
        if (dist < remaining) {
            pos.offset += dist;
            return {pos, std::nullopt, 0.0};
        }
        pos.offset = e.length;
        return {pos, e.v, dist - remaining};
    }
    const double remaining = pos.offset;
    if (dist < remaining) {
        pos.offset -= dist;
        return {pos, std::nullopt, 0.0};
    }
    pos.offset = 0.0;
    return {pos, e.u, dist - remaining};
}

double coveredStreetLength(const StreetGraph& g, const std::vector<Point>& stations,
                           double r_b) {
    if (!(r_b > 0.0)) {
        throw std::invalid_argument("coveredStreetLength: radius must be positive");
    }
    if (stations.empty()) return 0.0;
    const double r2 = r_b * r_b;
    double covered = 0.0;
    for (const auto& e : g.edges) {
        const auto n = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(e.length / kArcSampleStepM)));
        const double step = e.length / static_cast<double>(n);
        std::size_t seg = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const double s = (static_cast<double>(k) + 0.5) * step;
            while (seg + 2 < e.cumlen.size() && e.cumlen[seg + 1] < s) ++seg;
            const double seg_len = e.cumlen[seg + 1] - e.cumlen[seg];
            const double t = seg_len > 0.0 ? (s - e.cumlen[seg]) / seg_len : 0.0;
            const Point a = e.polyline[seg];
            const Point b = e.polyline[seg + 1];
            const Point p{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
            for (const auto& st : stations) {
                if (squaredDistance(p, st) <= r2) {
                    covered += step;
                    break;
                }
            }
        }
    }
    return covered;
}

std::vector<GraphPosition> sampleLinearPpp(double lambda, const StreetGraph& g,
                                           RandomSource& rng) {
    if (lambda < 0.0) {
        throw std::invalid_argument("sampleLinearPpp: negative intensity");
    }
    if (g.edges.empty()) {
        throw std::invalid_argument("sampleLinearPpp: empty street graph");
    }
    std::vector<GraphPosition> out;
    for (EdgeId e = 0; e < g.edges.size(); ++e) {
        const std::uint64_t n = rng.poisson(lambda * g.edges[e].length);
        for (std::uint64_t i = 0; i < n; ++i) {
            const double offset = rng.uniform(0.0, g.edges[e].length);
            const Heading h = rng.coinFlip() ? Heading::TowardV : Heading::TowardU;
            out.push_back({e, offset, h});
        }
    }
    return out;
}

} // namespace d2d
