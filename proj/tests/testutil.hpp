#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "d2dsim/geom.hpp"

namespace testutil {

inline std::string dataPath(const std::string& name) {
    return std::string(D2DSIM_DATA_DIR) + "/" + name;
}

inline std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Great-circle distance for lon/lat degrees; the reference the planar
// projection is judged against.
inline double haversineM(double lon1, double lat1, double lon2, double lat2) {
    constexpr double R = 6371000.0;
    constexpr double deg = std::numbers::pi / 180.0;
    const double dlat = (lat2 - lat1) * deg;
    const double dlon = (lon2 - lon1) * deg;
    const double a = std::sin(dlat / 2) * std::sin(dlat / 2) +
                     std::cos(lat1 * deg) * std::cos(lat2 * deg) *
                         std::sin(dlon / 2) * std::sin(dlon / 2);
    return 2.0 * R * std::asin(std::sqrt(a));
}

inline double mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

inline double variance(const std::vector<double>& xs) {
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return ss / static_cast<double>(xs.size() - 1);
}

// Exhaustive shortest-hop search over the full pairwise adjacency: level 0
// within r_b of a station, then ring-by-ring expansion over the r_d graph.
// Independent of the spatial-index path used by the library.
inline std::vector<std::optional<int>> bruteForceHopLevels(
    const std::vector<d2d::Point>& devices, const std::vector<d2d::Point>& stations,
    double r_b, double r_d, int h_max) {
    const std::size_t n = devices.size();
    std::vector<std::optional<int>> level(n);
    std::vector<std::size_t> frontier;
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& s : stations) {
            if (d2d::squaredDistance(devices[i], s) <= r_b * r_b) {
                level[i] = 0;
                frontier.push_back(i);
                break;
            }
        }
    }
    for (int u = 0; u < h_max && !frontier.empty(); ++u) {
        std::vector<std::size_t> next;
        for (std::size_t j = 0; j < n; ++j) {
            if (level[j]) continue;
            for (std::size_t i : frontier) {
                if (d2d::squaredDistance(devices[i], devices[j]) <= r_d * r_d) {
                    level[j] = u + 1;
                    next.push_back(j);
                    break;
                }
            }
        }
        frontier = std::move(next);
    }
    return level;
}

inline std::vector<std::size_t> bruteForceNeighbors(const std::vector<d2d::Point>& pts,
                                                    d2d::Point q, double r) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (d2d::squaredDistance(pts[i], q) <= r * r) out.push_back(i);
    }
    return out;
}

// Assembles a projected-coordinates GeoJSON document from polylines.
inline std::string makeGeojson(const std::vector<std::vector<d2d::Point>>& lines,
                               bool projected = true) {
    std::ostringstream os;
    os << "{\"type\":\"FeatureCollection\"";
    if (projected) os << ",\"projected\":true";
    os << ",\"features\":[";
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) os << ',';
        os << "{\"type\":\"Feature\",\"properties\":{},"
              "\"geometry\":{\"type\":\"LineString\",\"coordinates\":[";
        for (std::size_t j = 0; j < lines[i].size(); ++j) {
            if (j) os << ',';
            char buf[80];
            std::snprintf(buf, sizeof(buf), "[%.10g,%.10g]", lines[i][j].x, lines[i][j].y);
            os << buf;
        }
        os << "]}}";
    }
    os << "]}";
    return os.str();
}

} // namespace testutil
