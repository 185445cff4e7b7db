#include "d2dsim/agents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace d2d {

SpatialGrid::SpatialGrid(const std::vector<Point>& pts, double cell_size)
    : pts_(pts), cell_(cell_size) {
    if (!(cell_size > 0.0)) {
        throw std::invalid_argument("SpatialGrid: cell size must be positive");
    }
    if (pts_.empty()) return;
    double x_max = pts_[0].x, y_max = pts_[0].y;
    x0_ = pts_[0].x;
    y0_ = pts_[0].y;
    for (const auto& p : pts_) {
        x0_ = std::min(x0_, p.x);
        y0_ = std::min(y0_, p.y);
        x_max = std::max(x_max, p.x);
        y_max = std::max(y_max, p.y);
    }
    nx_ = static_cast<std::size_t>((x_max - x0_) / cell_) + 1;
    ny_ = static_cast<std::size_t>((y_max - y0_) / cell_) + 1;

    auto cellOf = [this](Point p) {
        const auto cx = std::min(static_cast<std::size_t>((p.x - x0_) / cell_), nx_ - 1);
        const auto cy = std::min(static_cast<std::size_t>((p.y - y0_) / cell_), ny_ - 1);
        return cy * nx_ + cx;
    };

    cell_start_.assign(nx_ * ny_ + 1, 0);
    for (const auto& p : pts_) ++cell_start_[cellOf(p) + 1];
    for (std::size_t c = 1; c < cell_start_.size(); ++c) {
        cell_start_[c] += cell_start_[c - 1];
    }
    items_.resize(pts_.size());
    std::vector<std::size_t> cursor(cell_start_.begin(), cell_start_.end() - 1);
    for (std::size_t i = 0; i < pts_.size(); ++i) {
        items_[cursor[cellOf(pts_[i])]++] = i;
    }
}

void SpatialGrid::query(Point q, double r, std::vector<std::size_t>& out) const {
    out.clear();
    if (pts_.empty()) return;
    const double r2 = r * r;
    const double lo_x = (q.x - r - x0_) / cell_;
    const double hi_x = (q.x + r - x0_) / cell_;
    const double lo_y = (q.y - r - y0_) / cell_;
    const double hi_y = (q.y + r - y0_) / cell_;
    if (hi_x < 0.0 || hi_y < 0.0 || lo_x >= static_cast<double>(nx_) ||
        lo_y >= static_cast<double>(ny_)) {
        return;
    }
    const auto cx0 = static_cast<std::size_t>(std::max(0.0, std::floor(lo_x)));
    const auto cy0 = static_cast<std::size_t>(std::max(0.0, std::floor(lo_y)));
    const auto cx1 = std::min(nx_ - 1, static_cast<std::size_t>(std::max(0.0, hi_x)));
    const auto cy1 = std::min(ny_ - 1, static_cast<std::size_t>(std::max(0.0, hi_y)));
    for (std::size_t cy = cy0; cy <= cy1; ++cy) {
        for (std::size_t cx = cx0; cx <= cx1; ++cx) {
            const std::size_t c = cy * nx_ + cx;
            for (std::size_t k = cell_start_[c]; k < cell_start_[c + 1]; ++k) {
                const std::size_t i = items_[k];
                if (squaredDistance(pts_[i], q) <= r2) out.push_back(i);
            }
        }
    }
    std::sort(out.begin(), out.end());
}

std::vector<std::size_t> SpatialGrid::query(Point q, double r) const {
    std::vector<std::size_t> out;
    query(q, r, out);
    return out;
}

void updateDisconnections(std::vector<DeviceAgent>& devices,
                          const std::vector<BaseStation>& stations, double r_b,
                          double r_d) {
    const std::size_t n = devices.size();
    std::vector<std::vector<std::size_t>> dependents(n);
    std::vector<std::size_t> to_cut;
    for (std::size_t i = 0; i < n; ++i) {
        if (!devices[i].link) continue;
        const Connection& c = *devices[i].link;
        if (c.kind == AttachKind::ToStation) {
            if (c.target >= stations.size()) {
                throw std::logic_error("updateDisconnections: dangling station attachment");
            }
            if (distance(devices[i].pos, stations[c.target].pos) > r_b) {
                to_cut.push_back(i);
            }
        } else {
            if (c.target >= n || c.target == i) {
                throw std::logic_error("updateDisconnections: dangling relay attachment");
            }
            dependents[c.target].push_back(i);
            if (distance(devices[i].pos, devices[c.target].pos) > r_d) {
                to_cut.push_back(i);
            }
        }
    }
    // Losing a relay disconnects every device chained through it.
    std::vector<char> cut(n, 0);
    while (!to_cut.empty()) {
        const std::size_t i = to_cut.back();
        to_cut.pop_back();
        if (cut[i]) continue;
        cut[i] = 1;
        devices[i].link.reset();
        for (std::size_t d : dependents[i]) {
            if (!cut[d]) to_cut.push_back(d);
        }
    }
}

void discoverAndConnect(std::vector<DeviceAgent>& devices,
                        const std::vector<BaseStation>& stations, double r_b,
                        double r_d, int h_max) {
    const std::size_t n = devices.size();
    if (n == 0) return;
    const double cell = std::max(r_b, r_d);

    std::vector<Point> dev_pts(n);
    for (std::size_t i = 0; i < n; ++i) dev_pts[i] = devices[i].pos;
    const SpatialGrid dev_grid(dev_pts, cell);

    std::vector<Point> st_pts(stations.size());
    for (std::size_t j = 0; j < stations.size(); ++j) st_pts[j] = stations[j].pos;
    const SpatialGrid st_grid(st_pts, cell);

    std::vector<std::size_t> buf;
    for (std::size_t i = 0; i < n; ++i) {
        if (devices[i].link) continue;

        st_grid.query(devices[i].pos, r_b, buf);
        if (!buf.empty()) {
            std::size_t best = buf[0];
            double best_d2 = squaredDistance(devices[i].pos, st_pts[buf[0]]);
            for (std::size_t k = 1; k < buf.size(); ++k) {
                const double d2 = squaredDistance(devices[i].pos, st_pts[buf[k]]);
                if (d2 < best_d2) {
                    best = buf[k];
                    best_d2 = d2;
                }
            }
            devices[i].link = Connection{0, AttachKind::ToStation, best};
            continue;
        }

        dev_grid.query(devices[i].pos, r_d, buf);
        std::optional<std::size_t> best;
        int best_hops = 0;
        double best_d2 = 0.0;
        for (std::size_t j : buf) {
            if (j == i || !devices[j].link) continue;
            const int hops = devices[j].link->hops;
            if (hops >= h_max) continue;
            const double d2 = squaredDistance(devices[i].pos, devices[j].pos);
            if (!best || hops < best_hops || (hops == best_hops && d2 < best_d2)) {
                best = j;
                best_hops = hops;
                best_d2 = d2;
            }
        }
        if (best) {
            devices[i].link = Connection{best_hops + 1, AttachKind::ToRelay, *best};
        }
    }
}

HopLevels computeHopLevels(const std::vector<Point>& device_points,
                           const std::vector<Point>& stations, double r_b,
                           double r_d, int h_max) {
    if (h_max < 0) {
        throw std::invalid_argument("computeHopLevels: h_max must be non-negative");
    }
    HopLevels out;
    out.level.assign(device_points.size(), std::nullopt);
    if (device_points.empty() || stations.empty()) return out;

    const SpatialGrid grid(device_points, std::max(r_b, r_d));
    std::vector<std::size_t> buf;
    std::vector<std::size_t> frontier;
    for (const auto& s : stations) {
        grid.query(s, r_b, buf);
        for (std::size_t i : buf) {
            if (!out.level[i]) {
                out.level[i] = 0;
                frontier.push_back(i);
            }
        }
    }
    for (int u = 0; u < h_max && !frontier.empty(); ++u) {
        std::vector<std::size_t> next;
        for (std::size_t i : frontier) {
            grid.query(device_points[i], r_d, buf);
            for (std::size_t j : buf) {
                if (!out.level[j]) {
                    out.level[j] = u + 1;
                    next.push_back(j);
                }
            }
        }
        frontier = std::move(next);
    }
    return out;
}

} // namespace d2d
