#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "d2dsim/geom.hpp"
#include "d2dsim/streets.hpp"

namespace d2d {

enum class AttachKind : std::uint8_t { ToStation, ToRelay };

// Live link of a connected device: hops == 0 attaches straight to a station,
// hops >= 1 to the relay device sitting one hop closer.
struct Connection {
    int hops = 0;
    AttachKind kind = AttachKind::ToStation;
    std::size_t target = 0; // station index (hops == 0) or device index
};

// Device ids are indices into the device vector.
struct DeviceAgent {
    Point pos;                          // planar location used for range checks
    std::optional<GraphPosition> walk;  // present in street scenarios
    std::optional<Connection> link;     // empty = disconnected

    bool connected() const { return link.has_value(); }
};

struct BaseStation {
    Point pos;
    bool active = true; // stations never switch off in this model
};

// Minimal relaying-hop count per device; empty when the device cannot reach a
// station within h_max hops.
struct HopLevels {
    std::vector<std::optional<int>> level;
};

// Uniform-grid index over a fixed point set. Queries return the indices of all
// points within radius r of q (inclusive), in ascending order.
class SpatialGrid {
public:
    SpatialGrid() = default;
    SpatialGrid(const std::vector<Point>& pts, double cell_size);

    std::vector<std::size_t> query(Point q, double r) const;
    void query(Point q, double r, std::vector<std::size_t>& out) const;

private:
    std::vector<Point> pts_;
    std::vector<std::size_t> cell_start_; // CSR offsets, row-major cells
    std::vector<std::size_t> items_;
    double cell_ = 1.0;
    double x0_ = 0.0;
    double y0_ = 0.0;
    std::size_t nx_ = 0;
    std::size_t ny_ = 0;
};

// Applies the disconnection rules: a device drops its link when the station
// link exceeds r_b or the relay link exceeds r_d, and losing a relay cascades
// to every device attached through it. On return no connected device points at
// a disconnected relay.
void updateDisconnections(std::vector<DeviceAgent>& devices,
                          const std::vector<BaseStation>& stations, double r_b,
                          double r_d);

// One connection pass in ascending device id: a disconnected device attaches
// to the nearest station within r_b (hops 0); failing that, to the relay
// within r_d minimizing (hops, distance, id) among devices connected with
// hops < h_max. Devices connected earlier in the pass are eligible relays for
// later ones.
void discoverAndConnect(std::vector<DeviceAgent>& devices,
                        const std::vector<BaseStation>& stations, double r_b,
                        double r_d, int h_max);

// Static breadth-first hop labeling: level 0 within r_b of a station, level
// u+1 within r_d of a level-u device, capped at h_max. Each labeled device
// gets its minimal level.
HopLevels computeHopLevels(const std::vector<Point>& device_points,
                           const std::vector<Point>& stations, double r_b,
                           double r_d, int h_max);

} // namespace d2d
