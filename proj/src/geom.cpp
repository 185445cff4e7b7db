#include "d2dsim/geom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace d2d {

double distance(Point p, Point q) {
    return std::hypot(p.x - q.x, p.y - q.y);
}

double squaredDistance(Point p, Point q) {
    const double dx = p.x - q.x;
    const double dy = p.y - q.y;
    return dx * dx + dy * dy;
}

double lensArea(double r1, double r2, double d) {
    if (!(r1 > 0.0) || !(r2 > 0.0)) {
        throw std::invalid_argument("lensArea: radii must be positive");
    }
    if (d < 0.0) {
        throw std::invalid_argument("lensArea: center distance must be non-negative");
    }
    if (d >= r1 + r2) return 0.0;
    const double rmin = std::min(r1, r2);
    if (d <= std::abs(r1 - r2)) return std::numbers::pi * rmin * rmin;
    // One circular segment per disc, cut by the chord through the two
    // intersection points. acos arguments are clamped to absorb roundoff
    // near the tangency boundaries.
    const double c1 = std::clamp((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1), -1.0, 1.0);
    const double c2 = std::clamp((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2), -1.0, 1.0);
    const double a1 = std::acos(c1);
    const double a2 = std::acos(c2);
    return r1 * r1 * (a1 - 0.5 * std::sin(2.0 * a1)) +
           r2 * r2 * (a2 - 0.5 * std::sin(2.0 * a2));
}

std::vector<Point> samplePlanarPpp(double lambda, const Window& w, RandomSource& rng) {
    if (lambda < 0.0) {
        throw std::invalid_argument("samplePlanarPpp: negative intensity");
    }
    if (!(w.area() > 0.0)) {
        throw std::invalid_argument("samplePlanarPpp: window has no area");
    }
    const std::uint64_t n = rng.poisson(lambda * w.area());
    std::vector<Point> pts;
    pts.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const double x = rng.uniform(w.x_min, w.x_max);
        const double y = rng.uniform(w.y_min, w.y_max);
        pts.push_back({x, y});
    }
    return pts;
}

} // namespace d2d
