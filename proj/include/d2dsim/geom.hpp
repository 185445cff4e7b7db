#pragma once

#include <vector>

#include "d2dsim/rng.hpp"

namespace d2d {

// Planar location, meters.
struct Point {
    double x = 0.0;
    double y = 0.0;
};

// Axis-aligned rectangular simulation region, meters.
struct Window {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }
    bool contains(Point p) const {
        return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
    }

    static Window centeredSquare(Point c, double half_width) {
        return {c.x - half_width, c.y - half_width, c.x + half_width, c.y + half_width};
    }
};

double distance(Point p, Point q);
double squaredDistance(Point p, Point q);

// Area of the intersection of two discs of radii r1 and r2 whose centers are
// d apart: zero once the discs separate (d >= r1 + r2), the smaller disc's
// full area under containment (d <= |r1 - r2|), and the two-circular-segment
// closed form in between. Continuous in all three arguments.
double lensArea(double r1, double r2, double d);

// Homogeneous planar Poisson point process of intensity lambda (per m^2)
// on w. Draw order: one Poisson count, then an (x, y) pair per point.
std::vector<Point> samplePlanarPpp(double lambda, const Window& w, RandomSource& rng);

} // namespace d2d
