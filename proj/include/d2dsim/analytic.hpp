#pragma once

namespace d2d {

struct CoverageQuery {
    double lambda = 0.0; // device intensity, per m^2
    double r_b = 300.0;  // station radius, m
    double r_d = 100.0;  // device radius, m
    double tol = 1e-9;   // relative quadrature tolerance
};

// Expected area covered by one station augmented by one-hop relaying over a
// homogeneous planar device process of intensity lambda:
//
//   A = pi (r_b + r_d)^2
//       - 2 pi \int_{r_b}^{r_b + r_d} s exp(-lambda lens(r_b, r_d, s)) ds
//
// where lens is the two-disc intersection area. Evaluated by adaptive Simpson
// quadrature to the query's relative tolerance.
double expectedOneHopArea(const CoverageQuery& q);

// Geometric ceiling on any h_max-hop covered area: pi (r_b + h_max r_d)^2.
double hopAreaUpperBound(int h_max, double r_b, double r_d);

} // namespace d2d
