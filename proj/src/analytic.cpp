#include "d2dsim/analytic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "d2dsim/geom.hpp"

namespace d2d {

namespace {

constexpr int kMaxDepth = 60;

template <typename F>
double simpsonRecurse(const F& f, double a, double b, double fa, double fm, double fb,
                      double whole, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * eps) {
        return left + right + delta / 15.0;
    }
    return simpsonRecurse(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
           simpsonRecurse(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

template <typename F>
double adaptiveSimpson(const F& f, double a, double b, double rel_tol) {
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double eps = rel_tol * std::max(std::abs(whole), 1e-300);
    return simpsonRecurse(f, a, b, fa, fm, fb, whole, eps, kMaxDepth);
}

} // namespace

double expectedOneHopArea(const CoverageQuery& q) {
    if (q.lambda < 0.0) {
        throw std::invalid_argument("expectedOneHopArea: negative intensity");
    }
    if (!(q.r_b > 0.0) || !(q.r_d > 0.0)) {
        throw std::invalid_argument("expectedOneHopArea: radii must be positive");
    }
    if (!(q.tol > 0.0) || !(q.tol < 1e-3)) {
        throw std::invalid_argument("expectedOneHopArea: tol must lie in (0, 1e-3)");
    }
    const double a = q.r_b;
    const double b = q.r_b + q.r_d;
    const auto integrand = [&](double s) {
        return s * std::exp(-q.lambda * lensArea(q.r_b, q.r_d, s));
    };
    const double integral = adaptiveSimpson(integrand, a, b, q.tol);
    return std::numbers::pi * b * b - 2.0 * std::numbers::pi * integral;
}

double hopAreaUpperBound(int h_max, double r_b, double r_d) {
    if (h_max < 0) {
        throw std::invalid_argument("hopAreaUpperBound: h_max must be non-negative");
    }
    if (!(r_b > 0.0) || !(r_d > 0.0)) {
        throw std::invalid_argument("hopAreaUpperBound: radii must be positive");
    }
    const double r = r_b + static_cast<double>(h_max) * r_d;
    return std::numbers::pi * r * r;
}

} // namespace d2d
