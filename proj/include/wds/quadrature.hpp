#pragma once

// Adaptive Gauss-Legendre quadrature on a finite interval. Nodes and weights
// come from Boost.Math; the interval bisection is ours.

#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

namespace wds::quad {

struct Result {
    double value = 0.0;
    double error_estimate = 0.0;
    unsigned intervals = 0;
};

namespace detail {

template <class F>
double gauss20(F& f, double a, double b) {
    return boost::math::quadrature::gauss<double, 20>::integrate(f, a, b);
}

template <class F>
void refine(F& f, double a, double b, double whole, double abs_tol, unsigned depth, Result& out) {
    const double mid = 0.5 * (a + b);
    const double left = gauss20(f, a, mid);
    const double right = gauss20(f, mid, b);
    const double diff = std::fabs(left + right - whole);
    if (diff <= abs_tol || depth == 0) {
        out.value += left + right;
        out.error_estimate += diff;
        out.intervals += 2;
        return;
    }
    refine(f, a, mid, left, 0.5 * abs_tol, depth - 1, out);
    refine(f, mid, b, right, 0.5 * abs_tol, depth - 1, out);
}

}  // namespace detail

/// Integrates f over [a, b] to a relative error target, bisecting wherever a
/// 20-point rule disagrees with its two halves.
template <class F>
Result gauss_legendre_adaptive(F f, double a, double b, double rel_tol, unsigned max_depth = 40) {
    if (!(b > a)) throw std::invalid_argument("gauss_legendre_adaptive: need a < b");
    const double coarse = detail::gauss20(f, a, b);
    Result out;
    // Floor the tolerance at a tiny absolute value so an integral of 0 terminates.
    const double abs_tol = std::max(rel_tol * std::fabs(coarse), 1e-300);
    detail::refine(f, a, b, coarse, abs_tol, max_depth, out);
    return out;
}

}  // namespace wds::quad
