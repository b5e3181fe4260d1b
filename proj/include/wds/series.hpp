#pragma once

// Truncated formal Dirichlet series  f(s) = sum_{j=1}^{N} a_j j^{-s}.
//
// A length-N series carries only the coefficients a_1..a_N. Convolution reads
// nothing beyond N, so every coefficient of a product is exact up to index N.
// The scalar type fixes the arithmetic mode: Rational (exact) or double.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <limits>
#include <stdexcept>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "wds/arith.hpp"
#include "wds/rational.hpp"

namespace wds {

enum class ArithmeticMode { exact, floating };

inline std::string_view to_string(ArithmeticMode m) {
    return m == ArithmeticMode::exact ? "exact" : "float";
}

template <class T>
concept SeriesScalar = std::is_same_v<T, Rational> || std::is_same_v<T, double>;

template <SeriesScalar T>
inline constexpr ArithmeticMode mode_of = std::is_same_v<T, Rational> ? ArithmeticMode::exact
                                                                       : ArithmeticMode::floating;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.to_double(); }

template <SeriesScalar T>
class DirichletSeries {
public:
    using scalar_type = T;

    explicit DirichletSeries(std::size_t length) : coeffs_(length, T(0)) {
        if (length == 0) throw std::invalid_argument("DirichletSeries: length must be >= 1");
    }
    explicit DirichletSeries(std::vector<T> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) throw std::invalid_argument("DirichletSeries: length must be >= 1");
    }
    DirichletSeries(std::initializer_list<T> coeffs) : DirichletSeries(std::vector<T>(coeffs)) {}

    static constexpr ArithmeticMode mode() { return mode_of<T>; }
    std::size_t length() const { return coeffs_.size(); }

    /// 1-based coefficient access.
    const T& operator[](std::size_t j) const { return coeffs_[j - 1]; }
    T& operator[](std::size_t j) { return coeffs_[j - 1]; }
    const T& at(std::size_t j) const {
        if (j == 0 || j > coeffs_.size()) throw std::out_of_range("DirichletSeries: index out of range");
        return coeffs_[j - 1];
    }

    const std::vector<T>& coefficients() const { return coeffs_; }

    friend bool operator==(const DirichletSeries&, const DirichletSeries&) = default;

private:
    std::vector<T> coeffs_;
};

using ExactSeries = DirichletSeries<Rational>;
using FloatSeries = DirichletSeries<double>;
/// Mode-tagged series for callers that only learn the mode at runtime.
using AnySeries = std::variant<ExactSeries, FloatSeries>;

/// Dirichlet product: c_j = sum_{m | j} a_m b_{j/m}, truncated to min(N_f, N_g).
/// For each j the terms are accumulated in ascending divisor order m.
template <SeriesScalar T>
DirichletSeries<T> convolve(const DirichletSeries<T>& f, const DirichletSeries<T>& g) {
    const std::size_t n = std::min(f.length(), g.length());
    DirichletSeries<T> out(n);
    for (std::size_t m = 1; m <= n; ++m) {
        const T& a = f[m];
        if (a == T(0)) continue;
        for (std::size_t q = 1; m * q <= n; ++q) {
            if (g[q] == T(0)) continue;
            out[m * q] += a * g[q];
        }
    }
    return out;
}

inline AnySeries convolve(const AnySeries& f, const AnySeries& g) {
    if (f.index() != g.index()) throw std::invalid_argument("convolve: arithmetic mode mismatch");
    if (f.index() == 0) return convolve(std::get<ExactSeries>(f), std::get<ExactSeries>(g));
    return convolve(std::get<FloatSeries>(f), std::get<FloatSeries>(g));
}

/// ζ(s) truncated: all-ones coefficients.
template <SeriesScalar T = Rational>
DirichletSeries<T> zeta_coeffs(std::size_t n) {
    if (n == 0) throw std::invalid_argument("zeta_coeffs: N must be >= 1");
    return DirichletSeries<T>(std::vector<T>(n, T(1)));
}

/// 1/ζ(s) truncated: Möbius coefficients.
template <SeriesScalar T = Rational>
DirichletSeries<T> inverse_zeta_coeffs(std::size_t n) {
    if (n == 0) throw std::invalid_argument("inverse_zeta_coeffs: N must be >= 1");
    const MobiusTable mu(n);
    std::vector<T> c(n);
    for (std::size_t j = 1; j <= n; ++j) c[j - 1] = T(mu[j]);
    return DirichletSeries<T>(std::move(c));
}

template <SeriesScalar T>
DirichletSeries<T> identity_series(std::size_t n) {
    DirichletSeries<T> e(n);
    e[1] = T(1);
    return e;
}

/// k-fold Dirichlet power by repeated squaring. Exact mode reports overflow.
template <SeriesScalar T>
DirichletSeries<T> power(const DirichletSeries<T>& f, unsigned k) {
    if (k == 0) throw std::invalid_argument("power: exponent must be >= 1");
    DirichletSeries<T> base = f;
    std::optional<DirichletSeries<T>> acc;
    while (true) {
        if (k & 1u) acc = acc ? convolve(*acc, base) : base;
        k >>= 1;
        if (!k) break;
        base = convolve(base, base);
    }
    return *acc;
}

/// Dominating bound |a_j| <= C j^tau for every j beyond the truncation.
struct GrowthBound {
    double C = 1.0;
    double tau = 0.0;
};

/// A numeric value with a rigorous bound on its truncation error.
/// An infinite tail_bound means no certificate is available.
struct EvaluatedValue {
    std::complex<double> value{};
    double tail_bound = 0.0;
    std::size_t terms = 0;
    bool capped = false;  // truncation cap reached before the tail target

    bool certified() const { return std::isfinite(tail_bound); }
};

/// Midpoint-rule bound on sum_{j>N} C j^{tau - sigma}: the summand is convex
/// and decreasing, so each term is at most its integral over [j - 1/2, j + 1/2].
inline double tail_bound(const GrowthBound& g, double sigma, std::size_t n) {
    if (!(g.C >= 0.0)) throw std::invalid_argument("growth bound: C must be >= 0");
    if (g.C == 0.0) return 0.0;
    const double gap = sigma - g.tau - 1.0;
    if (!(gap > 0.0)) return std::numeric_limits<double>::infinity();
    return g.C * std::pow(static_cast<double>(n) + 0.5, -gap) / gap;
}

/// Neumaier-compensated complex sum that also tracks sum |term| for a
/// floating-point error bound.
class CompensatedSum {
public:
    void add(std::complex<double> x) {
        add_part(re_, re_c_, x.real());
        add_part(im_, im_c_, x.imag());
        abs_ += std::abs(x);
        ++count_;
    }
    std::complex<double> value() const { return {re_ + re_c_, im_ + im_c_}; }
    /// Covers the summation itself plus a few ulps of error in each term's exp/cos/sin.
    double rounding_bound() const {
        constexpr double u = std::numeric_limits<double>::epsilon();
        return 16.0 * u * abs_ * (1.0 + static_cast<double>(count_) * u);
    }

private:
    static void add_part(double& sum, double& comp, double x) {
        const double t = sum + x;
        comp += std::fabs(sum) >= std::fabs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    double re_ = 0.0, re_c_ = 0.0, im_ = 0.0, im_c_ = 0.0, abs_ = 0.0;
    std::size_t count_ = 0;
};

/// Partial sum at s plus a certificate: the tail from the caller-supplied
/// growth bound and the rounding error of the partial sum.
template <SeriesScalar T>
EvaluatedValue evaluate(const DirichletSeries<T>& f, std::complex<double> s, const GrowthBound& growth) {
    if (!(growth.C >= 0.0)) throw std::invalid_argument("evaluate: growth bound C must be >= 0");
    EvaluatedValue out;
    CompensatedSum acc;
    for (std::size_t j = 1; j <= f.length(); ++j) {
        const double a = to_double(f[j]);
        if (a == 0.0) continue;
        acc.add(a * std::exp(-s * std::log(static_cast<double>(j))));
    }
    out.value = acc.value();
    out.terms = f.length();
    out.tail_bound = tail_bound(growth, s.real(), f.length()) + acc.rounding_bound();
    return out;
}

}  // namespace wds
