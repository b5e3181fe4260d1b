#pragma once

// Brute-force reference implementations. They share no code with the library:
// every value here comes from plain trial division and direct summation.

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline std::vector<std::uint64_t> divisors(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t d = 1; d <= n; ++d)
        if (n % d == 0) out.push_back(d);
    return out;
}

inline int mobius(std::uint64_t n) {
    int sign = 1;
    for (std::uint64_t p = 2; p <= n; ++p) {
        if (n % p) continue;
        n /= p;
        if (n % p == 0) return 0;
        sign = -sign;
    }
    return sign;
}

inline unsigned omega(std::uint64_t n) {
    unsigned c = 0;
    for (std::uint64_t p = 2; p <= n; ++p)
        if (n % p == 0 && is_prime(p)) ++c;
    return c;
}

inline unsigned big_omega(std::uint64_t n) {
    unsigned c = 0;
    for (std::uint64_t p = 2; p <= n; ++p)
        while (n % p == 0) n /= p, ++c;
    return c;
}

inline std::uint64_t gpf(std::uint64_t n) {
    std::uint64_t g = 1;
    for (std::uint64_t p = 2; p <= n; ++p)
        while (n % p == 0) n /= p, g = p;
    return g;
}

/// Number of ordered k-tuples of positive integers with product n.
inline std::uint64_t ordered_factorizations(std::uint64_t n, unsigned k) {
    if (k == 1) return 1;
    std::uint64_t c = 0;
    for (std::uint64_t d : divisors(n)) c += ordered_factorizations(n / d, k - 1);
    return c;
}

inline std::uint64_t gcd(std::uint64_t a, std::uint64_t b) {
    while (b) {
        const auto t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// External constants (ζ at small even/odd integers), 15+ digits.
inline constexpr double kZeta2 = 1.6449340668482264;
inline constexpr double kZeta3 = 1.2020569031595943;
inline constexpr double kZeta4 = 1.0823232337111382;

/// ζ(σ) for σ > 1 by a long partial sum plus the Euler-Maclaurin remainder.
inline double zeta(double s) {
    const std::uint64_t N = 100000;
    double sum = 0.0;
    for (std::uint64_t j = N; j >= 1; --j) sum += std::pow(static_cast<double>(j), -s);
    const double n = static_cast<double>(N);
    return sum + std::pow(n, 1.0 - s) / (s - 1.0) - 0.5 * std::pow(n, -s) + s / 12.0 * std::pow(n, -s - 1.0);
}

}  // namespace oracle
