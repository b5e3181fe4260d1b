#pragma once

// Exact integer arithmetic kernels: factorization, divisors and the classical
// arithmetic functions (Möbius, ω, Ω, d, gpf).
//
// Inputs are 64-bit unsigned. Everything here is a pure function; the sieve
// tables are immutable after construction and safe to share across threads.

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wds {

/// Thrown when a table would exceed its configured size ceiling.
class ResourceLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultSieveCeiling = 200'000'000;

struct PrimePower {
    std::uint64_t prime;
    unsigned exponent;
    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Prime-power decomposition of n, primes strictly ascending.
struct Factorization {
    std::uint64_t n = 1;
    std::vector<PrimePower> factors;

    std::size_t omega() const { return factors.size(); }
    bool empty() const { return factors.empty(); }
};

namespace detail {

inline void require_positive(std::uint64_t n, const char* what) {
    if (n == 0) throw std::invalid_argument(std::string(what) + ": n must be >= 1");
}

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("uint64 multiplication overflow");
    return r;
}

}  // namespace detail

inline std::uint64_t ipow(std::uint64_t base, unsigned exp) {
    std::uint64_t acc = 1;
    for (unsigned i = 0; i < exp; ++i) acc = detail::checked_mul(acc, base);
    return acc;
}

/// Deterministic trial division up to sqrt(n).
inline Factorization factorize(std::uint64_t n) {
    detail::require_positive(n, "factorize");
    Factorization f{n, {}};
    std::uint64_t m = n;
    auto strip = [&](std::uint64_t p) {
        unsigned r = 0;
        while (m % p == 0) {
            m /= p;
            ++r;
        }
        if (r) f.factors.push_back({p, r});
    };
    strip(2);
    strip(3);
    // 6k +- 1 wheel; p <= m / p avoids overflow of p * p.
    for (std::uint64_t p = 5; p <= m / p; p += 6) {
        strip(p);
        strip(p + 2);
    }
    if (m > 1) f.factors.push_back({m, 1});
    return f;
}

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    if (n < 4) return true;
    if (n % 2 == 0 || n % 3 == 0) return false;
    for (std::uint64_t p = 5; p <= n / p; p += 6)
        if (n % p == 0 || n % (p + 2) == 0) return false;
    return true;
}

inline int mobius(const Factorization& f) {
    for (const auto& pp : f.factors)
        if (pp.exponent > 1) return 0;
    return (f.factors.size() % 2 == 0) ? 1 : -1;
}

inline int mobius(std::uint64_t n) {
    detail::require_positive(n, "mobius");
    return mobius(factorize(n));
}

inline std::uint64_t gpf(std::uint64_t n) {
    if (n < 2) throw std::invalid_argument("gpf: undefined for n < 2");
    return factorize(n).factors.back().prime;
}

inline unsigned omega(std::uint64_t n) {
    detail::require_positive(n, "omega");
    return static_cast<unsigned>(factorize(n).omega());
}

inline unsigned big_omega(std::uint64_t n) {
    detail::require_positive(n, "big_omega");
    unsigned total = 0;
    for (const auto& pp : factorize(n).factors) total += pp.exponent;
    return total;
}

inline std::uint64_t divisor_count(const Factorization& f) {
    std::uint64_t d = 1;
    for (const auto& pp : f.factors) d = detail::checked_mul(d, pp.exponent + 1ULL);
    return d;
}

inline std::uint64_t divisor_count(std::uint64_t n) {
    detail::require_positive(n, "divisor_count");
    return divisor_count(factorize(n));
}

/// Ascending divisors, generated by mixed-radix iteration over exponent vectors.
inline std::vector<std::uint64_t> divisors(const Factorization& f) {
    std::vector<std::uint64_t> out;
    out.reserve(divisor_count(f));
    const std::size_t k = f.factors.size();
    std::vector<unsigned> digit(k, 0);
    std::vector<std::uint64_t> power(k, 1);  // power[m] = p_m^{digit_m}
    std::uint64_t current = 1;
    while (true) {
        out.push_back(current);
        std::size_t i = 0;
        while (i < k && digit[i] == f.factors[i].exponent) {
            digit[i] = 0;
            power[i] = 1;
            ++i;
        }
        if (i == k) break;
        ++digit[i];
        power[i] *= f.factors[i].prime;
        // divisors never exceed n, so the products cannot overflow
        current = 1;
        for (std::size_t m = 0; m < k; ++m) current *= power[m];
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<std::uint64_t> divisors(std::uint64_t n) {
    detail::require_positive(n, "divisors");
    return divisors(factorize(n));
}

/// Primes <= limit by Eratosthenes.
inline std::vector<std::uint64_t> primes_up_to(std::uint64_t limit,
                                               std::uint64_t ceiling = kDefaultSieveCeiling) {
    if (limit > ceiling) throw ResourceLimitError("primes_up_to: limit above ceiling");
    std::vector<std::uint64_t> primes;
    if (limit < 2) return primes;
    std::vector<bool> composite(limit + 1, false);
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        primes.push_back(i);
        for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
    }
    return primes;
}

/// The n-th prime (1-based: nth_prime(1) = 2).
inline std::uint64_t nth_prime(std::size_t n) {
    if (n == 0) throw std::invalid_argument("nth_prime: n must be >= 1");
    std::uint64_t limit = 64;
    while (true) {
        auto ps = primes_up_to(limit);
        if (ps.size() >= n) return ps[n - 1];
        limit *= 2;
    }
}

/// μ(1..N) by a linear sieve. Index 0 is unused and holds 0.
class MobiusTable {
public:
    explicit MobiusTable(std::uint64_t n, std::uint64_t ceiling = kDefaultSieveCeiling) {
        if (n == 0) throw std::invalid_argument("mobius_sieve: N must be >= 1");
        if (n > ceiling) throw ResourceLimitError("mobius_sieve: N above ceiling");
        mu_.assign(n + 1, 0);
        std::vector<std::uint32_t> spf(n + 1, 0);
        std::vector<std::uint32_t> primes;
        mu_[1] = 1;
        for (std::uint64_t i = 2; i <= n; ++i) {
            if (spf[i] == 0) {
                spf[i] = static_cast<std::uint32_t>(i);
                primes.push_back(static_cast<std::uint32_t>(i));
                mu_[i] = -1;
            }
            for (std::uint32_t p : primes) {
                const std::uint64_t ip = i * p;
                if (p > spf[i] || ip > n) break;
                spf[ip] = p;
                mu_[ip] = (p == spf[i]) ? 0 : static_cast<std::int8_t>(-mu_[i]);
            }
        }
    }

    std::uint64_t size() const { return mu_.size() - 1; }
    int operator[](std::uint64_t n) const { return mu_.at(n); }
    /// Values μ(1..N) as a span starting at index 1.
    std::span<const std::int8_t> values() const { return {mu_.data() + 1, mu_.size() - 1}; }

private:
    std::vector<std::int8_t> mu_;
};

/// μ(0..N) with index 0 unused (0), so result[n] = μ(n).
inline std::vector<int> mobius_sieve(std::uint64_t n, std::uint64_t ceiling = kDefaultSieveCeiling) {
    MobiusTable t(n, ceiling);
    std::vector<int> out{0};
    out.insert(out.end(), t.values().begin(), t.values().end());
    return out;
}

/// Smallest-prime-factor table for fast factorization of every n <= N.
class FactorTable {
public:
    explicit FactorTable(std::uint64_t n, std::uint64_t ceiling = kDefaultSieveCeiling) {
        if (n == 0) throw std::invalid_argument("FactorTable: N must be >= 1");
        if (n > ceiling) throw ResourceLimitError("FactorTable: N above ceiling");
        spf_.assign(n + 1, 0);
        for (std::uint64_t i = 2; i <= n; ++i) {
            if (spf_[i]) continue;
            for (std::uint64_t j = i; j <= n; j += i)
                if (!spf_[j]) spf_[j] = static_cast<std::uint32_t>(i);
        }
    }

    std::uint64_t limit() const { return spf_.size() - 1; }

    Factorization factorize(std::uint64_t n) const {
        if (n == 0) throw std::invalid_argument("factorize: n must be >= 1");
        if (n > limit()) return wds::factorize(n);
        Factorization f{n, {}};
        while (n > 1) {
            const std::uint64_t p = spf_[n];
            unsigned r = 0;
            while (n % p == 0) {
                n /= p;
                ++r;
            }
            f.factors.push_back({p, r});
        }
        return f;
    }

private:
    std::vector<std::uint32_t> spf_;
};

}  // namespace wds
