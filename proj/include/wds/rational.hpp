#pragma once

// Exact rational numbers over 64-bit integers.
//
// Every operation is overflow-checked: an intermediate that does not fit in
// int64 raises std::overflow_error instead of wrapping. Values are always kept
// normalized (gcd(num, den) = 1, den > 0).

#include <cmath>
#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wds {

class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT(implicit)

    Rational(std::int64_t n, std::int64_t d) {
        if (d == 0) throw std::domain_error("rational: zero denominator");
        assign(static_cast<__int128>(n), static_cast<__int128>(d));
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    explicit operator double() const { return to_double(); }

    bool is_integer() const { return den_ == 1; }
    int sign() const { return (num_ > 0) - (num_ < 0); }

    std::string str() const {
        return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
    }

    // Accepts "a", "-a", "a/b".
    static Rational parse(std::string_view text) {
        auto to_i64 = [](std::string_view s) -> std::int64_t {
            if (s.empty()) throw std::invalid_argument("rational: empty integer");
            std::size_t pos = 0;
            const std::string tmp(s);
            long long v = 0;
            try {
                v = std::stoll(tmp, &pos);
            } catch (const std::out_of_range&) {
                throw std::overflow_error("rational: integer out of int64 range: " + tmp);
            }
            if (pos != tmp.size()) throw std::invalid_argument("rational: malformed integer: " + tmp);
            return v;
        };
        const auto slash = text.find('/');
        if (slash == std::string_view::npos) return Rational(to_i64(text));
        return Rational(to_i64(text.substr(0, slash)), to_i64(text.substr(slash + 1)));
    }

    // Exact conversion for dyadic doubles with a denominator of at most 2^40.
    static std::optional<Rational> from_double(double x) {
        if (!std::isfinite(x)) return std::nullopt;
        double scaled = x;
        std::int64_t den = 1;
        for (int k = 0; k <= 40; ++k) {
            if (scaled == std::floor(scaled)) {
                if (std::fabs(scaled) >= 9.0e18) return std::nullopt;
                return Rational(static_cast<std::int64_t>(scaled), den);
            }
            scaled *= 2.0;
            den *= 2;
        }
        return std::nullopt;
    }

    Rational operator-() const {
        if (num_ == INT64_MIN) throw std::overflow_error("rational: negation overflow");
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        const std::int64_t g = std::gcd(a.den_, b.den_);
        const __int128 n = static_cast<__int128>(a.num_) * (b.den_ / g) +
                           static_cast<__int128>(b.num_) * (a.den_ / g);
        const __int128 d = static_cast<__int128>(a.den_ / g) * b.den_;
        Rational r;
        r.assign(n, d);
        return r;
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

    friend Rational operator*(const Rational& a, const Rational& b) {
        // Cross-reduce first so the products stay small.
        const std::int64_t g1 = std::gcd(a.num_, b.den_);
        const std::int64_t g2 = std::gcd(b.num_, a.den_);
        const std::int64_t an = g1 ? a.num_ / g1 : a.num_, bd = g1 ? b.den_ / g1 : b.den_;
        const std::int64_t bn = g2 ? b.num_ / g2 : b.num_, ad = g2 ? a.den_ / g2 : a.den_;
        Rational r;
        r.assign(static_cast<__int128>(an) * bn, static_cast<__int128>(ad) * bd);
        return r;
    }

    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("rational: division by zero");
        Rational inv;
        inv.assign(static_cast<__int128>(b.den_), static_cast<__int128>(b.num_));
        return a * inv;
    }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const __int128 l = static_cast<__int128>(a.num_) * b.den_;
        const __int128 r = static_cast<__int128>(b.num_) * a.den_;
        return l <=> r;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    void assign(__int128 n, __int128 d) {
        if (d < 0) {
            n = -n;
            d = -d;
        }
        __int128 a = n < 0 ? -n : n, b = d;
        while (b != 0) {
            const __int128 t = a % b;
            a = b;
            b = t;
        }
        if (a > 1) {
            n /= a;
            d /= a;
        }
        if (n > INT64_MAX || n < -INT64_MAX || d > INT64_MAX)
            throw std::overflow_error("rational: int64 overflow");
        num_ = static_cast<std::int64_t>(n);
        den_ = static_cast<std::int64_t>(d);
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

// Integer power with overflow reporting.
inline Rational pow(Rational base, unsigned exp) {
    Rational acc(1);
    while (exp) {
        if (exp & 1u) acc *= base;
        exp >>= 1;
        if (exp) base *= base;
    }
    return acc;
}

}  // namespace wds
