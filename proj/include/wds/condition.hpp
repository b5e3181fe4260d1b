#pragma once

// The Möbius-convolution condition
//
//     Σ_{j >= k, j | n} j^{-δ} w_j μ(n/j) >= 0,   n >= k,
//
// evaluated three ways: the plain divisor sum, the factored product over the
// prime factorization (multiplicative families, k = 1), and the per-prime T_t
// decomposition (additive families, k = 2). check_range runs any subset of the
// routes over a range of n and cross-checks them.
//
// Sign certification: exact arithmetic whenever δ is an integer and the
// weights are rational; otherwise doubles with a tolerance band, in which a
// value in (-tol, 0) is never reported as a counterexample.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wds/arith.hpp"
#include "wds/parallel.hpp"
#include "wds/rational.hpp"
#include "wds/series.hpp"
#include "wds/weights.hpp"

namespace wds {

enum class Method { divisor_sum, mult_product, additive_Tt };
enum class SignVerdict { nonneg_exact, nonneg_within_tol, negative_certified, inconclusive };

inline std::string_view to_string(Method m) {
    switch (m) {
        case Method::divisor_sum: return "divisor_sum";
        case Method::mult_product: return "mult_product";
        case Method::additive_Tt: return "additive_Tt";
    }
    return "?";
}

inline Method parse_method(std::string_view s) {
    if (s == "divisor_sum") return Method::divisor_sum;
    if (s == "mult_product") return Method::mult_product;
    if (s == "additive_Tt" || s == "additive_tt") return Method::additive_Tt;
    throw std::invalid_argument("unknown method '" + std::string(s) + "'");
}

inline std::string_view to_string(SignVerdict v) {
    switch (v) {
        case SignVerdict::nonneg_exact: return "nonneg_exact";
        case SignVerdict::nonneg_within_tol: return "nonneg_within_tol";
        case SignVerdict::negative_certified: return "negative_certified";
        case SignVerdict::inconclusive: return "inconclusive";
    }
    return "?";
}

inline constexpr double kDefaultConditionTol = 1e-10;

class ExactModeUnavailable : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

inline bool is_integral(double x) { return std::isfinite(x) && x == std::floor(x) && std::fabs(x) <= 62; }

/// p^{-δ e} in the requested scalar type.
template <SeriesScalar T>
T pow_neg_delta(std::uint64_t p, double delta, unsigned e) {
    if constexpr (std::is_same_v<T, double>) {
        return std::pow(static_cast<double>(p), -delta * e);
    } else {
        if (!is_integral(delta)) throw ExactModeUnavailable("exact mode needs an integer delta");
        const auto d = static_cast<std::int64_t>(delta);
        if (d == 0 || e == 0) return Rational(1);
        const Rational base(static_cast<std::int64_t>(p));
        const Rational mag = pow(base, static_cast<unsigned>(std::llabs(d)) * e);
        return d > 0 ? Rational(1) / mag : mag;
    }
}

template <SeriesScalar T>
T as_scalar(const WeightValue& v, const WeightFamily& w, std::uint64_t n) {
    if constexpr (std::is_same_v<T, double>) {
        return v.approx;
    } else {
        if (!v.exact)
            throw ExactModeUnavailable("weight '" + w.id() + "' has no exact value at n = " + std::to_string(n));
        return *v.exact;
    }
}

inline double abs_of(double x) { return std::fabs(x); }
inline double abs_of(const Rational& x) { return std::fabs(x.to_double()); }

/// Weight/factorization/μ lookups; direct evaluation or tabulated for ranges.
struct DirectSource {
    const WeightFamily& w;
    Factorization fac(std::uint64_t n) const { return factorize(n); }
    int mu(std::uint64_t n) const { return mobius(n); }
    WeightValue value(std::uint64_t n) const { return w.value(n); }
};

struct TableSource {
    const WeightFamily& w;
    const FactorTable& factors;
    const MobiusTable& mus;
    const WeightTable& weights;
    Factorization fac(std::uint64_t n) const { return factors.factorize(n); }
    int mu(std::uint64_t n) const { return mus[n]; }
    WeightValue value(std::uint64_t n) const {
        if (!weights.defined(n))
            throw UndefinedWeightError("weight '" + w.id() + "' undefined at n = " + std::to_string(n));
        return {weights.approx(n), weights.exact(n)};
    }
};

template <SeriesScalar T>
struct Evaluation {
    T value{};
    double magnitude = 0.0;  // same expression with absolute values; scales the rounding budget
    std::size_t operations = 0;
    std::vector<T> terms;    // per-prime factors or T_t terms, when the route has them
};

template <SeriesScalar T, class Source>
Evaluation<T> divisor_sum_eval(const Source& src, double delta, unsigned k, std::uint64_t n) {
    if (n < k) throw std::invalid_argument("divisor_sum: need n >= k");
    const Factorization f = src.fac(n);
    Evaluation<T> ev;
    ev.value = T(0);
    for (std::uint64_t j : divisors(f)) {
        if (j < k) continue;
        const int mu = src.mu(n / j);
        if (mu == 0) continue;
        // j^{-δ} from the factorization of j
        T scale = T(1);
        if (delta != 0.0) {
            if constexpr (std::is_same_v<T, double>) {
                scale = std::pow(static_cast<double>(j), -delta);
            } else {
                for (const auto& pp : f.factors) {
                    unsigned e = 0;
                    for (std::uint64_t q = j; q % pp.prime == 0; q /= pp.prime) ++e;
                    if (e) scale *= pow_neg_delta<T>(pp.prime, delta, e);
                }
            }
        }
        const T term = scale * as_scalar<T>(src.value(j), src.w, j) * T(mu);
        ev.value += term;
        ev.magnitude += abs_of(term);
        ev.operations += 3;
    }
    return ev;
}

template <SeriesScalar T>
Evaluation<T> mult_product_eval(const WeightFamily& w, double delta, const Factorization& f) {
    if (w.kind() != WeightKind::multiplicative || !w.has_prime_powers())
        throw std::invalid_argument("mult_product: family '" + w.id() + "' is not multiplicative");
    Evaluation<T> ev;
    ev.value = T(1);
    double mag = 1.0;
    for (const auto& [p, r] : f.factors) {
        const T hi = as_scalar<T>(w.prime_power(p, r), w, ipow(p, r));
        const T lo = as_scalar<T>(w.prime_power(p, r - 1), w, ipow(p, r - 1));
        const T outer = pow_neg_delta<T>(p, delta, r - 1);
        const T inner = pow_neg_delta<T>(p, delta, 1);
        const T factor = outer * (inner * hi - lo);
        ev.terms.push_back(factor);
        ev.value *= factor;
        mag *= abs_of(outer) * (abs_of(inner * hi) + abs_of(lo));
        ev.operations += 5;
    }
    ev.magnitude = mag;
    return ev;
}

template <SeriesScalar T>
Evaluation<T> additive_Tt_eval(const WeightFamily& w, double delta, const Factorization& f) {
    if (w.kind() != WeightKind::additive || !w.has_prime_powers())
        throw std::invalid_argument("additive_Tt: family '" + w.id() + "' is not additive");
    if (f.n < 2) throw std::invalid_argument("additive_Tt: need n >= 2");
    const std::size_t m = f.factors.size();
    // own factor p^{-δ(r-1)} (p^{-δ} w_{p^r} - w_{p^{r-1}}), w_1 = 0;
    // cross factor p^{-δ(r-1)} (p^{-δ} - 1)
    std::vector<T> own(m), cross(m);
    std::vector<double> own_mag(m), cross_mag(m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto [p, r] = f.factors[i];
        const T hi = as_scalar<T>(w.prime_power(p, r), w, ipow(p, r));
        const T lo = as_scalar<T>(w.prime_power(p, r - 1), w, ipow(p, r - 1));
        const T outer = pow_neg_delta<T>(p, delta, r - 1);
        const T inner = pow_neg_delta<T>(p, delta, 1);
        own[i] = outer * (inner * hi - lo);
        cross[i] = outer * (inner - T(1));
        own_mag[i] = abs_of(outer) * (abs_of(inner * hi) + abs_of(lo));
        cross_mag[i] = abs_of(outer) * (abs_of(inner) + 1.0);
    }
    Evaluation<T> ev;
    ev.value = T(0);
    for (std::size_t t = 0; t < m; ++t) {
        T term = own[t];
        double mag = own_mag[t];
        for (std::size_t i = 0; i < m; ++i) {
            if (i == t) continue;
            term *= cross[i];
            mag *= cross_mag[i];
        }
        ev.terms.push_back(term);
        ev.value += term;
        ev.magnitude += mag;
        ev.operations += 4 * m;
    }
    return ev;
}

inline double rounding_budget(double magnitude, std::size_t operations) {
    return 4.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(operations + 1) * magnitude;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Single-n routes

/// Σ_{j >= k, j | n} j^{-δ} w_j μ(n/j).
template <SeriesScalar T>
T divisor_sum(const WeightFamily& w, double delta, unsigned k, std::uint64_t n) {
    return detail::divisor_sum_eval<T>(detail::DirectSource{w}, delta, k, n).value;
}

/// Π_m p_m^{-δ(r_m-1)} (p_m^{-δ} w_{p_m^{r_m}} - w_{p_m^{r_m-1}}); equals divisor_sum with k = 1.
template <SeriesScalar T>
T mult_product(const WeightFamily& w, double delta, std::uint64_t n) {
    return detail::mult_product_eval<T>(w, delta, factorize(n)).value;
}

/// The per-prime factors of mult_product, in ascending prime order.
template <SeriesScalar T>
std::vector<T> mult_factors(const WeightFamily& w, double delta, std::uint64_t n) {
    return detail::mult_product_eval<T>(w, delta, factorize(n)).terms;
}

template <SeriesScalar T>
struct TtDecomposition {
    T total{};
    std::vector<T> terms;  // T_1..T_ω(n), ascending prime order
};

/// total = Σ_t T_t = divisor_sum(w, δ, 2, n) for additive w (extended by w_1 = 0).
template <SeriesScalar T>
TtDecomposition<T> additive_Tt(const WeightFamily& w, double delta, std::uint64_t n) {
    auto ev = detail::additive_Tt_eval<T>(w, delta, factorize(n));
    return {ev.value, std::move(ev.terms)};
}

/// Λ_α(n) = Σ_{j >= 2, j | n} (log j)^α μ(n/j).
inline double von_mangoldt_alpha(std::uint64_t n, double alpha) {
    if (n < 2) throw std::invalid_argument("von_mangoldt_alpha: need n >= 2");
    const Factorization f = factorize(n);
    double acc = 0.0;
    for (std::uint64_t j : divisors(f)) {
        if (j < 2) continue;
        const int mu = mobius(n / j);
        if (mu == 0) continue;
        acc += mu * std::pow(std::log(static_cast<double>(j)), alpha);
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Range checks

enum class ModeRequest { automatic, exact, floating };

struct RangeOptions {
    std::optional<double> delta;  // defaults to the family's declared δ_w
    unsigned k = 2;
    std::uint64_t n_max = 10'000;
    std::vector<Method> methods{Method::divisor_sum};
    ModeRequest mode = ModeRequest::automatic;
    double tol = kDefaultConditionTol;
    unsigned threads = 0;
};

struct ConditionRecord {
    std::uint64_t n = 0;
    Method method = Method::divisor_sum;
    double value = 0.0;
    std::optional<Rational> exact;
    SignVerdict verdict = SignVerdict::inconclusive;
    double margin = 0.0;
    std::vector<double> terms;
    bool terms_nonneg = true;  // every per-prime factor / T_t term >= 0
};

struct MethodMismatch {
    std::uint64_t n = 0;
    Method a{}, b{};
    double value_a = 0.0, value_b = 0.0;
};

struct ConditionReport {
    std::string family_id;
    double delta = 0.0;
    unsigned k = 2;
    std::uint64_t n_lo = 2, n_hi = 2;
    ArithmeticMode mode = ArithmeticMode::floating;
    double tol = kDefaultConditionTol;
    std::vector<Method> methods;
    bool n1_trivially_satisfied = false;
    std::vector<ConditionRecord> records;  // ascending n, then method order
    std::vector<MethodMismatch> mismatches;
    SignVerdict overall = SignVerdict::inconclusive;
    std::optional<std::uint64_t> first_negative;
    std::optional<std::string> exact_fallback;  // why automatic mode dropped to float

    std::size_t count(SignVerdict v) const {
        return static_cast<std::size_t>(
            std::count_if(records.begin(), records.end(), [v](const auto& r) { return r.verdict == v; }));
    }
};

/// Three-valued sign decision for a float value with a rounding budget.
inline SignVerdict float_verdict(double value, double tol, double budget) {
    if (!std::isfinite(value)) return SignVerdict::inconclusive;
    if (value > -tol) return SignVerdict::nonneg_within_tol;
    if (value < -(tol + budget)) return SignVerdict::negative_certified;
    return SignVerdict::inconclusive;
}

inline bool exact_mode_possible(const WeightFamily& w, double delta) {
    return w.exact_capable() && detail::is_integral(delta);
}

namespace detail {

inline void require_applicable(const WeightFamily& w, Method m, unsigned k) {
    if (m == Method::mult_product) {
        if (w.kind() != WeightKind::multiplicative)
            throw std::invalid_argument("method mult_product is inapplicable to " + std::string(to_string(w.kind())) +
                                        " family '" + w.id() + "'");
        if (k != 1) throw std::invalid_argument("method mult_product equals the k = 1 sum; got k = " + std::to_string(k));
    } else if (m == Method::additive_Tt) {
        if (w.kind() != WeightKind::additive)
            throw std::invalid_argument("method additive_Tt is inapplicable to " + std::string(to_string(w.kind())) +
                                        " family '" + w.id() + "'");
        if (k > 2) throw std::invalid_argument("method additive_Tt equals the k = 2 sum; got k = " + std::to_string(k));
    }
}

template <SeriesScalar T>
ConditionRecord make_record(std::uint64_t n, Method m, const Evaluation<T>& ev, double tol) {
    ConditionRecord rec;
    rec.n = n;
    rec.method = m;
    if constexpr (std::is_same_v<T, Rational>) {
        rec.exact = ev.value;
        rec.value = ev.value.to_double();
        rec.verdict = ev.value.sign() >= 0 ? SignVerdict::nonneg_exact : SignVerdict::negative_certified;
        for (const auto& t : ev.terms) {
            rec.terms.push_back(t.to_double());
            rec.terms_nonneg = rec.terms_nonneg && t.sign() >= 0;
        }
    } else {
        rec.value = ev.value;
        rec.verdict = float_verdict(ev.value, tol, rounding_budget(ev.magnitude, ev.operations));
        for (double t : ev.terms) {
            rec.terms.push_back(t);
            rec.terms_nonneg = rec.terms_nonneg && t > -tol;
        }
    }
    rec.margin = rec.value;
    return rec;
}

template <SeriesScalar T>
void run_range(const WeightFamily& w, const RangeOptions& opt, double delta, ConditionReport& rep) {
    const std::uint64_t lo = rep.n_lo, hi = rep.n_hi;
    const FactorTable factors(hi);
    const MobiusTable mus(hi);
    const WeightTable weights(w, hi, &factors);
    const TableSource src{w, factors, mus, weights};
    const std::size_t per_n = opt.methods.size();
    std::vector<ConditionRecord> records((hi - lo + 1) * per_n);
    parallel_for(
        lo, hi + 1,
        [&](std::size_t n) {
            const Factorization f = factors.factorize(n);
            for (std::size_t mi = 0; mi < per_n; ++mi) {
                const Method m = opt.methods[mi];
                Evaluation<T> ev;
                switch (m) {
                    case Method::divisor_sum: ev = divisor_sum_eval<T>(src, delta, opt.k, n); break;
                    case Method::mult_product: ev = mult_product_eval<T>(w, delta, f); break;
                    case Method::additive_Tt: ev = additive_Tt_eval<T>(w, delta, f); break;
                }
                records[(n - lo) * per_n + mi] = make_record<T>(n, m, ev, opt.tol);
            }
        },
        opt.threads);
    rep.records = std::move(records);
}

}  // namespace detail

/// Evaluates every requested route for n in [max(k, 2), n_max], cross-checks
/// the routes against each other and aggregates a verdict.
inline ConditionReport check_range(const WeightFamily& w, const RangeOptions& opt) {
    if (opt.methods.empty()) throw std::invalid_argument("check_range: no methods requested");
    if (opt.k == 0) throw std::invalid_argument("check_range: k must be >= 1");
    if (opt.n_max < opt.k) throw std::invalid_argument("check_range: need n_max >= k");
    if (!(opt.tol >= 0.0)) throw std::invalid_argument("check_range: tolerance must be >= 0");
    for (Method m : opt.methods) detail::require_applicable(w, m, opt.k);

    ConditionReport rep;
    rep.family_id = w.id();
    rep.delta = opt.delta.value_or(w.delta());
    rep.k = opt.k;
    rep.n_lo = std::max<std::uint64_t>(opt.k, 2);
    rep.n_hi = opt.n_max;
    rep.tol = opt.tol;
    rep.methods = opt.methods;
    rep.n1_trivially_satisfied = opt.k == 1;

    const bool exact_ok = exact_mode_possible(w, rep.delta);
    if (opt.mode == ModeRequest::exact && !exact_ok)
        throw ExactModeUnavailable("exact mode unavailable for family '" + w.id() +
                                   "' (needs rational weights and integer delta)");
    rep.mode = (opt.mode == ModeRequest::floating || !exact_ok) ? ArithmeticMode::floating : ArithmeticMode::exact;

    if (rep.n_hi < rep.n_lo) {
        rep.overall = SignVerdict::nonneg_exact;
        return rep;
    }
    if (rep.mode == ArithmeticMode::exact) {
        try {
            detail::run_range<Rational>(w, opt, rep.delta, rep);
        } catch (const std::overflow_error& e) {
            if (opt.mode == ModeRequest::exact) throw;
            rep.mode = ArithmeticMode::floating;
            rep.exact_fallback = e.what();
        }
    }
    if (rep.mode == ArithmeticMode::floating) detail::run_range<double>(w, opt, rep.delta, rep);

    // cross-check routes per n
    const std::size_t per_n = opt.methods.size();
    for (std::size_t base = 0; base + per_n <= rep.records.size(); base += per_n) {
        const auto& ref = rep.records[base];
        for (std::size_t i = 1; i < per_n; ++i) {
            const auto& other = rep.records[base + i];
            bool agree;
            if (ref.exact && other.exact) {
                agree = *ref.exact == *other.exact;
            } else {
                const double scale = std::max({1.0, std::fabs(ref.value), std::fabs(other.value)});
                agree = std::fabs(ref.value - other.value) <= 1e-10 * scale;
            }
            if (!agree) rep.mismatches.push_back({ref.n, ref.method, other.method, ref.value, other.value});
        }
    }

    bool any_negative = false, any_inconclusive = !rep.mismatches.empty(), all_exact = true;
    for (const auto& r : rep.records) {
        if (r.verdict == SignVerdict::negative_certified) {
            any_negative = true;
            if (!rep.first_negative) rep.first_negative = r.n;
        }
        any_inconclusive = any_inconclusive || r.verdict == SignVerdict::inconclusive;
        all_exact = all_exact && r.verdict == SignVerdict::nonneg_exact;
    }
    rep.overall = any_negative       ? SignVerdict::negative_certified
                  : any_inconclusive ? SignVerdict::inconclusive
                  : all_exact        ? SignVerdict::nonneg_exact
                                     : SignVerdict::nonneg_within_tol;
    return rep;
}

}  // namespace wds
