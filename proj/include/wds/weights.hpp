#pragma once

// Weight-sequence families w = {w_j}.
//
// A family carries its structural kind, the first index k with a defined
// positive weight, the declared abscissas sigma_w and delta_w, and a
// dominating growth bound w_j <= C j^tau for j >= k. The abscissas are
// declared, never inferred: the smooth-restricted infimum is not decidable
// from finitely many terms. smooth_partial_sum only corroborates a declaration.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wds/arith.hpp"
#include "wds/quadrature.hpp"
#include "wds/rational.hpp"
#include "wds/series.hpp"

namespace wds {

/// A weight value: always a double, plus the exact rational when one exists.
struct WeightValue {
    double approx = 0.0;
    std::optional<Rational> exact;

    static WeightValue of(Rational r) { return {r.to_double(), r}; }
    static WeightValue of(double x) { return {x, std::nullopt}; }
};

enum class WeightKind { explicit_values, multiplicative, additive, measure_induced };

inline std::string_view to_string(WeightKind k) {
    switch (k) {
        case WeightKind::explicit_values: return "explicit";
        case WeightKind::multiplicative: return "multiplicative";
        case WeightKind::additive: return "additive";
        case WeightKind::measure_induced: return "measure_induced";
    }
    return "?";
}

/// f(p, r): the value at the prime power p^r, r >= 1.
using PrimePowerFn = std::function<WeightValue(std::uint64_t prime, unsigned exponent)>;

class UndefinedWeightError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

class WeightFamily {
public:
    using ValueFn = std::function<WeightValue(const Factorization&)>;

    struct Declared {
        unsigned start_index = 1;
        double sigma = 1.0;
        double delta = 0.0;
        GrowthBound growth{};
    };

    WeightFamily(std::string id, WeightKind kind, Declared declared, ValueFn fn, bool exact_capable,
                 PrimePowerFn prime_power = {})
        : id_(std::move(id)),
          kind_(kind),
          decl_(declared),
          fn_(std::move(fn)),
          prime_power_(std::move(prime_power)),
          exact_capable_(exact_capable) {
        if (decl_.start_index == 0) throw std::invalid_argument("WeightFamily: start_index must be >= 1");
        if (decl_.delta > decl_.sigma)
            throw std::invalid_argument("WeightFamily '" + id_ + "': delta_w must not exceed sigma_w");
        if (!(decl_.growth.C >= 0.0)) throw std::invalid_argument("WeightFamily: growth C must be >= 0");
    }

    const std::string& id() const { return id_; }
    WeightKind kind() const { return kind_; }
    unsigned start_index() const { return decl_.start_index; }
    double sigma() const { return decl_.sigma; }
    double delta() const { return decl_.delta; }
    const GrowthBound& growth() const { return decl_.growth; }
    const Declared& declared() const { return decl_; }
    /// True when every member value is an exact rational.
    bool exact_capable() const { return exact_capable_; }
    bool has_prime_powers() const { return static_cast<bool>(prime_power_); }

    /// w_n. Below the start index only the structural extensions are defined:
    /// w_1 = 1 for multiplicative and w_1 = 0 for additive families.
    WeightValue value(const Factorization& f) const {
        if (f.n < decl_.start_index) {
            if (f.n == 1 && kind_ == WeightKind::multiplicative) return WeightValue::of(Rational(1));
            if (f.n == 1 && kind_ == WeightKind::additive) return WeightValue::of(Rational(0));
            throw UndefinedWeightError("weight '" + id_ + "' undefined at n = " + std::to_string(f.n));
        }
        return fn_(f);
    }
    WeightValue value(std::uint64_t n) const { return value(factorize(n)); }
    double operator()(std::uint64_t n) const { return value(n).approx; }

    /// f(p, r) for structured families; r = 0 gives the extension value at 1.
    WeightValue prime_power(std::uint64_t p, unsigned r) const {
        if (!prime_power_) throw std::logic_error("weight '" + id_ + "' has no prime-power form");
        if (r == 0) return kind_ == WeightKind::multiplicative ? WeightValue::of(Rational(1))
                                                               : WeightValue::of(Rational(0));
        return prime_power_(p, r);
    }

    /// Same values, new declarations (sigma, delta, k, growth overrides from config).
    WeightFamily with_declared(Declared d) const {
        WeightFamily copy(id_, kind_, d, fn_, exact_capable_, prime_power_);
        copy.one_plus_base_ = one_plus_base_;
        return copy;
    }

    /// For a 1 + w composition, the wrapped family w.
    const WeightFamily* one_plus_base() const { return one_plus_base_.get(); }
    void set_one_plus_base(std::shared_ptr<const WeightFamily> base) { one_plus_base_ = std::move(base); }

private:
    std::string id_;
    WeightKind kind_;
    Declared decl_;
    ValueFn fn_;
    PrimePowerFn prime_power_;
    bool exact_capable_;
    std::shared_ptr<const WeightFamily> one_plus_base_;
};

/// Eagerly tabulated weights w_1..w_N; immutable once built.
class WeightTable {
public:
    WeightTable(const WeightFamily& w, std::uint64_t n_max, const FactorTable* factors = nullptr) {
        approx_.assign(n_max + 1, std::numeric_limits<double>::quiet_NaN());
        exact_.resize(n_max + 1);
        defined_.assign(n_max + 1, false);
        std::unique_ptr<FactorTable> own;
        if (!factors || factors->limit() < n_max) {
            own = std::make_unique<FactorTable>(std::max<std::uint64_t>(n_max, 1));
            factors = own.get();
        }
        for (std::uint64_t n = 1; n <= n_max; ++n) {
            try {
                const WeightValue v = w.value(factors->factorize(n));
                approx_[n] = v.approx;
                exact_[n] = v.exact;
                defined_[n] = true;
            } catch (const UndefinedWeightError&) {
            }
        }
    }

    std::uint64_t limit() const { return approx_.size() - 1; }
    bool defined(std::uint64_t n) const { return n <= limit() && defined_[n]; }
    double approx(std::uint64_t n) const { return approx_.at(n); }
    const std::optional<Rational>& exact(std::uint64_t n) const { return exact_.at(n); }

private:
    std::vector<double> approx_;
    std::vector<std::optional<Rational>> exact_;
    std::vector<bool> defined_;
};

// ---------------------------------------------------------------------------
// Structured constructions

inline WeightFamily multiplicative_from_prime_powers(std::string id, PrimePowerFn f,
                                                     WeightFamily::Declared decl, bool exact_capable) {
    decl.start_index = 1;
    auto checked = [id, f](std::uint64_t p, unsigned r) {
        WeightValue v = f(p, r);
        if (!(v.approx > 0.0))
            throw std::domain_error("multiplicative weight '" + id + "': nonpositive value at " +
                                    std::to_string(p) + "^" + std::to_string(r));
        return v;
    };
    auto value = [checked](const Factorization& fac) {
        std::optional<Rational> exact = Rational(1);
        double approx = 1.0;
        for (const auto& pp : fac.factors) {
            const WeightValue v = checked(pp.prime, pp.exponent);
            approx *= v.approx;
            if (exact && v.exact) exact = *exact * *v.exact;
            else exact.reset();
        }
        return WeightValue{approx, exact};
    };
    return WeightFamily(std::move(id), WeightKind::multiplicative, decl, value, exact_capable, checked);
}

inline WeightFamily additive_from_prime_powers(std::string id, PrimePowerFn f, WeightFamily::Declared decl,
                                               bool exact_capable) {
    decl.start_index = std::max(decl.start_index, 2u);
    auto value = [id, f](const Factorization& fac) {
        std::optional<Rational> exact = Rational(0);
        double approx = 0.0;
        for (const auto& pp : fac.factors) {
            const WeightValue v = f(pp.prime, pp.exponent);
            approx += v.approx;
            if (exact && v.exact) exact = *exact + *v.exact;
            else exact.reset();
        }
        if (fac.n >= 2 && !(approx > 0.0))
            throw std::domain_error("additive weight '" + id + "': w_" + std::to_string(fac.n) + " <= 0");
        return WeightValue{approx, exact};
    };
    return WeightFamily(std::move(id), WeightKind::additive, decl, value, exact_capable, f);
}

// ---------------------------------------------------------------------------
// Growth constants

/// Smallest C with prod_p g(p, r_p) <= C n^eps whenever g(p, r) <= (r+1)^B.
/// Primes p >= 2^(B/eps) contribute a factor <= 1, so the product is finite.
inline double divisor_like_growth_constant(double B, double eps) {
    if (B <= 0.0) return 1.0;
    const double plimit = std::pow(2.0, B / eps);
    if (plimit > 1e7) throw ResourceLimitError("growth constant: exponent ratio too large");
    double C = 1.0;
    for (std::uint64_t p : primes_up_to(static_cast<std::uint64_t>(plimit))) {
        const double lp = std::log(static_cast<double>(p));
        double best = 1.0;
        // (r+1)^B p^{-r eps} is log-concave in r: stop once it falls below 1 after the peak
        for (unsigned r = 1; r < 4096; ++r) {
            const double t = std::exp(B * std::log(r + 1.0) - r * eps * lp);
            best = std::max(best, t);
            if (t < 1.0 && r * eps * lp > B) break;
        }
        C *= best;
    }
    return C;
}

/// (log j)^alpha <= C j^tau for all j >= 1 with C = (alpha / (e tau))^alpha.
inline double log_power_growth_constant(double alpha, double tau) {
    if (alpha <= 0.0) return 1.0;
    return std::pow(alpha / (std::numbers::e * tau), alpha);
}

inline constexpr double kGrowthEps = 0.25;

// ---------------------------------------------------------------------------
// Named families

namespace families {

inline WeightFamily ones() {
    return multiplicative_from_prime_powers(
        "ones", [](std::uint64_t, unsigned) { return WeightValue::of(Rational(1)); },
        {1, 1.0, 0.0, {1.0, 0.0}}, true);
}

/// Counting prime factors: ω (distinct, f = 1) or Ω (with multiplicity, f = r).
/// Both are bounded by log2 j <= j^tau / (e tau ln 2).
inline WeightFamily omega() {
    const GrowthBound g{1.0 / (std::numbers::e * kGrowthEps * std::numbers::ln2), kGrowthEps};
    return additive_from_prime_powers(
        "omega", [](std::uint64_t, unsigned) { return WeightValue::of(Rational(1)); }, {2, 1.0, 0.0, g}, true);
}

inline WeightFamily big_omega() {
    const GrowthBound g{1.0 / (std::numbers::e * kGrowthEps * std::numbers::ln2), kGrowthEps};
    return additive_from_prime_powers(
        "big_omega", [](std::uint64_t, unsigned r) { return WeightValue::of(Rational(r)); }, {2, 1.0, 0.0, g},
        true);
}

inline std::string param_id(const std::string& name, const char* key, double v) {
    std::ostringstream os;
    os.precision(17);
    os << name << "(" << key << "=" << v << ")";
    return os.str();
}

/// w_n = d(n)^alpha. Exact for integer alpha.
inline WeightFamily divisor_pow(double alpha) {
    const bool integral = alpha == std::floor(alpha) && std::fabs(alpha) <= 62;
    const GrowthBound g = alpha <= 0 ? GrowthBound{1.0, 0.0}
                                     : GrowthBound{divisor_like_growth_constant(alpha, kGrowthEps), kGrowthEps};
    auto f = [alpha, integral](std::uint64_t, unsigned r) {
        if (integral) {
            const Rational base(static_cast<std::int64_t>(r) + 1);
            const unsigned e = static_cast<unsigned>(std::fabs(alpha));
            const Rational v = pow(base, e);
            return WeightValue::of(alpha >= 0 ? v : Rational(1) / v);
        }
        return WeightValue::of(std::pow(r + 1.0, alpha));
    };
    return multiplicative_from_prime_powers(param_id("divisor_pow", "alpha", alpha), f,
                                            {1, 1.0, 0.0, g}, integral);
}

/// Generalized binomial C(beta + r - 1, r): the coefficient of p^{-rs} in ζ(s)^beta's Euler factor.
inline WeightValue d_beta_prime_power(double beta, unsigned r) {
    if (beta == std::floor(beta) && beta >= 0 && beta <= 1e6) {
        Rational acc(1);
        const auto b = static_cast<std::int64_t>(beta);
        for (unsigned i = 1; i <= r; ++i) acc = acc * Rational(b + i - 1, i);
        return WeightValue::of(acc);
    }
    double acc = 1.0;
    for (unsigned i = 1; i <= r; ++i) acc *= (beta + i - 1.0) / i;
    return WeightValue::of(acc);
}

/// w_n = d_beta(n), the n-th coefficient of ζ^beta.
inline WeightFamily d_beta(double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("d_beta: beta must be > 0");
    const bool integral = beta == std::floor(beta);
    // C(beta+r-1, r) <= C(ceil(beta)+r-1, r) <= (r+1)^(ceil(beta)-1)
    const double B = std::max(std::ceil(beta) - 1.0, 0.0);
    const GrowthBound g = B == 0.0 ? GrowthBound{1.0, 0.0}
                                   : GrowthBound{divisor_like_growth_constant(B, kGrowthEps), kGrowthEps};
    return multiplicative_from_prime_powers(
        param_id("d_beta", "beta", beta), [beta](std::uint64_t, unsigned r) { return d_beta_prime_power(beta, r); },
        {1, 1.0, 0.0, g}, integral);
}

/// w_j = (log j)^alpha for j >= 2.
inline WeightFamily log_pow(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("log_pow: alpha must be > 0");
    const GrowthBound g{log_power_growth_constant(alpha, kGrowthEps), kGrowthEps};
    auto value = [alpha](const Factorization& f) {
        return WeightValue::of(std::pow(std::log(static_cast<double>(f.n)), alpha));
    };
    return WeightFamily(param_id("log_pow", "alpha", alpha), WeightKind::explicit_values, {2, 1.0, 0.0, g}, value,
                        false);
}

/// 1 + w_j. Never multiplicative; sigma = max(1, sigma_base), delta = max(0, delta_base).
inline WeightFamily one_plus(const WeightFamily& base) {
    const GrowthBound g{base.growth().C + 1.0, std::max(base.growth().tau, 0.0)};
    WeightFamily::Declared d{base.start_index(), std::max(1.0, base.sigma()), std::max(0.0, base.delta()), g};
    auto value = [base](const Factorization& f) {
        const WeightValue v = base.value(f);
        std::optional<Rational> exact;
        if (v.exact) exact = Rational(1) + *v.exact;
        return WeightValue{1.0 + v.approx, exact};
    };
    WeightFamily out("one_plus(" + base.id() + ")", WeightKind::explicit_values, d, value, base.exact_capable());
    out.set_one_plus_base(std::make_shared<const WeightFamily>(base));
    return out;
}

/// Explicit weights w_k, w_{k+1}, ..., w_{k+len-1}; undefined beyond.
inline WeightFamily explicit_values(std::string id, unsigned start_index, std::vector<WeightValue> values,
                                    double sigma, double delta, GrowthBound growth) {
    if (start_index == 0) throw std::invalid_argument("explicit weights: start_index must be >= 1");
    bool exact = true;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i].approx > 0.0))
            throw std::domain_error("explicit weight '" + id + "' nonpositive at n = " +
                                    std::to_string(start_index + i));
        exact = exact && values[i].exact.has_value();
    }
    auto shared = std::make_shared<const std::vector<WeightValue>>(std::move(values));
    auto fid = id;
    auto value = [shared, start_index, fid](const Factorization& f) {
        const std::uint64_t idx = f.n - start_index;
        if (idx >= shared->size())
            throw UndefinedWeightError("explicit weight '" + fid + "' undefined at n = " + std::to_string(f.n));
        return (*shared)[idx];
    };
    return WeightFamily(std::move(id), WeightKind::explicit_values, {start_index, sigma, delta, growth}, value,
                        exact);
}

}  // namespace families

// ---------------------------------------------------------------------------
// Measure-induced weights: 1 / w_j = ∫ j^{-2σ} dη(σ)

struct MeasureSpec {
    enum class Type { discrete, gamma_density };
    struct Atom {
        double sigma;
        double mass;
    };

    Type type = Type::discrete;
    std::vector<Atom> atoms;  // discrete
    double alpha = 1.0;       // gamma density 2^α/Γ(α) σ^{α-1} dσ

    static MeasureSpec discrete(std::vector<Atom> atoms) {
        MeasureSpec m;
        m.type = Type::discrete;
        m.atoms = std::move(atoms);
        m.validate();
        return m;
    }
    static MeasureSpec gamma_density(double alpha) {
        MeasureSpec m;
        m.type = Type::gamma_density;
        m.alpha = alpha;
        m.validate();
        return m;
    }

    void validate() const {
        if (type == Type::discrete) {
            if (atoms.empty()) throw std::invalid_argument("measure: discrete measure needs at least one atom");
            for (const auto& a : atoms) {
                if (!(a.sigma >= 0.0)) throw std::invalid_argument("measure: atom location must be >= 0");
                if (!(a.mass > 0.0)) throw std::invalid_argument("measure: atom mass must be > 0");
            }
        } else if (!(alpha > 0.0)) {
            throw std::invalid_argument("measure: gamma density needs alpha > 0");
        }
    }

    /// Whether 0 lies in the support of η.
    bool zero_in_support() const {
        if (type == Type::gamma_density) return true;
        return std::any_of(atoms.begin(), atoms.end(), [](const Atom& a) { return a.sigma == 0.0; });
    }
};

namespace detail {

/// ∫_0^∞ e^{-2u} u^{α-1} du by adaptive Gauss-Legendre on a truncated range.
/// The truncation point A keeps the neglected mass below 1e-14 of the total.
inline double gamma_kernel_integral(double alpha, double rel_tol) {
    const double total_est = std::tgamma(alpha) / std::pow(2.0, alpha);
    // ∫_A^∞ e^{-2u}u^{α-1} = 2^{-α} Γ(α, 2A) <= 2^{-α} · 2 (2A)^{α-1} e^{-2A} once 2A > 2(α-1)
    double A = std::max(1.0, alpha);
    auto tail = [alpha](double a) {
        const double x = 2.0 * a;
        return std::pow(2.0, -alpha) * 2.0 * std::exp((alpha - 1.0) * std::log(x) - x);
    };
    while (tail(A) > 1e-14 * total_est) A *= 1.25;
    if (alpha >= 1.0) {
        auto f = [alpha](double u) { return std::exp(-2.0 * u) * std::pow(u, alpha - 1.0); };
        return quad::gauss_legendre_adaptive(f, 0.0, A, rel_tol).value;
    }
    // v = u^α removes the endpoint singularity: integrand becomes e^{-2 v^{1/α}} / α
    auto h = [alpha](double v) { return std::exp(-2.0 * std::pow(v, 1.0 / alpha)) / alpha; };
    return quad::gauss_legendre_adaptive(h, 0.0, std::pow(A, alpha), rel_tol).value;
}

}  // namespace detail

/// w_n = 1 / ∫ n^{-2σ} dη(σ) for n >= max(n0, 2). Discrete measures are summed
/// exactly when every 2σ is an integer and every mass is dyadic.
inline WeightValue measure_induced(const MeasureSpec& spec, std::uint64_t n0, std::uint64_t n) {
    spec.validate();
    if (n < std::max<std::uint64_t>(n0, 2))
        throw UndefinedWeightError("measure-induced weight undefined at n = " + std::to_string(n));
    const double L = std::log(static_cast<double>(n));
    if (spec.type == MeasureSpec::Type::gamma_density) {
        const double a = spec.alpha;
        // u = σ log n: ∫ n^{-2σ} (2^α/Γ(α)) σ^{α-1} dσ = 2^α/Γ(α) · L^{-α} ∫ e^{-2u} u^{α-1} du
        const double J = detail::gamma_kernel_integral(a, 1e-12);
        const double integral = std::pow(2.0, a) / std::tgamma(a) * std::pow(L, -a) * J;
        if (!(integral > 0.0) || !std::isfinite(integral))
            throw std::domain_error("measure-induced weight: integral is zero or divergent");
        return WeightValue::of(1.0 / integral);
    }
    double integral = 0.0;
    std::optional<Rational> exact = Rational(0);
    for (const auto& atom : spec.atoms) {
        integral += atom.mass * std::exp(-2.0 * atom.sigma * L);
        const double twice = 2.0 * atom.sigma;
        const auto mass = Rational::from_double(atom.mass);
        if (exact && mass && twice == std::floor(twice) && twice <= 62) {
            try {
                const Rational p = pow(Rational(static_cast<std::int64_t>(n)), static_cast<unsigned>(twice));
                exact = *exact + *mass / p;
            } catch (const std::overflow_error&) {
                exact.reset();
            }
        } else {
            exact.reset();
        }
    }
    if (!(integral > 0.0) || !std::isfinite(integral))
        throw std::domain_error("measure-induced weight: integral is zero or divergent");
    WeightValue v{1.0 / integral, std::nullopt};
    if (exact && exact->sign() > 0) v.exact = Rational(1) / *exact;
    return v;
}

inline WeightFamily measure_family(const MeasureSpec& spec, unsigned n0) {
    spec.validate();
    const unsigned k = std::max(n0, 2u);
    GrowthBound g{1.0, 0.0};
    bool exact = false;
    std::string id;
    if (spec.type == MeasureSpec::Type::gamma_density) {
        g = {log_power_growth_constant(spec.alpha, kGrowthEps), kGrowthEps};
        id = families::param_id("measure_gamma", "alpha", spec.alpha);
    } else {
        // 1/w_j >= m j^{-2σ} for the leftmost atom, so w_j <= j^{2σ}/m
        const auto& left = *std::min_element(spec.atoms.begin(), spec.atoms.end(),
                                             [](const auto& a, const auto& b) { return a.sigma < b.sigma; });
        g = {1.0 / left.mass, 2.0 * left.sigma};
        exact = std::all_of(spec.atoms.begin(), spec.atoms.end(), [](const auto& a) {
            return 2.0 * a.sigma == std::floor(2.0 * a.sigma) && Rational::from_double(a.mass).has_value();
        });
        id = "measure_discrete";
    }
    auto value = [spec, k](const Factorization& f) { return measure_induced(spec, k, f.n); };
    return WeightFamily(id, WeightKind::measure_induced, {k, 1.0, 0.0, g}, value, exact);
}

// ---------------------------------------------------------------------------
// Growth-condition audits

struct GrowthViolation {
    std::uint64_t prime = 0;
    unsigned exponent = 0;
    double ratio = 0.0;  // w_{p^{j-1}} / w_{p^j}
    double bound = 0.0;  // p^{-δ}
    double margin = 0.0; // bound - ratio
};

struct GrowthReport {
    bool passed = true;
    bool exact = false;           // comparisons done in exact arithmetic
    std::size_t checks = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    std::optional<GrowthViolation> first_violation;
    std::optional<bool> delta_nonpositive;  // additive audit only
};

namespace detail {

inline GrowthReport growth_audit(const WeightFamily& w, double delta, const std::vector<std::uint64_t>& primes,
                                 unsigned first_j, unsigned max_exp) {
    GrowthReport rep;
    const bool exact = w.exact_capable() && delta == 0.0;
    rep.exact = exact;
    for (std::uint64_t p : primes) {
        const double bound = std::pow(static_cast<double>(p), -delta);
        for (unsigned j = first_j; j <= max_exp; ++j) {
            const WeightValue lo = w.prime_power(p, j - 1);
            const WeightValue hi = w.prime_power(p, j);
            ++rep.checks;
            bool ok;
            double ratio = lo.approx / hi.approx;
            if (exact && lo.exact && hi.exact) {
                const Rational r = *lo.exact / *hi.exact;
                ratio = r.to_double();
                ok = r <= Rational(1);
            } else {
                ok = ratio <= bound * (1.0 + 1e-12);
            }
            const double margin = bound - ratio;
            rep.min_margin = std::min(rep.min_margin, margin);
            if (!ok) {
                rep.passed = false;
                if (!rep.first_violation) rep.first_violation = GrowthViolation{p, j, ratio, bound, margin};
            }
        }
    }
    return rep;
}

}  // namespace detail

/// Checks w_{p^{j-1}} / w_{p^j} <= p^{-δ} for every listed prime and 1 <= j <= max_exp.
inline GrowthReport check_multiplicative_growth(const WeightFamily& w, const std::vector<std::uint64_t>& primes,
                                                unsigned max_exp, std::optional<double> delta = std::nullopt) {
    if (w.kind() != WeightKind::multiplicative)
        throw std::invalid_argument("check_multiplicative_growth: family '" + w.id() + "' is not multiplicative");
    return detail::growth_audit(w, delta.value_or(w.delta()), primes, 1, max_exp);
}

/// Same ratio test for additive families, but only for j >= 2 (w_1 = 0 there).
/// Also records whether δ <= 0.
inline GrowthReport check_additive_growth(const WeightFamily& w, const std::vector<std::uint64_t>& primes,
                                          unsigned max_exp, std::optional<double> delta = std::nullopt) {
    if (w.kind() != WeightKind::additive)
        throw std::invalid_argument("check_additive_growth: family '" + w.id() + "' is not additive");
    const double d = delta.value_or(w.delta());
    GrowthReport rep = detail::growth_audit(w, d, primes, 2, max_exp);
    rep.delta_nonpositive = d <= 0.0;
    return rep;
}

// ---------------------------------------------------------------------------
// Smooth-restricted partial sums

/// Calls visit(j) for every j in [1, cutoff] whose prime factors all lie in `primes`.
template <class Visit>
void for_each_smooth(const std::vector<std::uint64_t>& primes, std::uint64_t cutoff, Visit&& visit) {
    // depth-first over exponent vectors; prime index only increases so each j is visited once
    std::function<void(std::size_t, std::uint64_t)> rec = [&](std::size_t i, std::uint64_t j) {
        visit(j);
        for (std::size_t q = i; q < primes.size(); ++q) {
            const std::uint64_t p = primes[q];
            if (j > cutoff / p) break;
            rec(q, j * p);
        }
    };
    if (cutoff >= 1) rec(0, 1);
}

/// Σ w_j j^{-s} over 2 <= j <= cutoff with gpf(j) <= p_n (j >= start index).
inline double smooth_partial_sum(const WeightFamily& w, double s, std::size_t n, std::uint64_t cutoff) {
    if (cutoff < 2) throw std::invalid_argument("smooth_partial_sum: cutoff must be >= 2");
    std::vector<std::uint64_t> primes = primes_up_to(nth_prime(n));
    std::vector<double> terms;
    for_each_smooth(primes, cutoff, [&](std::uint64_t j) {
        if (j < 2 || j < w.start_index()) return;
        terms.push_back(w(j) * std::pow(static_cast<double>(j), -s));
    });
    // deterministic order regardless of traversal
    std::sort(terms.begin(), terms.end());
    double sum = 0.0;
    for (double t : terms) sum += t;
    return sum;
}

struct SmoothSumDiagnostic {
    std::vector<std::uint64_t> cutoffs;
    std::vector<double> sums;
    /// (S(2c) - S(c)) / (S(c) - S(c/2)); ratios well below 1 suggest convergence.
    std::vector<double> increment_ratios;
    bool plateau_suggested = false;
};

/// Doubling-cutoff heuristic; reported, never asserted.
inline SmoothSumDiagnostic smooth_sum_diagnostic(const WeightFamily& w, double s, std::size_t n,
                                                 std::uint64_t first_cutoff, unsigned doublings) {
    SmoothSumDiagnostic d;
    std::uint64_t c = std::max<std::uint64_t>(first_cutoff, 2);
    for (unsigned i = 0; i <= doublings; ++i, c *= 2) {
        d.cutoffs.push_back(c);
        d.sums.push_back(smooth_partial_sum(w, s, n, c));
    }
    for (std::size_t i = 2; i < d.sums.size(); ++i) {
        const double prev = d.sums[i - 1] - d.sums[i - 2];
        const double cur = d.sums[i] - d.sums[i - 1];
        d.increment_ratios.push_back(prev > 0 ? cur / prev : (cur > 0 ? std::numeric_limits<double>::infinity() : 0.0));
    }
    if (d.increment_ratios.size() >= 2) {
        const auto tail = d.increment_ratios.end() - 2;
        d.plateau_suggested = std::all_of(tail, d.increment_ratios.end(), [](double r) { return r < 0.9; });
    }
    return d;
}

// ---------------------------------------------------------------------------
// Sample audits

struct AuditResult {
    bool passed = true;
    std::size_t checked = 0;
    std::optional<std::uint64_t> first_failure;  // n, or m*n for pair audits
    std::string detail;
};

/// w_n <= C n^tau and w_n > 0 for every defined n in [k, n_max].
inline AuditResult audit_growth_bound(const WeightFamily& w, std::uint64_t n_max) {
    AuditResult r;
    const WeightTable table(w, n_max);
    for (std::uint64_t n = w.start_index(); n <= n_max; ++n) {
        if (!table.defined(n)) continue;
        ++r.checked;
        const double v = table.approx(n);
        const double bound = w.growth().C * std::pow(static_cast<double>(n), w.growth().tau);
        if (!(v > 0.0) || v > bound * (1.0 + 1e-12)) {
            r.passed = false;
            r.first_failure = n;
            std::ostringstream os;
            os << "w_" << n << " = " << v << " vs bound " << bound;
            r.detail = os.str();
            break;
        }
    }
    return r;
}

/// Checks w_{mn} = w_m w_n (multiplicative) or w_m + w_n (additive) on coprime pairs.
inline AuditResult audit_structure(const WeightFamily& w, WeightKind as,
                                   const std::vector<std::pair<std::uint64_t, std::uint64_t>>& pairs) {
    AuditResult r;
    for (const auto& [m, n] : pairs) {
        if (std::gcd(m, n) != 1) continue;
        if (as == WeightKind::additive && (m < 2 || n < 2)) continue;
        WeightValue a, b, c;
        try {
            a = w.value(m);
            b = w.value(n);
            c = w.value(m * n);
        } catch (const UndefinedWeightError&) {
            continue;
        }
        ++r.checked;
        bool ok;
        if (a.exact && b.exact && c.exact) {
            ok = as == WeightKind::multiplicative ? *c.exact == *a.exact * *b.exact : *c.exact == *a.exact + *b.exact;
        } else {
            const double expect = as == WeightKind::multiplicative ? a.approx * b.approx : a.approx + b.approx;
            ok = std::fabs(c.approx - expect) <= 1e-12 * std::max(1.0, std::fabs(expect));
        }
        if (!ok) {
            r.passed = false;
            r.first_failure = m * n;
            r.detail = "fails at (" + std::to_string(m) + ", " + std::to_string(n) + ")";
            break;
        }
    }
    return r;
}

}  // namespace wds
