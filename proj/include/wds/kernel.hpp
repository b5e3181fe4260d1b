#pragma once

// Numeric reproducing kernels on right half-planes.
//
//   kappa:      κ_w(s, u) = Σ_{j >= max(k,2)} w_j j^{-s-ū}
//   eta_ratio:  η(s, u) = Σ_{j >= k} w̃_j j^{-s-ū} / ζ(s+ū),  w̃_j = j^{-δ} w_j
//   eta_series: η(s, u) = Σ_{n >= k} c_n n^{-s-ū},  c_n = Σ_{j>=k, j|n} j^{-δ} w_j μ(n/j)
//
// The η numerator starts at the family's start index k, so a k = 1 family
// keeps its j = 1 term; the denominator is the full ζ, which makes the two η
// routes the same function.
//
// Each value comes with a rigorous truncation bound derived from a dominating
// growth bound on its coefficients. Truncation length adapts to a tail target
// up to a hard cap; an entry that hits the cap is flagged, never silently
// accepted.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "wds/arith.hpp"
#include "wds/parallel.hpp"
#include "wds/series.hpp"
#include "wds/weights.hpp"

namespace wds {

using Complex = std::complex<double>;

enum class KernelKind { kappa, eta_ratio, eta_series };

inline std::string_view to_string(KernelKind k) {
    switch (k) {
        case KernelKind::kappa: return "kappa";
        case KernelKind::eta_ratio: return "eta_ratio";
        case KernelKind::eta_series: return "eta_series";
    }
    return "?";
}

inline KernelKind parse_kernel(std::string_view s) {
    if (s == "kappa") return KernelKind::kappa;
    if (s == "eta_ratio") return KernelKind::eta_ratio;
    if (s == "eta_series") return KernelKind::eta_series;
    throw std::invalid_argument("unknown kernel '" + std::string(s) + "'");
}

/// A point s with Re(s) strictly right of a declared abscissa.
class HalfPlanePoint {
public:
    HalfPlanePoint(Complex s, double abscissa) : s_(s), abscissa_(abscissa) {
        if (!(s.real() > abscissa))
            throw std::domain_error("point " + describe(s) + " lies outside the half-plane Re(s) > " +
                                    std::to_string(abscissa));
    }
    Complex value() const { return s_; }
    double abscissa() const { return abscissa_; }

    static std::string describe(Complex s) {
        return "(" + std::to_string(s.real()) + (s.imag() < 0 ? " - " : " + ") + std::to_string(std::fabs(s.imag())) +
               "i)";
    }

private:
    Complex s_;
    double abscissa_;
};

struct KernelOptions {
    double target_tail = 1e-8;
    std::size_t max_terms = 1'000'000;
    std::size_t min_terms = 64;
    std::optional<std::size_t> fixed_terms;  // bypasses the adaptive choice
    std::optional<double> delta;             // eta kernels; defaults to declared δ_w
    unsigned threads = 0;
};

/// Half-plane on which the kernel is evaluated: σ_w/2 for κ_w, β = ½ max(σ_w − δ, 1) for η.
inline double kernel_abscissa(KernelKind kind, const WeightFamily& w, double delta) {
    if (kind == KernelKind::kappa) return w.sigma() / 2.0;
    return 0.5 * std::max(w.sigma() - delta, 1.0);
}

/// |c_n| <= C' n^{τ'} for the coefficients of each kernel's Dirichlet series.
inline GrowthBound kernel_coefficient_bound(KernelKind kind, const WeightFamily& w, double delta) {
    const GrowthBound& g = w.growth();
    switch (kind) {
        case KernelKind::kappa: return g;
        case KernelKind::eta_ratio: return {g.C, g.tau - delta};
        case KernelKind::eta_series: {
            // |c_n| <= Σ_{j|n} C j^{τ-δ} <= C d(n) n^{max(τ-δ,0)} <= C C_d n^{ε + max(τ-δ,0)}
            const double cd = divisor_like_growth_constant(1.0, kGrowthEps);
            return {g.C * cd, kGrowthEps + std::max(g.tau - delta, 0.0)};
        }
    }
    return g;
}

/// Smallest N whose tail bound meets the target, clamped to [min_terms, max_terms].
inline std::size_t adaptive_terms(const GrowthBound& g, double sigma, const KernelOptions& opt) {
    if (opt.fixed_terms) return *opt.fixed_terms;
    const double gap = sigma - g.tau - 1.0;
    if (!(gap > 0.0)) return opt.max_terms;
    if (g.C == 0.0) return opt.min_terms;
    // C N^{-gap} / gap <= target  <=>  N >= (C / (gap target))^{1/gap}
    const double n = std::pow(g.C / (gap * opt.target_tail), 1.0 / gap);
    if (!(n < static_cast<double>(opt.max_terms))) return opt.max_terms;
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(n)), opt.min_terms, opt.max_terms);
}

/// Precomputed logs and coefficient tables up to a fixed length; immutable after construction.
class KernelWorkspace {
public:
    KernelWorkspace(const WeightFamily& w, double delta, std::size_t length, bool with_eta_series)
        : family_(w),
          delta_(delta),
          first_(std::max<std::uint64_t>(w.start_index(), 2)),
          eta_first_(w.start_index()) {
        if (length < 2) length = 2;
        logs_.resize(length + 1, 0.0);
        weights_.assign(length + 1, 0.0);
        shifted_.assign(length + 1, 0.0);
        for (std::size_t j = 1; j <= length; ++j) logs_[j] = std::log(static_cast<double>(j));
        const WeightTable table(w, length);
        for (std::size_t j = eta_first_; j <= length; ++j) {
            if (!table.defined(j)) throw UndefinedWeightError("kernel: weight undefined at j = " + std::to_string(j));
            if (j >= first_) weights_[j] = table.approx(j);
            shifted_[j] = table.approx(j) * std::exp(-delta * logs_[j]);
        }
        if (with_eta_series) {
            const MobiusTable mu(length);
            eta_coeffs_.assign(length + 1, 0.0);
            for (std::size_t j = eta_first_; j <= length; ++j) {
                const double a = shifted_[j];
                for (std::size_t m = 1; j * m <= length; ++m) {
                    const int v = mu[m];
                    if (v) eta_coeffs_[j * m] += v * a;
                }
            }
        }
    }

    std::size_t length() const { return logs_.size() - 1; }
    /// First index of the κ_w sum: max(k, 2).
    std::uint64_t first_index() const { return first_; }
    /// First index of the η numerator and coefficients: k itself, so j = 1 joins when k = 1.
    std::uint64_t eta_first_index() const { return eta_first_; }
    double delta() const { return delta_; }
    const WeightFamily& family() const { return family_; }

    enum class Table { weights, shifted, ones, eta };

    /// Σ_{j=from}^{n} a_j j^{-z}.
    /// Σ_{from <= j <= n} a_j j^{-z}, with the accumulated rounding bound.
    struct Partial {
        Complex value;
        double rounding;
    };

    Partial partial_sum(Table t, Complex z, std::size_t from, std::size_t n) const {
        if (n > length()) throw std::out_of_range("kernel workspace too short");
        if (t == Table::eta && eta_coeffs_.empty()) throw std::logic_error("eta coefficients not built");
        const double re = z.real(), im = z.imag();
        CompensatedSum acc;
        for (std::size_t j = from; j <= n; ++j) {
            double a;
            switch (t) {
                case Table::weights: a = weights_[j]; break;
                case Table::shifted: a = shifted_[j]; break;
                case Table::ones: a = 1.0; break;
                default: a = eta_coeffs_[j]; break;
            }
            if (a == 0.0) continue;
            const double mag = a * std::exp(-re * logs_[j]);
            if (im == 0.0) {
                acc.add(mag);
            } else {
                const double ph = -im * logs_[j];
                acc.add({mag * std::cos(ph), mag * std::sin(ph)});
            }
        }
        return {acc.value(), acc.rounding_bound()};
    }

private:
    const WeightFamily& family_;
    double delta_;
    std::uint64_t first_;
    std::uint64_t eta_first_;
    std::vector<double> logs_;
    std::vector<double> weights_;
    std::vector<double> shifted_;
    std::vector<double> eta_coeffs_;
};

namespace detail {

inline EvaluatedValue kernel_entry(const KernelWorkspace& ws, KernelKind kind, Complex s, Complex u,
                                   const KernelOptions& opt) {
    const WeightFamily& w = ws.family();
    const double delta = ws.delta();
    const Complex z = s + std::conj(u);
    const double sigma = z.real();
    EvaluatedValue out;
    switch (kind) {
        case KernelKind::kappa: {
            const GrowthBound g = kernel_coefficient_bound(kind, w, delta);
            const std::size_t n = std::min(adaptive_terms(g, sigma, opt), ws.length());
            const auto sum = ws.partial_sum(KernelWorkspace::Table::weights, z, ws.first_index(), n);
            out.value = sum.value;
            out.terms = n;
            out.tail_bound = tail_bound(g, sigma, n) + sum.rounding;
            break;
        }
        case KernelKind::eta_series: {
            const GrowthBound g = kernel_coefficient_bound(kind, w, delta);
            const std::size_t n = std::min(adaptive_terms(g, sigma, opt), ws.length());
            const auto sum = ws.partial_sum(KernelWorkspace::Table::eta, z, ws.eta_first_index(), n);
            out.value = sum.value;
            out.terms = n;
            out.tail_bound = tail_bound(g, sigma, n) + sum.rounding;
            break;
        }
        case KernelKind::eta_ratio: {
            const GrowthBound gn = kernel_coefficient_bound(kind, w, delta);
            const GrowthBound gd{1.0, 0.0};
            // numerator and denominator share one truncation length
            const std::size_t n = std::min(std::max(adaptive_terms(gn, sigma, opt), adaptive_terms(gd, sigma, opt)),
                                           ws.length());
            // the denominator is ζ itself (j >= 1): η's series is the numerator times 1/ζ
            const auto num_sum = ws.partial_sum(KernelWorkspace::Table::shifted, z, ws.eta_first_index(), n);
            const auto den_sum = ws.partial_sum(KernelWorkspace::Table::ones, z, 1, n);
            const Complex num = num_sum.value, den = den_sum.value;
            const double a = tail_bound(gn, sigma, n) + num_sum.rounding;
            const double b = tail_bound(gd, sigma, n) + den_sum.rounding;
            out.terms = n;
            out.value = num / den;
            const double dm = std::abs(den);
            // |A'/D' - A/D| <= (a|D| + b|A|) / (|D| (|D| - b)) for |A'-A| <= a, |D'-D| <= b
            out.tail_bound = (std::isfinite(a) && std::isfinite(b) && dm > b)
                                 ? (a * dm + b * std::abs(num)) / (dm * (dm - b))
                                 : std::numeric_limits<double>::infinity();
            break;
        }
    }
    out.capped = !opt.fixed_terms && out.tail_bound > opt.target_tail;
    return out;
}

inline std::size_t required_length(KernelKind kind, const WeightFamily& w, double delta, double sigma,
                                   const KernelOptions& opt) {
    std::size_t n = adaptive_terms(kernel_coefficient_bound(kind, w, delta), sigma, opt);
    if (kind == KernelKind::eta_ratio) n = std::max(n, adaptive_terms(GrowthBound{1.0, 0.0}, sigma, opt));
    return n;
}

}  // namespace detail

/// Evaluates one kernel at (s, u). Both points must lie in the kernel's half-plane.
inline EvaluatedValue evaluate_kernel(const WeightFamily& w, KernelKind kind, Complex s, Complex u,
                                      const KernelOptions& opt = {}) {
    const double delta = opt.delta.value_or(w.delta());
    const double abscissa = kernel_abscissa(kind, w, delta);
    (void)HalfPlanePoint(s, abscissa);
    (void)HalfPlanePoint(u, abscissa);
    const double sigma = s.real() + u.real();
    const std::size_t n = detail::required_length(kind, w, delta, sigma, opt);
    const KernelWorkspace ws(w, delta, n, kind == KernelKind::eta_series);
    return detail::kernel_entry(ws, kind, s, u, opt);
}

inline EvaluatedValue kappa(const WeightFamily& w, Complex s, Complex u, const KernelOptions& opt = {}) {
    return evaluate_kernel(w, KernelKind::kappa, s, u, opt);
}
inline EvaluatedValue eta_ratio(const WeightFamily& w, Complex s, Complex u, const KernelOptions& opt = {}) {
    return evaluate_kernel(w, KernelKind::eta_ratio, s, u, opt);
}
inline EvaluatedValue eta_series(const WeightFamily& w, Complex s, Complex u, const KernelOptions& opt = {}) {
    return evaluate_kernel(w, KernelKind::eta_series, s, u, opt);
}

// ---------------------------------------------------------------------------
// Gram matrices

enum class GramVerdict { psd_within_tol, indefinite_certified, inconclusive };

inline std::string_view to_string(GramVerdict v) {
    switch (v) {
        case GramVerdict::psd_within_tol: return "psd_within_tol";
        case GramVerdict::indefinite_certified: return "indefinite_certified";
        case GramVerdict::inconclusive: return "inconclusive";
    }
    return "?";
}

struct GramCheck {
    KernelKind kernel = KernelKind::kappa;
    double delta = 0.0;
    double abscissa = 0.0;
    double tol = 1e-10;
    std::vector<Complex> points;
    Eigen::MatrixXcd matrix;
    Eigen::VectorXd eigenvalues;  // ascending
    double min_eigenvalue = 0.0;
    double truncation_bound = 0.0;  // max entry bound
    double error_budget = 0.0;      // n_points * truncation_bound
    double hermitian_defect = 0.0;  // max |G - G^H|
    std::size_t max_terms_used = 0;
    std::size_t capped_entries = 0;
    GramVerdict verdict = GramVerdict::inconclusive;
};

inline constexpr std::size_t kMaxGramPoints = 64;

/// Real parts base + 0.25·4^{i/(m-1)} (geometric, inside (base, base+1]) plus a
/// conjugate pair base + 0.5 ± i. The base sits at or right of both the
/// kernel's half-plane and the growth bound's certification threshold.
inline std::vector<Complex> default_grid(const WeightFamily& w, KernelKind kind, double delta, std::size_t count = 8) {
    if (count == 0) throw std::invalid_argument("default_grid: need at least one point");
    const GrowthBound g = kernel_coefficient_bound(kind, w, delta);
    const double base = std::max(kernel_abscissa(kind, w, delta), (g.tau + 1.0) / 2.0);
    std::vector<Complex> pts;
    const std::size_t pairs = count >= 4 ? 1 : 0;
    const std::size_t reals = count - 2 * pairs;
    for (std::size_t i = 0; i < reals; ++i) {
        const double t = reals == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(reals - 1);
        pts.emplace_back(base + 0.25 * std::pow(4.0, t), 0.0);
    }
    if (pairs) {
        pts.emplace_back(base + 0.5, 1.0);
        pts.emplace_back(base + 0.5, -1.0);
    }
    return pts;
}

/// Hermitian Gram matrix of kernel values at the points, its spectrum and a
/// verdict that charges the truncation error against the smallest eigenvalue.
inline GramCheck gram_psd(const WeightFamily& w, KernelKind kind, const std::vector<Complex>& points, double tol,
                          KernelOptions opt = {}) {
    if (points.empty() || points.size() > kMaxGramPoints)
        throw std::invalid_argument("gram_psd: need between 1 and " + std::to_string(kMaxGramPoints) + " points");
    if (!(tol >= 0.0)) throw std::invalid_argument("gram_psd: tolerance must be >= 0");
    GramCheck g;
    g.kernel = kind;
    g.delta = opt.delta.value_or(w.delta());
    g.abscissa = kernel_abscissa(kind, w, g.delta);
    g.tol = tol;
    g.points = points;
    for (Complex p : points) (void)HalfPlanePoint(p, g.abscissa);

    const std::size_t m = points.size();
    // per-entry tail target keeps the accumulated budget under the tolerance
    opt.target_tail = std::min(opt.target_tail, tol / (10.0 * static_cast<double>(m)));
    if (opt.target_tail <= 0.0) opt.target_tail = std::numeric_limits<double>::min();
    std::size_t length = 2;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j)
            length = std::max(length, detail::required_length(kind, w, g.delta,
                                                              points[i].real() + points[j].real(), opt));
    const KernelWorkspace ws(w, g.delta, length, kind == KernelKind::eta_series);

    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) cells.emplace_back(i, j);
    std::vector<EvaluatedValue> values(cells.size());
    parallel_for(
        0, cells.size(),
        [&](std::size_t c) {
            values[c] = detail::kernel_entry(ws, kind, points[cells[c].first], points[cells[c].second], opt);
        },
        opt.threads);

    g.matrix = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    bool all_certified = true;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto [i, j] = cells[c];
        const auto& v = values[c];
        const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
        if (i == j) {
            g.matrix(ii, jj) = Complex(v.value.real(), 0.0);
        } else {
            g.matrix(ii, jj) = v.value;
            g.matrix(jj, ii) = std::conj(v.value);
        }
        all_certified = all_certified && v.certified();
        g.truncation_bound = std::max(g.truncation_bound, v.tail_bound);
        g.max_terms_used = std::max(g.max_terms_used, v.terms);
        g.capped_entries += v.capped ? 1 : 0;
    }
    g.hermitian_defect = (g.matrix - g.matrix.adjoint()).cwiseAbs().maxCoeff();

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(g.matrix, Eigen::EigenvaluesOnly);
    g.eigenvalues = solver.eigenvalues();
    g.min_eigenvalue = g.eigenvalues.minCoeff();
    // spectral norm of the error matrix is at most m · max entry error
    g.error_budget = static_cast<double>(m) * g.truncation_bound;

    if (!all_certified || !std::isfinite(g.min_eigenvalue)) g.verdict = GramVerdict::inconclusive;
    else if (g.min_eigenvalue >= -(tol + g.error_budget)) g.verdict = GramVerdict::psd_within_tol;
    else g.verdict = GramVerdict::indefinite_certified;
    return g;
}

}  // namespace wds
