#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "wds/kernel.hpp"

using namespace wds;

namespace {

// Σ_p p^{-s}: prime zeta values, external constants.
constexpr double kPrimeZeta3 = 0.17476263929944353642;

WeightFamily ones_from_two() {
    return WeightFamily(
        "ones_from_2", WeightKind::explicit_values, {2, 1.0, 0.0, {1.0, 0.0}},
        [](const Factorization&) { return WeightValue::of(Rational(1)); }, true);
}

}  // namespace

TEST(Kappa, OnesAtOneIsZetaTwoMinusOne) {
    const auto v = kappa(families::ones(), {1.0, 0.0}, {1.0, 0.0});
    ASSERT_TRUE(v.certified());
    EXPECT_LE(v.tail_bound, 1e-6);
    EXPECT_LE(v.terms, 1000000u);
    EXPECT_LE(std::abs(v.value - (oracle::kZeta2 - 1.0)), v.tail_bound);
}

TEST(Kappa, OutsideHalfPlaneIsRejected) {
    EXPECT_THROW(kappa(families::ones(), {0.4, 0.0}, {0.4, 0.0}), std::domain_error);
    EXPECT_THROW(HalfPlanePoint({0.5, 3.0}, 0.5), std::domain_error);
    EXPECT_NO_THROW(HalfPlanePoint({0.51, 3.0}, 0.5));
}

TEST(Kappa, HermitianSymmetryAndDiagonalPositivity) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> re(0.8, 2.0), im(-3.0, 3.0);
    for (const auto& w : {families::ones(), families::divisor_pow(1), families::omega(), families::log_pow(1)}) {
        for (int i = 0; i < 5; ++i) {
            const Complex s{re(rng), im(rng)}, u{re(rng), im(rng)};
            KernelOptions opt;
            opt.fixed_terms = 5000;
            const auto a = kappa(w, s, u, opt), b = kappa(w, u, s, opt);
            EXPECT_NEAR(std::abs(a.value - std::conj(b.value)), 0.0, 1e-12) << w.id();
            EXPECT_GT(kappa(w, s, s, opt).value.real(), 0.0);
        }
    }
}

TEST(Kappa, TruncationBoundMonotone) {
    const auto w = families::divisor_pow(1);
    double prev = INFINITY;
    for (std::size_t n = 10; n <= 100000; n *= 10) {
        KernelOptions opt;
        opt.fixed_terms = n;
        const auto v = kappa(w, {1.5, 0.5}, {1.2, -0.3}, opt);
        EXPECT_LE(v.tail_bound, prev);
        prev = v.tail_bound;
    }
}

TEST(Kappa, CapIsFlagged) {
    KernelOptions opt;
    opt.max_terms = 1000;
    const auto v = kappa(families::ones(), {1.0, 0.0}, {1.0, 0.0}, opt);
    EXPECT_TRUE(v.capped);
    EXPECT_EQ(v.terms, 1000u);
    EXPECT_LE(std::abs(v.value - (oracle::kZeta2 - 1.0)), v.tail_bound);
}

TEST(EtaRatio, OnesIsIdentically1) {
    for (Complex s : {Complex{0.8, 0.0}, Complex{1.3, 2.0}}) {
        const auto v = eta_ratio(families::ones(), s, {0.9, -1.0});
        EXPECT_NEAR(std::abs(v.value - 1.0), 0.0, 1e-12);
    }
}

TEST(EtaSeries, DivisorIsZeta) {
    const auto v = eta_series(families::divisor_pow(1), {1.2, 0.0}, {1.2, 0.0});
    ASSERT_TRUE(v.certified());
    EXPECT_LE(std::abs(v.value - oracle::zeta(2.4)), v.tail_bound + 1e-12);
    const auto r = eta_ratio(families::divisor_pow(1), {1.2, 0.0}, {1.2, 0.0});
    EXPECT_LE(std::abs(v.value - r.value), v.tail_bound + r.tail_bound);
}

TEST(EtaSeries, OmegaIsPrimeZeta) {
    const auto v = eta_series(families::omega(), {1.5, 0.0}, {1.5, 0.0});
    ASSERT_TRUE(v.certified());
    EXPECT_LE(std::abs(v.value - kPrimeZeta3), v.tail_bound + 1e-12);
}

TEST(EtaSeries, OnesFromTwoHasMinusMobiusCoefficients) {
    const auto w = ones_from_two();
    const Complex s{1.5, 0.0};
    const auto series = eta_series(w, s, s);
    const auto ratio = eta_ratio(w, s, s);
    EXPECT_LE(std::abs(series.value - ratio.value), series.tail_bound + ratio.tail_bound);
    EXPECT_NEAR(ratio.value.real(), 1.0 - 1.0 / oracle::kZeta3, ratio.tail_bound + 1e-12);
}

TEST(EtaRoutes, AgreeAtRandomPoints) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> re(1.0, 2.0), im(-4.0, 4.0);
    for (const auto& w : {families::ones(), families::divisor_pow(1), families::omega(), families::log_pow(1)}) {
        for (int i = 0; i < 20; ++i) {
            const Complex s{re(rng), im(rng)}, u{re(rng), im(rng)};
            const auto a = eta_ratio(w, s, u), b = eta_series(w, s, u);
            ASSERT_TRUE(a.certified() && b.certified()) << w.id();
            ASSERT_LE(std::abs(a.value - b.value), a.tail_bound + b.tail_bound) << w.id() << " " << s << " " << u;
        }
    }
}

TEST(Gram, DivisorSixPointsIsPsd) {
    std::vector<Complex> pts;
    for (int i = 0; i < 6; ++i) pts.emplace_back(1.1 + 0.1 * i, 0.0);
    for (KernelKind kind : {KernelKind::kappa, KernelKind::eta_ratio, KernelKind::eta_series}) {
        const auto g = gram_psd(families::divisor_pow(1), kind, pts, 1e-10);
        EXPECT_EQ(g.verdict, GramVerdict::psd_within_tol) << to_string(kind);
        EXPECT_GE(g.min_eigenvalue, -(1e-10 + g.error_budget));
        EXPECT_LE(g.hermitian_defect, 1e-14);
    }
}

TEST(Gram, SinglePoint) {
    const auto g = gram_psd(families::divisor_pow(1), KernelKind::kappa, {{1.0, 0.5}}, 1e-10);
    ASSERT_EQ(g.matrix.rows(), 1);
    EXPECT_GT(g.matrix(0, 0).real(), 0.0);
    EXPECT_EQ(g.min_eigenvalue, g.matrix(0, 0).real());
}

TEST(Gram, KappaPsdForPositiveWeights) {
    for (const auto& w : {families::ones(), families::omega(), families::log_pow(2), families::d_beta(0.5)}) {
        const auto pts = default_grid(w, KernelKind::kappa, w.delta(), 8);
        EXPECT_EQ(pts.size(), 8u);
        const auto g = gram_psd(w, KernelKind::kappa, pts, 1e-10);
        EXPECT_NE(g.verdict, GramVerdict::indefinite_certified) << w.id();
        EXPECT_EQ(g.hermitian_defect, 0.0);
    }
}

TEST(Gram, OnesEtaRatioIsConstantOne) {
    const auto w = families::ones();
    const auto g = gram_psd(w, KernelKind::eta_ratio, default_grid(w, KernelKind::eta_ratio, 0.0), 1e-10);
    EXPECT_GE(g.min_eigenvalue, -1e-12);
    for (Eigen::Index i = 0; i < g.matrix.rows(); ++i)
        for (Eigen::Index j = 0; j < g.matrix.cols(); ++j) EXPECT_NEAR(std::abs(g.matrix(i, j) - 1.0), 0.0, 1e-12);
}

TEST(Gram, DefaultGridShape) {
    const auto w = families::divisor_pow(1);
    const auto pts = default_grid(w, KernelKind::eta_ratio, 0.0, 8);
    int conj_pairs = 0;
    for (const auto& p : pts) {
        EXPECT_GT(p.real(), kernel_abscissa(KernelKind::eta_ratio, w, 0.0));
        conj_pairs += p.imag() > 0;
    }
    EXPECT_EQ(conj_pairs, 1);
    EXPECT_THROW(default_grid(w, KernelKind::kappa, 0.0, 0), std::invalid_argument);
}

TEST(Gram, InputValidation) {
    EXPECT_THROW(gram_psd(families::ones(), KernelKind::kappa, {}, 1e-10), std::invalid_argument);
    EXPECT_THROW(gram_psd(families::ones(), KernelKind::kappa, {{0.3, 0.0}}, 1e-10), std::domain_error);
    EXPECT_THROW(gram_psd(families::ones(), KernelKind::kappa, std::vector<Complex>(65, {1.0, 0.0}), 1e-10),
                 std::invalid_argument);
}

TEST(Gram, NegativeControlEtaIsNotPsd) {
    // w_p^r = 1/2: c_p = -1/2 at every prime, so η has negative coefficients
    const auto w = multiplicative_from_prime_powers(
        "half", [](std::uint64_t, unsigned) { return WeightValue::of(Rational(1, 2)); }, {1, 1.0, 0.0, {1.0, 0.0}},
        true);
    std::vector<Complex> pts;
    for (int i = 0; i < 16; ++i) pts.emplace_back(1.0 + 0.1 * i, 0.0);
    const auto g = gram_psd(w, KernelKind::eta_ratio, pts, 1e-10);
    EXPECT_NE(g.verdict, GramVerdict::psd_within_tol);
}
