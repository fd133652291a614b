#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "sonine/kernels.hpp"

using namespace sonine;

TEST(PowerLaw, Examples) {
    const auto p = power_law_pair(0.5);
    EXPECT_LE(sonine_residual(p, 1.0), 1e-12);
    EXPECT_NEAR(p.k(4.0), 1.0 / (2.0 * std::sqrt(std::numbers::pi)), 1e-16);
    const auto q = power_law_pair(0.25);
    EXPECT_NEAR(std::abs(q.k.laplace(Complex(2.0)) - std::pow(2.0, -0.75)), 0.0, 1e-15);
    EXPECT_EQ(p.regime, Regime::diffusive);
    EXPECT_FALSE(p.k.tail_integrable);
    EXPECT_EQ(p.k.growth_rate, 0.0);
}

TEST(PowerLaw, ResidualAgainstIndependentQuadrature) {
    const auto p = power_law_pair(0.5);
    EXPECT_LE(sonine_residual(p, 3.0), 1e-10);
    const double ref = oracle::sonine_integral(p.k.eval, p.kappa.eval, 3.0);
    EXPECT_NEAR(ref, 1.0, 1e-10);
}

TEST(PowerLaw, RejectsOrder) {
    EXPECT_THROW(power_law_pair(0.0), ValidationError);
    EXPECT_THROW(power_law_pair(1.0), ValidationError);
    EXPECT_THROW(bessel_pair(1.2), ValidationError);
    EXPECT_THROW(tempered_power_law_pair(-0.1, 1.0), ValidationError);
}

TEST(Tempered, Examples) {
    const auto p = tempered_power_law_pair(0.5, 1.0);
    for (Complex z : {Complex(1.0), Complex(0.3, 4.0), Complex(7.0, -2.0)})
        EXPECT_LE(std::abs(p.k.laplace(z) * p.kappa.laplace(z) - 1.0 / z), 1e-14);
    EXPECT_LE(sonine_residual(p, 2.0), 1e-8);
    EXPECT_NEAR(oracle::sonine_integral(p.k.eval, p.kappa.eval, 2.0), 1.0, 1e-8);
    EXPECT_LE(sonine_residual(tempered_power_law_pair(0.3, 2.0), 1.0), 1e-8);
    EXPECT_LT(tempered_power_law_pair(0.5, 200.0).k(1.0), 1e-80);
    EXPECT_TRUE(p.k.tail_integrable);
    EXPECT_EQ(p.regime, Regime::diffusive);
}

TEST(Tempered, RejectsNonPositiveLambda) {
    EXPECT_THROW(tempered_power_law_pair(0.5, 0.0), ValidationError);
    EXPECT_THROW(tempered_power_law_pair(0.5, -1.0), ValidationError);
}

TEST(Tempered, KappaMatchesItsDefinition) {
    const double a = 0.4, lam = 1.5;
    const auto p = tempered_power_law_pair(a, lam);
    auto g = [&](double s) { return std::exp(-lam * s) * std::pow(s, a - 1.0) / std::tgamma(a); };
    for (double s : {0.01, 0.5, 3.0, 10.0}) {
        const double ref = g(s) + lam * oracle::integral(g, 0.0, s);
        EXPECT_NEAR(p.kappa(s) / ref, 1.0, 1e-11) << s;
    }
}

TEST(Tempered, LaplaceMatchesQuadrature) {
    const auto p = tempered_power_law_pair(0.5, 1.0);
    for (Complex z : {Complex(1.0), Complex(3.0), Complex(1.0, 2.0)}) {
        const Complex num = oracle::laplace(p.k.eval, z);
        EXPECT_LE(std::abs(num - p.k.laplace(z)) / std::abs(p.k.laplace(z)), 1e-6) << z;
        const Complex numq = oracle::laplace(p.kappa.eval, z);
        EXPECT_LE(std::abs(numq - p.kappa.laplace(z)) / std::abs(p.kappa.laplace(z)), 1e-6) << z;
    }
}

TEST(Bessel, PairExamples) {
    const auto p = bessel_pair(0.5);
    for (Complex z : {Complex(1.0), Complex(2.0), Complex(0.5, 2.0), Complex(3.0, -1.0)})
        EXPECT_LE(std::abs(p.k.laplace(z) * p.kappa.laplace(z) - 1.0 / z), 1e-13);
    EXPECT_LE(sonine_residual(p, 1.0), 1e-6);
    EXPECT_LE(sonine_residual(bessel_pair(0.75), 5.0), 1e-6);
    EXPECT_EQ(p.regime, Regime::oscillatory);
    EXPECT_GT(p.k.growth_rate, 0.0);
    EXPECT_FALSE(p.k.tail_integrable);
}

TEST(Bessel, KernelsMatchReferenceFunctions) {
    const double a = 0.3;
    const auto p = bessel_pair(a);
    for (double s : {0.01, 1.0, 30.0, 200.0}) {
        const double z = 2.0 * std::sqrt(s);
        EXPECT_NEAR(p.kappa(s), std::pow(s, 0.5 * (a - 1.0)) * oracle::bessel_j(a - 1.0, z),
                    1e-10 * std::max(1.0, std::abs(p.kappa(s))));
        EXPECT_NEAR(p.k(s) / (std::pow(s, -0.5 * a) * oracle::bessel_i(-a, z)), 1.0, 1e-10);
    }
}

TEST(Bessel, KappaChangesSignNearFirstZero) {
    const auto p = bessel_pair(0.5);
    // J_{-1/2}(2 sqrt s) vanishes where 2 sqrt s = pi / 2.
    const double s0 = std::pow(std::numbers::pi / 4.0, 2);
    EXPECT_GT(p.kappa(0.9 * s0), 0.0);
    EXPECT_LT(p.kappa(1.1 * s0), 0.0);
}

TEST(Residual, DomainError) {
    const auto p = power_law_pair(0.5);
    EXPECT_THROW(sonine_residual(p, 0.0), DomainError);
    EXPECT_THROW(sonine_residual(p, -1.0), DomainError);
}

TEST(Symbols, ZeroFrequencyHandling) {
    const auto p = tempered_power_law_pair(0.5, 1.0);
    EXPECT_THROW(integral_symbol(p.kappa, 0.0), DomainError);
    EXPECT_EQ(marchaud_symbol(p.k, 0.0), Complex(0.0));
    EXPECT_NEAR(std::abs(weyl_symbol(p.kappa, 0.0) - 1.0), 0.0, 1e-15);
    // The stored limit is the small-frequency limit of i xi kappa^(i xi).
    EXPECT_NEAR(std::abs(weyl_symbol(p.kappa, 1e-9) - weyl_symbol(p.kappa, 0.0)), 0.0, 1e-6);
    EXPECT_THROW(marchaud_symbol(power_law_pair(0.5).k, 1.0), ConfigurationError);
}

TEST(Factory, ConfigStyle) {
    const auto p = make_sonine_pair(PairKind::tempered_power_law, {{"alpha", 0.3}, {"lambda", 2.0}});
    EXPECT_EQ(p.order, 0.3);
    EXPECT_EQ(p.tempering, 2.0);
    EXPECT_THROW(make_sonine_pair(PairKind::power_law, {{"lambda", 1.0}}), ValidationError);
    EXPECT_EQ(parse_pair_kind("bessel"), PairKind::bessel);
    EXPECT_THROW(parse_pair_kind("gauss"), ValidationError);
}

TEST(KernelProperty, SonineResidualAtRandomTimes) {
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> t(1e-3, 10.0);
    const SoninePair pairs[] = {power_law_pair(0.35), tempered_power_law_pair(0.6, 1.3), bessel_pair(0.45)};
    for (const auto& p : pairs)
        for (int i = 0; i < 20; ++i) {
            const double ti = t(rng);
            ASSERT_LE(sonine_residual(p, ti), 1e-6) << to_string(p.kind) << " t=" << ti;
        }
}

TEST(KernelProperty, LocalRegularityMoment) {
    for (double a : {0.2, 0.5, 0.8}) {
        const auto p = power_law_pair(a);
        const double m = oracle::integral([&](double s) { return s * std::abs(p.k(s)); }, 0.0, 1.0);
        EXPECT_NEAR(m, 1.0 / ((2.0 - a) * std::tgamma(1.0 - a)), 1e-12);
        EXPECT_LT(p.k.singularity_exponent, 2.0);
    }
    const auto b = bessel_pair(0.5);
    EXPECT_TRUE(std::isfinite(oracle::integral([&](double s) { return s * std::abs(b.k(s)); }, 0.0, 1.0)));
}

TEST(KernelProperty, RegimeSignMarkers) {
    const auto b = bessel_pair(0.5);
    const auto pl = power_law_pair(0.5);
    const auto tp = tempered_power_law_pair(0.5, 1.0);
    bool negative = false;
    for (double s = 0.01; s <= 50.0; s += 0.01) {
        negative = negative || b.kappa(s) < 0.0;
        ASSERT_GE(pl.k(s), 0.0);
        ASSERT_GE(pl.kappa(s), 0.0);
        ASSERT_GE(tp.k(s), 0.0);
        ASSERT_GE(tp.kappa(s), 0.0);
    }
    EXPECT_TRUE(negative);
}
