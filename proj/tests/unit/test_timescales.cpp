#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "sonine/timescales.hpp"

using namespace sonine;

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a + (b - a) * i / (n - 1.0);
    return out;
}

}  // namespace

TEST(Scale, IdentityIsIdentity) {
    const auto s = make_scale(ScaleFamily::identity);
    for (double t : {-3.0, 0.0, 2.5}) {
        EXPECT_EQ(s.forward(t), t);
        EXPECT_EQ(s.inverse(t), t);
        EXPECT_EQ(s.derivative(t), 1.0);
    }
}

TEST(Scale, AffineExample) {
    const auto s = make_scale(ScaleFamily::affine, {{"a", 2.0}, {"b", 0.0}});
    EXPECT_EQ(s.forward(3.0), 6.0);
    EXPECT_EQ(s.inverse(6.0), 3.0);
    EXPECT_EQ(s.derivative(3.0), 2.0);
}

TEST(Scale, RejectsNonMonotoneParameters) {
    EXPECT_THROW(make_scale(ScaleFamily::wobble, {{"eps", 1.5}}), ValidationError);
    EXPECT_THROW(make_scale(ScaleFamily::wobble, {{"eps", 1.0}}), ValidationError);
    EXPECT_THROW(make_scale(ScaleFamily::affine, {{"a", 0.0}}), ValidationError);
    EXPECT_THROW(make_scale(ScaleFamily::affine, {{"a", -1.0}}), ValidationError);
    EXPECT_THROW(make_scale(ScaleFamily::sinh, {{"c", 0.0}}), ValidationError);
    EXPECT_THROW(make_scale(ScaleFamily::sinh, {{"k", 1.0}}), ValidationError);
    EXPECT_THROW(make_scale(ScaleFamily::affine, {{"a", NAN}}), ValidationError);
}

TEST(Scale, ParseFamilies) {
    EXPECT_EQ(parse_scale_family("sinh"), ScaleFamily::sinh);
    EXPECT_EQ(parse_weight_family("gaussian_operational"), WeightFamily::gaussian_operational);
    EXPECT_THROW(parse_scale_family("cubic"), ValidationError);
    EXPECT_THROW(parse_weight_family("linear"), ValidationError);
}

TEST(Scale, UnboundedAtLargeTimes) {
    const double T = 1e3;
    for (const auto& s : {AgingScale::identity(), AgingScale::affine(0.5, 3.0), AgingScale::sinh(0.01),
                          AgingScale::wobble(0.9)}) {
        EXPECT_GE(s.forward(T), 0.4 * T);
        EXPECT_LE(s.forward(-T), -0.4 * T);
    }
}

TEST(Weight, ConstantExample) {
    const auto w = make_weight(WeightFamily::constant, {}, AgingScale::identity());
    EXPECT_EQ(w.value(-7.0), 1.0);
    EXPECT_EQ(w.derivative(2.0), 0.0);
    EXPECT_EQ(w.past_decay_rate(), 0.0);
}

TEST(Weight, ExpOperationalExamples) {
    const auto w = make_weight(WeightFamily::exp_operational, {{"beta", 1.0}}, AgingScale::identity());
    EXPECT_NEAR(w.value(-3.0), std::exp(-3.0), 1e-16);
    EXPECT_EQ(w.past_decay_rate(), 1.0);
    const auto wa =
        make_weight(WeightFamily::exp_operational, {{"beta", 1.0}}, AgingScale::affine(2.0, 0.0));
    EXPECT_NEAR(wa.value(-3.0) / std::exp(-6.0), 1.0, 1e-15);
}

TEST(Weight, RejectsBadParameters) {
    const auto id = AgingScale::identity();
    EXPECT_THROW(make_weight(WeightFamily::exp_operational, {{"beta", 0.0}}, id), ValidationError);
    EXPECT_THROW(make_weight(WeightFamily::exp_operational, {{"beta", -1.0}}, id), ValidationError);
    EXPECT_THROW(make_weight(WeightFamily::exp_operational, {}, id), ValidationError);
    EXPECT_THROW(make_weight(WeightFamily::gaussian_operational, {{"delta", 0.0}}, id), ValidationError);
    EXPECT_THROW(make_weight(WeightFamily::constant, {{"beta", 1.0}}, id), ValidationError);
}

TEST(Weight, ExpOperationalClosedFormInOperationalTime) {
    const auto scale = AgingScale::sinh(0.7);
    const auto w = AmnesiaWeight::exp_operational(0.8, scale);
    for (double x : linspace(-20, 20, 101)) {
        EXPECT_EQ(w.at_operational(x), std::exp(0.8 * x));
        const double via_t = w.value(scale.inverse(x));
        EXPECT_NEAR(via_t / std::exp(0.8 * x), 1.0, 1e-12);
    }
}

TEST(Admissibility, IdentityConstantPasses) {
    const auto s = AgingScale::identity();
    const auto r = check_admissibility(s, AmnesiaWeight::constant(s), linspace(-10, 10, 201));
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.find("decay_bound").status, CheckStatus::not_claimed);
}

TEST(Admissibility, WobbleExpPasses) {
    const auto s = AgingScale::wobble(0.5);
    const auto r = check_admissibility(s, AmnesiaWeight::exp_operational(1.0, s), linspace(-10, 10, 201));
    for (const auto& c : r.checks) EXPECT_NE(c.status, CheckStatus::fail) << c.name << " worst " << c.worst;
    EXPECT_EQ(r.find("decay_bound").status, CheckStatus::pass);
    EXPECT_GE(r.find("scale_derivative_positive").worst, 0.5 - 1e-12);
}

TEST(Admissibility, AffineConstantDecayNotClaimed) {
    const auto s = AgingScale::affine(2.0, 0.0);
    const auto r = check_admissibility(s, AmnesiaWeight::constant(s), linspace(-10, 10, 201));
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.find("decay_bound").status, CheckStatus::not_claimed);
}

TEST(Admissibility, GaussianWeightDecayBound) {
    const auto s = AgingScale::sinh(1.0);
    const auto r = check_admissibility(s, AmnesiaWeight::gaussian_operational(0.1, 0.5, s),
                                       linspace(-3, 3, 121));
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.find("decay_bound").status, CheckStatus::pass);
}

TEST(Admissibility, ProbeGridErrors) {
    const auto s = AgingScale::identity();
    const auto w = AmnesiaWeight::constant(s);
    EXPECT_THROW(check_admissibility(s, w, std::vector<double>{}), DomainError);
    EXPECT_THROW(check_admissibility(s, w, std::vector<double>{1.0, 0.0}), DomainError);
    const auto r = check_admissibility(s, w, std::vector<double>{0.0});
    EXPECT_THROW(r.find("no_such_check"), DomainError);
}

TEST(ScaleProperty, RoundTripOnRandomPoints) {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> pt(-50.0, 50.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 12; ++trial) {
        std::vector<AgingScale> scales{AgingScale::identity(),
                                       AgingScale::affine(0.1 + 3.0 * u(rng), -5.0 + 10.0 * u(rng)),
                                       AgingScale::sinh(0.05 + 0.25 * u(rng)),
                                       AgingScale::wobble(0.99 * u(rng))};
        for (const auto& s : scales) {
            for (int i = 0; i < 1000; ++i) {
                const double t = pt(rng);
                const double den = std::max(std::abs(t), 1.0);
                ASSERT_LE(std::abs(s.inverse(s.forward(t)) - t) / den, 1e-12) << to_string(s.family());
                ASSERT_LE(std::abs(s.forward(s.inverse(t)) - t) / den, 1e-12) << to_string(s.family());
            }
        }
    }
}

TEST(ScaleProperty, StrictlyIncreasingAndDerivativeMatches) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> pt(-10.0, 10.0);
    std::vector<double> ts(500);
    for (auto& t : ts) t = pt(rng);
    std::sort(ts.begin(), ts.end());
    for (const auto& s : {AgingScale::affine(0.3, 1.0), AgingScale::sinh(0.5), AgingScale::wobble(0.95)}) {
        for (std::size_t i = 1; i < ts.size(); ++i)
            if (ts[i] > ts[i - 1]) ASSERT_GT(s.forward(ts[i]), s.forward(ts[i - 1]));
        for (double t : ts) {
            const double fd = (s.forward(t + 1e-5) - s.forward(t - 1e-5)) / 2e-5;
            ASSERT_LE(std::abs(fd - s.derivative(t)) / s.derivative(t), 1e-6);
        }
    }
}

TEST(WeightProperty, DerivativeMatchesFiniteDifference) {
    const auto s = AgingScale::wobble(0.4);
    for (const auto& w : {AmnesiaWeight::exp_operational(0.7, s), AmnesiaWeight::gaussian_operational(0.05, 0.3, s)}) {
        for (double t : linspace(-6, 6, 49)) {
            const double fd = (w.value(t + 1e-5) - w.value(t - 1e-5)) / 2e-5;
            EXPECT_LE(std::abs(fd - w.derivative(t)) / std::max(std::abs(w.derivative(t)), 1e-3 * w.value(t)), 1e-6);
            EXPECT_GT(w.value(t), 0.0);
        }
    }
}
