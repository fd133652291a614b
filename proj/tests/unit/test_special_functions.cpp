#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "sonine/special_functions.hpp"

using namespace sonine;

TEST(Bessel, HalfIntegerClosedForms) {
    const double pi = std::numbers::pi;
    EXPECT_NEAR(special::bessel_j(-0.5, 1.0), std::sqrt(2.0 / pi) * std::cos(1.0), 1e-14);
    EXPECT_NEAR(special::bessel_i(-0.5, 2.0) / (std::sqrt(1.0 / pi) * std::cosh(2.0)), 1.0, 1e-13);
    for (double z : {0.3, 5.0, 11.9, 12.1, 20.0, 60.0}) {
        EXPECT_NEAR(special::bessel_j(0.5, z), std::sqrt(2.0 / (pi * z)) * std::sin(z), 1e-12) << z;
        EXPECT_NEAR(special::bessel_i(0.5, z) / (std::sqrt(2.0 / (pi * z)) * std::sinh(z)), 1.0, 1e-10) << z;
    }
}

TEST(Bessel, AgreesWithReferenceAcrossSwitchover) {
    for (double nu : {-0.75, -0.5, -0.25, 0.0, 0.3, 0.9}) {
        for (double z = 0.05; z < 40.0; z += 0.37) {
            const double j = special::bessel_j(nu, z);
            const double jr = oracle::bessel_j(nu, z);
            EXPECT_NEAR(j, jr, 1e-10 * std::max(1.0, std::abs(jr))) << nu << ' ' << z;
            const double i = special::bessel_i(nu, z);
            EXPECT_NEAR(i / oracle::bessel_i(nu, z), 1.0, 1e-10) << nu << ' ' << z;
        }
    }
}

TEST(Bessel, SwitchoverBandRelativeError) {
    for (double z = 11.0; z <= 13.0; z += 0.05) {
        for (double nu : {-0.5, 0.25}) {
            EXPECT_NEAR(special::bessel_i(nu, z) / oracle::bessel_i(nu, z), 1.0, 1e-10);
            const double jr = oracle::bessel_j(nu, z);
            // J has zeros in the band; compare against its envelope.
            EXPECT_NEAR(special::bessel_j(nu, z), jr, 1e-10 * std::sqrt(2.0 / (std::numbers::pi * z)));
        }
    }
}

TEST(Bessel, SmallArgumentLeadingTerm) {
    const double alpha = 0.5;
    for (double s : {1e-8, 1e-6}) {
        const double kappa = std::pow(s, 0.5 * (alpha - 1.0)) * special::bessel_j(alpha - 1.0, 2.0 * std::sqrt(s));
        EXPECT_NEAR(kappa / (std::pow(s, alpha - 1.0) / std::tgamma(alpha)), 1.0, 1e-5);
    }
}

TEST(Bessel, DomainErrors) {
    EXPECT_THROW(special::bessel_j(1.5, 1.0), DomainError);
    EXPECT_THROW(special::bessel_i(0.5, -1.0), DomainError);
}
