#ifndef SONINE_SPECIAL_FUNCTIONS_HPP
#define SONINE_SPECIAL_FUNCTIONS_HPP

// Bessel functions J_nu and I_nu of real order nu in (-1, 1) for real z >= 0.
//
// Ascending series below the switchover point, Hankel-type large argument
// expansions above it. Orders outside (-1, 1) are not needed by the kernels
// and are rejected.

#include <cmath>
#include <limits>
#include <numbers>

#include "sonine/errors.hpp"

namespace sonine::special {

inline constexpr double kBesselSwitchover = 12.0;

namespace detail {

inline void check_order(double nu, double z) {
    if (!(nu > -1.0 && nu < 1.0)) throw DomainError("Bessel order must lie in (-1, 1)");
    if (!(z >= 0.0)) throw DomainError("Bessel argument must be non-negative");
}

// sum_m sign^m (z/2)^{2m+nu} / (m! Gamma(m+nu+1)), sign = -1 for J, +1 for I.
inline double ascending_series(double nu, double z, double sign) {
    const double q = 0.25 * z * z;
    double term = std::pow(0.5 * z, nu) / std::tgamma(nu + 1.0);
    double sum = term;
    for (int m = 0; m < 60; ++m) {
        term *= sign * q / ((m + 1.0) * (m + 1.0 + nu));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

// Coefficient a_k(nu) of the large-argument expansions, built by recurrence:
// a_k = a_{k-1} (4 nu^2 - (2k-1)^2) / (8k).
template <class Visit>
void hankel_terms(double nu, double z, Visit&& visit) {
    const double mu = 4.0 * nu * nu;
    double a = 1.0;
    double zk = 1.0;
    double last = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 40; ++k) {
        if (k > 0) {
            const double odd = 2.0 * k - 1.0;
            a *= (mu - odd * odd) / (8.0 * k);
            zk *= z;
        }
        const double t = a / zk;
        // Stop at the smallest term; the series is asymptotic.
        if (std::abs(t) > last) break;
        visit(k, t);
        last = std::abs(t);
        if (last < 1e-18) break;
    }
}

}  // namespace detail

/// Bessel function of the first kind J_nu(z), nu in (-1, 1), z >= 0.
inline double bessel_j(double nu, double z) {
    detail::check_order(nu, z);
    if (z == 0.0) {
        if (nu == 0.0) return 1.0;
        return nu > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    if (z <= kBesselSwitchover) return detail::ascending_series(nu, z, -1.0);

    double p = 0.0;
    double q = 0.0;
    detail::hankel_terms(nu, z, [&](int k, double t) {
        // P collects even k with sign (-1)^{k/2}, Q odd k with sign (-1)^{(k-1)/2}.
        const double sgn = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
        if (k % 2 == 0) p += sgn * t; else q += sgn * t;
    });
    const double chi = z - (0.5 * nu + 0.25) * std::numbers::pi;
    return std::sqrt(2.0 / (std::numbers::pi * z)) * (p * std::cos(chi) - q * std::sin(chi));
}

/// Modified Bessel function of the first kind I_nu(z), nu in (-1, 1), z >= 0.
inline double bessel_i(double nu, double z) {
    detail::check_order(nu, z);
    if (z == 0.0) {
        if (nu == 0.0) return 1.0;
        return nu > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    if (z <= kBesselSwitchover) return detail::ascending_series(nu, z, 1.0);

    double sum = 0.0;
    detail::hankel_terms(nu, z, [&](int k, double t) { sum += (k % 2 == 0 ? t : -t); });
    return std::exp(z) / std::sqrt(2.0 * std::numbers::pi * z) * sum;
}

}  // namespace sonine::special

#endif  // SONINE_SPECIAL_FUNCTIONS_HPP
