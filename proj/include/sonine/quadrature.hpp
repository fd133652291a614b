#ifndef SONINE_QUADRATURE_HPP
#define SONINE_QUADRATURE_HPP

// Adaptive quadrature helpers for integrands with algebraic endpoint
// singularities. The core rule is Boost's adaptive Gauss-Kronrod; the
// helpers here add the variable changes that remove s^{-rho} behaviour.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>

#include "sonine/errors.hpp"

namespace sonine::quad {

struct Tolerance {
    double rel = 1e-12;
    unsigned max_depth = 18;
};

/// Adaptive Gauss-Kronrod (31 points) on [a, b]; infinite limits allowed.
/// Finite intervals are mapped onto [-1, 1] first: Boost compares the
/// unscaled local error with a tolerance scaled by the half-width, which
/// never converges on short intervals.
template <class F>
double integrate(F&& f, double a, double b, Tolerance tol = {}) {
    if (a == b) return 0.0;
    double err = 0.0;
    using gk = boost::math::quadrature::gauss_kronrod<double, 31>;
    if (std::isinf(a) || std::isinf(b)) return gk::integrate(f, a, b, tol.max_depth, tol.rel, &err);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    auto g = [&](double t) { return f(mid + half * t) * half; };
    return gk::integrate(g, -1.0, 1.0, tol.max_depth, tol.rel, &err);
}

/// Stretching exponent that makes s^{-rho} smooth under s = sigma^m.
inline double stretch_exponent(double rho) {
    if (rho >= 1.0) throw DomainError("singularity exponent >= 1 is not integrable");
    if (rho <= 0.0) return 1.0;
    return 1.0 / (1.0 - rho);
}

/// Integral over [a, b] of f, where f(s) ~ (s - a)^{-rho} as s -> a+.
template <class F>
double integrate_left_singular(F&& f, double a, double b, double rho, Tolerance tol = {}) {
    if (a == b) return 0.0;
    const double m = stretch_exponent(rho);
    if (m == 1.0) return integrate(f, a, b, tol);
    const double len = b - a;
    auto g = [&](double sigma) {
        if (sigma <= 0.0) return 0.0;
        const double sm1 = std::pow(sigma, m - 1.0);
        return f(a + len * sm1 * sigma) * len * m * sm1;
    };
    return integrate(g, 0.0, 1.0, tol);
}

/// Integral over [s_min, upper] using geometric panels that shrink toward
/// zero by `ratio`. The piece [0, s_min] is dropped. Handles s^{-rho}
/// singularities with rho up to 2 when the integrand carries a factor s.
template <class F>
double integrate_graded(F&& f, double upper, double s_min, double ratio = 0.5,
                        Tolerance tol = {}) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw DomainError("graded panel ratio must lie in (0, 1)");
    if (!(s_min > 0.0)) throw DomainError("graded panel cutoff must be positive");
    double total = 0.0;
    double hi = upper;
    while (hi > s_min) {
        const double lo = std::max(hi * ratio, s_min);
        total += integrate(f, lo, hi, tol);
        hi = lo;
    }
    return total;
}

}  // namespace sonine::quad

#endif  // SONINE_QUADRATURE_HPP
