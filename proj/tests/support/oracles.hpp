#ifndef SONINE_TEST_ORACLES_HPP
#define SONINE_TEST_ORACLES_HPP

// Reference computations that share no code path with the library:
// double-exponential quadrature, Boost Bessel functions and a direct DFT.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

/// int_0^t k(t - s) kappa(s) ds. The two-argument form hands over the exact
/// distance to the nearer endpoint, so t - s is never formed near s = t.
template <class K, class Q>
double sonine_integral(K k, Q kappa, double t) {
    boost::math::quadrature::tanh_sinh<double> ts(15);
    auto f = [&](double s, double sc) {
        const double left = s;
        const double right = sc > 0.0 ? sc : t - s;
        return k(right) * kappa(left);
    };
    return ts.integrate(f, 0.0, t, 1e-14);
}

/// int_a^b f with endpoint singularities allowed.
template <class F>
double integral(F f, double a, double b, double tol = 1e-13) {
    boost::math::quadrature::tanh_sinh<double> ts(15);
    return ts.integrate(f, a, b, tol);
}

/// int_0^inf e^{-p s} f(s) ds for complex p, as two real integrals split at 1.
template <class F>
cplx laplace(F f, cplx p) {
    boost::math::quadrature::tanh_sinh<double> ts(15);
    boost::math::quadrature::exp_sinh<double> es(12);
    auto re = [&](double s) { return std::real(std::exp(-p * s)) * f(s); };
    auto im = [&](double s) { return std::imag(std::exp(-p * s)) * f(s); };
    const double r = ts.integrate(re, 0.0, 1.0, 1e-13) + es.integrate(re, 1.0, INFINITY, 1e-13);
    const double i = ts.integrate(im, 0.0, 1.0, 1e-13) + es.integrate(im, 1.0, INFINITY, 1e-13);
    return {r, i};
}

inline double bessel_j(double nu, double z) { return boost::math::cyl_bessel_j(nu, z); }
inline double bessel_i(double nu, double z) { return boost::math::cyl_bessel_i(nu, z); }

/// Half spectrum X_k = sum_j v_j e^{-2 pi i j k / n}, k = 0..n/2, summed directly.
inline std::vector<cplx> dft_half(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<cplx> out(n / 2 + 1);
    for (std::size_t k = 0; k < out.size(); ++k) {
        long double re = 0.0L, im = 0.0L;
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t m = (j * k) % n;
            const long double ang = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>(m) /
                                    static_cast<long double>(n);
            re += v[j] * std::cos(ang);
            im += v[j] * std::sin(ang);
        }
        out[k] = {static_cast<double>(re), static_cast<double>(im)};
    }
    return out;
}

}  // namespace oracle

#endif  // SONINE_TEST_ORACLES_HPP
