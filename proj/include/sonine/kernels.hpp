#ifndef SONINE_KERNELS_HPP
#define SONINE_KERNELS_HPP

// Sonine kernel pairs (k, kappa) with k * kappa = Heaviside.
//
// Three built-in pairs cover both regimes:
//   power_law            k = s^{-a}/G(1-a),               kappa = s^{a-1}/G(a)
//   tempered_power_law   k = e^{-ls} s^{-a}/G(1-a),       kappa = g + l * int_0^s g,
//                        g = e^{-ls} s^{a-1}/G(a)
//   bessel               k = s^{-a/2} I_{-a}(2 sqrt s),   kappa = s^{(a-1)/2} J_{a-1}(2 sqrt s)
// The first two are diffusive (nonnegative kernels); the Bessel partner kappa
// oscillates, which places that pair in the oscillatory regime.

#include <boost/math/special_functions/gamma.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "sonine/errors.hpp"
#include "sonine/fft.hpp"
#include "sonine/quadrature.hpp"
#include "sonine/special_functions.hpp"
#include "sonine/timescales.hpp"

namespace sonine {

/// kernel(s) == coeff * s^{-exponent} exactly.
struct PowerLaw {
    double coeff;
    double exponent;
};

/// A locally integrable kernel on (0, inf) with its Laplace transform and
/// the growth/singularity data the operators need.
struct SonineKernel {
    std::string name;
    std::function<double(double)> eval;
    std::function<Complex(Complex)> laplace;
    double singularity_exponent = 0.0;  // rho: |k(s)| <= C s^{-rho} near 0
    double growth_rate = 0.0;           // alpha_g: |k(s)| <= C e^{alpha_g s} at infinity
    bool tail_integrable = false;       // int_1^inf |k| < inf
    std::optional<PowerLaw> power_law;  // closed-form moments available
    // Limit of p * laplace(p) as p -> 0 along the imaginary axis.
    Complex weyl_symbol_at_zero = 0.0;

    double operator()(double s) const { return eval(s); }
};

/// Fourier multiplier of v -> kernel * v at angular frequency xi.
inline Complex integral_symbol(const SonineKernel& kernel, double xi) {
    if (xi == 0.0) throw DomainError("integral symbol is evaluated at nonzero frequency only");
    return kernel.laplace(Complex(0.0, xi));
}

/// Fourier multiplier of v -> d/dx (kernel * v).
inline Complex weyl_symbol(const SonineKernel& kernel, double xi) {
    if (xi == 0.0) return kernel.weyl_symbol_at_zero;
    const Complex p(0.0, xi);
    return p * kernel.laplace(p);
}

/// Fourier multiplier of v -> int_0^inf [v(x) - v(x - s)] kernel(s) ds.
inline Complex marchaud_symbol(const SonineKernel& kernel, double xi) {
    if (!kernel.tail_integrable)
        throw ConfigurationError(kernel.name + ": Marchaud symbol needs a tail-integrable kernel");
    if (xi == 0.0) return 0.0;
    return kernel.laplace(Complex(0.0)) - kernel.laplace(Complex(0.0, xi));
}

enum class Regime { diffusive, oscillatory };
enum class PairKind { power_law, tempered_power_law, bessel };

inline std::string_view to_string(Regime r) {
    return r == Regime::diffusive ? "diffusive" : "oscillatory";
}

inline std::string_view to_string(PairKind k) {
    switch (k) {
        case PairKind::power_law: return "power_law";
        case PairKind::tempered_power_law: return "tempered_power_law";
        case PairKind::bessel: return "bessel";
    }
    return "?";
}

inline PairKind parse_pair_kind(std::string_view name) {
    if (name == "power_law") return PairKind::power_law;
    if (name == "tempered_power_law") return PairKind::tempered_power_law;
    if (name == "bessel") return PairKind::bessel;
    throw ValidationError("unknown kernel pair '" + std::string(name) + "'");
}

struct SoninePair {
    PairKind kind;
    SonineKernel k;      // derivative side
    SonineKernel kappa;  // integral side
    double order;        // alpha in (0, 1)
    double tempering;    // lambda >= 0
    Regime regime;
};

inline constexpr double kDefaultSonineQuadTol = 1e-10;

/// |int_0^t k(t - s) kappa(s) ds - 1|, with both endpoint singularities
/// removed by power stretching.
inline double sonine_residual(const SoninePair& pair, double t,
                              double quad_tol = kDefaultSonineQuadTol) {
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("Sonine residual needs t > 0");
    // Split at t/2 and integrate each half in the variable that vanishes at
    // its singular endpoint, so t - s is never formed near s = t.
    const quad::Tolerance tol{quad_tol, 20};
    const double half = 0.5 * t;
    const double left = quad::integrate_left_singular(
        [&](double s) { return pair.k(t - s) * pair.kappa(s); }, 0.0, half,
        pair.kappa.singularity_exponent, tol);
    const double right = quad::integrate_left_singular(
        [&](double r) { return pair.k(r) * pair.kappa(t - r); }, 0.0, half,
        pair.k.singularity_exponent, tol);
    const double value = left + right;
    return std::abs(value - 1.0);
}

namespace detail {

inline void check_order(double alpha, std::string_view who) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ValidationError(std::string(who) + " requires 0 < alpha < 1 (got alpha = " +
                              std::to_string(alpha) + ")");
}

inline constexpr std::array<double, 3> kConstructionTimes{0.1, 1.0, 5.0};
inline const std::array<Complex, 3> kConstructionSymbols{Complex(1.0), Complex(2.0),
                                                         Complex(0.5, 2.0)};

// Construction-time guard: the pair must satisfy the Sonine condition in
// both the time and the Laplace domain.
inline void verify_pair(const SoninePair& pair) {
    for (double t : kConstructionTimes) {
        const double r = sonine_residual(pair, t);
        if (!(r <= 1e-6))
            throw NumericalError(std::string(to_string(pair.kind)) +
                                 ": Sonine residual " + std::to_string(r) + " at t = " +
                                 std::to_string(t));
    }
    for (Complex p : kConstructionSymbols) {
        const double r = std::abs(pair.k.laplace(p) * pair.kappa.laplace(p) - 1.0 / p);
        if (!(r <= 1e-8))
            throw NumericalError(std::string(to_string(pair.kind)) +
                                 ": Laplace identity residual " + std::to_string(r));
    }
}

}  // namespace detail

/// k(s) = s^{-alpha}/Gamma(1-alpha), kappa(s) = s^{alpha-1}/Gamma(alpha).
inline SoninePair power_law_pair(double alpha) {
    detail::check_order(alpha, "power_law_pair");
    const double ck = 1.0 / std::tgamma(1.0 - alpha);
    const double cq = 1.0 / std::tgamma(alpha);

    SonineKernel k;
    k.name = "power_law.k";
    k.eval = [=](double s) { return s > 0.0 ? ck * std::pow(s, -alpha) : 0.0; };
    k.laplace = [=](Complex p) { return std::pow(p, alpha - 1.0); };
    k.singularity_exponent = alpha;
    k.growth_rate = 0.0;
    k.tail_integrable = false;
    k.power_law = PowerLaw{ck, alpha};

    SonineKernel q;
    q.name = "power_law.kappa";
    q.eval = [=](double s) { return s > 0.0 ? cq * std::pow(s, alpha - 1.0) : 0.0; };
    q.laplace = [=](Complex p) { return std::pow(p, -alpha); };
    q.singularity_exponent = 1.0 - alpha;
    q.growth_rate = 0.0;
    q.tail_integrable = false;
    q.power_law = PowerLaw{cq, 1.0 - alpha};

    SoninePair pair{PairKind::power_law, std::move(k), std::move(q), alpha, 0.0,
                    Regime::diffusive};
    detail::verify_pair(pair);
    return pair;
}

/// Exponentially tempered power law. The companion is
/// kappa(s) = g(s) + lambda^{1-alpha} P(alpha, lambda s) where P is the
/// regularized lower incomplete gamma function (lambda * int_0^s g).
inline SoninePair tempered_power_law_pair(double alpha, double lambda) {
    detail::check_order(alpha, "tempered_power_law_pair");
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw ValidationError("tempered_power_law_pair requires lambda > 0 (got lambda = " +
                              std::to_string(lambda) + "); use power_law_pair for lambda = 0");
    const double ck = 1.0 / std::tgamma(1.0 - alpha);
    const double cq = 1.0 / std::tgamma(alpha);
    const double plateau = std::pow(lambda, 1.0 - alpha);

    SonineKernel k;
    k.name = "tempered_power_law.k";
    k.eval = [=](double s) {
        return s > 0.0 ? ck * std::exp(-lambda * s) * std::pow(s, -alpha) : 0.0;
    };
    k.laplace = [=](Complex p) { return std::pow(p + lambda, alpha - 1.0); };
    k.singularity_exponent = alpha;
    k.growth_rate = 0.0;
    k.tail_integrable = true;

    SonineKernel q;
    q.name = "tempered_power_law.kappa";
    q.eval = [=](double s) {
        if (!(s > 0.0)) return 0.0;
        const double g = cq * std::exp(-lambda * s) * std::pow(s, alpha - 1.0);
        return g + plateau * boost::math::gamma_p(alpha, lambda * s);
    };
    q.laplace = [=](Complex p) { return std::pow(p + lambda, -alpha) * (1.0 + lambda / p); };
    q.weyl_symbol_at_zero = plateau;
    q.singularity_exponent = 1.0 - alpha;
    q.growth_rate = 0.0;
    q.tail_integrable = false;

    SoninePair pair{PairKind::tempered_power_law, std::move(k), std::move(q), alpha, lambda,
                    Regime::diffusive};
    detail::verify_pair(pair);
    return pair;
}

inline constexpr double kDefaultBesselGrowthTag = 0.5;

/// Oscillatory pair built from Bessel functions. k grows like e^{2 sqrt s},
/// which is below every exponential; `growth_tag` is the alpha_g recorded
/// for it (any positive value is a valid bound).
inline SoninePair bessel_pair(double alpha, double growth_tag = kDefaultBesselGrowthTag) {
    detail::check_order(alpha, "bessel_pair");
    if (!(growth_tag > 0.0) || !std::isfinite(growth_tag))
        throw ValidationError("bessel_pair growth tag must be positive");

    SonineKernel k;
    k.name = "bessel.k";
    k.eval = [=](double s) {
        if (!(s > 0.0)) return 0.0;
        return std::pow(s, -0.5 * alpha) * special::bessel_i(-alpha, 2.0 * std::sqrt(s));
    };
    k.laplace = [=](Complex p) { return std::pow(p, alpha - 1.0) * std::exp(1.0 / p); };
    k.singularity_exponent = alpha;
    k.growth_rate = growth_tag;
    k.tail_integrable = false;

    SonineKernel q;
    q.name = "bessel.kappa";
    q.eval = [=](double s) {
        if (!(s > 0.0)) return 0.0;
        return std::pow(s, 0.5 * (alpha - 1.0)) * special::bessel_j(alpha - 1.0, 2.0 * std::sqrt(s));
    };
    q.laplace = [=](Complex p) { return std::pow(p, -alpha) * std::exp(-1.0 / p); };
    q.singularity_exponent = 1.0 - alpha;
    q.growth_rate = 0.0;
    q.tail_integrable = false;

    SoninePair pair{PairKind::bessel, std::move(k), std::move(q), alpha, 0.0,
                    Regime::oscillatory};
    detail::verify_pair(pair);
    return pair;
}

/// Config-style constructor: alpha, lambda (tempered), growth (bessel).
inline SoninePair make_sonine_pair(PairKind kind, const ParamMap& params) {
    using detail::param_or;
    switch (kind) {
        case PairKind::power_law:
            detail::reject_unknown(params, {"alpha"}, "power_law pair");
            return power_law_pair(param_or(params, "alpha", 0.5));
        case PairKind::tempered_power_law:
            detail::reject_unknown(params, {"alpha", "lambda"}, "tempered_power_law pair");
            return tempered_power_law_pair(param_or(params, "alpha", 0.5),
                                           param_or(params, "lambda", 1.0));
        case PairKind::bessel:
            detail::reject_unknown(params, {"alpha", "growth"}, "bessel pair");
            return bessel_pair(param_or(params, "alpha", 0.5),
                               param_or(params, "growth", kDefaultBesselGrowthTag));
    }
    throw ValidationError("unknown kernel pair");
}

}  // namespace sonine

#endif  // SONINE_KERNELS_HPP
