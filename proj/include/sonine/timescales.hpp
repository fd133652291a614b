#ifndef SONINE_TIMESCALES_HPP
#define SONINE_TIMESCALES_HPP

// Aging scales psi (physical time -> operational time) and amnesia weights
// omega. Both are small immutable value types built from a closed list of
// families so that inverses and derivatives stay analytic.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sonine/errors.hpp"

namespace sonine {

using ParamMap = std::map<std::string, double>;

enum class ScaleFamily { identity, affine, sinh, wobble };
enum class WeightFamily { constant, exp_operational, gaussian_operational };

inline std::string_view to_string(ScaleFamily f) {
    switch (f) {
        case ScaleFamily::identity: return "identity";
        case ScaleFamily::affine: return "affine";
        case ScaleFamily::sinh: return "sinh";
        case ScaleFamily::wobble: return "wobble";
    }
    return "?";
}

inline std::string_view to_string(WeightFamily f) {
    switch (f) {
        case WeightFamily::constant: return "constant";
        case WeightFamily::exp_operational: return "exp_operational";
        case WeightFamily::gaussian_operational: return "gaussian_operational";
    }
    return "?";
}

inline ScaleFamily parse_scale_family(std::string_view name) {
    if (name == "identity") return ScaleFamily::identity;
    if (name == "affine") return ScaleFamily::affine;
    if (name == "sinh") return ScaleFamily::sinh;
    if (name == "wobble") return ScaleFamily::wobble;
    throw ValidationError("unknown scale family '" + std::string(name) + "'");
}

inline WeightFamily parse_weight_family(std::string_view name) {
    if (name == "constant") return WeightFamily::constant;
    if (name == "exp_operational") return WeightFamily::exp_operational;
    if (name == "gaussian_operational") return WeightFamily::gaussian_operational;
    throw ValidationError("unknown weight family '" + std::string(name) + "'");
}

namespace detail {

inline double param_or(const ParamMap& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

inline void reject_unknown(const ParamMap& p, std::initializer_list<std::string_view> allowed,
                           std::string_view owner) {
    for (const auto& [key, value] : p) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ValidationError(std::string(owner) + ": unknown parameter '" + key + "'");
        if (!std::isfinite(value))
            throw ValidationError(std::string(owner) + ": parameter '" + key + "' is not finite");
    }
}

}  // namespace detail

/// Strictly increasing C^1 diffeomorphism psi of the real line.
///
///   identity   psi(t) = t
///   affine     psi(t) = a t + b,          a > 0
///   sinh       psi(t) = sinh(c t) / c,    c > 0
///   wobble     psi(t) = t + eps sin t,    0 <= eps < 1
class AgingScale {
public:
    static AgingScale identity() { return AgingScale(ScaleFamily::identity, 1.0, 0.0); }

    static AgingScale affine(double a, double b) {
        if (!(a > 0.0) || !std::isfinite(a) || !std::isfinite(b))
            throw ValidationError("affine scale requires a > 0 (got a = " + std::to_string(a) +
                                  "); a <= 0 is not strictly increasing");
        return AgingScale(ScaleFamily::affine, a, b);
    }

    static AgingScale sinh(double c = 1.0) {
        if (!(c > 0.0) || !std::isfinite(c))
            throw ValidationError("sinh scale requires c > 0 (got c = " + std::to_string(c) + ")");
        return AgingScale(ScaleFamily::sinh, c, 0.0);
    }

    static AgingScale wobble(double eps) {
        if (!(eps >= 0.0 && eps < 1.0))
            throw ValidationError("wobble scale requires 0 <= eps < 1 (got eps = " +
                                  std::to_string(eps) + "); psi'(t) = 1 + eps cos t must stay positive");
        return AgingScale(ScaleFamily::wobble, eps, 0.0);
    }

    ScaleFamily family() const { return family_; }

    /// Family parameters in a stable order (a, b) / (c) / (eps).
    ParamMap params() const {
        switch (family_) {
            case ScaleFamily::identity: return {};
            case ScaleFamily::affine: return {{"a", p0_}, {"b", p1_}};
            case ScaleFamily::sinh: return {{"c", p0_}};
            case ScaleFamily::wobble: return {{"eps", p0_}};
        }
        return {};
    }

    double forward(double t) const {
        switch (family_) {
            case ScaleFamily::identity: return t;
            case ScaleFamily::affine: return p0_ * t + p1_;
            case ScaleFamily::sinh: return std::sinh(p0_ * t) / p0_;
            case ScaleFamily::wobble: return t + p0_ * std::sin(t);
        }
        return t;
    }

    double derivative(double t) const {
        switch (family_) {
            case ScaleFamily::identity: return 1.0;
            case ScaleFamily::affine: return p0_;
            case ScaleFamily::sinh: return std::cosh(p0_ * t);
            case ScaleFamily::wobble: return 1.0 + p0_ * std::cos(t);
        }
        return 1.0;
    }

    double inverse(double x) const {
        switch (family_) {
            case ScaleFamily::identity: return x;
            case ScaleFamily::affine: return (x - p1_) / p0_;
            case ScaleFamily::sinh: return std::asinh(p0_ * x) / p0_;
            case ScaleFamily::wobble: return invert_wobble(x);
        }
        return x;
    }

private:
    AgingScale(ScaleFamily f, double p0, double p1) : family_(f), p0_(p0), p1_(p1) {}

    // Safeguarded Newton on t + eps sin t = x; the root lies in [x - eps, x + eps].
    double invert_wobble(double x) const {
        const double eps = p0_;
        if (eps == 0.0) return x;
        double lo = x - eps;
        double hi = x + eps;
        double t = x;
        for (int it = 0; it < 100; ++it) {
            const double f = t + eps * std::sin(t) - x;
            if (f == 0.0) return t;
            if (f > 0.0) hi = t; else lo = t;
            const double df = 1.0 + eps * std::cos(t);
            double next = t - f / df;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            const double step = std::abs(next - t);
            t = next;
            if (step <= 1e-13 * std::max(1.0, std::abs(t))) {
                // One more Newton polish step; the iteration is quadratic here.
                const double g = t + eps * std::sin(t) - x;
                return t - g / (1.0 + eps * std::cos(t));
            }
        }
        throw NumericalError("wobble inverse did not converge");
    }

    ScaleFamily family_;
    double p0_;
    double p1_;
};

inline AgingScale make_scale(ScaleFamily family, const ParamMap& params = {}) {
    using detail::param_or;
    switch (family) {
        case ScaleFamily::identity:
            detail::reject_unknown(params, {}, "identity scale");
            return AgingScale::identity();
        case ScaleFamily::affine:
            detail::reject_unknown(params, {"a", "b"}, "affine scale");
            return AgingScale::affine(param_or(params, "a", 1.0), param_or(params, "b", 0.0));
        case ScaleFamily::sinh:
            detail::reject_unknown(params, {"c"}, "sinh scale");
            return AgingScale::sinh(param_or(params, "c", 1.0));
        case ScaleFamily::wobble:
            detail::reject_unknown(params, {"eps"}, "wobble scale");
            return AgingScale::wobble(param_or(params, "eps", 0.5));
    }
    throw ValidationError("unknown scale family");
}

/// Strictly positive C^1 weight omega, expressed through the scale:
///
///   constant              omega(t) = 1
///   exp_operational       omega(t) = exp(beta psi(t)),                   beta > 0
///   gaussian_operational  omega(t) = exp(-delta psi(t)^2 + beta psi(t)), delta > 0, beta >= 0
///
/// past_decay_rate() is the beta of omega(tau) = O(exp(-beta |psi(tau)|))
/// as tau -> -infinity; 0 means no decay is claimed.
class AmnesiaWeight {
public:
    static AmnesiaWeight constant(const AgingScale& scale) {
        return AmnesiaWeight(WeightFamily::constant, scale, 0.0, 0.0);
    }

    static AmnesiaWeight exp_operational(double beta, const AgingScale& scale) {
        if (!(beta > 0.0) || !std::isfinite(beta))
            throw ValidationError("exp_operational weight requires beta > 0 (got beta = " +
                                  std::to_string(beta) + ")");
        return AmnesiaWeight(WeightFamily::exp_operational, scale, beta, 0.0);
    }

    static AmnesiaWeight gaussian_operational(double delta, double beta, const AgingScale& scale) {
        if (!(delta > 0.0) || !std::isfinite(delta))
            throw ValidationError("gaussian_operational weight requires delta > 0");
        if (!(beta >= 0.0) || !std::isfinite(beta))
            throw ValidationError("gaussian_operational weight requires beta >= 0");
        return AmnesiaWeight(WeightFamily::gaussian_operational, scale, beta, delta);
    }

    WeightFamily family() const { return family_; }
    const AgingScale& scale() const { return scale_; }
    double past_decay_rate() const { return beta_; }

    ParamMap params() const {
        switch (family_) {
            case WeightFamily::constant: return {};
            case WeightFamily::exp_operational: return {{"beta", beta_}};
            case WeightFamily::gaussian_operational: return {{"beta", beta_}, {"delta", delta_}};
        }
        return {};
    }

    /// log omega at operational time x, i.e. log omega(psi^{-1}(x)), in closed form.
    double log_at_operational(double x) const {
        switch (family_) {
            case WeightFamily::constant: return 0.0;
            case WeightFamily::exp_operational: return beta_ * x;
            case WeightFamily::gaussian_operational: return -delta_ * x * x + beta_ * x;
        }
        return 0.0;
    }

    /// omega(psi^{-1}(x)) without round-tripping through psi^{-1}.
    double at_operational(double x) const { return std::exp(log_at_operational(x)); }

    double value(double t) const { return at_operational(scale_.forward(t)); }

    double derivative(double t) const {
        const double x = scale_.forward(t);
        switch (family_) {
            case WeightFamily::constant: return 0.0;
            case WeightFamily::exp_operational:
                return beta_ * scale_.derivative(t) * at_operational(x);
            case WeightFamily::gaussian_operational:
                return (beta_ - 2.0 * delta_ * x) * scale_.derivative(t) * at_operational(x);
        }
        return 0.0;
    }

private:
    AmnesiaWeight(WeightFamily f, const AgingScale& scale, double beta, double delta)
        : family_(f), scale_(scale), beta_(beta), delta_(delta) {}

    WeightFamily family_;
    AgingScale scale_;
    double beta_;
    double delta_;
};

inline AmnesiaWeight make_weight(WeightFamily family, const ParamMap& params,
                                 const AgingScale& scale) {
    using detail::param_or;
    switch (family) {
        case WeightFamily::constant:
            detail::reject_unknown(params, {}, "constant weight");
            return AmnesiaWeight::constant(scale);
        case WeightFamily::exp_operational:
            detail::reject_unknown(params, {"beta"}, "exp_operational weight");
            return AmnesiaWeight::exp_operational(param_or(params, "beta", 0.0), scale);
        case WeightFamily::gaussian_operational:
            detail::reject_unknown(params, {"beta", "delta"}, "gaussian_operational weight");
            return AmnesiaWeight::gaussian_operational(param_or(params, "delta", 0.0),
                                                       param_or(params, "beta", 0.0), scale);
    }
    throw ValidationError("unknown weight family");
}

enum class CheckStatus { pass, fail, not_claimed };

inline std::string_view to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "fail";
        case CheckStatus::not_claimed: return "not claimed";
    }
    return "?";
}

struct AdmissibilityCheck {
    std::string name;
    CheckStatus status;
    double worst;      // worst-case residual (or margin) observed on the probe grid
    double threshold;  // bound the residual was compared against
};

struct AdmissibilityReport {
    std::vector<AdmissibilityCheck> checks;

    bool passed() const {
        return std::none_of(checks.begin(), checks.end(),
                            [](const auto& c) { return c.status == CheckStatus::fail; });
    }

    const AdmissibilityCheck& find(std::string_view name) const {
        for (const auto& c : checks)
            if (c.name == name) return c;
        throw DomainError("no admissibility check named '" + std::string(name) + "'");
    }
};

inline constexpr double kInverseTolerance = 1e-12;
inline constexpr double kDerivativeTolerance = 1e-6;
inline constexpr double kDerivativeStep = 1e-5;

/// Probes the admissibility conditions on a sorted set of physical times.
/// Failures are reported, never thrown.
inline AdmissibilityReport check_admissibility(const AgingScale& scale, const AmnesiaWeight& weight,
                                               std::span<const double> probe_grid) {
    if (probe_grid.empty()) throw DomainError("admissibility probe grid is empty");
    if (!std::is_sorted(probe_grid.begin(), probe_grid.end()))
        throw DomainError("admissibility probe grid must be sorted");

    auto status = [](bool ok) { return ok ? CheckStatus::pass : CheckStatus::fail; };
    AdmissibilityReport report;

    // Smallest forward increment between consecutive distinct probes.
    double min_step = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < probe_grid.size(); ++i) {
        if (probe_grid[i] == probe_grid[i - 1]) continue;
        min_step = std::min(min_step, scale.forward(probe_grid[i]) - scale.forward(probe_grid[i - 1]));
    }
    if (!std::isfinite(min_step)) min_step = 1.0;
    report.checks.push_back({"monotonicity", status(min_step > 0.0), min_step, 0.0});

    double min_dpsi = std::numeric_limits<double>::infinity();
    double min_omega = std::numeric_limits<double>::infinity();
    bool finite = true;
    double inv_err = 0.0;
    double dpsi_err = 0.0;
    double domega_err = 0.0;
    for (double t : probe_grid) {
        const double x = scale.forward(t);
        const double dpsi = scale.derivative(t);
        const double om = weight.value(t);
        const double dom = weight.derivative(t);
        finite = finite && std::isfinite(x) && std::isfinite(dpsi) && std::isfinite(om) &&
                 std::isfinite(dom);
        min_dpsi = std::min(min_dpsi, dpsi);
        min_omega = std::min(min_omega, om);

        const double back = scale.inverse(x);
        inv_err = std::max(inv_err, std::abs(back - t) / std::max(std::abs(t), 1.0));
        const double fwd = scale.forward(scale.inverse(t));  // t reused as an operational point
        inv_err = std::max(inv_err, std::abs(fwd - t) / std::max(std::abs(t), 1.0));

        const double step = kDerivativeStep;
        const double fd_psi = (scale.forward(t + step) - scale.forward(t - step)) / (2 * step);
        dpsi_err = std::max(dpsi_err, std::abs(fd_psi - dpsi) / std::abs(dpsi));
        const double fd_om = (weight.value(t + step) - weight.value(t - step)) / (2 * step);
        domega_err = std::max(domega_err, std::abs(fd_om - dom) / std::max(std::abs(dom), 1e-3 * om));
    }
    report.checks.push_back({"finite_values", status(finite), finite ? 0.0 : 1.0, 0.0});
    report.checks.push_back({"scale_derivative_positive", status(min_dpsi > 0.0), min_dpsi, 0.0});
    report.checks.push_back({"weight_positive", status(min_omega > 0.0), min_omega, 0.0});
    report.checks.push_back(
        {"inverse_consistency", status(inv_err <= kInverseTolerance), inv_err, kInverseTolerance});
    report.checks.push_back({"scale_derivative_consistency",
                             status(dpsi_err <= kDerivativeTolerance), dpsi_err,
                             kDerivativeTolerance});
    report.checks.push_back({"weight_derivative_consistency",
                             status(domega_err <= kDerivativeTolerance), domega_err,
                             kDerivativeTolerance});

    // log omega(psi^{-1}(x)) <= beta x + C for x <= -1, with C fitted at x = -1.
    const double beta = weight.past_decay_rate();
    if (beta == 0.0) {
        report.checks.push_back({"decay_bound", CheckStatus::not_claimed, 0.0, 0.0});
    } else {
        const double c = weight.log_at_operational(-1.0) + beta;
        double worst = -std::numeric_limits<double>::infinity();
        for (double t : probe_grid) {
            const double x = scale.forward(t);
            if (x > -1.0) continue;
            worst = std::max(worst, weight.log_at_operational(x) - beta * x - c);
        }
        if (!std::isfinite(worst)) worst = 0.0;  // no probe reaches x <= -1
        const double tol = 1e-12 * (1.0 + std::abs(c));
        report.checks.push_back({"decay_bound", status(worst <= tol), worst, tol});
    }
    return report;
}

}  // namespace sonine

#endif  // SONINE_TIMESCALES_HPP
