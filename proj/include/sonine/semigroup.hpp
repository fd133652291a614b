#ifndef SONINE_SEMIGROUP_HPP
#define SONINE_SEMIGROUP_HPP

// The deformed translation semigroup. In the transmuted frame it is the
// classical right shift v(x) -> v(x - s); the pointwise deformed formula is
// kept separately so the similarity relation can be measured rather than
// assumed.

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "sonine/errors.hpp"
#include "sonine/fft.hpp"
#include "sonine/grid.hpp"
#include "sonine/timescales.hpp"

namespace sonine {

struct ShiftOutcome {
    GridFunction value;
    bool truncated = false;  // shift exceeded the window; value is identically zero
};

/// (S(s) v)(x_i) = v(x_i - s). Values that would come from beyond x_min are
/// zero; off-grid shifts use four-point Lagrange interpolation.
inline ShiftOutcome apply_shift_checked(const GridFunction& v, double s) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw DomainError("shift amount must be >= 0");
    const auto& g = v.grid;
    const std::size_t n = g.size();
    std::vector<double> out(n, 0.0);
    if (s > g.width()) return {GridFunction(g, std::move(out)), true};

    const double q = s / g.h();
    double whole = std::floor(q);
    double frac = q - whole;
    constexpr double snap = 1e-12;
    if (frac > 1.0 - snap) { whole += 1.0; frac = 0.0; }
    const auto k = static_cast<long>(whole);

    if (frac < snap) {
        for (std::size_t i = static_cast<std::size_t>(k); i < n; ++i)
            out[i] = v.values[i - static_cast<std::size_t>(k)];
        return {GridFunction(g, std::move(out)), false};
    }

    // x_i - s sits between nodes j = i - k - 1 and j + 1, at offset 1 - frac from j.
    const auto w = cubic_weights(1.0 - frac);
    const auto ln = static_cast<long>(n);
    for (long i = 0; i < ln; ++i) {
        const long j = i - k - 1;
        double acc = 0.0;
        for (int m = 0; m < 4; ++m) {
            const long idx = j - 1 + m;
            if (idx >= 0 && idx < ln) acc += w[m] * v.values[static_cast<std::size_t>(idx)];
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
    return {GridFunction(g, std::move(out)), false};
}

inline GridFunction apply_shift(const GridFunction& v, double s) {
    return apply_shift_checked(v, s).value;
}

/// T_{psi,omega}(s) evaluated pointwise in physical time:
///   T(s)u(t) = omega(tau)/omega(t) u(tau),  tau = psi^{-1}(psi(t) - s).
struct DeformedShift {
    AgingScale scale;
    AmnesiaWeight weight;
    double s;

    DeformedShift(AgingScale sc, AmnesiaWeight w, double shift)
        : scale(sc), weight(std::move(w)), s(shift) {
        if (!(s >= 0.0) || !std::isfinite(s)) throw DomainError("shift amount must be >= 0");
    }

    template <class U>
    double evaluate(U&& u, double t) const {
        const double x = scale.forward(t);
        const double tau = scale.inverse(x - s);
        const double ratio =
            std::exp(weight.log_at_operational(x - s) - weight.log_at_operational(x));
        return ratio * u(tau);
    }
};

/// Sup-norm gap, over the physical nodes psi^{-1}(x_i), between the direct
/// deformed formula and T^{-1} S(s) T u.
template <class U>
double similarity_residual(U&& u, const AgingScale& scale, const AmnesiaWeight& weight, double s,
                           const OperationalGrid& grid) {
    const DeformedShift direct(scale, weight, s);
    const auto shifted = apply_shift(transmute(u, scale, weight, grid), s);
    const auto view = inverse_transmute(shifted, scale, weight);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = scale.inverse(grid.x(i));
        worst = std::max(worst, std::abs(direct.evaluate(u, t) - view(t)));
    }
    return worst;
}

/// Transmuted action of the generator: -dv/dx.
inline GridFunction generator_apply(const GridFunction& v, DiffMethod method = DiffMethod::automatic) {
    auto d = differentiate(v.values, v.grid.h(), method);
    for (auto& x : d) x = -x;
    return GridFunction(v.grid, std::move(d));
}

/// Physical generator A u(t) = -(omega u)'(t) / (omega(t) psi'(t)), from the
/// analytic derivatives of u, omega and psi.
template <class U, class DU>
std::function<double(double)> physical_generator(U u, DU du, const AgingScale& scale,
                                                 const AmnesiaWeight& weight) {
    return [=](double t) {
        const double om = weight.value(t);
        return -(weight.derivative(t) * u(t) + om * du(t)) / (om * scale.derivative(t));
    };
}

struct GeneratorResidual {
    double s;
    double residual;
};

/// ||(S(s) v - v)/s - A v||_{L^2} for each s. The difference quotient is
/// first order in s until it reaches the O(h^4/s) interpolation floor.
inline std::vector<GeneratorResidual> generator_fd_residual(const GridFunction& v,
                                                            std::span<const double> s_list) {
    for (std::size_t i = 0; i < s_list.size(); ++i) {
        if (!(s_list[i] > 0.0)) throw DomainError("generator probe shifts must be positive");
        if (i > 0 && !(s_list[i] < s_list[i - 1]))
            throw DomainError("generator probe shifts must be decreasing");
    }
    const auto gen = generator_apply(v);
    std::vector<GeneratorResidual> out;
    out.reserve(s_list.size());
    for (double s : s_list) {
        const auto shifted = apply_shift(v, s);
        std::vector<double> diff(v.size());
        for (std::size_t i = 0; i < diff.size(); ++i)
            diff[i] = (shifted.values[i] - v.values[i]) / s - gen.values[i];
        out.push_back({s, l2_norm(diff, v.grid.h())});
    }
    return out;
}

}  // namespace sonine

#endif  // SONINE_SEMIGROUP_HPP
