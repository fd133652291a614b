#ifndef SONINE_FRACOPS_HPP
#define SONINE_FRACOPS_HPP

// Fractional operators in the transmuted frame, where every deformed operator
// becomes a classical one-sided convolution or shift:
//   integral   (kappa * v)(x)
//   weyl       d/dx (k * v)(x)
//   marchaud   int_0^S [v(x) - v(x - s)] k(s) ds
// Data is taken to vanish to the left of the window.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sonine/errors.hpp"
#include "sonine/fft.hpp"
#include "sonine/fit.hpp"
#include "sonine/grid.hpp"
#include "sonine/kernels.hpp"
#include "sonine/quadrature.hpp"
#include "sonine/semigroup.hpp"
#include "sonine/timescales.hpp"

namespace sonine {

inline constexpr double kDefaultWeightTol = 1e-10;

/// Integrals of the kernel against the two linear pieces on one panel
/// [jh, (j+1)h]:  mass = int k,  first = int k (s - jh)/h.
struct PanelMoments {
    double mass;
    double first;
};

namespace detail {

// (j+1)^p - j^p without cancellation.
inline double power_step(double j, double p) {
    if (j == 0.0) return 1.0;
    return std::pow(j, p) * std::expm1(p * std::log1p(1.0 / j));
}

inline PanelMoments power_law_panel(const PowerLaw& pl, double h, std::size_t j) {
    const double rho = pl.exponent;
    const double jd = static_cast<double>(j);
    const double scale = pl.coeff * std::pow(h, 1.0 - rho);
    const double d1 = power_step(jd, 1.0 - rho) / (1.0 - rho);
    const double d2 = power_step(jd, 2.0 - rho) / (2.0 - rho);
    return {scale * d1, scale * (d2 - jd * d1)};
}

inline PanelMoments quadrature_panel(const SonineKernel& k, double h, std::size_t j, double tol) {
    const quad::Tolerance t{tol, 20};
    if (j == 0) {
        const double rho = k.singularity_exponent;
        const double mass = quad::integrate_left_singular([&](double s) { return k(s); }, 0.0, h, rho, t);
        const double first =
            quad::integrate_left_singular([&](double s) { return k(s) * s / h; }, 0.0, h, rho, t);
        return {mass, first};
    }
    const double base = static_cast<double>(j) * h;
    const double mass = h * quad::integrate([&](double r) { return k(base + h * r); }, 0.0, 1.0, t);
    const double first =
        h * quad::integrate([&](double r) { return r * k(base + h * r); }, 0.0, 1.0, t);
    return {mass, first};
}

}  // namespace detail

/// Panel moments for panels first .. first + count - 1. Panel 0 requires an
/// integrable singularity (rho < 1).
inline std::vector<PanelMoments> panel_moments(const SonineKernel& kernel, double h,
                                               std::size_t first, std::size_t count,
                                               double tol = kDefaultWeightTol) {
    if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("quadrature spacing must be positive");
    if (first == 0 && count > 0 && kernel.singularity_exponent >= 1.0)
        throw DomainError(kernel.name + ": singularity exponent " +
                          std::to_string(kernel.singularity_exponent) +
                          " >= 1 makes the convolution weights infinite");
    std::vector<PanelMoments> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = first + i;
        out[i] = kernel.power_law ? detail::power_law_panel(*kernel.power_law, h, j)
                                  : detail::quadrature_panel(kernel, h, j, tol);
    }
    return out;
}

/// Product-integration weights for (kernel * v)(x_i) with v piecewise linear.
struct ConvolutionQuadrature {
    SonineKernel kernel;
    double h = 0.0;
    std::size_t n = 0;
    std::vector<PanelMoments> panels;  // n panels
    std::vector<double> weights;       // full hats w_0 .. w_{n-1}; w_0 is a half hat

    /// int_0^{m h} kernel, as reproduced by the weights (m <= n).
    double cumulative(std::size_t m) const {
        if (m > n) throw DomainError("cumulative moment beyond quadrature length");
        if (m == 0) return 0.0;
        double s = panels[m - 1].first;
        for (std::size_t j = 0; j < m; ++j) s += weights[j];
        return s;
    }

    /// out_i = sum_{j<i} w_j v_{i-j} + first_{i-1} v_0, with out_0 = 0.
    std::vector<double> apply(std::span<const double> v) const {
        if (v.size() > n)
            throw DomainError("convolution quadrature of length " + std::to_string(n) +
                              " applied to " + std::to_string(v.size()) + " samples");
        std::vector<double> out(v.size(), 0.0);
        for (std::size_t i = 1; i < v.size(); ++i) {
            double acc = panels[i - 1].first * v[0];
            const double* vi = v.data() + i;
            for (std::size_t j = 0; j < i; ++j) acc += weights[j] * vi[-static_cast<long>(j)];
            out[i] = acc;
        }
        return out;
    }
};

inline ConvolutionQuadrature build_quadrature(const SonineKernel& kernel, double h, std::size_t n,
                                              double tol = kDefaultWeightTol) {
    if (kernel.singularity_exponent >= 2.0)
        throw DomainError(kernel.name + ": singularity exponent must be < 2");
    if (n < 2) throw DomainError("convolution quadrature needs n >= 2");
    ConvolutionQuadrature q;
    q.kernel = kernel;
    q.h = h;
    q.n = n;
    q.panels = panel_moments(kernel, h, 0, n, tol);
    q.weights.resize(n);
    q.weights[0] = q.panels[0].mass - q.panels[0].first;
    for (std::size_t j = 1; j < n; ++j)
        q.weights[j] = q.panels[j].mass - q.panels[j].first + q.panels[j - 1].first;
    return q;
}

namespace detail {

inline void check_quadrature(const GridFunction& v, const ConvolutionQuadrature& q,
                             const char* who) {
    if (std::abs(q.h - v.grid.h()) > 1e-12 * v.grid.h())
        throw DomainError(std::string(who) + ": quadrature spacing " + std::to_string(q.h) +
                          " differs from grid spacing " + std::to_string(v.grid.h()));
    if (q.n < v.size())
        throw DomainError(std::string(who) + ": quadrature shorter than the grid");
}

}  // namespace detail

/// Sonine fractional integral: (kappa * v) on the window.
inline GridFunction fractional_integral(const GridFunction& v, const SoninePair& pair,
                                        const ConvolutionQuadrature& quad) {
    if (quad.kernel.name != pair.kappa.name)
        throw DomainError("fractional_integral: quadrature built from " + quad.kernel.name +
                          ", expected " + pair.kappa.name);
    detail::check_quadrature(v, quad, "fractional_integral");
    return GridFunction(v.grid, quad.apply(v.values));
}

/// Weyl form d/dx (kernel * v).
inline GridFunction weyl_derivative(const GridFunction& v, const SonineKernel& kernel,
                                    const ConvolutionQuadrature& quad,
                                    DiffMethod method = DiffMethod::automatic) {
    if (quad.kernel.name != kernel.name)
        throw DomainError("weyl_derivative: quadrature built from " + quad.kernel.name +
                          ", expected " + kernel.name);
    detail::check_quadrature(v, quad, "weyl_derivative");
    const auto conv = quad.apply(v.values);
    return GridFunction(v.grid, differentiate(conv, v.grid.h(), method));
}

// ---------------------------------------------------------------- marchaud --

class TailPolicy {
public:
    enum class Mode { fixed_cutoff, weighted_auto };

    /// S = +inf keeps the whole tail (tail-integrable kernels only).
    static TailPolicy fixed_cutoff(double S) {
        if (!(S > 0.0)) throw PolicyError("tail cutoff must be positive");
        TailPolicy p;
        p.mode_ = Mode::fixed_cutoff;
        p.cutoff_ = S;
        return p;
    }

    /// Cutoff where e^{-(2 beta - alpha_g) s} drops below eps_tail.
    static TailPolicy weighted_auto(double eps_tail, double beta, double alpha_g) {
        if (!(eps_tail > 0.0 && eps_tail < 1.0)) throw PolicyError("eps_tail must lie in (0, 1)");
        const double rate = 2.0 * beta - alpha_g;
        if (!(rate > 0.0))
            throw PolicyError("weighted tail cutoff requires 2*beta > alpha_g (beta = " +
                              std::to_string(beta) + ", alpha_g = " + std::to_string(alpha_g) +
                              "): the amnesia decay does not dominate the kernel growth");
        TailPolicy p;
        p.mode_ = Mode::weighted_auto;
        p.eps_ = eps_tail;
        p.rate_ = rate;
        p.cutoff_ = std::log(1.0 / eps_tail) / rate;
        return p;
    }

    static TailPolicy weighted_auto(double eps_tail, const AmnesiaWeight& weight,
                                    const SonineKernel& kernel) {
        return weighted_auto(eps_tail, weight.past_decay_rate(), kernel.growth_rate);
    }

    Mode mode() const { return mode_; }
    double cutoff() const { return cutoff_; }
    double eps_tail() const { return eps_; }
    double decay_rate() const { return rate_; }

private:
    TailPolicy() = default;
    Mode mode_ = Mode::fixed_cutoff;
    double cutoff_ = std::numeric_limits<double>::infinity();
    double eps_ = 0.0;
    double rate_ = 0.0;
};

/// Graded panels on (0, h]: geometric ratio toward s_min; [0, s_min] is dropped.
struct MarchaudQuadrature {
    double s_min = 1e-10;
    double ratio = 0.5;
    double rel_tol = 1e-12;
};

/// int_0^S [v(x) - v(x - s)] k(s) ds. On (0, h] the difference is taken from
/// a local cubic through x + h .. x - 2h and integrated against graded
/// moments of s^m k(s); beyond h the difference is product-integrated with
/// hat functions. S is rounded up to a whole panel.
inline GridFunction marchaud_derivative(const GridFunction& v, const SonineKernel& kernel,
                                        const TailPolicy& tail, const MarchaudQuadrature& sq = {}) {
    if (kernel.singularity_exponent >= 2.0)
        throw DomainError(kernel.name + ": Marchaud form needs singularity exponent < 2");
    const double S = tail.cutoff();
    const bool full_tail = std::isinf(S);
    if (full_tail && !kernel.tail_integrable)
        throw ConfigurationError(kernel.name +
                                 " is not tail-integrable; Marchaud form needs a finite cutoff");
    const auto& g = v.grid;
    const double h = g.h();
    const std::size_t n = g.size();
    if (S < h) throw DomainError("tail cutoff is shorter than one grid panel");

    const quad::Tolerance tol{sq.rel_tol, 20};
    double M[4] = {0.0, 0.0, 0.0, 0.0};
    for (int m = 1; m <= 3; ++m)
        M[m] = quad::integrate_graded([&](double s) { return std::pow(s, m) * kernel(s); }, h,
                                      sq.s_min, sq.ratio, tol);

    // Panels 1 .. J-1 cover (h, J h]; only those reaching inside the window
    // contribute to the translated term.
    const double panels_to_S = full_tail ? std::numeric_limits<double>::infinity()
                                         : std::ceil(S / h - 1e-9);
    const std::size_t J = full_tail ? n : static_cast<std::size_t>(std::min<double>(panels_to_S, n));
    const auto pm = J > 1 ? panel_moments(kernel, h, 1, J - 1, sq.rel_tol) : std::vector<PanelMoments>{};
    double constant = 0.0;
    for (const auto& p : pm) constant += p.mass;
    const double reach = static_cast<double>(J) * h;
    if (full_tail) {
        constant += quad::integrate([&](double s) { return kernel(s); }, reach,
                                    std::numeric_limits<double>::infinity(), tol);
    } else if (panels_to_S > static_cast<double>(J)) {
        constant += quad::integrate([&](double s) { return kernel(s); }, reach, panels_to_S * h, tol);
    }

    const auto& f = v.values;
    const auto at = [&](long i) { return i >= 0 && i < static_cast<long>(n) ? f[static_cast<std::size_t>(i)] : 0.0; };
    std::vector<double> out(n);
    for (std::size_t ui = 0; ui < n; ++ui) {
        const long i = static_cast<long>(ui);
        const double fm = at(i + 1), f0 = at(i), f1 = at(i - 1), f2 = at(i - 2);
        const double c1 = -fm / 3.0 - f0 / 2.0 + f1 - f2 / 6.0;
        const double c2 = fm / 2.0 - f0 + f1 / 2.0;
        const double c3 = -fm / 6.0 + f0 / 2.0 - f1 / 2.0 + f2 / 6.0;
        double acc = -(c1 * M[1] / h + c2 * M[2] / (h * h) + c3 * M[3] / (h * h * h));
        acc += f0 * constant;
        const std::size_t last = std::min<std::size_t>(pm.size(), ui);
        for (std::size_t q = 0; q < last; ++q) {
            const long j = static_cast<long>(q) + 1;
            acc -= (pm[q].mass - pm[q].first) * f[static_cast<std::size_t>(i - j)] +
                   pm[q].first * at(i - j - 1);
        }
        out[ui] = acc;
    }
    return GridFunction(g, std::move(out));
}

// ------------------------------------------------------------ diagnostics --

/// ||weyl(k) o integral(kappa) v - v|| / ||v||; absolute when v = 0.
inline double inversion_residual(const GridFunction& v, const SoninePair& pair,
                                 const ConvolutionQuadrature& quad_kappa,
                                 const ConvolutionQuadrature& quad_k,
                                 DiffMethod method = DiffMethod::automatic) {
    const auto w = weyl_derivative(fractional_integral(v, pair, quad_kappa), pair.k, quad_k, method);
    const double err = l2_norm(combine(1.0, w, -1.0, v));
    const double ref = l2_norm(v);
    return ref > 0.0 ? err / ref : err;
}

struct SymbolGap {
    double xi;
    double gap;
};

struct DiscrepancyReport {
    double l2_rel = 0.0;
    double linf_rel = 0.0;
    std::vector<SymbolGap> symbol_gap;
    std::string status = "reported";
};

/// |(k^(0) - k^(i xi)) - i xi kappa^(i xi)|.
inline double symbol_gap(const SoninePair& pair, double xi) {
    return std::abs(marchaud_symbol(pair.k, xi) - weyl_symbol(pair.kappa, xi));
}

/// Compares marchaud(v, k) with weyl(v, kappa). Nothing is asserted.
inline DiscrepancyReport equivalence_discrepancy(const GridFunction& v, const SoninePair& pair,
                                                 const TailPolicy& tail,
                                                 const ConvolutionQuadrature& quad_kappa,
                                                 std::span<const double> xi_samples,
                                                 const MarchaudQuadrature& sq = {}) {
    const auto m = marchaud_derivative(v, pair.k, tail, sq);
    const auto w = weyl_derivative(v, pair.kappa, quad_kappa);
    const auto d = combine(1.0, m, -1.0, w);
    DiscrepancyReport r;
    const double l2_ref = std::max(l2_norm(m), l2_norm(w));
    const double sup_ref = std::max(sup_norm(m.values), sup_norm(w.values));
    r.l2_rel = l2_ref > 0.0 ? l2_norm(d) / l2_ref : l2_norm(d);
    r.linf_rel = sup_ref > 0.0 ? sup_norm(d.values) / sup_ref : sup_norm(d.values);
    for (double xi : xi_samples) r.symbol_gap.push_back({xi, symbol_gap(pair, xi)});
    return r;
}

inline void write_csv(const DiscrepancyReport& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << "xi,symbol_gap,l2_rel,linf_rel,status\n";
    for (const auto& s : r.symbol_gap)
        out << format_double(s.xi) << ',' << format_double(s.gap) << ',' << format_double(r.l2_rel)
            << ',' << format_double(r.linf_rel) << ',' << r.status << '\n';
}

struct TailProfile {
    std::vector<double> s;
    std::vector<double> g;
    double rate = std::numeric_limits<double>::quiet_NaN();  // fitted r in g ~ e^{-r s}
    double intercept = std::numeric_limits<double>::quiet_NaN();
    double predicted_rate = 0.0;                             // 2 beta - alpha_g

    double fit(double s_val) const { return std::exp(intercept - rate * s_val); }
};

/// g(s) = ||S(s) v||_{L^2(window)} |k(s)|, the size of the translated term.
/// The rate is fitted on log g over s in [s_max / 10, s_max].
inline TailProfile tail_profile(const GridFunction& v, const SonineKernel& kernel,
                                const AgingScale& scale, const AmnesiaWeight& weight,
                                std::span<const double> s_grid) {
    (void)scale;
    const double beta = weight.past_decay_rate();
    if (!(beta > 0.0) && weight.family() != WeightFamily::constant)
        throw DomainError("tail profile needs a weight with a positive past decay rate");
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
        if (!(s_grid[i] > 0.0)) throw DomainError("tail profile shifts must be positive");
        if (i > 0 && !(s_grid[i] > s_grid[i - 1])) throw DomainError("tail profile shifts must increase");
        if (s_grid[i] > v.grid.width()) throw DomainError("tail profile shift exceeds the window");
    }
    TailProfile p;
    p.predicted_rate = 2.0 * beta - kernel.growth_rate;
    for (double s : s_grid) {
        p.s.push_back(s);
        p.g.push_back(l2_norm(apply_shift(v, s)) * std::abs(kernel(s)));
    }
    if (s_grid.empty()) return p;
    const double lo = s_grid.back() / 10.0;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < p.s.size(); ++i)
        if (p.s[i] >= lo && p.g[i] > 0.0 && std::isfinite(p.g[i])) {
            xs.push_back(p.s[i]);
            ys.push_back(std::log(p.g[i]));
        }
    if (xs.size() >= 2) {
        const double slope = fit_slope(xs, ys);
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) { mx += xs[i]; my += ys[i]; }
        mx /= static_cast<double>(xs.size());
        my /= static_cast<double>(xs.size());
        p.rate = -slope;
        p.intercept = my - slope * mx;
    }
    return p;
}

inline void write_csv(const TailProfile& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << "s,g,fit\n";
    for (std::size_t i = 0; i < p.s.size(); ++i)
        out << format_double(p.s[i]) << ',' << format_double(p.g[i]) << ','
            << (std::isfinite(p.rate) ? format_double(p.fit(p.s[i])) : std::string("nan")) << '\n';
}

}  // namespace sonine

#endif  // SONINE_FRACOPS_HPP
