#ifndef SONINE_CAUCHY_HPP
#define SONINE_CAUCHY_HPP

// dv/dtau = sigma * D v + f in the transmuted frame, where D is the Marchaud
// or Weyl form built from pair.k. Two solvers: an exponential integrator in
// Fourier space and an implicit-Euler method of lines on the product
// integration weights.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "sonine/errors.hpp"
#include "sonine/fft.hpp"
#include "sonine/fracops.hpp"
#include "sonine/grid.hpp"
#include "sonine/kernels.hpp"
#include "sonine/timescales.hpp"

namespace sonine {

enum class OperatorForm { marchaud, weyl };

inline std::string_view to_string(OperatorForm f) {
    return f == OperatorForm::marchaud ? "marchaud" : "weyl";
}

inline OperatorForm parse_operator_form(std::string_view s) {
    if (s == "marchaud") return OperatorForm::marchaud;
    if (s == "weyl") return OperatorForm::weyl;
    throw ValidationError("unknown operator form '" + std::string(s) + "'");
}

/// Sharp constant of sup|v| <= C ||v||_{H^1(R)}.
inline const double kEmbeddingConstant = 1.0 / std::numbers::sqrt2;

inline constexpr double kDefaultGrowthCap = 1e6;

struct CauchyProblem {
    SoninePair pair;
    AgingScale scale;
    AmnesiaWeight weight;
    GridFunction u0;  // transmuted initial datum
    std::function<double(double, double)> forcing;  // f(tau, x), transmuted; empty for none
    double horizon = 1.0;
    double dt = 1e-2;
    int sign = -1;
    OperatorForm form = OperatorForm::marchaud;
    bool allow_expansive = false;  // required for sign = +1
    double growth_cap = kDefaultGrowthCap;
    std::size_t snapshot_every = 0;  // 0 keeps only the first and last states
    double eps_trunc = kDefaultTruncation;

    void validate() const {
        if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ValidationError("horizon must be > 0");
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be > 0");
        if (dt > horizon * (1.0 + 1e-12)) throw ValidationError("dt must not exceed the horizon");
        if (sign != 1 && sign != -1) throw ValidationError("sign must be +1 or -1");
        if (sign == 1 && !allow_expansive)
            throw PolicyError("sign = +1 is expansive; set allow_expansive to run it");
        if (!(growth_cap > 1.0)) throw ValidationError("growth cap must exceed 1");
        if (!edges_decayed(u0.values, eps_trunc))
            throw DataError("initial datum does not decay below eps_trunc at the window edges");
        if (form == OperatorForm::marchaud && !pair.k.tail_integrable)
            throw ConfigurationError(pair.k.name +
                                     " is not tail-integrable; k^(0) is undefined for the Marchaud form");
    }

    /// Step sizes covering [0, horizon]; the last one may be shorter.
    std::vector<double> steps() const {
        std::vector<double> out;
        const auto whole = static_cast<std::size_t>(std::floor(horizon / dt + 1e-9));
        out.assign(whole, dt);
        const double rest = horizon - static_cast<double>(whole) * dt;
        if (rest > 1e-9 * dt) out.push_back(rest);
        return out;
    }
};

struct Snapshot {
    std::size_t step;
    double tau;
    GridFunction v;
};

struct EvolutionTrace {
    int sign = -1;
    std::vector<double> times;
    std::vector<double> l2_norms;
    std::vector<double> h1_norms;
    std::vector<double> sup_weighted;
    std::vector<double> envelope_margin;  // sup|v| - C ||u0||_{H^1}
    std::vector<Snapshot> snapshots;
    bool aborted = false;
    std::string reason;

    const GridFunction& final_state() const { return snapshots.back().v; }
};

namespace detail {

struct TraceRecorder {
    EvolutionTrace& trace;
    double u0_l2;
    double u0_h1;
    double cap;
    std::size_t every;

    // Returns false once the run has to stop.
    bool record(std::size_t step, double tau, const GridFunction& v, bool last) {
        const auto nr = norms(v);
        trace.times.push_back(tau);
        trace.l2_norms.push_back(nr.l2);
        trace.h1_norms.push_back(nr.h1);
        trace.sup_weighted.push_back(nr.sup_weighted);
        trace.envelope_margin.push_back(nr.sup_weighted - kEmbeddingConstant * u0_h1);
        bool ok = true;
        if (!std::isfinite(nr.l2) || !std::isfinite(nr.h1)) {
            trace.aborted = true;
            trace.reason = "non-finite state at step " + std::to_string(step);
            ok = false;
        } else if (u0_l2 == 0.0 && nr.l2 > 0.0) {
            u0_l2 = nr.l2;  // forced run from rest: growth is measured from the first nonzero state
        } else if (u0_l2 > 0.0 && nr.l2 > cap * u0_l2) {
            trace.aborted = true;
            trace.reason = "growth guard: ||v|| exceeded " + format_double(cap) +
                           " x ||v0|| at tau = " + format_double(tau);
            ok = false;
        }
        if (step == 0 || last || !ok || (every > 0 && step % every == 0))
            trace.snapshots.push_back({step, tau, v});
        return ok;
    }
};

inline Complex phi1(Complex z) {
    if (std::abs(z) < 1e-5) return 1.0 + z / 2.0 + z * z / 6.0;
    return (std::exp(z) - 1.0) / z;
}

inline std::vector<double> sample_forcing(const CauchyProblem& p, double tau) {
    const auto& g = p.u0.grid;
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = p.forcing(tau, g.x(i));
    return f;
}

}  // namespace detail

/// Multiplier m(xi) of the chosen form: k^(0) - k^(i xi) or i xi k^(i xi).
inline Complex evolution_symbol(const CauchyProblem& p, double xi) {
    return p.form == OperatorForm::marchaud ? marchaud_symbol(p.pair.k, xi)
                                            : weyl_symbol(p.pair.k, xi);
}

/// First-order exponential time differencing in Fourier space:
///   v^_{n+1} = e^{z} v^_n + dt phi1(z) f^_n,  z = sigma dt m(xi).
inline EvolutionTrace spectral_evolve(const CauchyProblem& p) {
    p.validate();
    const auto& g = p.u0.grid;
    const std::size_t n = g.size();
    if (!is_power_of_two(n))
        throw DomainError("spectral evolution needs a power-of-two grid (n = " + std::to_string(n) + ")");

    EvolutionTrace trace;
    trace.sign = p.sign;
    const auto n0 = norms(p.u0);
    detail::TraceRecorder rec{trace, n0.l2, n0.h1, p.growth_cap, p.snapshot_every};
    const auto steps = p.steps();
    if (!rec.record(0, 0.0, p.u0, steps.empty())) return trace;

    RealFft fft(n);
    const auto xi = half_spectrum_frequencies(n, g.h());
    std::vector<Complex> m(xi.size());
    for (std::size_t k = 0; k < xi.size(); ++k) m[k] = evolution_symbol(p, xi[k]);

    auto spec = fft.forward(p.u0.values);
    std::vector<Complex> factor(xi.size()), duhamel(xi.size());
    double cached_dt = -1.0;
    double tau = 0.0;
    for (std::size_t s = 0; s < steps.size(); ++s) {
        const double dt = steps[s];
        if (dt != cached_dt) {
            for (std::size_t k = 0; k < xi.size(); ++k) {
                const Complex z = static_cast<double>(p.sign) * dt * m[k];
                factor[k] = std::exp(z);
                duhamel[k] = dt * detail::phi1(z);
            }
            cached_dt = dt;
        }
        if (p.forcing) {
            const auto fs = fft.forward(detail::sample_forcing(p, tau));
            for (std::size_t k = 0; k < spec.size(); ++k) spec[k] = factor[k] * spec[k] + duhamel[k] * fs[k];
        } else {
            for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= factor[k];
        }
        tau += dt;
        GridFunction v(g, fft.backward(spec));
        if (!rec.record(s + 1, tau, v, s + 1 == steps.size())) break;
    }
    return trace;
}

/// Dense lower-triangular matrix stored row by row.
struct LowerTriangular {
    std::size_t n = 0;
    std::vector<double> data;

    explicit LowerTriangular(std::size_t size) : n(size), data(size * (size + 1) / 2, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return data[i * (i + 1) / 2 + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * (i + 1) / 2 + j]; }

    std::vector<double> apply(std::span<const double> v) const {
        std::vector<double> out(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = data.data() + i * (i + 1) / 2;
            double acc = 0.0;
            for (std::size_t j = 0; j <= i; ++j) acc += row[j] * v[j];
            out[i] = acc;
        }
        return out;
    }

    /// Solves (I - a M) x = rhs by forward substitution.
    std::vector<double> solve_shifted(double a, std::span<const double> rhs) const {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = data.data() + i * (i + 1) / 2;
            double acc = rhs[i];
            for (std::size_t j = 0; j < i; ++j) acc += a * row[j] * x[j];
            const double diag = 1.0 - a * row[i];
            if (!(std::abs(diag) > 1e-14))
                throw NumericalError("singular implicit step: row " + std::to_string(i) +
                                     " has diagonal 1 - a*M_ii = " + format_double(diag) +
                                     " (a = " + format_double(a) + ", M_ii = " + format_double(row[i]) + ")");
            x[i] = acc / diag;
        }
        return x;
    }
};

inline constexpr std::size_t kMaxDenseMol = 4096;

/// Discrete operator of the chosen form on the problem grid.
///   marchaud: (M v)_i = (int_0^inf k - w_0) v_i - sum_{j>=1} w_j v_{i-j}
///   weyl:     second-order backward difference of the product-integration convolution
inline LowerTriangular mol_operator(const CauchyProblem& p) {
    const auto& g = p.u0.grid;
    const std::size_t n = g.size();
    if (n > kMaxDenseMol)
        throw DomainError("method of lines is limited to n <= " + std::to_string(kMaxDenseMol));
    const double h = g.h();
    const auto q = build_quadrature(p.pair.k, h, n);
    LowerTriangular M(n);
    if (p.form == OperatorForm::marchaud) {
        double total = 0.0;
        for (const auto& pm : q.panels) total += pm.mass;
        total += quad::integrate([&](double s) { return p.pair.k(s); }, static_cast<double>(n) * h,
                                 std::numeric_limits<double>::infinity());
        for (std::size_t i = 0; i < n; ++i) {
            M.at(i, i) = total - q.weights[0];
            for (std::size_t j = 1; j <= i; ++j) M.at(i, i - j) = -q.weights[j];
        }
        return M;
    }
    LowerTriangular C(n);
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) C.at(i, i - j) = q.weights[j];
        C.at(i, 0) += q.panels[i - 1].first;
    }
    // Row 0 stays zero (the convolution vanishes there); row 1 is a first-order difference.
    M.at(1, 0) = (C.at(1, 0) - C.at(0, 0)) / h;
    M.at(1, 1) = C.at(1, 1) / h;
    for (std::size_t i = 2; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double d = 3.0 * C.at(i, j);
            if (j <= i - 1) d -= 4.0 * C.at(i - 1, j);
            if (j <= i - 2) d += C.at(i - 2, j);
            M.at(i, j) = d / (2.0 * h);
        }
    return M;
}

/// Implicit Euler: (I - sigma dt M) v_{n+1} = v_n + dt f(tau_{n+1}).
inline EvolutionTrace mol_evolve(const CauchyProblem& p) {
    p.validate();
    const auto& g = p.u0.grid;
    EvolutionTrace trace;
    trace.sign = p.sign;
    const auto n0 = norms(p.u0);
    detail::TraceRecorder rec{trace, n0.l2, n0.h1, p.growth_cap, p.snapshot_every};
    const auto steps = p.steps();
    if (!rec.record(0, 0.0, p.u0, steps.empty())) return trace;

    const auto M = mol_operator(p);
    std::vector<double> v = p.u0.values;
    double tau = 0.0;
    for (std::size_t s = 0; s < steps.size(); ++s) {
        const double dt = steps[s];
        tau += dt;
        if (p.forcing) {
            const auto f = detail::sample_forcing(p, tau);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] += dt * f[i];
        }
        v = M.solve_shifted(static_cast<double>(p.sign) * dt, v);
        bool finite = true;
        for (double x : v) finite = finite && std::isfinite(x);
        if (!finite) {
            trace.aborted = true;
            trace.reason = "non-finite state at step " + std::to_string(s + 1);
            break;
        }
        if (!rec.record(s + 1, tau, GridFunction(g, v), s + 1 == steps.size())) break;
    }
    return trace;
}

struct EnvelopeViolation {
    std::size_t index;
    double tau;
    double sup;
    double bound;
};

struct EnvelopeReport {
    std::vector<EnvelopeViolation> violations;  // sup|v| > C ||v||_{H^1} (1 + tol)
    double worst_ratio = 0.0;                   // max sup|v| / (C ||v||_{H^1})
    bool h1_contracted = true;                  // ||v(tau)||_{H^1} <= ||u0||_{H^1} throughout
    double worst_h1_excess = 0.0;
    std::vector<double> snapshot_margins;       // sup|v| - C ||u0||_{H^1} per snapshot

    bool passed() const { return violations.empty(); }
};

inline EnvelopeReport decay_envelope_check(const EvolutionTrace& trace, double u0_h1_norm,
                                           double tol = 1e-6) {
    if (trace.times.empty()) throw DomainError("envelope check needs a nonempty trace");
    EnvelopeReport r;
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        const double bound = kEmbeddingConstant * trace.h1_norms[i];
        const double sup = trace.sup_weighted[i];
        if (bound > 0.0) r.worst_ratio = std::max(r.worst_ratio, sup / bound);
        if (sup > bound * (1.0 + tol)) r.violations.push_back({i, trace.times[i], sup, bound});
        const double excess = trace.h1_norms[i] - u0_h1_norm;
        if (excess > 1e-10 * std::max(u0_h1_norm, 1e-300)) {
            r.h1_contracted = false;
            r.worst_h1_excess = std::max(r.worst_h1_excess, excess);
        }
    }
    for (const auto& s : trace.snapshots)
        r.snapshot_margins.push_back(sup_norm(s.v.values) - kEmbeddingConstant * u0_h1_norm);
    return r;
}

inline void write_trace_csv(const EvolutionTrace& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << "tau,l2,h1,sup_weighted,envelope_margin\n";
    for (std::size_t i = 0; i < t.times.size(); ++i)
        out << format_double(t.times[i]) << ',' << format_double(t.l2_norms[i]) << ','
            << format_double(t.h1_norms[i]) << ',' << format_double(t.sup_weighted[i]) << ','
            << format_double(t.envelope_margin[i]) << '\n';
}

/// One GridFunction CSV per snapshot: <prefix>_<step>.csv. Returns the paths.
inline std::vector<std::string> write_snapshots(const EvolutionTrace& t, const std::string& dir,
                                                const std::string& prefix = "snapshot") {
    std::vector<std::string> paths;
    for (const auto& s : t.snapshots) {
        char name[64];
        std::snprintf(name, sizeof name, "%s_%06zu.csv", prefix.c_str(), s.step);
        const auto path = (std::filesystem::path(dir) / name).string();
        write_csv(s.v, path);
        paths.push_back(path);
    }
    return paths;
}

}  // namespace sonine

#endif  // SONINE_CAUCHY_HPP
