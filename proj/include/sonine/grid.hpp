#ifndef SONINE_GRID_HPP
#define SONINE_GRID_HPP

// Uniform grids in operational time x = psi(t) and functions sampled on
// them. A GridFunction always stores the transmuted representative
// v = T u = (omega u) o psi^{-1}; physical values are recovered on demand.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sonine/errors.hpp"
#include "sonine/fft.hpp"
#include "sonine/timescales.hpp"

namespace sonine {

class OperationalGrid {
public:
    OperationalGrid(double x_min, double x_max, std::size_t n)
        : x_min_(x_min), x_max_(x_max), n_(n) {
        if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max))
            throw ValidationError("operational grid requires finite x_min < x_max");
        if (n < 8) throw ValidationError("operational grid requires at least 8 points");
        h_ = (x_max - x_min) / static_cast<double>(n - 1);
    }

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    std::size_t size() const { return n_; }
    double h() const { return h_; }
    double x(std::size_t i) const { return x_min_ + static_cast<double>(i) * h_; }
    double width() const { return x_max_ - x_min_; }

    std::vector<double> points() const {
        std::vector<double> xs(n_);
        for (std::size_t i = 0; i < n_; ++i) xs[i] = x(i);
        return xs;
    }

    bool same_as(const OperationalGrid& o) const {
        return n_ == o.n_ && x_min_ == o.x_min_ && x_max_ == o.x_max_;
    }

private:
    double x_min_;
    double x_max_;
    std::size_t n_;
    double h_;
};

struct GridFunction {
    OperationalGrid grid;
    std::vector<double> values;

    GridFunction(OperationalGrid g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (values.size() != grid.size())
            throw DataError("grid function length " + std::to_string(values.size()) +
                            " does not match grid size " + std::to_string(grid.size()));
        for (std::size_t i = 0; i < values.size(); ++i)
            if (!std::isfinite(values[i]))
                throw DataError("non-finite grid value at node " + std::to_string(i));
    }

    static GridFunction zeros(const OperationalGrid& g) {
        return GridFunction(g, std::vector<double>(g.size(), 0.0));
    }

    /// Samples a function of operational time directly.
    template <class F>
    static GridFunction sample(const OperationalGrid& g, F&& f) {
        std::vector<double> v(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) v[i] = f(g.x(i));
        return GridFunction(g, std::move(v));
    }

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

/// a * u + b * w on a common grid.
inline GridFunction combine(double a, const GridFunction& u, double b, const GridFunction& w) {
    if (!u.grid.same_as(w.grid)) throw DomainError("grid functions live on different grids");
    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * u.values[i] + b * w.values[i];
    return GridFunction(u.grid, std::move(out));
}

// ---------------------------------------------------------------- norms --

inline double trapezoid(std::span<const double> f, double h) {
    if (f.empty()) return 0.0;
    double s = 0.0;
    for (double v : f) s += v;
    return h * (s - 0.5 * (f.front() + f.back()));
}

inline double l2_norm(std::span<const double> f, double h) {
    std::vector<double> sq(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) sq[i] = f[i] * f[i];
    return std::sqrt(trapezoid(sq, h));
}

inline double sup_norm(std::span<const double> f) {
    double m = 0.0;
    for (double v : f) m = std::max(m, std::abs(v));
    return m;
}

inline double l2_norm(const GridFunction& v) { return l2_norm(v.values, v.grid.h()); }

/// ||u|| in L^2_{psi,omega}, H^1_{psi,omega} and the weighted sup norm,
/// all measured on the transmuted representative.
struct WeightedNormReport {
    double l2 = 0.0;
    double h1 = 0.0;
    double sup_weighted = 0.0;
};

inline WeightedNormReport norms(const GridFunction& v) {
    WeightedNormReport r;
    const double h = v.grid.h();
    r.l2 = l2_norm(v.values, h);
    const auto dv = differentiate(v.values, h);
    const double d = l2_norm(dv, h);
    r.h1 = std::sqrt(r.l2 * r.l2 + d * d);
    r.sup_weighted = sup_norm(v.values);
    return r;
}

// ---------------------------------------------------------- interpolation --

/// Lagrange weights for nodes at -1, 0, 1, 2 evaluated at sigma.
inline std::array<double, 4> cubic_weights(double sigma) {
    const double a = sigma + 1.0, b = sigma, c = sigma - 1.0, d = sigma - 2.0;
    return {-b * c * d / 6.0, a * c * d / 2.0, -a * b * d / 2.0, a * b * c / 6.0};
}

/// Four-point Lagrange interpolation inside the grid; the stencil is
/// shifted inward near the edges.
inline double interpolate(const GridFunction& v, double x) {
    const auto& g = v.grid;
    const double p = (x - g.x_min()) / g.h();
    const auto n = static_cast<long>(g.size());
    long base = static_cast<long>(std::floor(p)) - 1;
    base = std::clamp(base, 0L, n - 4);
    const auto w = cubic_weights(p - static_cast<double>(base) - 1.0);
    double s = 0.0;
    for (int m = 0; m < 4; ++m) s += w[m] * v.values[static_cast<std::size_t>(base + m)];
    return s;
}

// ----------------------------------------------------------- transmutation --

/// (T u)(x_i) = omega(psi^{-1}(x_i)) u(psi^{-1}(x_i)).
template <class U>
GridFunction transmute(U&& u, const AgingScale& scale, const AmnesiaWeight& weight,
                       const OperationalGrid& grid) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.x(i);
        const double t = scale.inverse(x);
        const double val = weight.at_operational(x) * u(t);
        if (!std::isfinite(val))
            throw DataError("non-finite transmuted sample at node " + std::to_string(i) +
                            " (x = " + std::to_string(x) + ", t = " + std::to_string(t) + ")");
        v[i] = val;
    }
    return GridFunction(grid, std::move(v));
}

/// Physical reading (T^{-1} v)(t) = v(psi(t)) / omega(t), with cubic
/// interpolation between nodes.
class PhysicalView {
public:
    PhysicalView(GridFunction v, AgingScale scale, AmnesiaWeight weight)
        : v_(std::move(v)), scale_(scale), weight_(std::move(weight)) {}

    double operator()(double t) const {
        const auto& g = v_.grid;
        const double x = scale_.forward(t);
        const double slack = 1e-9 * g.h();
        if (!(x >= g.x_min() - slack && x <= g.x_max() + slack))
            throw DomainError("psi(t) = " + std::to_string(x) + " lies outside the grid [" +
                              std::to_string(g.x_min()) + ", " + std::to_string(g.x_max()) + "]");
        return interpolate(v_, x) * std::exp(-weight_.log_at_operational(x));
    }

    const GridFunction& transmuted() const { return v_; }

private:
    GridFunction v_;
    AgingScale scale_;
    AmnesiaWeight weight_;
};

inline PhysicalView inverse_transmute(const GridFunction& v, const AgingScale& scale,
                                      const AmnesiaWeight& weight) {
    return PhysicalView(v, scale, weight);
}

/// Physical nodes t_i = psi^{-1}(x_i).
inline std::vector<double> physical_nodes(const OperationalGrid& grid, const AgingScale& scale) {
    std::vector<double> t(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) t[i] = scale.inverse(grid.x(i));
    return t;
}

/// Checks the window-decay contract |v| < eps_trunc at both edges.
inline bool window_decayed(const GridFunction& v, double eps_trunc = kDefaultTruncation) {
    return std::abs(v.values.front()) < eps_trunc && std::abs(v.values.back()) < eps_trunc;
}

// --------------------------------------------------------------------- csv --

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_csv(const GridFunction& v, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << "x,v\n";
    for (std::size_t i = 0; i < v.size(); ++i)
        out << format_double(v.grid.x(i)) << ',' << format_double(v.values[i]) << '\n';
}

inline GridFunction read_grid_function_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != "x,v") throw DataError(path + ": expected header 'x,v'");
    std::vector<double> xs, vs;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        try {
            if (comma == std::string::npos) throw std::invalid_argument("missing comma");
            xs.push_back(std::stod(line.substr(0, comma)));
            vs.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw DataError(path + ":" + std::to_string(lineno) + ": malformed row");
        }
    }
    if (xs.size() < 8) throw DataError(path + ": too few rows for a grid function");
    OperationalGrid g(xs.front(), xs.back(), xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (std::abs(xs[i] - g.x(i)) > 1e-9 * std::max(1.0, std::abs(xs[i])))
            throw DataError(path + ": x column is not a uniform grid");
    return GridFunction(g, std::move(vs));
}

}  // namespace sonine

#endif  // SONINE_GRID_HPP
