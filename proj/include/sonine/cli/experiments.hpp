#ifndef SONINE_CLI_EXPERIMENTS_HPP
#define SONINE_CLI_EXPERIMENTS_HPP

// Named experiments behind `sonine run`. Each one reads its own table from
// the config, writes CSVs and SVG plots into its output directory, and
// returns check records.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sonine/cli/config.hpp"
#include "sonine/cli/plot.hpp"
#include "sonine/sonine.hpp"

namespace sonine::cli {

enum class Status { pass, fail, reported };

inline std::string_view to_string(Status s) {
    switch (s) {
        case Status::pass: return "pass";
        case Status::fail: return "fail";
        case Status::reported: return "reported";
    }
    return "?";
}

struct CheckRecord {
    std::string experiment;
    std::string name;
    Status status;
    double metric;
    double threshold;
    std::string note;
};

struct RunSummary {
    std::vector<CheckRecord> checks;

    int fail_count() const {
        return static_cast<int>(std::count_if(checks.begin(), checks.end(),
                                              [](const auto& c) { return c.status == Status::fail; }));
    }
};

// ----------------------------------------------------------- config access --

/// One config table with a fixed key set and defaults.
class Params {
public:
    Params(const json& table, std::string where, json defaults)
        : where_(std::move(where)), values_(std::move(defaults)) {
        if (table.is_null()) return;
        if (!table.is_object()) throw ConfigurationError("[" + where_ + "] must be a table");
        for (const auto& [k, v] : table.items()) {
            if (!values_.contains(k))
                throw ConfigurationError("[" + where_ + "]: unknown key '" + k + "'");
            values_[k] = v;
        }
    }

    double num(const std::string& k) const {
        const auto& v = get(k);
        if (!v.is_number()) throw ConfigurationError(where_ + "." + k + ": expected a number");
        return v.get<double>();
    }

    long integer(const std::string& k) const {
        const auto& v = get(k);
        if (!v.is_number_integer()) throw ConfigurationError(where_ + "." + k + ": expected an integer");
        return v.get<long>();
    }

    bool flag(const std::string& k) const {
        const auto& v = get(k);
        if (!v.is_boolean()) throw ConfigurationError(where_ + "." + k + ": expected true or false");
        return v.get<bool>();
    }

    std::string str(const std::string& k) const {
        const auto& v = get(k);
        if (!v.is_string()) throw ConfigurationError(where_ + "." + k + ": expected a string");
        return v.get<std::string>();
    }

    std::vector<double> nums(const std::string& k) const {
        const auto& v = get(k);
        if (!v.is_array()) throw ConfigurationError(where_ + "." + k + ": expected an array of numbers");
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number()) throw ConfigurationError(where_ + "." + k + ": expected an array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

private:
    const json& get(const std::string& k) const {
        if (!values_.contains(k) || values_[k].is_null())
            throw ConfigurationError(where_ + "." + k + ": missing");
        return values_[k];
    }

    std::string where_;
    json values_;
};

namespace detail {

inline ParamMap numeric_params(const json& table, const std::string& where, const std::string& skip) {
    ParamMap out;
    if (table.is_null()) return out;
    if (!table.is_object()) throw ConfigurationError("[" + where + "] must be a table");
    for (const auto& [k, v] : table.items()) {
        if (k == skip) continue;
        if (!v.is_number()) throw ConfigurationError(where + "." + k + ": expected a number");
        out[k] = v.get<double>();
    }
    return out;
}

inline std::string name_field(const json& table, const std::string& where, const std::string& key,
                              const std::string& fallback) {
    if (table.is_null() || !table.contains(key)) {
        if (fallback.empty()) throw ConfigurationError("[" + where + "]: missing '" + key + "'");
        return fallback;
    }
    if (!table[key].is_string()) throw ConfigurationError(where + "." + key + ": expected a string");
    return table[key].get<std::string>();
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

}  // namespace detail

/// Everything an experiment needs: the shared blocks and its own table.
struct Context {
    std::string experiment;
    json root;
    std::filesystem::path out_dir;
    std::uint64_t seed = 0;

    const json& block(const std::string& name) const {
        static const json null;
        return root.contains(name) ? root[name] : null;
    }

    AgingScale scale() const {
        const auto& b = block("scale");
        const auto fam = parse_scale_family(detail::name_field(b, "scale", "family", "identity"));
        return make_scale(fam, detail::numeric_params(b, "scale", "family"));
    }

    AmnesiaWeight weight() const {
        const auto& b = block("weight");
        const auto fam = parse_weight_family(detail::name_field(b, "weight", "family", "constant"));
        return make_weight(fam, detail::numeric_params(b, "weight", "family"), scale());
    }

    PairKind pair_kind() const {
        return parse_pair_kind(detail::name_field(block("kernel"), "kernel", "pair", ""));
    }

    ParamMap pair_params() const { return detail::numeric_params(block("kernel"), "kernel", "pair"); }

    SoninePair pair() const { return make_sonine_pair(pair_kind(), pair_params()); }

    SoninePair pair_with_alpha(double alpha) const {
        auto p = pair_params();
        p["alpha"] = alpha;
        return make_sonine_pair(pair_kind(), p);
    }

    OperationalGrid grid() const {
        Params g(block("grid"), "grid", json{{"x_min", -20.0}, {"x_max", 20.0}, {"n", 1024}});
        const long n = g.integer("n");
        if (n < 8) throw ValidationError("grid.n must be at least 8");
        return OperationalGrid(g.num("x_min"), g.num("x_max"), static_cast<std::size_t>(n));
    }

    std::string path(const std::string& file) const { return (out_dir / file).string(); }
};

struct Recorder {
    std::string experiment;
    std::vector<CheckRecord> checks;

    void check(const std::string& name, double metric, double threshold, bool ok, std::string note = "") {
        checks.push_back({experiment, name, ok ? Status::pass : Status::fail, metric, threshold, std::move(note)});
    }
    void at_most(const std::string& name, double metric, double threshold, std::string note = "") {
        check(name, metric, threshold, metric <= threshold, std::move(note));
    }
    void at_least(const std::string& name, double metric, double threshold, std::string note = "") {
        check(name, metric, threshold, metric >= threshold, std::move(note));
    }
    void report(const std::string& name, double metric, std::string note = "") {
        checks.push_back({experiment, name, Status::reported, metric,
                          std::numeric_limits<double>::quiet_NaN(), std::move(note)});
    }
};

namespace detail {

inline GridFunction gaussian(const OperationalGrid& g, double center, double width) {
    return GridFunction::sample(g, [&](double x) {
        const double z = (x - center) / width;
        return std::exp(-0.5 * z * z);
    });
}

struct CsvWriter {
    std::ofstream out;
    explicit CsvWriter(const std::string& path, const std::string& header) : out(path) {
        if (!out) throw DataError("cannot open '" + path + "' for writing");
        out << header << '\n';
    }
    template <class... T>
    void row(const T&... v) {
        bool first = true;
        ((out << (first ? "" : ",") << cell(v), first = false), ...);
        out << '\n';
    }
    static std::string cell(double v) { return format_double(v); }
    static std::string cell(const std::string& s) { return csv_field(s); }
    static std::string cell(const char* s) { return csv_field(s); }
};

inline void try_plot(const Context& c, const std::string& csv, const std::string& x, const std::string& y,
                     bool logy) {
    const auto stem = std::filesystem::path(csv).stem().string();
    plot_csv(c.path(csv), x, y, logy, c.path(stem + "_" + y + ".svg"));
}

}  // namespace detail

// ------------------------------------------------------------- experiments --

inline std::vector<CheckRecord> run_sonine_check(const Context& c) {
    Params p(c.block("sonine-check"), "sonine-check",
             json{{"samples", 20}, {"t_max", 10.0}, {"threshold", 1e-6}});
    Recorder r{c.experiment, {}};
    const auto pair = c.pair();
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> dist(0.0, p.num("t_max"));
    detail::CsvWriter csv(c.path("sonine.csv"), "t,residual");
    std::vector<std::pair<double, double>> rows;
    double worst = 0.0;
    for (long i = 0; i < p.integer("samples"); ++i) {
        double t = dist(rng);
        if (t <= 0.0) t = 1e-3;
        const double res = sonine_residual(pair, t);
        rows.emplace_back(t, res);
        worst = std::max(worst, res);
    }
    std::sort(rows.begin(), rows.end());
    for (auto [t, res] : rows) csv.row(t, std::max(res, 1e-300));
    csv.out.close();
    detail::try_plot(c, "sonine.csv", "t", "residual", true);
    r.at_most("sonine_residual_max", worst, p.num("threshold"),
              std::string(to_string(pair.kind)) + " alpha=" + format_double(pair.order));
    return r.checks;
}

inline std::vector<CheckRecord> run_semigroup_check(const Context& c) {
    Params p(c.block("semigroup-check"), "semigroup-check",
             json{{"shift", 0.3}, {"center", 0.0}, {"width", 1.0}, {"levels", 4}});
    Recorder r{c.experiment, {}};
    const auto sc = c.scale();
    const auto w = c.weight();
    const auto g = c.grid();
    const double s = p.num("shift");
    const double center = p.num("center"), width = p.num("width");
    const auto v = detail::gaussian(g, center, width);

    const auto id = apply_shift(v, 0.0);
    double id_gap = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) id_gap = std::max(id_gap, std::abs(id.values[i] - v.values[i]));
    r.check("identity_exact", id_gap, 0.0, id_gap == 0.0);

    const double h = g.h();
    const double a1 = std::max(1.0, std::round(s / h)) * h;
    const double a2 = 2.0 * a1;
    const auto comp = apply_shift(apply_shift(v, a1), a2);
    const auto direct = apply_shift(v, a1 + a2);
    r.at_most("composition_aligned", sup_norm(combine(1.0, comp, -1.0, direct).values) / sup_norm(v.values),
              1e-14);

    // Refinement at a fixed ratio s/h keeps the interpolation offset constant.
    detail::CsvWriter csv(c.path("composition.csv"), "h,error");
    std::vector<double> hs, errs;
    double isometry = 0.0;
    for (long lvl = 0; lvl < p.integer("levels"); ++lvl) {
        const std::size_t n = (g.size() - 1) * (std::size_t{1} << lvl) + 1;
        OperationalGrid gl(g.x_min(), g.x_max(), n);
        const auto vl = detail::gaussian(gl, center, width);
        const auto e = combine(1.0, apply_shift(apply_shift(vl, s), s), -1.0, apply_shift(vl, 2.0 * s));
        hs.push_back(gl.h());
        errs.push_back(sup_norm(e.values));
        csv.row(gl.h(), errs.back());
        const double l2 = l2_norm(vl);
        isometry = std::abs(l2_norm(apply_shift(vl, s)) - l2) / l2;
    }
    csv.out.close();
    detail::try_plot(c, "composition.csv", "h", "error", true);
    r.at_least("composition_order", fit_order(hs, errs), 3.5);
    r.at_most("isometry", isometry, 1e-9, "finest refinement level, h = " + format_double(hs.back()));

    auto u = [&](double t) {
        const double x = sc.forward(t);
        const double z = (x - center) / width;
        return std::exp(-0.5 * z * z - w.log_at_operational(x));
    };
    r.at_most("similarity_aligned", similarity_residual(u, sc, w, a1, g), 1e-10);
    return r.checks;
}

inline std::vector<CheckRecord> run_generator_check(const Context& c) {
    Params p(c.block("generator-check"), "generator-check",
             json{{"shifts", json::array({0.1, 0.05, 0.025, 0.0125})}, {"center", 0.0}, {"width", 1.0}});
    Recorder r{c.experiment, {}};
    const auto sc = c.scale();
    const auto w = c.weight();
    const auto g = c.grid();
    const double center = p.num("center"), width = p.num("width");
    const auto v = detail::gaussian(g, center, width);
    const auto shifts = p.nums("shifts");
    const auto res = generator_fd_residual(v, shifts);
    detail::CsvWriter csv(c.path("generator.csv"), "s,residual");
    std::vector<double> ss, rs;
    for (const auto& e : res) {
        csv.row(e.s, e.residual);
        ss.push_back(e.s);
        rs.push_back(e.residual);
    }
    csv.out.close();
    detail::try_plot(c, "generator.csv", "s", "residual", true);
    const double order = fit_order(ss, rs);
    r.check("difference_quotient_order", order, 1.0, order >= 0.9 && order <= 1.1, "accepted band [0.9, 1.1]");

    // Physical generator of u = v(psi)/omega, transmuted back.
    auto vf = [&](double x) { const double z = (x - center) / width; return std::exp(-0.5 * z * z); };
    auto dvf = [&](double x) { return -(x - center) / (width * width) * vf(x); };
    auto u = [&](double t) { return vf(sc.forward(t)) / w.value(t); };
    auto du = [&](double t) {
        const double x = sc.forward(t), om = w.value(t);
        return (dvf(x) * sc.derivative(t) * om - vf(x) * w.derivative(t)) / (om * om);
    };
    const auto A = physical_generator(u, du, sc, w);
    std::vector<double> analytic(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double t = sc.inverse(g.x(i));
        analytic[i] = w.value(t) * A(t);
    }
    const auto spectral = generator_apply(v, is_power_of_two(g.size()) ? DiffMethod::spectral : DiffMethod::fd4);
    std::vector<double> diff(g.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = analytic[i] - spectral.values[i];
    r.at_most("analytic_vs_discrete", l2_norm(diff, g.h()) / l2_norm(analytic, g.h()), 1e-6);
    return r.checks;
}

namespace detail {

struct SymbolErrors {
    double integral = 0.0, weyl = 0.0, marchaud = 0.0;
};

}  // namespace detail

inline std::vector<CheckRecord> run_operators_check(const Context& c) {
    Params p(c.block("operators-check"), "operators-check",
             json{{"center", -10.0}, {"threshold", 1e-2}, {"mode_floor", 1e-8}});
    Recorder r{c.experiment, {}};
    const auto pair = c.pair();
    const auto g = c.grid();
    if (!is_power_of_two(g.size())) throw ValidationError("operators-check needs a power-of-two grid.n");
    const double c0 = p.num("center");
    const auto v = GridFunction::sample(g, [&](double x) { return (x - c0) * std::exp(-0.5 * (x - c0) * (x - c0)); });
    const auto qk = build_quadrature(pair.kappa, g.h(), g.size());
    const auto qd = build_quadrature(pair.k, g.h(), g.size());
    const auto I = fractional_integral(v, pair, qk);
    const auto W = weyl_derivative(v, pair.k, qd);
    const bool has_marchaud = pair.k.tail_integrable;
    const auto M = has_marchaud ? marchaud_derivative(v, pair.k, TailPolicy::fixed_cutoff(INFINITY)) : v;

    RealFft fft(g.size());
    const auto vh = fft.forward(v.values);
    const auto Ih = fft.forward(I.values), Wh = fft.forward(W.values), Mh = fft.forward(M.values);
    const auto xi = half_spectrum_frequencies(g.size(), g.h());
    double peak = 0.0;
    for (const auto& z : vh) peak = std::max(peak, std::abs(z));
    detail::SymbolErrors worst;
    detail::CsvWriter csv(c.path("symbols.csv"), "xi,integral_err,weyl_err,marchaud_err");
    for (std::size_t k = 1; k < vh.size(); ++k) {
        if (std::abs(vh[k]) <= p.num("mode_floor") * peak) continue;
        auto rel = [&](Complex est, Complex exact) { return std::abs(est / vh[k] - exact) / std::abs(exact); };
        const double ei = rel(Ih[k], integral_symbol(pair.kappa, xi[k]));
        const double ew = rel(Wh[k], weyl_symbol(pair.k, xi[k]));
        const double em = has_marchaud ? rel(Mh[k], marchaud_symbol(pair.k, xi[k])) : 0.0;
        worst.integral = std::max(worst.integral, ei);
        worst.weyl = std::max(worst.weyl, ew);
        worst.marchaud = std::max(worst.marchaud, em);
        csv.row(xi[k], ei, ew, em);
    }
    csv.out.close();
    detail::try_plot(c, "symbols.csv", "xi", "integral_err", true);
    const double th = p.num("threshold");
    r.at_most("integral_symbol", worst.integral, th);
    r.at_most("weyl_symbol", worst.weyl, th);
    if (has_marchaud) r.at_most("marchaud_symbol", worst.marchaud, th);
    else r.report("marchaud_symbol", NAN, "kernel not tail-integrable; Marchaud symbol undefined");
    return r.checks;
}

inline std::vector<CheckRecord> run_equivalence(const Context& c) {
    Params p(c.block("equivalence"), "equivalence",
             json{{"xi", json::array({0.0, 0.5, 1.0, 2.0, 4.0})}, {"center", 0.0}, {"width", 1.0},
                  {"tail_cutoff", INFINITY}});
    Recorder r{c.experiment, {}};
    const auto pair = c.pair();
    const auto g = c.grid();
    const auto v = detail::gaussian(g, p.num("center"), p.num("width"));
    const auto qk = build_quadrature(pair.kappa, g.h(), g.size());
    const auto xi = p.nums("xi");
    const auto rep = equivalence_discrepancy(v, pair, TailPolicy::fixed_cutoff(p.num("tail_cutoff")), qk, xi);
    write_csv(rep, c.path("equivalence.csv"));
    r.report("l2_rel", rep.l2_rel);
    r.report("linf_rel", rep.linf_rel);
    for (const auto& s : rep.symbol_gap) r.report("symbol_gap_xi=" + format_double(s.xi), s.gap);
    return r.checks;
}

inline std::vector<CheckRecord> run_neutralization(const Context& c) {
    Params p(c.block("neutralization"), "neutralization",
             json{{"s_min", 15.0}, {"s_max", 45.0}, {"samples", 31}, {"eps_tail", 1e-8}});
    Recorder r{c.experiment, {}};
    const auto pair = c.pair();
    const auto sc = c.scale();
    const auto w = c.weight();
    const auto g = c.grid();
    const double beta = w.past_decay_rate();
    const double alpha_g = pair.k.growth_rate;
    try {
        const auto policy = TailPolicy::weighted_auto(p.num("eps_tail"), beta, alpha_g);
        r.report("tail_cutoff", policy.cutoff());
    } catch (const PolicyError& e) {
        r.check("policy_refuses", 2.0 * beta - alpha_g, 0.0, true, e.what());
        return r.checks;
    }
    const auto v = GridFunction::sample(
        g, [&](double x) { return std::exp(2.0 * beta * x) / (1.0 + std::exp((2.0 * beta + 1.0) * x)); });
    std::vector<double> s;
    const long m = p.integer("samples");
    if (m < 2) throw ValidationError("neutralization.samples must be >= 2");
    for (long i = 0; i < m; ++i)
        s.push_back(p.num("s_min") + (p.num("s_max") - p.num("s_min")) * static_cast<double>(i) / static_cast<double>(m - 1));
    const auto tp = tail_profile(v, pair.k, sc, w, s);
    write_csv(tp, c.path("tail_profile.csv"));
    detail::try_plot(c, "tail_profile.csv", "s", "g", true);
    r.at_least("tail_decay_rate", tp.rate, 0.9 * tp.predicted_rate,
               "predicted 2*beta - alpha_g = " + format_double(tp.predicted_rate));
    return r.checks;
}

inline std::vector<CheckRecord> run_inversion(const Context& c) {
    Params p(c.block("inversion"), "inversion",
             json{{"alphas", json::array()}, {"levels", 3}, {"center", 0.0}, {"width", 1.0},
                  {"threshold", 1e-3}, {"min_order", 1.0}});
    Recorder r{c.experiment, {}};
    const auto g = c.grid();
    auto alphas = p.nums("alphas");
    if (alphas.empty()) alphas.push_back(c.pair().order);
    const long levels = p.integer("levels");
    if (levels < 2) throw ValidationError("inversion.levels must be >= 2");
    detail::CsvWriter csv(c.path("inversion.csv"), "alpha,n,h,residual");
    for (double a : alphas) {
        const auto pair = c.pair_with_alpha(a);
        std::vector<double> hs, res;
        for (long l = levels - 1; l >= 0; --l) {
            const std::size_t n = g.size() >> l;
            OperationalGrid gl(g.x_min(), g.x_max(), n);
            const auto v = detail::gaussian(gl, p.num("center"), p.num("width"));
            const double e = inversion_residual(v, pair, build_quadrature(pair.kappa, gl.h(), n),
                                                build_quadrature(pair.k, gl.h(), n));
            hs.push_back(gl.h());
            res.push_back(e);
            csv.row(a, static_cast<double>(n), gl.h(), e);
        }
        const std::string tag = "alpha=" + format_double(a);
        r.at_most("inversion_residual_" + tag, res.back(), p.num("threshold"));
        r.at_least("inversion_order_" + tag, fit_order(hs, res), p.num("min_order"));
    }
    csv.out.close();
    detail::try_plot(c, "inversion.csv", "h", "residual", true);
    return r.checks;
}

namespace detail {

inline json evolve_defaults() {
    return json{{"dt", 1e-3},          {"horizon", 1.0},  {"sign", -1},
                {"form", "marchaud"}, {"solver", "both"}, {"allow_expansive", false},
                {"growth_cap", kDefaultGrowthCap}, {"center", 0.0}, {"width", 1.0},
                {"snapshot_every", 0}};
}

inline CauchyProblem make_problem(const Context& c, const Params& p) {
    const auto g = c.grid();
    const long sign = p.integer("sign");
    const long every = p.integer("snapshot_every");
    if (every < 0) throw ValidationError("snapshot_every must be >= 0");
    CauchyProblem prob{c.pair(), c.scale(), c.weight(), gaussian(g, p.num("center"), p.num("width")),
                       {}, p.num("horizon"), p.num("dt"), static_cast<int>(sign),
                       parse_operator_form(p.str("form"))};
    prob.allow_expansive = p.flag("allow_expansive");
    prob.growth_cap = p.num("growth_cap");
    prob.snapshot_every = static_cast<std::size_t>(every);
    prob.validate();
    return prob;
}

inline void range_of(const GridFunction& v, double& lo, double& hi) {
    lo = *std::min_element(v.values.begin(), v.values.end());
    hi = *std::max_element(v.values.begin(), v.values.end());
}

}  // namespace detail

inline std::vector<CheckRecord> run_evolve(const Context& c) {
    Params p(c.block("evolve"), "evolve", detail::evolve_defaults());
    Recorder r{c.experiment, {}};
    const auto prob = detail::make_problem(c, p);
    const std::string solver = p.str("solver");
    if (solver != "spectral" && solver != "mol" && solver != "both")
        throw ValidationError("evolve.solver must be spectral, mol or both");
    const bool diffusive = prob.pair.regime == Regime::diffusive;
    const double l2_0 = l2_norm(prob.u0);

    auto examine = [&](const EvolutionTrace& t, const std::string& tag) {
        write_trace_csv(t, c.path("trace_" + tag + ".csv"));
        write_snapshots(t, c.out_dir.string(), "snapshot_" + tag);
        detail::try_plot(c, "trace_" + tag + ".csv", "tau", "l2", false);
        if (t.aborted) {
            r.check(tag + "_completed", t.times.back(), prob.horizon, false, t.reason);
            return;
        }
        r.check(tag + "_completed", t.times.back(), prob.horizon, true);
        double rise = 0.0;
        for (std::size_t i = 1; i < t.l2_norms.size(); ++i) rise = std::max(rise, t.l2_norms[i] - t.l2_norms[i - 1]);
        if (prob.sign < 0 && diffusive) r.at_most(tag + "_l2_rise", rise / l2_0, 1e-10);
        else r.report(tag + "_l2_rise", rise / l2_0, "no contraction claim for this configuration");
        double lo = 0.0, hi = 0.0;
        detail::range_of(t.final_state(), lo, hi);
        const double ratio = hi > 0.0 ? lo / hi : 0.0;
        if (prob.sign < 0 && diffusive) r.at_least(tag + "_min_over_max", ratio, -1e-6);
        else r.report(tag + "_min_over_max", ratio);
        if (tag == "spectral" && prob.form == OperatorForm::marchaud && !prob.forcing) {
            double m0 = 0.0, m1 = 0.0;
            for (double x : prob.u0.values) m0 += x;
            for (double x : t.final_state().values) m1 += x;
            r.at_most("spectral_zero_mode", std::abs(m1 - m0) / std::abs(m0), 1e-10);
        }
    };

    std::optional<EvolutionTrace> spec, mol;
    if (solver != "mol") {
        spec = spectral_evolve(prob);
        examine(*spec, "spectral");
    }
    if (solver != "spectral") {
        mol = mol_evolve(prob);
        examine(*mol, "mol");
    }
    if (spec && mol && !spec->aborted && !mol->aborted) {
        const auto d = combine(1.0, spec->final_state(), -1.0, mol->final_state());
        r.at_most("spectral_vs_mol", l2_norm(d) / l2_norm(spec->final_state()), 5e-2);
    }
    return r.checks;
}

inline double extremal_embedding_ratio(double smoothing = 0.01) {
    const std::size_t n = std::size_t{1} << 16;
    OperationalGrid g(-32.0, 32.0, n);
    const auto v = GridFunction::sample(g, [&](double x) { return std::exp(-std::sqrt(x * x + smoothing * smoothing)); });
    const auto nr = norms(v);
    return nr.sup_weighted / nr.h1;
}

inline std::vector<CheckRecord> run_envelope(const Context& c) {
    auto defaults = detail::evolve_defaults();
    defaults["solver"] = "spectral";
    defaults["horizon"] = 5.0;
    defaults["dt"] = 1e-2;
    Params p(c.block("envelope"), "envelope", defaults);
    Recorder r{c.experiment, {}};
    const auto prob = detail::make_problem(c, p);
    const auto trace = p.str("solver") == "mol" ? mol_evolve(prob) : spectral_evolve(prob);
    write_trace_csv(trace, c.path("trace.csv"));
    detail::try_plot(c, "trace.csv", "tau", "sup_weighted", false);
    const double h1_0 = norms(prob.u0).h1;
    const auto env = decay_envelope_check(trace, h1_0);
    r.at_most("embedding_ratio_max", env.worst_ratio, 1.0 + 1e-6,
              std::to_string(env.violations.size()) + " violations");
    if (prob.sign < 0 && prob.pair.regime == Regime::diffusive)
        r.check("h1_nonincreasing", env.worst_h1_excess, 0.0, env.h1_contracted);
    else
        r.report("h1_excess", env.worst_h1_excess);
    const double ratio = extremal_embedding_ratio();
    r.at_most("extremal_probe_rel_gap", std::abs(ratio / kEmbeddingConstant - 1.0), 0.02);
    return r.checks;
}

// ------------------------------------------------------------------ registry --

struct ExperimentInfo {
    std::string name;
    std::string blocks;
    std::string property;
    std::function<std::vector<CheckRecord>(const Context&)> run;
};

inline const std::vector<ExperimentInfo>& experiments() {
    static const std::vector<ExperimentInfo> all{
        {"sonine-check", "kernel", "Sonine condition: k * kappa = 1 on (0, t_max]", run_sonine_check},
        {"semigroup-check", "scale weight grid", "shift semigroup: identity, composition, isometry, similarity",
         run_semigroup_check},
        {"generator-check", "scale weight grid", "generator: difference quotient -> -(omega u)'/(omega psi')",
         run_generator_check},
        {"operators-check", "kernel grid", "operator symbols: kappa^, i xi k^, k^(0) - k^(i xi)", run_operators_check},
        {"equivalence", "kernel grid", "Marchaud(k) vs Weyl(kappa) equivalence gap (diagnostic only)",
         run_equivalence},
        {"neutralization", "kernel scale weight grid",
         "memory-kernel neutralization: tail decays at rate >= 2*beta - alpha_g", run_neutralization},
        {"inversion", "kernel grid", "fundamental inversion: D^k I^kappa v = v", run_inversion},
        {"evolve", "kernel scale weight grid", "fractional Cauchy problem: spectral vs method of lines",
         run_evolve},
        {"envelope", "kernel scale weight grid", "pointwise envelope: sup|v| <= 2^{-1/2} ||v||_{H^1}",
         run_envelope},
    };
    return all;
}

inline const ExperimentInfo& find_experiment(const std::string& name) {
    for (const auto& e : experiments())
        if (e.name == name) return e;
    throw ConfigurationError("unknown experiment '" + name + "'");
}

inline std::string list_experiments() {
    std::ostringstream o;
    o << std::left;
    o << "experiment        blocks                    property tested\n";
    for (const auto& e : experiments()) {
        std::string name = e.name, blocks = e.blocks;
        name.resize(18, ' ');
        blocks.resize(26, ' ');
        o << name << blocks << e.property << '\n';
    }
    return o.str();
}

inline void write_summary(const RunSummary& s, const std::string& path) {
    detail::CsvWriter csv(path, "experiment,check,status,metric,threshold,note");
    for (const auto& c : s.checks)
        csv.row(c.experiment, c.name, std::string(to_string(c.status)), c.metric, c.threshold, c.note);
}

struct RunOptions {
    std::string output_dir;  // empty: SONINE_OUTPUT_DIR, then the config value
    std::ostream* log = nullptr;
};

/// Validates the whole config, then runs the experiments concurrently, each
/// into <output_dir>/<experiment>/. Errors inside an experiment become a
/// failed "error" check carrying the message.
inline RunSummary run_config(const json& cfg, const RunOptions& opt = {}) {
    if (!cfg.is_object()) throw ConfigurationError("config root must be a table");
    static const std::set<std::string> shared{"experiment", "output_dir", "seed", "scale", "weight", "kernel", "grid"};
    std::vector<std::string> names;
    if (!cfg.contains("experiment")) throw ConfigurationError("config needs 'experiment'");
    const auto& e = cfg["experiment"];
    if (e.is_string()) names.push_back(e.get<std::string>());
    else if (e.is_array()) {
        for (const auto& x : e) {
            if (!x.is_string()) throw ConfigurationError("experiment: expected names");
            names.push_back(x.get<std::string>());
        }
    } else throw ConfigurationError("experiment: expected a name or an array of names");
    if (names.empty()) throw ConfigurationError("experiment list is empty");
    for (const auto& n : names) find_experiment(n);
    for (const auto& [k, v] : cfg.items()) {
        if (shared.count(k)) continue;
        bool known = false;
        for (const auto& x : experiments()) known = known || x.name == k;
        if (!known) throw ConfigurationError("unknown top-level key '" + k + "'");
        if (std::find(names.begin(), names.end(), k) == names.end())
            throw ConfigurationError("table [" + k + "] given but experiment '" + k + "' is not selected");
    }
    for (const auto& k : {"scale", "weight", "kernel", "grid"})
        if (cfg.contains(k) && !cfg[k].is_object()) throw ConfigurationError(std::string(k) + " must be a table");
    {
        std::set<std::string> seen;
        for (const auto& n : names)
            if (!seen.insert(n).second) throw ConfigurationError("experiment '" + n + "' listed twice");
    }

    std::string out = "sonine-out";
    if (cfg.contains("output_dir")) {
        if (!cfg["output_dir"].is_string()) throw ConfigurationError("output_dir: expected a string");
        out = cfg["output_dir"].get<std::string>();
    }
    if (const char* env = std::getenv("SONINE_OUTPUT_DIR"); env && *env) out = env;
    if (!opt.output_dir.empty()) out = opt.output_dir;
    std::uint64_t seed = 0;
    if (cfg.contains("seed")) {
        if (!cfg["seed"].is_number_integer() || cfg["seed"].get<long long>() < 0)
            throw ConfigurationError("seed: expected a nonnegative integer");
        seed = cfg["seed"].get<std::uint64_t>();
    }

    std::vector<std::future<std::vector<CheckRecord>>> jobs;
    for (const auto& n : names) {
        Context ctx{n, cfg, std::filesystem::path(out) / n, seed};
        std::filesystem::create_directories(ctx.out_dir);
        jobs.push_back(std::async(std::launch::async, [ctx]() -> std::vector<CheckRecord> {
            try {
                return find_experiment(ctx.experiment).run(ctx);
            } catch (const std::exception& ex) {
                return {{ctx.experiment, "error", Status::fail, NAN, NAN, ex.what()}};
            }
        }));
    }
    RunSummary summary;
    for (auto& j : jobs) {
        auto recs = j.get();
        summary.checks.insert(summary.checks.end(), recs.begin(), recs.end());
    }
    std::filesystem::create_directories(out);
    write_summary(summary, (std::filesystem::path(out) / "summary.csv").string());
    if (opt.log)
        for (const auto& c : summary.checks)
            *opt.log << c.experiment << ' ' << c.name << ' ' << to_string(c.status) << ' '
                     << format_double(c.metric) << (c.note.empty() ? "" : "  " + c.note) << '\n';
    return summary;
}

}  // namespace sonine::cli

#endif  // SONINE_CLI_EXPERIMENTS_HPP
