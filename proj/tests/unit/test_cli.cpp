#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sonine/cli/config.hpp"
#include "sonine/cli/experiments.hpp"
#include "sonine/cli/plot.hpp"

using namespace sonine;
using namespace sonine::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("sonine_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t parse_error_line(const std::string& text) {
    try {
        parse_config(text, "t.toml");
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

int run_tool(const std::string& args, const fs::path& cwd) {
    const std::string cmd = "cd '" + cwd.string() + "' && '" SONINE_CLI_PATH "' " + args + " > out.txt 2> err.txt";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

const CheckRecord& find_check(const RunSummary& s, const std::string& name) {
    for (const auto& c : s.checks)
        if (c.name == name) return c;
    throw std::runtime_error("no check " + name);
}

}  // namespace

TEST(Config, ParsesSubset) {
    const auto j = parse_config(R"(# comment
experiment = ["a", "b",
              "c"]   # trailing
seed = 42
[grid]
x_min = -2.5e1
n = 1_024
[kernel]
pair = "bessel\t"
flag = true
big = inf
neg = -inf
[a.b]
c = 1.0
x.y = 2
)");
    EXPECT_EQ(j["experiment"].size(), 3u);
    EXPECT_EQ(j["seed"].get<int>(), 42);
    EXPECT_TRUE(j["seed"].is_number_integer());
    EXPECT_EQ(j["grid"]["x_min"].get<double>(), -25.0);
    EXPECT_EQ(j["grid"]["n"].get<int>(), 1024);
    EXPECT_EQ(j["kernel"]["pair"].get<std::string>(), "bessel\t");
    EXPECT_TRUE(j["kernel"]["flag"].get<bool>());
    EXPECT_TRUE(std::isinf(j["kernel"]["big"].get<double>()));
    EXPECT_LT(j["kernel"]["neg"].get<double>(), 0.0);
    EXPECT_EQ(j["a"]["b"]["x"]["y"].get<int>(), 2);
}

TEST(Config, ErrorsCarryLineNumbers) {
    EXPECT_EQ(parse_error_line("a = 1\nb = 2\na = 3\n"), 3u);
    EXPECT_EQ(parse_error_line("a = 1\n\nb = \"open\n"), 3u);
    EXPECT_EQ(parse_error_line("[t]\nx = 1\n[t]\n"), 3u);
    EXPECT_EQ(parse_error_line("[[t]]\n"), 1u);
    EXPECT_EQ(parse_error_line("a = 1\nb = 1.2.3\n"), 2u);
    EXPECT_EQ(parse_error_line("a = 1 2\n"), 1u);
    EXPECT_EQ(parse_error_line("a = [1,\n 2,\n oops]\n"), 3u);
    EXPECT_EQ(parse_error_line("= 1\n"), 1u);
    try {
        parse_config("x = @\n", "cfg.toml");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("cfg.toml:1"), std::string::npos) << e.what();
    }
    EXPECT_THROW(load_config("/nonexistent/file.toml"), ConfigurationError);
}

TEST(Run, UnknownKeysAreRejected) {
    const auto dir = scratch("unknown");
    RunOptions opt{dir.string(), nullptr};
    EXPECT_THROW(run_config(parse_config("experiment = \"sonine-check\"\nbogus = 1\n[kernel]\npair = \"power_law\"\n"), opt),
                 ConfigurationError);
    EXPECT_THROW(run_config(parse_config("experiment = \"nope\"\n"), opt), ConfigurationError);
    EXPECT_THROW(run_config(parse_config("experiment = \"sonine-check\"\n[inversion]\nlevels = 2\n"), opt),
                 ConfigurationError);
    const auto s = run_config(parse_config("experiment = \"sonine-check\"\n[kernel]\npair = \"power_law\"\n"
                                           "[sonine-check]\nsamplez = 3\n"),
                              opt);
    ASSERT_EQ(s.checks.size(), 1u);
    EXPECT_EQ(s.checks[0].name, "error");
    EXPECT_EQ(s.checks[0].status, Status::fail);
    EXPECT_NE(s.checks[0].note.find("samplez"), std::string::npos) << s.checks[0].note;
    const auto v = run_config(parse_config("experiment = \"sonine-check\"\n[kernel]\npair = \"power_law\"\nalpha = 1.5\n"), opt);
    EXPECT_NE(v.checks[0].note.find("alpha"), std::string::npos) << v.checks[0].note;
    fs::remove_all(dir);
}

TEST(Run, SonineCheckSummaryRow) {
    const auto dir = scratch("sonine");
    const auto s = run_config(load_config(SONINE_CONFIG_DIR "/sonine_check.toml"), {dir.string(), nullptr});
    const auto& c = find_check(s, "sonine_residual_max");
    EXPECT_EQ(c.status, Status::pass);
    EXPECT_EQ(c.threshold, 1e-6);
    EXPECT_LE(c.metric, 1e-6);
    EXPECT_EQ(s.fail_count(), 0);
    const auto summary = slurp(dir / "summary.csv");
    EXPECT_EQ(summary.rfind("experiment,check,status,metric,threshold,note\n", 0), 0u);
    EXPECT_NE(summary.find("sonine-check,sonine_residual_max,pass,"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "sonine-check" / "sonine.csv"));
    EXPECT_TRUE(fs::exists(dir / "sonine-check" / "sonine_residual.svg"));
    fs::remove_all(dir);
}

TEST(Run, EquivalenceIsOnlyReported) {
    const auto dir = scratch("equiv");
    const auto s = run_config(parse_config(R"(experiment = "equivalence"
[kernel]
pair = "tempered_power_law"
alpha = 0.5
lambda = 1.0
[grid]
n = 512
)"),
                              {dir.string(), nullptr});
    ASSERT_FALSE(s.checks.empty());
    for (const auto& c : s.checks) EXPECT_EQ(c.status, Status::reported) << c.name;
    EXPECT_NEAR(find_check(s, "symbol_gap_xi=1").metric, 0.8856589100591039, 1e-13);
    EXPECT_EQ(s.fail_count(), 0);
    fs::remove_all(dir);
}

TEST(Run, ExpansiveRunTripsGrowthGuard) {
    const auto dir = scratch("expansive");
    const auto s = run_config(parse_config(R"(experiment = "evolve"
[kernel]
pair = "tempered_power_law"
[grid]
n = 256
[evolve]
sign = 1
allow_expansive = true
dt = 0.5
horizon = 200.0
solver = "spectral"
)"),
                              {dir.string(), nullptr});
    const auto& c = find_check(s, "spectral_completed");
    EXPECT_EQ(c.status, Status::fail);
    EXPECT_NE(c.note.find("growth guard"), std::string::npos);
    EXPECT_EQ(s.fail_count(), 1);
    const auto refused = run_config(parse_config("experiment = \"evolve\"\n[kernel]\npair = \"tempered_power_law\"\n"
                                                 "[evolve]\nsign = 1\n"),
                                    {dir.string(), nullptr});
    EXPECT_EQ(refused.checks[0].name, "error");
    EXPECT_NE(refused.checks[0].note.find("allow_expansive"), std::string::npos);
    fs::remove_all(dir);
}

TEST(Run, NeutralizationRefusesWeakWeight) {
    const auto dir = scratch("neutral");
    const auto s = run_config(parse_config(R"(experiment = "neutralization"
[kernel]
pair = "bessel"
[weight]
family = "exp_operational"
beta = 0.2
)"),
                              {dir.string(), nullptr});
    EXPECT_EQ(find_check(s, "policy_refuses").status, Status::pass);
    fs::remove_all(dir);
}

TEST(Run, DeterministicForEqualSeeds) {
    const auto a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
    const std::string text = R"(experiment = ["sonine-check", "evolve"]
seed = 99
[kernel]
pair = "tempered_power_law"
[grid]
n = 256
[evolve]
dt = 0.05
horizon = 0.5
)";
    run_config(parse_config(text), {a.string(), nullptr});
    run_config(parse_config(text), {b.string(), nullptr});
    std::string other = text;
    other.replace(other.find("99"), 2, "98");
    run_config(parse_config(other), {c.string(), nullptr});
    std::size_t compared = 0;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (e.path().extension() != ".csv") continue;
        const auto rel = fs::relative(e.path(), a);
        EXPECT_EQ(slurp(e.path()), slurp(b / rel)) << rel;
        ++compared;
    }
    EXPECT_GE(compared, 5u);
    EXPECT_NE(slurp(a / "sonine-check" / "sonine.csv"), slurp(c / "sonine-check" / "sonine.csv"));
    for (const auto& d : {a, b, c}) fs::remove_all(d);
}

TEST(Run, OutputDirectoryPrecedence) {
    const auto base = scratch("precedence");
    const auto cfg = parse_config("experiment = \"sonine-check\"\noutput_dir = \"" + (base / "cfg").string() +
                                  "\"\n[kernel]\npair = \"power_law\"\n[sonine-check]\nsamples = 2\n");
    run_config(cfg);
    EXPECT_TRUE(fs::exists(base / "cfg" / "summary.csv"));
    ::setenv("SONINE_OUTPUT_DIR", (base / "env").c_str(), 1);
    run_config(cfg);
    EXPECT_TRUE(fs::exists(base / "env" / "summary.csv"));
    run_config(cfg, {(base / "opt").string(), nullptr});
    EXPECT_TRUE(fs::exists(base / "opt" / "summary.csv"));
    ::unsetenv("SONINE_OUTPUT_DIR");
    fs::remove_all(base);
}

TEST(List, DescribesEachExperiment) {
    const auto text = list_experiments();
    for (const char* name : {"sonine-check", "semigroup-check", "generator-check", "operators-check", "equivalence",
                             "neutralization", "inversion", "evolve", "envelope"})
        EXPECT_NE(text.find(name), std::string::npos) << name;
    auto row = [&](const std::string& name) {
        const auto at = text.find("\n" + name);
        return text.substr(at + 1, text.find('\n', at + 1) - at - 1);
    };
    EXPECT_NE(row("neutralization").find("2*beta - alpha_g"), std::string::npos);
    EXPECT_NE(row("inversion").find("inversion"), std::string::npos);
    EXPECT_NE(row("envelope").find("2^{-1/2}"), std::string::npos);
}

TEST(Plot, CsvReading) {
    const auto dir = scratch("csv");
    {
        std::ofstream(dir / "q.csv") << "a,\"b,c\"\n1,\"x \"\"y\"\"\"\n";
    }
    const auto t = read_csv((dir / "q.csv").string());
    EXPECT_EQ(t.header[1], "b,c");
    EXPECT_EQ(t.rows[0][1], "x \"y\"");
    EXPECT_THROW(t.numeric("b,c"), DataError);
    EXPECT_THROW(t.index("zz"), DataError);
    {
        std::ofstream(dir / "bad.csv") << "a,b\n1\n";
    }
    EXPECT_THROW(read_csv((dir / "bad.csv").string()), DataError);
    fs::remove_all(dir);
}

TEST(Plot, EmptyCsvWritesNothing) {
    const auto dir = scratch("plot_empty");
    { std::ofstream(dir / "empty.csv"); }
    { std::ofstream(dir / "header.csv") << "s,g\n"; }
    { std::ofstream(dir / "nan.csv") << "s,g\n1,nan\n"; }
    for (const char* f : {"empty.csv", "header.csv", "nan.csv"}) {
        const auto svg = dir / (std::string(f) + ".svg");
        EXPECT_THROW(plot_csv((dir / f).string(), "s", "g", false, svg.string()), DataError) << f;
        EXPECT_FALSE(fs::exists(svg)) << f;
    }
    EXPECT_NE(run_tool("plot empty.csv --x s --y g -o e.svg", dir), 0);
    EXPECT_FALSE(fs::exists(dir / "e.svg"));
    fs::remove_all(dir);
}

TEST(Plot, TailProfileAnnotatesFittedRate) {
    const auto dir = scratch("plot_tail");
    {
        std::ofstream out(dir / "tail.csv");
        out << "s,g,fit\n";
        for (int i = 1; i <= 10; ++i) out << i << ',' << std::exp(-0.7 * i) * 1.01 << ',' << std::exp(-0.7 * i) << '\n';
    }
    plot_csv((dir / "tail.csv").string(), "s", "g", true, (dir / "tail.svg").string());
    const auto svg = slurp(dir / "tail.svg");
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("fitted rate 0.7"), std::string::npos);
    EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
    EXPECT_NE(svg.find("(log scale)"), std::string::npos);
    fs::remove_all(dir);
}

TEST(Tool, ExitStatusCountsFailures) {
    const auto dir = scratch("tool");
    EXPECT_EQ(run_tool("run '" SONINE_CONFIG_DIR "/sonine_check.toml' -q", dir), 0);
    EXPECT_TRUE(fs::exists(dir / "out" / "summary.csv"));
    EXPECT_EQ(run_tool("run '" SONINE_CONFIG_DIR "/expansive.toml' -o exp", dir), 1);
    EXPECT_NE(slurp(dir / "out.txt").find("growth guard"), std::string::npos);
    {
        std::ofstream(dir / "broken.toml") << "experiment = \"sonine-check\"\n[kernel\n";
    }
    EXPECT_EQ(run_tool("run broken.toml", dir), 126);
    EXPECT_NE(slurp(dir / "err.txt").find("broken.toml:2"), std::string::npos) << slurp(dir / "err.txt");
    EXPECT_EQ(run_tool("list", dir), 0);
    EXPECT_NE(slurp(dir / "out.txt").find("neutralization"), std::string::npos);
    EXPECT_NE(run_tool("frobnicate", dir), 0);
    fs::remove_all(dir);
}
