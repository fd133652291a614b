#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "sonine/cli/config.hpp"
#include "sonine/cli/experiments.hpp"
#include "sonine/cli/plot.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Sonine-kernel fractional calculus experiments"};
    app.require_subcommand(1);

    std::string config_path, output_dir;
    bool quiet = false;
    auto* run = app.add_subcommand("run", "Run the experiments named in a config file");
    run->add_option("config", config_path, "Config file (TOML subset)")->required();
    run->add_option("-o,--output-dir", output_dir, "Override the output directory");
    run->add_flag("-q,--quiet", quiet, "Do not print check lines");

    auto* list = app.add_subcommand("list", "List experiments");

    std::string csv_path, x_col, y_col, svg_path;
    bool logy = false;
    auto* plot = app.add_subcommand("plot", "Plot two columns of a CSV as SVG");
    plot->add_option("csv", csv_path, "Input CSV")->required();
    plot->add_option("--x", x_col, "Abscissa column")->required();
    plot->add_option("--y", y_col, "Ordinate column")->required();
    plot->add_flag("--logy", logy, "Logarithmic y axis");
    plot->add_option("-o,--output", svg_path, "Output SVG (default: <csv stem>_<y>.svg)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*list) {
            std::cout << sonine::cli::list_experiments();
            return 0;
        }
        if (*plot) {
            if (svg_path.empty()) {
                std::filesystem::path p(csv_path);
                svg_path = (p.parent_path() / (p.stem().string() + "_" + y_col + ".svg")).string();
            }
            sonine::cli::plot_csv(csv_path, x_col, y_col, logy, svg_path);
            std::cout << svg_path << '\n';
            return 0;
        }
        const auto cfg = sonine::cli::load_config(config_path);
        sonine::cli::RunOptions opt{output_dir, quiet ? nullptr : &std::cout};
        const auto summary = sonine::cli::run_config(cfg, opt);
        const int fails = summary.fail_count();
        if (!quiet) std::cout << fails << " failed check(s)\n";
        return std::min(fails, 125);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 126;
    }
}
