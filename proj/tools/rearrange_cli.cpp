#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rearr/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"finite truncations of multi-index rearrangements with prescribed iterated sums"};

    std::string config_path;
    std::string out_dir = ".";
    std::string command;
    std::optional<double> tolerance;
    std::uint64_t seed = 0;  // reserved; the pipeline is deterministic

    app.add_option("--config", config_path, "JSON configuration file")->required();
    app.add_option("--command", command, "build | verify | split | fubini")->required();
    app.add_option("--out", out_dir, "output directory for CSV artifacts");
    app.add_option("--tolerance", tolerance, "override the verification tolerance");
    app.add_option("--seed", seed, "reserved (unused)");

    CLI11_PARSE(app, argc, argv);

    try {
        rearr::RunConfig config = rearr::parse_config_file(config_path);
        return rearr::run(config, command, out_dir, tolerance);
    } catch (const rearr::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return rearr::kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return rearr::kExitInternal;
    }
}
