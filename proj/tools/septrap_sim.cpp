// Command-line front end: runs scenario configs or built-in presets and
// writes the report and CSV artifacts. Exit codes: 0 success, 2 config
// error, 3 physics error.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "septrap/config.hpp"
#include "septrap/presets.hpp"
#include "septrap/scenario.hpp"

namespace fs = std::filesystem;

namespace {

int execute(septrap::ScenarioConfig config, const std::string& out_dir,
            const std::string& mode_override) {
    if (!mode_override.empty()) config.mode = mode_override;
    const auto result = septrap::run_scenario(config);

    fs::create_directories(out_dir);
    const fs::path report_path = fs::path(out_dir) / (config.scenario + "-report.txt");
    std::ofstream(report_path) << result.report;
    if (!result.csv.empty()) {
        const fs::path csv_path = fs::path(out_dir) / result.csv_filename;
        std::ofstream(csv_path) << result.csv;
        std::cout << "wrote " << csv_path.string() << "\n";
    }
    std::cout << "wrote " << report_path.string() << "\n\n" << result.report;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"separated-trap ion qubit simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", mode_override, preset_name;
    bool dump = false;

    auto* run = app.add_subcommand("run", "run a scenario config file");
    run->add_option("--config", config_path, "path to a scenario config")->required();
    run->add_option("--out", out_dir, "output directory (default: .)");
    run->add_option("--mode", mode_override, "override mode: closed-form | full-numeric")
        ->check(CLI::IsMember({"closed-form", "full-numeric"}));

    auto* preset = app.add_subcommand("preset", "run one of the built-in presets");
    preset->add_option("name", preset_name, "preset name (see list-presets)")->required();
    preset->add_option("--out", out_dir, "output directory (default: .)");
    preset->add_flag("--dump", dump, "print the preset config instead of running it");

    auto* list = app.add_subcommand("list-presets", "list the built-in presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        if (list->parsed()) {
            for (const auto& [name, text] : septrap::preset_configs())
                std::cout << name << "\n";
            return 0;
        }
        if (preset->parsed()) {
            const auto& presets = septrap::preset_configs();
            const auto it = presets.find(preset_name);
            if (it == presets.end()) {
                std::cerr << "config error: unknown preset '" << preset_name << "'\n";
                return 2;
            }
            if (dump) {
                std::cout << it->second;
                return 0;
            }
            septrap::ScenarioConfig config = septrap::parse_config(it->second);
            septrap::validate_config(config);
            return execute(std::move(config), out_dir, mode_override);
        }
        return execute(septrap::load_config_file(config_path), out_dir, mode_override);
    } catch (const septrap::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const septrap::SimulationError& e) {
        std::cerr << "physics error: " << e.what() << "\n";
        return 3;
    }
}
