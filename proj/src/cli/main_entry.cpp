#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "eolink/cli.hpp"
#include "eolink/error.hpp"
#include "eolink/matcher.hpp"

namespace eolink::cli {

namespace {

std::string one_line(std::string s) {
    for (char& c : s)
        if (c == '\n' || c == '\r') c = ' ';
    return s;
}

int fail(int code, std::string_view kind, const std::string& message) {
    std::cerr << "eolink: error: " << kind << ": " << one_line(message) << '\n';
    return code;
}

}  // namespace

int main_entry(int argc, char** argv) {
    CLI::App app{"Cavity electro-optic transducer and photonic link toolkit", "eolink"};
    app.set_version_flag("--version", std::string(tool_version()));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    const std::map<std::string, std::string> help{
        {"efficiency", "transduction efficiency versus optical pump power"},
        {"spectra", "four-port scattering spectra and calibrated efficiency"},
        {"calibrate", "calibrated efficiency and bandwidth from a spectra CSV"},
        {"noise", "output noise spectra and mode occupancy"},
        {"match", "Vernier pair search and DC tuning voltages"},
        {"budget", "link-budget comparison table"},
        {"link", "cascaded microwave-optical-microwave response"},
        {"qpsk", "QPSK constellation over the link"},
        {"fringe", "local-oscillator interference fringe and sine fit"},
        {"geo", "electro-optic coupling rate from field profiles"},
    };
    for (const auto& name : subcommand_names()) {
        CLI::App* sub = app.add_subcommand(name, help.count(name) ? help.at(name) : name);
        sub->add_option("-c,--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--out", out_dir, "output directory (overrides config 'output_dir')");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(kExitUsage, "usage", e.what());
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        nlohmann::json config;
        {
            std::ifstream in(config_path);
            try {
                config = nlohmann::json::parse(in);
            } catch (const nlohmann::json::parse_error& e) {
                throw UsageError(config_path + ": " + e.what());
            }
        }
        if (!config.is_object()) throw UsageError(config_path + ": config must be a JSON object");
        const std::filesystem::path base = std::filesystem::path(config_path).parent_path();
        std::filesystem::path out = ".";
        if (config.contains("output_dir")) {
            if (!config["output_dir"].is_string()) throw UsageError("'output_dir' must be a string");
            out = base / config["output_dir"].get<std::string>();
            config.erase("output_dir");
        }
        if (!out_dir.empty()) out = out_dir;

        const RunResult r = run_subcommand(name, config, base, out);
        for (const auto& f : r.outputs) std::cout << f.string() << '\n';
        return kExitOk;
    } catch (const UsageError& e) {
        return fail(kExitUsage, "usage", e.what());
    } catch (const MatchingError& e) {
        const VernierPlan& b = e.best();
        return fail(kExitDomain, to_string(e.kind()),
                    std::string(e.what()) + " (best residuals hz: intra_felix=" + std::to_string(b.intra_felix) +
                        " intra_albert=" + std::to_string(b.intra_albert) + " inter=" + std::to_string(b.inter) + ")");
    } catch (const Error& e) {
        return fail(kExitDomain, to_string(e.kind()), e.what());
    } catch (const std::exception& e) {
        return fail(kExitDomain, "internal", e.what());
    }
}

}  // namespace eolink::cli
