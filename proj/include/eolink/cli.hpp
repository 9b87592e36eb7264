#pragma once

// Scenario orchestration behind the `eolink` command-line tool.
//
// Each subcommand reads one JSON config, writes its outputs into an output
// directory together with manifest.json, and removes whatever it wrote if
// anything fails. Exit codes: 0 success, 1 usage/config error, 2 domain error.

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace eolink::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDomain = 2;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunResult {
    std::string subcommand;
    std::string config_hash;  // sha256 of the resolved config
    std::optional<std::uint64_t> seed;
    std::vector<std::filesystem::path> outputs;  // including manifest.json
    nlohmann::json report;                       // subcommand summary values
};

const std::vector<std::string>& subcommand_names();

// Relative paths inside `config` resolve against `base_dir`.
RunResult run_subcommand(const std::string& name, const nlohmann::json& config,
                         const std::filesystem::path& base_dir, const std::filesystem::path& out_dir);

// Hash of the semantic content of a config for `name` (defaults applied,
// referenced files folded in by content, output location excluded).
std::string config_hash(const std::string& name, const nlohmann::json& config,
                        const std::filesystem::path& base_dir);

std::string sha256_hex(std::string_view data);

std::string_view tool_version();

// Full command-line entry point; returns the process exit code.
int main_entry(int argc, char** argv);

}  // namespace eolink::cli
