#pragma once

#include <filesystem>
#include <json.hpp>
#include <set>
#include <string>
#include <vector>

namespace eolink::cli {

// Typed access to one config object. Every value read (or defaulted) is
// copied into `resolved`; finish() rejects keys that were never read.
class ConfigReader {
public:
    ConfigReader(const nlohmann::json& obj, nlohmann::json& resolved,
                 std::filesystem::path base_dir, std::string where);

    bool has(const std::string& key) const;

    double number(const std::string& key);
    double number(const std::string& key, double fallback);
    long long integer(const std::string& key);
    long long integer(const std::string& key, long long fallback);
    std::string string(const std::string& key);
    bool boolean(const std::string& key, bool fallback);
    std::vector<double> numbers(const std::string& key);
    std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback);

    // Resolved against the base directory; not copied into `resolved`.
    std::filesystem::path path(const std::string& key);

    // Records a derived value in place of the raw entry (e.g. file content).
    void record(const std::string& key, nlohmann::json value);

    ConfigReader section(const std::string& key);
    // Array of objects under `key`; each element gets its own reader.
    std::vector<ConfigReader> sections(const std::string& key);

    void finish() const;

    const std::filesystem::path& base_dir() const { return base_dir_; }

private:
    const nlohmann::json& raw(const std::string& key);

    const nlohmann::json& obj_;
    nlohmann::json& resolved_;
    std::filesystem::path base_dir_;
    std::string where_;
    std::set<std::string> used_;
};

}  // namespace eolink::cli
