#include "config_reader.hpp"

#include "eolink/cli.hpp"

namespace eolink::cli {

using nlohmann::json;

ConfigReader::ConfigReader(const json& obj, json& resolved, std::filesystem::path base_dir,
                           std::string where)
    : obj_(obj), resolved_(resolved), base_dir_(std::move(base_dir)), where_(std::move(where)) {
    if (!obj_.is_object()) throw UsageError(where_ + " must be a JSON object");
    if (!resolved_.is_object()) resolved_ = json::object();
}

bool ConfigReader::has(const std::string& key) const { return obj_.contains(key); }

const json& ConfigReader::raw(const std::string& key) {
    const auto it = obj_.find(key);
    if (it == obj_.end()) throw UsageError(where_ + ": missing '" + key + "'");
    used_.insert(key);
    return *it;
}

double ConfigReader::number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) throw UsageError(where_ + ": '" + key + "' must be a number");
    resolved_[key] = v.get<double>();
    return v.get<double>();
}

double ConfigReader::number(const std::string& key, double fallback) {
    if (!has(key)) {
        resolved_[key] = fallback;
        return fallback;
    }
    return number(key);
}

long long ConfigReader::integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) throw UsageError(where_ + ": '" + key + "' must be an integer");
    resolved_[key] = v.get<long long>();
    return v.get<long long>();
}

long long ConfigReader::integer(const std::string& key, long long fallback) {
    if (!has(key)) {
        resolved_[key] = fallback;
        return fallback;
    }
    return integer(key);
}

std::string ConfigReader::string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) throw UsageError(where_ + ": '" + key + "' must be a string");
    resolved_[key] = v.get<std::string>();
    return v.get<std::string>();
}

bool ConfigReader::boolean(const std::string& key, bool fallback) {
    if (!has(key)) {
        resolved_[key] = fallback;
        return fallback;
    }
    const json& v = raw(key);
    if (!v.is_boolean()) throw UsageError(where_ + ": '" + key + "' must be true or false");
    resolved_[key] = v.get<bool>();
    return v.get<bool>();
}

std::vector<double> ConfigReader::numbers(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) throw UsageError(where_ + ": '" + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) throw UsageError(where_ + ": '" + key + "' must be an array of numbers");
        out.push_back(e.get<double>());
    }
    resolved_[key] = out;
    return out;
}

std::vector<double> ConfigReader::numbers(const std::string& key, const std::vector<double>& fallback) {
    if (!has(key)) {
        resolved_[key] = fallback;
        return fallback;
    }
    return numbers(key);
}

std::filesystem::path ConfigReader::path(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) throw UsageError(where_ + ": '" + key + "' must be a path string");
    std::filesystem::path p(v.get<std::string>());
    return p.is_absolute() ? p : base_dir_ / p;
}

void ConfigReader::record(const std::string& key, json value) { resolved_[key] = std::move(value); }

ConfigReader ConfigReader::section(const std::string& key) {
    const json& v = raw(key);
    json& slot = resolved_[key];
    slot = json::object();
    return ConfigReader(v, slot, base_dir_, where_ + "." + key);
}

std::vector<ConfigReader> ConfigReader::sections(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) throw UsageError(where_ + ": '" + key + "' must be an array of objects");
    json& slot = resolved_[key];
    slot = json::array();
    for (std::size_t i = 0; i < v.size(); ++i) slot.push_back(json::object());
    std::vector<ConfigReader> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.emplace_back(v[i], slot[i], base_dir_, where_ + "." + key + "[" + std::to_string(i) + "]");
    return out;
}

void ConfigReader::finish() const {
    for (const auto& [key, _] : obj_.items())
        if (used_.count(key) == 0) throw UsageError(where_ + ": unknown key '" + key + "'");
}

}  // namespace eolink::cli
