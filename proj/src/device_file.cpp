#include "eolink/device_file.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include "eolink/error.hpp"

namespace eolink {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    require(obj.is_object(), where + " must be an object");
    for (const auto& [key, _] : obj.items())
        require(allowed.count(key) > 0, where + ": unknown key '" + key + "'");
}

double number(const json& obj, const std::string& key, const std::string& where) {
    const auto it = obj.find(key);
    require(it != obj.end(), where + ": missing '" + key + "'");
    require(it->is_number(), where + ": '" + key + "' must be a number");
    return it->get<double>();
}

OpticalModeParams mode(const json& doc, const std::string& prefix) {
    OpticalModeParams m;
    m.frequency = number(doc, prefix + "_frequency_hz", "device");
    m.kappa_in = number(doc, prefix + "_intrinsic_loss_rate_hz", "device");
    m.kappa_ex = number(doc, prefix + "_external_loss_rate_hz", "device");
    const std::string total_key = prefix + "_total_loss_rate_hz";
    if (doc.contains(total_key)) {
        const double total = number(doc, total_key, "device");
        require(std::abs(total - m.kappa_total()) <= 1e-6 * std::abs(total),
                "device: '" + total_key + "' differs from intrinsic + external");
    }
    return m;
}

const char* const kRed = "optical_red_sideband_mode";
const char* const kBlue = "optical_blue_sideband_mode";
const char* const kMicrowave = "microwave_mode";

}  // namespace

TransducerSpec transducer_from_json(const json& doc) {
    std::set<std::string> allowed{"name", "experimentally_estimated_g_eo_hz", "ring_pair", "tuning",
                                  "saturation"};
    for (const std::string p : {kRed, kBlue, kMicrowave})
        for (const char* s : {"_frequency_hz", "_intrinsic_loss_rate_hz", "_external_loss_rate_hz",
                              "_total_loss_rate_hz"})
            allowed.insert(p + s);
    reject_unknown(doc, allowed, "device");

    TransducerSpec spec;
    spec.name = doc.value("name", std::string{});
    spec.red_mode = mode(doc, kRed);
    spec.blue_mode = mode(doc, kBlue);
    spec.microwave = mode(doc, kMicrowave);
    spec.g_eo = number(doc, "experimentally_estimated_g_eo_hz", "device");

    require(doc.contains("ring_pair"), "device: missing 'ring_pair'");
    const json& rp = doc.at("ring_pair");
    reject_unknown(rp, {"ring_1_frequency_hz", "ring_2_frequency_hz", "coupling_strength_hz",
                        "ring_radius_m", "fsr_hz"},
                   "ring_pair");
    spec.ring_pair.omega_1 = number(rp, "ring_1_frequency_hz", "ring_pair");
    spec.ring_pair.omega_2 = number(rp, "ring_2_frequency_hz", "ring_pair");
    spec.ring_pair.g_c = number(rp, "coupling_strength_hz", "ring_pair");
    spec.ring_pair.ring_radius = number(rp, "ring_radius_m", "ring_pair");
    spec.ring_pair.fsr = number(rp, "fsr_hz", "ring_pair");

    if (doc.contains("tuning")) {
        const json& t = doc.at("tuning");
        reject_unknown(t, {"alpha_1_hz_per_v", "alpha_2_hz_per_v", "v_min_v", "v_max_v"}, "tuning");
        spec.tuning.alpha_1 = number(t, "alpha_1_hz_per_v", "tuning");
        spec.tuning.alpha_2 = number(t, "alpha_2_hz_per_v", "tuning");
        if (t.contains("v_min_v")) spec.tuning.v_min = number(t, "v_min_v", "tuning");
        if (t.contains("v_max_v")) spec.tuning.v_max = number(t, "v_max_v", "tuning");
    }

    if (doc.contains("saturation")) {
        const json& sat = doc.at("saturation");
        require(sat.is_array(), "saturation must be an array");
        std::vector<SaturationTable::Entry> entries;
        for (const auto& e : sat) {
            reject_unknown(e, {"power_w", "microwave_mode_intrinsic_loss_rate_hz"}, "saturation entry");
            entries.push_back({number(e, "power_w", "saturation entry"),
                               number(e, "microwave_mode_intrinsic_loss_rate_hz", "saturation entry")});
        }
        spec.saturation = SaturationTable(std::move(entries));
    }

    spec.validate();
    return spec;
}

json transducer_to_json(const TransducerSpec& spec) {
    json doc;
    doc["name"] = spec.name;
    const auto put = [&](const std::string& prefix, const OpticalModeParams& m) {
        doc[prefix + "_frequency_hz"] = m.frequency;
        doc[prefix + "_intrinsic_loss_rate_hz"] = m.kappa_in;
        doc[prefix + "_external_loss_rate_hz"] = m.kappa_ex;
    };
    put(kRed, spec.red_mode);
    put(kBlue, spec.blue_mode);
    put(kMicrowave, spec.microwave);
    doc["experimentally_estimated_g_eo_hz"] = spec.g_eo;
    doc["ring_pair"] = {{"ring_1_frequency_hz", spec.ring_pair.omega_1},
                        {"ring_2_frequency_hz", spec.ring_pair.omega_2},
                        {"coupling_strength_hz", spec.ring_pair.g_c},
                        {"ring_radius_m", spec.ring_pair.ring_radius},
                        {"fsr_hz", spec.ring_pair.fsr}};
    doc["tuning"] = {{"alpha_1_hz_per_v", spec.tuning.alpha_1},
                     {"alpha_2_hz_per_v", spec.tuning.alpha_2},
                     {"v_min_v", spec.tuning.v_min},
                     {"v_max_v", spec.tuning.v_max}};
    if (spec.saturation) {
        json sat = json::array();
        for (const auto& e : spec.saturation->entries())
            sat.push_back({{"power_w", e.power}, {"microwave_mode_intrinsic_loss_rate_hz", e.kappa_in}});
        doc["saturation"] = sat;
    }
    return doc;
}

TransducerSpec load_transducer(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open device file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::io, path.string() + ": " + e.what());
    }
    return transducer_from_json(doc);
}

}  // namespace eolink
