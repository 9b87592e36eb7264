#pragma once

// JSON device-parameter documents, one per transducer. Keys follow the
// measured-parameter table naming with explicit unit suffixes, e.g.
//
//   {
//     "name": "Felix",
//     "optical_red_sideband_mode_frequency_hz": 190.6320e12,
//     "optical_red_sideband_mode_intrinsic_loss_rate_hz": 134e6,
//     "optical_red_sideband_mode_external_loss_rate_hz": 102e6,
//     "optical_red_sideband_mode_total_loss_rate_hz": 236e6,      (optional, checked)
//     "optical_blue_sideband_mode_...": ...,
//     "microwave_mode_...": ...,
//     "experimentally_estimated_g_eo_hz": 283,
//     "ring_pair": {"ring_1_frequency_hz", "ring_2_frequency_hz",
//                   "coupling_strength_hz", "ring_radius_m", "fsr_hz"},
//     "tuning": {"alpha_1_hz_per_v", "alpha_2_hz_per_v", "v_min_v", "v_max_v"},
//     "saturation": [{"power_w", "microwave_mode_intrinsic_loss_rate_hz"}, ...]
//   }
//
// Unknown keys are rejected.

#include <filesystem>
#include <json.hpp>

#include "eolink/model.hpp"

namespace eolink {

TransducerSpec transducer_from_json(const nlohmann::json& doc);
nlohmann::json transducer_to_json(const TransducerSpec& spec);
TransducerSpec load_transducer(const std::filesystem::path& path);

}  // namespace eolink
