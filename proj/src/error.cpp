#include "eolink/error.hpp"

namespace eolink {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_input: return "invalid-input";
        case ErrorKind::pump_off_resonance: return "pump-off-resonance";
        case ErrorKind::degenerate_profile: return "degenerate-profile";
        case ErrorKind::calibration_window: return "calibration-window";
        case ErrorKind::bandwidth_unresolved: return "bandwidth-unresolved";
        case ErrorKind::uninvertible: return "uninvertible";
        case ErrorKind::infeasible_input: return "infeasible-input";
        case ErrorKind::no_candidates: return "no-candidates";
        case ErrorKind::degenerate_period: return "degenerate-period";
        case ErrorKind::voltage_out_of_range: return "voltage-out-of-range";
        case ErrorKind::infeasible_matching: return "infeasible-matching";
        case ErrorKind::incompatible_grids: return "incompatible-grids";
        case ErrorKind::fit_failed: return "fit-failed";
        case ErrorKind::io: return "io";
    }
    return "unknown";
}

}  // namespace eolink
