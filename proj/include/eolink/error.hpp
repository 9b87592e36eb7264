#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eolink {

// Machine-readable failure categories. The CLI prints the tag verbatim.
enum class ErrorKind {
    invalid_input,
    pump_off_resonance,
    degenerate_profile,
    calibration_window,
    bandwidth_unresolved,
    uninvertible,
    infeasible_input,
    no_candidates,
    degenerate_period,
    voltage_out_of_range,
    infeasible_matching,
    incompatible_grids,
    fit_failed,
    io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Throws invalid_input with `what` when `cond` is false.
inline void require(bool cond, const std::string& what) {
    if (!cond) throw Error(ErrorKind::invalid_input, what);
}

}  // namespace eolink
