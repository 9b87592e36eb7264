#pragma once

// Transducer parameter types and the cavity electro-optic efficiency chain:
// photonic-molecule hybridization, intra-cavity pump photon number, enhanced
// coupling, cooperativity and on-chip transduction efficiency.
//
// All stored frequencies and loss rates are ordinary frequencies in Hz
// (value = omega / 2pi). Conversions to angular units happen inside the
// formulas that need them (hbar * omega).

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace eolink {

struct OpticalModeParams {
    double frequency = 0.0;  // Hz
    double kappa_in = 0.0;   // Hz
    double kappa_ex = 0.0;   // Hz

    double kappa_total() const { return kappa_in + kappa_ex; }
    void validate(const char* label) const;
};

using MicrowaveModeParams = OpticalModeParams;

struct RingPairSpec {
    double omega_1 = 0.0;      // Hz, bare resonance of ring 1
    double omega_2 = 0.0;      // Hz, bare resonance of ring 2
    double g_c = 0.0;          // Hz, evanescent ring-ring coupling
    double ring_radius = 0.0;  // m
    double fsr = 0.0;          // Hz

    void validate() const;
};

// Linear DC tuning of each ring's bare resonance.
struct TuningModel {
    double alpha_1 = 0.0;  // Hz/V
    double alpha_2 = 0.0;  // Hz/V
    double v_min = -200.0;  // V
    double v_max = 200.0;   // V

    void validate() const;
};

// Monotone lookup of the microwave intrinsic loss versus on-chip optical
// power, linearly interpolated and held flat outside the tabulated range.
class SaturationTable {
public:
    struct Entry {
        double power = 0.0;     // W
        double kappa_in = 0.0;  // Hz
    };

    SaturationTable() = default;
    explicit SaturationTable(std::vector<Entry> entries);

    double kappa_m_in(double power) const;
    const std::vector<Entry>& entries() const { return entries_; }

private:
    std::vector<Entry> entries_;
};

struct TransducerSpec {
    std::string name;
    RingPairSpec ring_pair;
    OpticalModeParams red_mode;   // omega_-
    OpticalModeParams blue_mode;  // omega_+
    MicrowaveModeParams microwave;
    double g_eo = 0.0;  // Hz
    TuningModel tuning;
    std::optional<SaturationTable> saturation;

    // omega_m - (omega_+ - omega_-) of the operating point, in Hz.
    double intra_cavity_residual() const {
        return microwave.frequency - (blue_mode.frequency - red_mode.frequency);
    }

    void validate() const;
};

struct PumpSpec {
    double on_chip_power = 0.0;   // W, peak power during the pulse
    double pump_frequency = 0.0;  // Hz, must sit on omega_-
};

struct CouplingState {
    double n_minus = 0.0;        // intra-cavity pump photons
    double G_eo = 0.0;           // Hz
    double cooperativity = 0.0;
};

struct Hybridization {
    double omega_plus = 0.0;   // Hz
    double omega_minus = 0.0;  // Hz
    double theta = 0.0;        // rad, mixing angle in (0, pi/2)
};

struct EfficiencyResult {
    double eta = 0.0;
    CouplingState state;
};

// Fraction of kappa_- by which the pump may miss omega_-.
inline constexpr double kPumpResonanceTolerance = 0.01;

Hybridization hybridize(const RingPairSpec& rings);

double pump_photon_number(const OpticalModeParams& red_mode, const PumpSpec& pump,
                          double tolerance = kPumpResonanceTolerance);

double cooperativity(double G_eo, double kappa_m, double kappa_plus);

// eta as a function of cooperativity for fixed port extraction ratios.
double efficiency_from_cooperativity(double cooperativity, double plus_extraction,
                                     double microwave_extraction);

// Copy of `spec` with kappa_m,in replaced by the saturation-table value at `power`.
TransducerSpec at_power(const TransducerSpec& spec, double power);

EfficiencyResult efficiency(const TransducerSpec& spec, const PumpSpec& pump);

struct EfficiencyPoint {
    double power = 0.0;
    double eta = 0.0;
    CouplingState state;
};

// Pumps on spec.red_mode.frequency at each power; order preserved.
std::vector<EfficiencyPoint> efficiency_sweep(const TransducerSpec& spec,
                                              const std::vector<double>& powers);

}  // namespace eolink
