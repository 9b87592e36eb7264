#pragma once

// Output noise spectral density of the microwave port and the resulting
// mode thermal occupancy.
//
// Pairing note: the reflection-weighted bath (n_ex) is paired with
// kappa_m,ex and the transmitted bath (n_en) with kappa_m,in, as in the
// printed equations. Prose descriptions of these baths elsewhere label
// them the other way round; the equations are what is implemented.

#include <vector>

#include "eolink/model.hpp"
#include "eolink/spectra.hpp"

namespace eolink {

struct BathOccupancies {
    double n_ex = 0.0;
    double n_en = 0.0;
    double delta_n_out_add = 0.0;  // light-induced output-line noise

    void validate() const;
};

struct NoiseSpectrum {
    FrequencyGrid grid;
    std::vector<double> s_dev;  // occupancy units
    double n_mode = 0.0;
};

// |1 - kappa_ex / (kappa/2 - i (omega - omega_m))|^2 of the unpumped resonator.
double reflection(const MicrowaveModeParams& mw, double omega);
std::vector<double> reflection_spectrum(const MicrowaveModeParams& mw, const FrequencyGrid& grid);

double mode_occupancy(const MicrowaveModeParams& mw, const BathOccupancies& baths);

NoiseSpectrum output_noise_spectrum(const MicrowaveModeParams& mw, const BathOccupancies& baths,
                                    const FrequencyGrid& grid);

// Recovers (n_ex, n_en) from S_dev at omega_m and far off resonance (R = 1).
BathOccupancies infer_baths(double s_dev_on_resonance, double s_dev_off_resonance,
                            const MicrowaveModeParams& mw, double delta_n_out_add);

}  // namespace eolink
