#pragma once

// Steady-state four-port scattering spectra of a pumped transducer and the
// gain-independent efficiency calibration built from them.

#include <complex>
#include <filesystem>
#include <vector>

#include "eolink/model.hpp"

namespace eolink {

using cplx = std::complex<double>;

// Uniform, symmetric sampling of `span` around `center` (Hz). An odd point
// count keeps the center on the grid.
struct FrequencyGrid {
    double center = 0.0;
    double span = 0.0;
    int points = 0;

    void validate() const;
    double step() const { return span / (points - 1); }
    double offset(int i) const { return -0.5 * span + i * step(); }
    double at(int i) const { return center + offset(i); }
};

struct ScatterSpectra {
    FrequencyGrid grid;
    std::vector<double> detuning;  // Hz, signal frequency minus omega_m
    std::vector<cplx> s_ee;        // microwave reflection
    std::vector<cplx> s_oo;        // optical reflection
    std::vector<cplx> s_oe;        // microwave -> optical
    std::vector<cplx> s_eo;        // optical -> microwave

    std::size_t size() const { return detuning.size(); }
};

// `extra_optical_detuning` (Hz) shifts the blue-mode response, e.g. to
// account for an inter-cavity mismatch seen by a receiving transducer.
ScatterSpectra scattering_spectra(const TransducerSpec& spec, const PumpSpec& pump,
                                  const FrequencyGrid& grid, double extra_optical_detuning = 0.0);

// Fraction of each edge averaged for the reflection backgrounds.
inline constexpr double kBackgroundEdgeFraction = 0.05;

// eta = S_oe,pk S_eo,pk / (S_oo,bg S_ee,bg) with S the magnitudes |s|: peaks
// are max |s|^2 and backgrounds edge means of |s|^2, combined under a root.
double calibrate_efficiency(const ScatterSpectra& spectra);

// Full width at half maximum of `power` around its interior peak, linearly
// interpolated between samples.
double half_power_width(const std::vector<double>& detuning, const std::vector<double>& power);

double conversion_bandwidth(const ScatterSpectra& spectra);

std::vector<double> power_of(const std::vector<cplx>& s);

void write_spectra_csv(const std::filesystem::path& path, const ScatterSpectra& spectra);

// Reads a file written by write_spectra_csv. The grid is returned in the
// detuning frame (center = mid detuning).
ScatterSpectra read_spectra_csv(const std::filesystem::path& path);

}  // namespace eolink
