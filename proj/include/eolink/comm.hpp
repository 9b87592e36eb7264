#pragma once

// Coherent transfer over the link: QPSK constellations under additive
// Gaussian noise and local-oscillator interference fringes.

#include <array>
#include <cstdint>
#include <vector>

#include "eolink/spectra.hpp"

namespace eolink {

struct QpskRun {
    std::vector<int> symbols{0, 1, 2, 3};  // index k encodes phase k * pi/2
    int repeats_per_phase = 50;
    double amplitude_in = 1.0;
    double noise_sigma = 0.0;  // per quadrature
    std::uint64_t seed = 1;

    void validate() const;
};

struct QpskSample {
    int symbol = 0;
    double i = 0.0;
    double q = 0.0;
};

double qpsk_phase(int symbol);

// Samples grouped by symbol in run order; deterministic for a given seed.
std::vector<QpskSample> qpsk_constellation(cplx link_gain, const QpskRun& run);

// Nearest ideal point of the co-rotated reference constellation.
int classify_symbol(cplx point, cplx link_gain, double amplitude_in);
int count_symbol_errors(const std::vector<QpskSample>& samples, cplx link_gain, double amplitude_in);

std::array<cplx, 4> cluster_means(const std::vector<QpskSample>& samples);

// |gain * amplitude|^2 / (2 sigma^2)
double qpsk_snr(cplx link_gain, double amplitude_in, double noise_sigma);

// Per-quadrature sigma from a mode occupancy: scale * sqrt(n_mode + 1/2).
double noise_sigma_from_occupancy(double n_mode, double scale);

struct FringeScan {
    std::vector<double> lo_phases;  // rad
    double signal_amplitude = 1.0;
    double lo_amplitude = 1.0;

    void validate() const;
};

struct FringeSample {
    double lo_phase = 0.0;
    double power = 0.0;
};

// |A e^{i phi_s} + B e^{i phi_LO}|^2 at each LO phase.
std::vector<FringeSample> interference_fringe(const FringeScan& scan, double signal_phase);

double fringe_visibility(double signal_amplitude, double lo_amplitude);
double sampled_visibility(const std::vector<FringeSample>& samples);

// power = offset + amplitude * cos(phase - phase0)
struct SineFit {
    double offset = 0.0;
    double amplitude = 0.0;
    double phase0 = 0.0;
    double rms_residual = 0.0;
};

SineFit fit_sine(const std::vector<FringeSample>& samples);

}  // namespace eolink
