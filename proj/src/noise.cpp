#include "eolink/noise.hpp"

#include <cmath>
#include <complex>

#include "eolink/error.hpp"

namespace eolink {

void BathOccupancies::validate() const {
    require(n_ex >= 0.0 && n_en >= 0.0 && delta_n_out_add >= 0.0,
            "bath occupancies must be >= 0");
}

double reflection(const MicrowaveModeParams& mw, double omega) {
    const std::complex<double> arm(0.5 * mw.kappa_total(), -(omega - mw.frequency));
    return std::norm(1.0 - mw.kappa_ex / arm);
}

std::vector<double> reflection_spectrum(const MicrowaveModeParams& mw, const FrequencyGrid& grid) {
    mw.validate("microwave mode");
    grid.validate();
    std::vector<double> r(static_cast<std::size_t>(grid.points));
    for (int i = 0; i < grid.points; ++i) r[static_cast<std::size_t>(i)] = reflection(mw, grid.at(i));
    return r;
}

double mode_occupancy(const MicrowaveModeParams& mw, const BathOccupancies& baths) {
    return (mw.kappa_in * baths.n_en + mw.kappa_ex * baths.n_ex) / mw.kappa_total();
}

NoiseSpectrum output_noise_spectrum(const MicrowaveModeParams& mw, const BathOccupancies& baths,
                                    const FrequencyGrid& grid) {
    baths.validate();
    NoiseSpectrum out;
    out.grid = grid;
    out.s_dev = reflection_spectrum(mw, grid);
    for (double& r : out.s_dev) r = r * baths.n_ex + (1.0 - r) * baths.n_en + baths.delta_n_out_add;
    out.n_mode = mode_occupancy(mw, baths);
    return out;
}

BathOccupancies infer_baths(double s_dev_on_resonance, double s_dev_off_resonance,
                            const MicrowaveModeParams& mw, double delta_n_out_add) {
    mw.validate("microwave mode");
    require(delta_n_out_add >= 0.0, "delta_n_out_add must be >= 0");
    const double r0 = reflection(mw, mw.frequency);
    if (!(std::abs(1.0 - r0) > 1e-12))
        throw Error(ErrorKind::uninvertible, "R(omega_m) = 1: on- and off-resonance points coincide");

    BathOccupancies b;
    b.delta_n_out_add = delta_n_out_add;
    b.n_ex = s_dev_off_resonance - delta_n_out_add;
    b.n_en = (s_dev_on_resonance - delta_n_out_add - r0 * b.n_ex) / (1.0 - r0);
    if (b.n_ex < 0.0 || b.n_en < 0.0)
        throw Error(ErrorKind::infeasible_input, "inferred bath occupancy is negative");
    return b;
}

}  // namespace eolink
