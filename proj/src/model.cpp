#include "eolink/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eolink/constants.hpp"
#include "eolink/error.hpp"

namespace eolink {

void OpticalModeParams::validate(const char* label) const {
    const std::string l(label);
    require(std::isfinite(frequency) && frequency > 0.0, l + ": frequency must be > 0");
    require(std::isfinite(kappa_in) && kappa_in >= 0.0, l + ": kappa_in must be >= 0");
    require(std::isfinite(kappa_ex) && kappa_ex >= 0.0, l + ": kappa_ex must be >= 0");
    require(kappa_total() > 0.0, l + ": total loss rate must be > 0");
}

void RingPairSpec::validate() const {
    require(std::isfinite(omega_1) && std::isfinite(omega_2), "ring pair: non-finite ring frequency");
    require(g_c > 0.0, "ring pair: g_c must be > 0");
    require(ring_radius > 0.0, "ring pair: ring_radius must be > 0");
    require(fsr > 0.0, "ring pair: fsr must be > 0");
}

void TuningModel::validate() const {
    require(std::isfinite(alpha_1) && std::isfinite(alpha_2), "tuning: coefficients must be finite");
    require(v_min < v_max, "tuning: v_min must be < v_max");
}

SaturationTable::SaturationTable(std::vector<Entry> entries) : entries_(std::move(entries)) {
    require(!entries_.empty(), "saturation table is empty");
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        require(entries_[i].power >= 0.0 && entries_[i].kappa_in >= 0.0,
                "saturation table: negative power or kappa");
        if (i > 0) {
            require(entries_[i].power > entries_[i - 1].power,
                    "saturation table: powers must be strictly increasing");
            require(entries_[i].kappa_in >= entries_[i - 1].kappa_in,
                    "saturation table: kappa_m,in must be non-decreasing in power");
        }
    }
}

double SaturationTable::kappa_m_in(double power) const {
    if (power <= entries_.front().power) return entries_.front().kappa_in;
    if (power >= entries_.back().power) return entries_.back().kappa_in;
    const auto hi = std::upper_bound(entries_.begin(), entries_.end(), power,
                                     [](double p, const Entry& e) { return p < e.power; });
    const auto lo = hi - 1;
    const double t = (power - lo->power) / (hi->power - lo->power);
    return lo->kappa_in + t * (hi->kappa_in - lo->kappa_in);
}

void TransducerSpec::validate() const {
    ring_pair.validate();
    red_mode.validate("red mode");
    blue_mode.validate("blue mode");
    microwave.validate("microwave mode");
    tuning.validate();
    require(blue_mode.frequency > red_mode.frequency,
            "blue mode frequency must exceed red mode frequency");
    require(std::isfinite(g_eo), "g_eo must be finite");
}

Hybridization hybridize(const RingPairSpec& rings) {
    require(rings.g_c > 0.0, "hybridize: g_c must be > 0");
    const double mean = 0.5 * (rings.omega_1 + rings.omega_2);
    const double half_detuning = 0.5 * (rings.omega_1 - rings.omega_2);
    const double half_split = std::hypot(rings.g_c, half_detuning);
    // tan(2 theta) = 2 g_c / (omega_1 - omega_2); atan2 keeps theta in (0, pi/2).
    const double theta = 0.5 * std::atan2(2.0 * rings.g_c, rings.omega_1 - rings.omega_2);
    return {mean + half_split, mean - half_split, theta};
}

double pump_photon_number(const OpticalModeParams& red_mode, const PumpSpec& pump,
                          double tolerance) {
    red_mode.validate("red mode");
    require(pump.on_chip_power >= 0.0, "pump power must be >= 0");
    const double kappa = red_mode.kappa_total();
    if (std::abs(pump.pump_frequency - red_mode.frequency) > tolerance * kappa) {
        throw Error(ErrorKind::pump_off_resonance,
                    "pump frequency misses omega_- by more than " +
                        std::to_string(tolerance) + " kappa_-");
    }
    using constants::hbar;
    using constants::two_pi;
    const double photon_flux = pump.on_chip_power / (hbar * two_pi * red_mode.frequency);
    // 4 kappa_ex / kappa^2 with both rates angular.
    const double cavity_factor = 4.0 * red_mode.kappa_ex / (two_pi * kappa * kappa);
    return photon_flux * cavity_factor;
}

double cooperativity(double G_eo, double kappa_m, double kappa_plus) {
    return 4.0 * G_eo * G_eo / (kappa_m * kappa_plus);
}

double efficiency_from_cooperativity(double c, double plus_extraction,
                                     double microwave_extraction) {
    return plus_extraction * microwave_extraction * 4.0 * c / ((1.0 + c) * (1.0 + c));
}

TransducerSpec at_power(const TransducerSpec& spec, double power) {
    TransducerSpec out = spec;
    if (spec.saturation) out.microwave.kappa_in = spec.saturation->kappa_m_in(power);
    return out;
}

EfficiencyResult efficiency(const TransducerSpec& spec, const PumpSpec& pump) {
    spec.validate();
    const TransducerSpec s = at_power(spec, pump.on_chip_power);

    CouplingState state;
    state.n_minus = pump_photon_number(s.red_mode, pump);
    state.G_eo = std::sqrt(state.n_minus) * s.g_eo;
    state.cooperativity =
        cooperativity(state.G_eo, s.microwave.kappa_total(), s.blue_mode.kappa_total());

    const double eta = efficiency_from_cooperativity(
        state.cooperativity, s.blue_mode.kappa_ex / s.blue_mode.kappa_total(),
        s.microwave.kappa_ex / s.microwave.kappa_total());
    return {eta, state};
}

std::vector<EfficiencyPoint> efficiency_sweep(const TransducerSpec& spec,
                                              const std::vector<double>& powers) {
    require(!powers.empty(), "efficiency sweep: no powers given");
    std::vector<EfficiencyPoint> out;
    out.reserve(powers.size());
    for (const double p : powers) {
        require(p >= 0.0, "efficiency sweep: powers must be >= 0");
        const auto r = efficiency(spec, PumpSpec{p, spec.red_mode.frequency});
        out.push_back({p, r.eta, r.state});
    }
    return out;
}

}  // namespace eolink
