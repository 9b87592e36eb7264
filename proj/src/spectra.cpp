#include "eolink/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eolink/error.hpp"
#include "eolink/io.hpp"

namespace eolink {

void FrequencyGrid::validate() const {
    require(std::isfinite(center), "grid: center must be finite");
    require(std::isfinite(span) && span > 0.0, "grid: span must be > 0");
    require(points >= 3 && points % 2 == 1, "grid: points must be odd and >= 3");
}

ScatterSpectra scattering_spectra(const TransducerSpec& spec, const PumpSpec& pump,
                                  const FrequencyGrid& grid, double extra_optical_detuning) {
    grid.validate();
    const double w_m = spec.microwave.frequency;
    require(std::abs(grid.center - w_m) <= 0.5 * grid.span,
            "spectra: grid center must lie within half a span of omega_m");

    const EfficiencyResult eff = efficiency(spec, pump);
    const TransducerSpec s = at_power(spec, pump.on_chip_power);
    const double G = eff.state.G_eo;
    const double k_m = s.microwave.kappa_total();
    const double k_p = s.blue_mode.kappa_total();
    const double k_m_ex = s.microwave.kappa_ex;
    const double k_p_ex = s.blue_mode.kappa_ex;
    const double optical_offset = s.intra_cavity_residual() + extra_optical_detuning;
    const double conversion_scale = std::sqrt(k_m_ex * k_p_ex) * G;
    const cplx i1(0.0, 1.0);

    ScatterSpectra out;
    out.grid = grid;
    const auto n = static_cast<std::size_t>(grid.points);
    out.detuning.resize(n);
    out.s_ee.resize(n);
    out.s_oo.resize(n);
    out.s_oe.resize(n);
    out.s_eo.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double delta = grid.at(static_cast<int>(k)) - w_m;
        const cplx microwave_arm = 0.5 * k_m - i1 * delta;
        const cplx optical_arm = 0.5 * k_p - i1 * (delta + optical_offset);
        const cplx D = microwave_arm * optical_arm + G * G;
        out.detuning[k] = delta;
        out.s_oe[k] = conversion_scale / D;
        out.s_eo[k] = out.s_oe[k];
        out.s_ee[k] = 1.0 - k_m_ex * optical_arm / D;
        out.s_oo[k] = 1.0 - k_p_ex * microwave_arm / D;
    }
    return out;
}

std::vector<double> power_of(const std::vector<cplx>& s) {
    std::vector<double> p(s.size());
    std::transform(s.begin(), s.end(), p.begin(), [](cplx v) { return std::norm(v); });
    return p;
}

namespace {

double edge_background(const std::vector<double>& power) {
    const std::size_t n = power.size();
    const std::size_t edge = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(kBackgroundEdgeFraction * static_cast<double>(n))));
    double sum = 0.0;
    for (std::size_t i = 0; i < edge; ++i) sum += power[i] + power[n - 1 - i];
    return sum / static_cast<double>(2 * edge);
}

double reflection_background(const std::vector<cplx>& s, const char* label) {
    const std::vector<double> p = power_of(s);
    const double bg = edge_background(p);
    const double dip = *std::min_element(p.begin(), p.end());
    // Edges must sit well outside the reflection dip: at least 3 dB above it.
    if (!(bg >= 2.0 * dip) || !(bg > 0.0))
        throw Error(ErrorKind::calibration_window,
                    std::string(label) + " background is within 3 dB of the reflection dip; widen the grid");
    return bg;
}

}  // namespace

double calibrate_efficiency(const ScatterSpectra& spectra) {
    require(spectra.size() >= 3, "calibration: too few samples");
    const double bg_ee = reflection_background(spectra.s_ee, "S_ee");
    const double bg_oo = reflection_background(spectra.s_oo, "S_oo");
    const auto peak = [](const std::vector<cplx>& s) {
        const auto p = power_of(s);
        return *std::max_element(p.begin(), p.end());
    };
    // The ratio is formed on magnitudes |s|; on power quantities it would give eta^2.
    return std::sqrt(peak(spectra.s_oe) * peak(spectra.s_eo) / (bg_oo * bg_ee));
}

double half_power_width(const std::vector<double>& detuning, const std::vector<double>& power) {
    require(detuning.size() == power.size() && power.size() >= 3, "bandwidth: bad sample arrays");
    const auto n = power.size();
    const std::size_t ipk =
        static_cast<std::size_t>(std::max_element(power.begin(), power.end()) - power.begin());
    const double peak = power[ipk];
    if (!(peak > 0.0) || ipk == 0 || ipk == n - 1)
        throw Error(ErrorKind::bandwidth_unresolved, "no interior maximum");
    const double half = 0.5 * peak;

    const auto crossing = [&](std::size_t inside, std::size_t outside) {
        const double t = (power[inside] - half) / (power[inside] - power[outside]);
        return detuning[inside] + t * (detuning[outside] - detuning[inside]);
    };

    std::size_t lo = ipk;
    while (lo > 0 && power[lo - 1] > half) --lo;
    if (lo == 0) throw Error(ErrorKind::bandwidth_unresolved, "lower half-power point outside grid");
    std::size_t hi = ipk;
    while (hi + 1 < n && power[hi + 1] > half) ++hi;
    if (hi == n - 1) throw Error(ErrorKind::bandwidth_unresolved, "upper half-power point outside grid");

    return crossing(hi, hi + 1) - crossing(lo, lo - 1);
}

double conversion_bandwidth(const ScatterSpectra& spectra) {
    return half_power_width(spectra.detuning, power_of(spectra.s_oe));
}

namespace {

double to_db(double power) { return 10.0 * std::log10(power); }

}  // namespace

void write_spectra_csv(const std::filesystem::path& path, const ScatterSpectra& sp) {
    io::CsvWriter w(path, {"detuning_hz", "s_ee_re", "s_ee_im", "s_oo_re", "s_oo_im", "s_oe_re",
                           "s_oe_im", "s_eo_re", "s_eo_im", "s_ee_db", "s_oo_db", "s_oe_db",
                           "s_eo_db"});
    for (std::size_t k = 0; k < sp.size(); ++k) {
        w.cell(sp.detuning[k]);
        for (const auto* ch : {&sp.s_ee, &sp.s_oo, &sp.s_oe, &sp.s_eo})
            w.cell((*ch)[k].real()).cell((*ch)[k].imag());
        for (const auto* ch : {&sp.s_ee, &sp.s_oo, &sp.s_oe, &sp.s_eo})
            w.cell(to_db(std::norm((*ch)[k])));
        w.end_row();
    }
}

ScatterSpectra read_spectra_csv(const std::filesystem::path& path) {
    const io::Table t = io::read_table(path);
    const std::size_t c_det = t.column("detuning_hz");
    const auto pair = [&](const char* re, const char* im) {
        return std::pair{t.column(re), t.column(im)};
    };
    const auto ee = pair("s_ee_re", "s_ee_im");
    const auto oo = pair("s_oo_re", "s_oo_im");
    const auto oe = pair("s_oe_re", "s_oe_im");
    const auto eo = pair("s_eo_re", "s_eo_im");

    ScatterSpectra sp;
    for (const auto& row : t.rows) {
        sp.detuning.push_back(row[c_det]);
        sp.s_ee.emplace_back(row[ee.first], row[ee.second]);
        sp.s_oo.emplace_back(row[oo.first], row[oo.second]);
        sp.s_oe.emplace_back(row[oe.first], row[oe.second]);
        sp.s_eo.emplace_back(row[eo.first], row[eo.second]);
    }
    if (sp.size() < 3) throw Error(ErrorKind::io, path.string() + ": too few spectrum rows");
    sp.grid.points = static_cast<int>(sp.size());
    sp.grid.span = sp.detuning.back() - sp.detuning.front();
    sp.grid.center = 0.5 * (sp.detuning.front() + sp.detuning.back());
    return sp;
}

}  // namespace eolink
