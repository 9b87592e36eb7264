#include "eolink/link.hpp"

#include <algorithm>
#include <cmath>

#include "eolink/constants.hpp"
#include "eolink/error.hpp"
#include "eolink/io.hpp"

namespace eolink {

void FiberSpec::validate() const {
    require(length >= 0.0, "fiber: length must be >= 0");
    require(attenuation >= 0.0, "fiber: attenuation must be >= 0");
    require(effective_index >= 1.0, "fiber: effective index must be >= 1");
    require(std::isfinite(carrier_frequency) && carrier_frequency >= 0.0,
            "fiber: carrier frequency must be >= 0");
}

void CouplerSpec::validate() const {
    require(insertion_loss_db >= 0.0, "coupler: insertion loss must be >= 0");
    require(passes >= 0, "coupler: passes must be >= 0");
}

double CouplerSpec::amplitude() const { return std::pow(10.0, -total_loss_db() / 20.0); }

cplx fiber_response(const FiberSpec& fiber) {
    fiber.validate();
    if (fiber.length == 0.0) return {1.0, 0.0};
    const double amplitude = std::pow(10.0, -fiber.attenuation * (fiber.length / 1000.0) / 20.0);
    // Reduce in cycles first: the raw phase is ~1e10 rad for a kilometre.
    const double cycles =
        fiber.effective_index * fiber.length * fiber.carrier_frequency / constants::speed_of_light;
    double frac = cycles - std::floor(cycles);  // [0, 1)
    double phase = -constants::two_pi * frac;   // (-2pi, 0]
    if (phase <= -constants::pi) phase += constants::two_pi;
    return std::polar(amplitude, phase);
}

namespace {

bool same_grid(const ScatterSpectra& a, const ScatterSpectra& b) {
    if (a.size() != b.size()) return false;
    const double step = a.size() > 1 ? std::abs(a.detuning[1] - a.detuning[0]) : 1.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a.detuning[i] - b.detuning[i]) > 1e-6 * step) return false;
    return true;
}

}  // namespace

LinkResponse cascade(const ScatterSpectra& felix, const ScatterSpectra& albert,
                     const FiberSpec& fiber, const std::optional<CouplerSpec>& couplers) {
    if (!same_grid(felix, albert))
        throw Error(ErrorKind::incompatible_grids, "Felix and Albert spectra use different detuning grids");

    cplx channel = fiber_response(fiber);
    if (couplers) {
        couplers->validate();
        channel *= couplers->amplitude();
    }

    LinkResponse out;
    out.grid = felix.grid;
    out.detuning = felix.detuning;
    out.s_link.resize(felix.size());
    for (std::size_t i = 0; i < felix.size(); ++i)
        out.s_link[i] = albert.s_eo[i] * channel * felix.s_oe[i];

    const std::vector<double> p = power_of(out.s_link);
    out.peak_transmission_db = 10.0 * std::log10(*std::max_element(p.begin(), p.end()));
    try {
        out.bandwidth = half_power_width(out.detuning, p);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::bandwidth_unresolved) throw;
    }
    return out;
}

std::vector<double> unwrapped_phase(const std::vector<cplx>& s) {
    std::vector<double> phase(s.size());
    double offset = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double raw = std::arg(s[i]);
        if (i > 0) {
            const double jump = raw + offset - phase[i - 1];
            offset -= constants::two_pi * std::round(jump / constants::two_pi);
        }
        phase[i] = raw + offset;
    }
    return phase;
}

void write_link_csv(const std::filesystem::path& path, const LinkResponse& link) {
    io::CsvWriter w(path, {"detuning_hz", "re", "im", "mag_db", "phase_rad"});
    const std::vector<double> phase = unwrapped_phase(link.s_link);
    for (std::size_t i = 0; i < link.s_link.size(); ++i) {
        w.cell(link.detuning[i])
            .cell(link.s_link[i].real())
            .cell(link.s_link[i].imag())
            .cell(10.0 * std::log10(std::norm(link.s_link[i])))
            .cell(phase[i]);
        w.end_row();
    }
}

std::string_view to_string(Technology t) {
    switch (t) {
        case Technology::coax: return "coax";
        case Technology::eom_pair: return "eom_pair";
        case Technology::transducer_pair_onchip: return "transducer_pair_onchip";
        case Technology::transducer_pair_offchip: return "transducer_pair_offchip";
    }
    return "unknown";
}

std::vector<BudgetEntry> budget_table(const std::vector<double>& distances) {
    for (const double d : distances) require(d >= 0.0, "budget: distances must be >= 0");
    using namespace budget;
    const auto fiber = [](double d) { return kFiberDbPerKm * d / 1000.0; };

    std::vector<BudgetEntry> rows;
    rows.reserve(4 * distances.size());
    for (const double d : distances) rows.push_back({Technology::coax, d, kCoaxDbPerM * d});
    for (const double d : distances) rows.push_back({Technology::eom_pair, d, kEomPairDb + fiber(d)});
    for (const double d : distances)
        rows.push_back({Technology::transducer_pair_onchip, d, kTransducerPairDb + fiber(d)});
    for (const double d : distances)
        rows.push_back({Technology::transducer_pair_offchip, d,
                        kTransducerPairDb + kFiberToChipDb + fiber(d)});
    return rows;
}

void write_budget_csv(const std::filesystem::path& path, const std::vector<BudgetEntry>& rows) {
    io::CsvWriter w(path, {"technology", "distance_m", "loss_db"});
    for (const auto& r : rows) {
        w.cell(to_string(r.technology)).cell(r.distance).cell(r.total_loss_db);
        w.end_row();
    }
}

}  // namespace eolink
