#pragma once

// Fridge-to-fridge microwave -> optical -> microwave cascade and the
// link-budget comparison against coax and commercial modulator pairs.

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "eolink/spectra.hpp"

namespace eolink {

struct FiberSpec {
    double length = 1000.0;            // m
    double attenuation = 0.2;          // dB/km
    double effective_index = 1.468;
    double carrier_frequency = 0.0;    // Hz

    void validate() const;
};

struct CouplerSpec {
    double insertion_loss_db = 5.93;  // per pass
    int passes = 4;

    void validate() const;
    double total_loss_db() const { return insertion_loss_db * passes; }
    double amplitude() const;
};

// Amplitude 10^(-loss/20) and propagation phase reduced to (-pi, pi].
cplx fiber_response(const FiberSpec& fiber);

struct LinkResponse {
    FrequencyGrid grid;
    std::vector<double> detuning;  // Hz, common detuning from each device's omega_m
    std::vector<cplx> s_link;
    double peak_transmission_db = 0.0;
    std::optional<double> bandwidth;  // Hz; empty when the peak is not resolvable
};

// s_link = s_eo(Albert) * fiber * couplers * s_oe(Felix) on a shared detuning grid.
LinkResponse cascade(const ScatterSpectra& felix, const ScatterSpectra& albert,
                     const FiberSpec& fiber, const std::optional<CouplerSpec>& couplers);

// Phase of each sample, unwrapped along the grid.
std::vector<double> unwrapped_phase(const std::vector<cplx>& s);

void write_link_csv(const std::filesystem::path& path, const LinkResponse& link);

enum class Technology { coax, eom_pair, transducer_pair_onchip, transducer_pair_offchip };

std::string_view to_string(Technology t);

struct BudgetEntry {
    Technology technology = Technology::coax;
    double distance = 0.0;       // m
    double total_loss_db = 0.0;  // dB
};

namespace budget {
inline constexpr double kCoaxDbPerM = 1.0;
inline constexpr double kFiberDbPerKm = 0.2;
inline constexpr double kEomPairDb = 140.0;
inline constexpr double kTransducerPairDb = 60.0;
inline constexpr double kFiberToChipDb = 23.7;
}  // namespace budget

// Rows grouped by technology, distances in input order within each group.
std::vector<BudgetEntry> budget_table(const std::vector<double>& distances);

void write_budget_csv(const std::filesystem::path& path, const std::vector<BudgetEntry>& rows);

}  // namespace eolink
