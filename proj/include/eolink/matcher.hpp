#pragma once

// Inter-cavity resonance pairing via the Vernier effect and DC-voltage
// solving for simultaneous intra- and inter-cavity frequency matching.

#include <array>

#include "eolink/error.hpp"
#include "eolink/model.hpp"

namespace eolink {

struct ResonanceComb {
    double anchor = 0.0;  // Hz, line k = 0
    double fsr = 0.0;     // Hz
    int k_min = 0;
    int k_max = 0;

    double line(int k) const { return anchor + k * fsr; }
    void validate() const;
};

struct SearchWindow {
    double lo = 0.0;  // Hz
    double hi = 0.0;  // Hz

    double center() const { return 0.5 * (lo + hi); }
};

struct MatchedPair {
    int k_a = 0;
    int k_b = 0;
    double mismatch = 0.0;  // Hz, line_a - line_b
};

// Best pair with the comb-a line inside `window`; the comb-b partner may be
// any line in comb b's index range. Ties go to the pair whose midpoint is
// closest to the window center, then to the lower midpoint.
MatchedPair find_matched_pair(const ResonanceComb& comb_a, const ResonanceComb& comb_b,
                              const SearchWindow& window);

double vernier_period(double fsr, double delta_fsr);

// Window of one Vernier period (computed from the larger FSR) centered on `center`.
SearchWindow vernier_window(const ResonanceComb& comb_a, const ResonanceComb& comb_b, double center);

Hybridization tuned_frequencies(const RingPairSpec& rings, const TuningModel& tuning, double v1,
                                double v2);

// Tuning coefficient that closes `gap` when +/- `volts` is applied to both
// rings of each of two devices.
double fitted_tuning_coefficient(double gap, double volts);

inline constexpr double kMatchingTolerance = 1e3;  // Hz

struct VernierPlan {
    int k_felix = 0;
    int k_albert = 0;
    double mismatch = 0.0;        // Hz, omega_+ Felix - omega_+ Albert before tuning
    double vernier_period = 0.0;  // Hz; infinite for equal FSRs
    // V1, V2 of Felix then V1, V2 of Albert.
    std::array<double, 4> voltages{};
    double intra_felix = 0.0;  // Hz
    double intra_albert = 0.0;
    double inter = 0.0;
    int iterations = 0;

    double max_residual() const;
};

class MatchingError : public Error {
public:
    MatchingError(const std::string& message, VernierPlan best)
        : Error(ErrorKind::infeasible_matching, message), best_(best) {}
    const VernierPlan& best() const { return best_; }

private:
    VernierPlan best_;
};

// Ring pair shifted to longitudinal order k (both rings move by k * fsr).
RingPairSpec at_order(const RingPairSpec& rings, int k);

// Residuals [intra Felix, intra Albert, inter] at the given voltages.
std::array<double, 3> matching_residuals(const TransducerSpec& felix, const TransducerSpec& albert,
                                         int k_felix, int k_albert,
                                         const std::array<double, 4>& voltages);

VernierPlan solve_matching(const TransducerSpec& felix, const TransducerSpec& albert,
                           int k_felix = 0, int k_albert = 0);

}  // namespace eolink
