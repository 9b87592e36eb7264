#include "eolink/matcher.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace eolink {

void ResonanceComb::validate() const {
    require(std::isfinite(anchor), "comb: anchor must be finite");
    require(fsr > 0.0, "comb: fsr must be > 0");
    require(k_min <= k_max, "comb: empty index range");
}

namespace {

struct Candidate {
    MatchedPair pair;
    double center_distance = 0.0;
    double midpoint = 0.0;
};

bool better(const Candidate& a, const Candidate& b) {
    const double ma = std::abs(a.pair.mismatch);
    const double mb = std::abs(b.pair.mismatch);
    if (ma != mb) return ma < mb;
    if (a.center_distance != b.center_distance) return a.center_distance < b.center_distance;
    return a.midpoint < b.midpoint;
}

}  // namespace

MatchedPair find_matched_pair(const ResonanceComb& a, const ResonanceComb& b,
                              const SearchWindow& window) {
    a.validate();
    b.validate();
    if (!(window.lo <= window.hi))
        throw Error(ErrorKind::no_candidates, "search window is empty");

    bool found = false;
    Candidate best;
    const double center = window.center();
    const int ka_lo = std::max(a.k_min, static_cast<int>(std::ceil((window.lo - a.anchor) / a.fsr)) - 1);
    const int ka_hi = std::min(a.k_max, static_cast<int>(std::floor((window.hi - a.anchor) / a.fsr)) + 1);
    for (int ka = ka_lo; ka <= ka_hi; ++ka) {
        const double fa = a.line(ka);
        if (fa < window.lo || fa > window.hi) continue;
        const double nearest = std::round((fa - b.anchor) / b.fsr);
        const int kb0 = static_cast<int>(std::clamp<double>(nearest, b.k_min, b.k_max));
        for (int kb = std::max(b.k_min, kb0 - 1); kb <= std::min(b.k_max, kb0 + 1); ++kb) {
            const double fb = b.line(kb);
            Candidate c;
            c.pair = {ka, kb, fa - fb};
            c.midpoint = 0.5 * (fa + fb);
            c.center_distance = std::abs(c.midpoint - center);
            if (!found || better(c, best)) {
                best = c;
                found = true;
            }
        }
    }
    if (!found) throw Error(ErrorKind::no_candidates, "no comb-a line inside the search window");
    return best.pair;
}

double vernier_period(double fsr, double delta_fsr) {
    if (delta_fsr == 0.0) throw Error(ErrorKind::degenerate_period, "equal FSRs: Vernier period is infinite");
    return fsr * fsr / std::abs(delta_fsr);
}

SearchWindow vernier_window(const ResonanceComb& a, const ResonanceComb& b, double center) {
    const double period = vernier_period(std::max(a.fsr, b.fsr), a.fsr - b.fsr);
    return {center - 0.5 * period, center + 0.5 * period};
}

Hybridization tuned_frequencies(const RingPairSpec& rings, const TuningModel& tuning, double v1,
                                double v2) {
    tuning.validate();
    if (v1 < tuning.v_min || v1 > tuning.v_max || v2 < tuning.v_min || v2 > tuning.v_max)
        throw Error(ErrorKind::voltage_out_of_range, "tuning voltage outside [v_min, v_max]");
    RingPairSpec tuned = rings;
    tuned.omega_1 += tuning.alpha_1 * v1;
    tuned.omega_2 += tuning.alpha_2 * v2;
    return hybridize(tuned);
}

double fitted_tuning_coefficient(double gap, double volts) {
    require(volts != 0.0, "fitted tuning coefficient: zero voltage");
    return std::abs(gap) / (2.0 * std::abs(volts));
}

double VernierPlan::max_residual() const {
    return std::max({std::abs(intra_felix), std::abs(intra_albert), std::abs(inter)});
}

RingPairSpec at_order(const RingPairSpec& rings, int k) {
    RingPairSpec out = rings;
    out.omega_1 += k * rings.fsr;
    out.omega_2 += k * rings.fsr;
    return out;
}

std::array<double, 3> matching_residuals(const TransducerSpec& felix, const TransducerSpec& albert,
                                         int k_felix, int k_albert,
                                         const std::array<double, 4>& v) {
    const Hybridization f = tuned_frequencies(at_order(felix.ring_pair, k_felix), felix.tuning, v[0], v[1]);
    const Hybridization a = tuned_frequencies(at_order(albert.ring_pair, k_albert), albert.tuning, v[2], v[3]);
    return {felix.microwave.frequency - (f.omega_plus - f.omega_minus),
            albert.microwave.frequency - (a.omega_plus - a.omega_minus),
            f.omega_plus - a.omega_plus};
}

namespace {

using Vec4 = Eigen::Vector4d;
using Vec3 = Eigen::Vector3d;
using Mat34 = Eigen::Matrix<double, 3, 4>;

struct DeviceTerms {
    double d = 0.0;  // omega_1 - omega_2 after tuning
    double q = 0.0;  // half splitting
};

DeviceTerms device_terms(const RingPairSpec& rings, const TuningModel& t, double v1, double v2) {
    const double d = (rings.omega_1 + t.alpha_1 * v1) - (rings.omega_2 + t.alpha_2 * v2);
    return {d, std::hypot(rings.g_c, 0.5 * d)};
}

Mat34 jacobian(const RingPairSpec& rf, const TuningModel& tf, const RingPairSpec& ra,
               const TuningModel& ta, const Vec4& x) {
    const DeviceTerms f = device_terms(rf, tf, x[0], x[1]);
    const DeviceTerms a = device_terms(ra, ta, x[2], x[3]);
    Mat34 J = Mat34::Zero();
    // d(split)/d(omega_1) = d / (2q); d(omega_+)/d(omega_1) = 1/2 + d / (4q).
    J(0, 0) = -tf.alpha_1 * f.d / (2.0 * f.q);
    J(0, 1) = tf.alpha_2 * f.d / (2.0 * f.q);
    J(1, 2) = -ta.alpha_1 * a.d / (2.0 * a.q);
    J(1, 3) = ta.alpha_2 * a.d / (2.0 * a.q);
    J(2, 0) = tf.alpha_1 * (0.5 + f.d / (4.0 * f.q));
    J(2, 1) = tf.alpha_2 * (0.5 - f.d / (4.0 * f.q));
    J(2, 2) = -ta.alpha_1 * (0.5 + a.d / (4.0 * a.q));
    J(2, 3) = -ta.alpha_2 * (0.5 - a.d / (4.0 * a.q));
    return J;
}

// Splitting sqrt(4 g_c^2 + d^2) equals omega_m at |d| = sqrt(omega_m^2 - 4 g_c^2),
// so for each sign choice of d on each device the three conditions are
// linear in the voltages. Returns the smallest-norm exact solution inside
// the voltage box, if any.
std::optional<Vec4> closed_form_solution(const RingPairSpec& rf, const TuningModel& tf, double wm_f,
                                         const RingPairSpec& ra, const TuningModel& ta, double wm_a) {
    const double need_f = wm_f * wm_f - 4.0 * rf.g_c * rf.g_c;
    const double need_a = wm_a * wm_a - 4.0 * ra.g_c * ra.g_c;
    if (need_f < 0.0 || need_a < 0.0) return std::nullopt;
    const double df = std::sqrt(need_f), da = std::sqrt(need_a);

    Mat34 A = Mat34::Zero();
    A(0, 0) = tf.alpha_1;
    A(0, 1) = -tf.alpha_2;
    A(1, 2) = ta.alpha_1;
    A(1, 3) = -ta.alpha_2;
    A(2, 0) = 0.5 * tf.alpha_1;
    A(2, 1) = 0.5 * tf.alpha_2;
    A(2, 2) = -0.5 * ta.alpha_1;
    A(2, 3) = -0.5 * ta.alpha_2;
    const Eigen::Matrix3d AAt = A * A.transpose();
    if (AAt.determinant() == 0.0) return std::nullopt;
    const auto solver = AAt.ldlt();

    // omega_+ = mean + omega_m / 2 once each splitting is matched.
    const double mean_gap = 0.5 * (rf.omega_1 + rf.omega_2) + 0.5 * wm_f -
                            0.5 * (ra.omega_1 + ra.omega_2) - 0.5 * wm_a;
    const auto inside = [](double v, const TuningModel& t) { return v >= t.v_min && v <= t.v_max; };
    std::optional<Vec4> best;
    for (const double sf : {1.0, -1.0}) {
        for (const double sa : {1.0, -1.0}) {
            const Vec3 b(sf * df - (rf.omega_1 - rf.omega_2), sa * da - (ra.omega_1 - ra.omega_2),
                         -mean_gap);
            const Vec4 v = A.transpose() * solver.solve(b);
            if (!(inside(v[0], tf) && inside(v[1], tf) && inside(v[2], ta) && inside(v[3], ta))) continue;
            if (!best || v.squaredNorm() < best->squaredNorm()) best = v;
        }
    }
    return best;
}

}  // namespace

VernierPlan solve_matching(const TransducerSpec& felix, const TransducerSpec& albert, int k_felix,
                           int k_albert) {
    felix.validate();
    albert.validate();
    const RingPairSpec rf = at_order(felix.ring_pair, k_felix);
    const RingPairSpec ra = at_order(albert.ring_pair, k_albert);
    const TuningModel& tf = felix.tuning;
    const TuningModel& ta = albert.tuning;
    tf.validate();
    ta.validate();

    VernierPlan plan;
    plan.k_felix = k_felix;
    plan.k_albert = k_albert;
    plan.mismatch = hybridize(rf).omega_plus - hybridize(ra).omega_plus;
    const double dfsr = felix.ring_pair.fsr - albert.ring_pair.fsr;
    plan.vernier_period = dfsr == 0.0
                              ? std::numeric_limits<double>::infinity()
                              : vernier_period(std::max(felix.ring_pair.fsr, albert.ring_pair.fsr), dfsr);

    const auto residual = [&](const Vec4& x) {
        const auto r = matching_residuals(felix, albert, k_felix, k_albert, {x[0], x[1], x[2], x[3]});
        return Vec3(r[0], r[1], r[2]);
    };
    const auto fill = [&](const Vec4& x, const Vec3& r, int iterations) {
        plan.voltages = {x[0], x[1], x[2], x[3]};
        plan.intra_felix = r[0];
        plan.intra_albert = r[1];
        plan.inter = r[2];
        plan.iterations = iterations;
    };

    if (const auto exact = closed_form_solution(rf, tf, felix.microwave.frequency, ra, ta,
                                                albert.microwave.frequency)) {
        const Vec3 r = residual(*exact);
        if (r.cwiseAbs().maxCoeff() < kMatchingTolerance) {
            fill(*exact, r, 0);
            return plan;
        }
    }

    // No exact solution inside the box: damped least squares from zero
    // voltage, clamped to the window, to report the best reachable point.
    const Vec4 lower(tf.v_min, tf.v_min, ta.v_min, ta.v_min);
    const Vec4 upper(tf.v_max, tf.v_max, ta.v_max, ta.v_max);
    const auto clamp = [&](Vec4 x) { return x.cwiseMax(lower).cwiseMin(upper).eval(); };

    Vec4 x = clamp(Vec4::Zero());
    Vec3 r = residual(x);

    // With degenerate rings the splitting is stationary in the differential
    // voltage, so a Gauss-Newton step cannot open it. Seed a small
    // differential offset on any device that needs a larger splitting.
    const auto seed = [&](int row, int v1, int v2, const RingPairSpec& rings, const TuningModel& t) {
        const DeviceTerms dt = device_terms(rings, t, x[v1], x[v2]);
        const double slope = std::abs(t.alpha_1) + std::abs(t.alpha_2);
        if (r[row] > kMatchingTolerance && std::abs(dt.d) < 1e-6 * rings.g_c && slope > 0.0) {
            const double dv = 0.05 * rings.g_c / slope;
            x[v1] += dv;
            x[v2] -= dv;
        }
    };
    seed(0, 0, 1, rf, tf);
    seed(1, 2, 3, ra, ta);
    x = clamp(x);
    r = residual(x);

    double lambda = 1e-9;
    int it = 0;
    constexpr int kMaxIterations = 500;
    for (; it < kMaxIterations && r.cwiseAbs().maxCoeff() > 1e-3 * kMatchingTolerance; ++it) {
        const Mat34 J = jacobian(rf, tf, ra, ta, x);
        const Eigen::Matrix3d JJt = J * J.transpose();
        const double scale = std::max(JJt.diagonal().maxCoeff(), 1.0);
        bool accepted = false;
        while (lambda < 1e12) {
            const Eigen::Matrix3d A = JJt + lambda * scale * Eigen::Matrix3d::Identity();
            const Vec4 step = -J.transpose() * A.ldlt().solve(r);
            const Vec4 trial = clamp(x + step);
            const Vec3 rt = residual(trial);
            if (rt.squaredNorm() < r.squaredNorm()) {
                x = trial;
                r = rt;
                lambda = std::max(lambda * 0.1, 1e-12);
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) break;
    }

    fill(x, r, it);
    if (plan.max_residual() >= kMatchingTolerance)
        throw MatchingError("no voltages within the tuning window match both conditions", plan);
    return plan;
}

}  // namespace eolink
