#include "eolink/comm.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "eolink/constants.hpp"
#include "eolink/error.hpp"

namespace eolink {

void QpskRun::validate() const {
    require(!symbols.empty(), "qpsk: no symbols");
    for (const int s : symbols) require(s >= 0 && s < 4, "qpsk: symbol index must be 0..3");
    require(repeats_per_phase >= 1, "qpsk: repeats must be >= 1");
    require(noise_sigma >= 0.0, "qpsk: noise sigma must be >= 0");
}

double qpsk_phase(int symbol) { return 0.5 * constants::pi * symbol; }

std::vector<QpskSample> qpsk_constellation(cplx link_gain, const QpskRun& run) {
    run.validate();
    std::mt19937_64 rng(run.seed);
    std::normal_distribution<double> noise(0.0, 1.0);

    std::vector<QpskSample> out;
    out.reserve(run.symbols.size() * static_cast<std::size_t>(run.repeats_per_phase));
    for (const int s : run.symbols) {
        const cplx ideal = link_gain * std::polar(run.amplitude_in, qpsk_phase(s));
        for (int r = 0; r < run.repeats_per_phase; ++r) {
            const double ni = run.noise_sigma * noise(rng);
            const double nq = run.noise_sigma * noise(rng);
            out.push_back({s, ideal.real() + ni, ideal.imag() + nq});
        }
    }
    return out;
}

int classify_symbol(cplx point, cplx link_gain, double amplitude_in) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 4; ++k) {
        const double d = std::norm(point - link_gain * std::polar(amplitude_in, qpsk_phase(k)));
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

int count_symbol_errors(const std::vector<QpskSample>& samples, cplx link_gain, double amplitude_in) {
    return static_cast<int>(std::count_if(samples.begin(), samples.end(), [&](const QpskSample& s) {
        return classify_symbol({s.i, s.q}, link_gain, amplitude_in) != s.symbol;
    }));
}

std::array<cplx, 4> cluster_means(const std::vector<QpskSample>& samples) {
    std::array<cplx, 4> sum{};
    std::array<int, 4> count{};
    for (const auto& s : samples) {
        sum[static_cast<std::size_t>(s.symbol)] += cplx(s.i, s.q);
        ++count[static_cast<std::size_t>(s.symbol)];
    }
    for (std::size_t k = 0; k < 4; ++k)
        if (count[k] > 0) sum[k] /= static_cast<double>(count[k]);
    return sum;
}

double qpsk_snr(cplx link_gain, double amplitude_in, double noise_sigma) {
    return std::norm(link_gain * amplitude_in) / (2.0 * noise_sigma * noise_sigma);
}

double noise_sigma_from_occupancy(double n_mode, double scale) {
    require(n_mode >= 0.0 && scale >= 0.0, "noise sigma: occupancy and scale must be >= 0");
    return scale * std::sqrt(n_mode + 0.5);
}

void FringeScan::validate() const {
    require(signal_amplitude >= 0.0 && lo_amplitude >= 0.0, "fringe: amplitudes must be >= 0");
    require(!lo_phases.empty(), "fringe: no LO phases");
}

std::vector<FringeSample> interference_fringe(const FringeScan& scan, double signal_phase) {
    scan.validate();
    const double a = scan.signal_amplitude;
    const double b = scan.lo_amplitude;
    std::vector<FringeSample> out;
    out.reserve(scan.lo_phases.size());
    for (const double phi : scan.lo_phases)
        out.push_back({phi, a * a + b * b + 2.0 * a * b * std::cos(signal_phase - phi)});
    return out;
}

double fringe_visibility(double a, double b) {
    const double denom = a * a + b * b;
    return denom > 0.0 ? 2.0 * a * b / denom : 0.0;
}

double sampled_visibility(const std::vector<FringeSample>& samples) {
    require(!samples.empty(), "visibility: no samples");
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end(),
                                              [](const auto& x, const auto& y) { return x.power < y.power; });
    const double sum = hi->power + lo->power;
    return sum > 0.0 ? (hi->power - lo->power) / sum : 0.0;
}

namespace {

// Angular coverage of a phase set on the circle: 2pi minus its largest gap.
double phase_coverage(const std::vector<FringeSample>& samples) {
    std::vector<double> p;
    p.reserve(samples.size());
    for (const auto& s : samples) {
        double r = std::fmod(s.lo_phase, constants::two_pi);
        if (r < 0.0) r += constants::two_pi;
        p.push_back(r);
    }
    std::sort(p.begin(), p.end());
    double gap = p.front() + constants::two_pi - p.back();
    for (std::size_t i = 1; i < p.size(); ++i) gap = std::max(gap, p[i] - p[i - 1]);
    return constants::two_pi - gap;
}

}  // namespace

SineFit fit_sine(const std::vector<FringeSample>& samples) {
    if (samples.size() < 4) throw Error(ErrorKind::fit_failed, "sine fit needs >= 4 samples");
    if (!(phase_coverage(samples) > constants::pi))
        throw Error(ErrorKind::fit_failed, "sine fit needs samples spanning more than pi");

    const auto n = static_cast<Eigen::Index>(samples.size());
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd y(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double phi = samples[static_cast<std::size_t>(k)].lo_phase;
        A(k, 0) = 1.0;
        A(k, 1) = std::cos(phi);
        A(k, 2) = std::sin(phi);
        y[k] = samples[static_cast<std::size_t>(k)].power;
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < 3) throw Error(ErrorKind::fit_failed, "sine fit design matrix is rank deficient");
    const Eigen::Vector3d c = qr.solve(y);

    SineFit fit;
    fit.offset = c[0];
    fit.amplitude = std::hypot(c[1], c[2]);
    fit.phase0 = std::atan2(c[2], c[1]);
    fit.rms_residual = std::sqrt((A * c - y).squaredNorm() / static_cast<double>(n));
    return fit;
}

}  // namespace eolink
