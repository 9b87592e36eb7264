#include <doctest.h>

#include <cmath>
#include <random>

#include "eolink/error.hpp"
#include "eolink/noise.hpp"
#include "reference_devices.hpp"

using namespace eolink;
using namespace eolink::testing;

TEST_CASE("reflection: Albert on resonance") {
    const auto mw = albert().microwave;
    const double oracle = ((2.4 - 11.5) / 13.9) * ((2.4 - 11.5) / 13.9);
    CHECK(reflection(mw, mw.frequency) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(reflection(mw, mw.frequency) == doctest::Approx(0.4286).epsilon(1e-4));
}

TEST_CASE("reflection: critical coupling, far detuning and bounds") {
    const MicrowaveModeParams crit{5e9, 1e6, 1e6};
    CHECK(reflection(crit, 5e9) == 0.0);
    CHECK(reflection(crit, 5e9 + 1e15) == doctest::Approx(1.0).epsilon(1e-12));

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> rate(1e3, 1e8), det(-1e9, 1e9);
    for (int n = 0; n < 500; ++n) {
        const MicrowaveModeParams mw{5e9, rate(rng), rate(rng)};
        const double r = reflection(mw, 5e9 + det(rng));
        CHECK(r >= 0.0);
        CHECK(r <= 1.0 + 1e-12);
    }
}

TEST_CASE("mode_occupancy: Albert example and convexity") {
    const auto mw = albert().microwave;
    const BathOccupancies b{0.5, 0.1, 0.0};
    const double oracle = (2.4 * 0.1 + 11.5 * 0.5) / 13.9;
    CHECK(mode_occupancy(mw, b) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(mode_occupancy(mw, b) == doctest::Approx(0.4309).epsilon(1e-4));

    // Equal baths give that occupancy back: the weights sum to one.
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> rate(1e3, 1e8), occ(0.0, 10.0);
    for (int n = 0; n < 200; ++n) {
        const MicrowaveModeParams m{5e9, rate(rng), rate(rng)};
        const double x = occ(rng), y = occ(rng);
        CHECK(mode_occupancy(m, {x, x, 0.0}) == doctest::Approx(x).epsilon(1e-14));
        const double n_mode = mode_occupancy(m, {x, y, 0.0});
        CHECK(n_mode >= std::min(x, y) - 1e-12);
        CHECK(n_mode <= std::max(x, y) + 1e-12);
    }
}

TEST_CASE("output_noise_spectrum: shape and limits") {
    const auto mw = albert().microwave;
    const BathOccupancies b{0.5, 0.1, 0.02};
    const FrequencyGrid grid{mw.frequency, 1e12, 1001};
    const auto ns = output_noise_spectrum(mw, b, grid);
    REQUIRE(ns.s_dev.size() == 1001);
    const double r0 = reflection(mw, mw.frequency);
    CHECK(ns.s_dev[500] == doctest::Approx(r0 * 0.5 + (1 - r0) * 0.1 + 0.02).epsilon(1e-14));
    CHECK(ns.s_dev.front() == doctest::Approx(0.52).epsilon(1e-6));
    CHECK(ns.n_mode == mode_occupancy(mw, b));
}

TEST_CASE("infer_baths: inverts the output noise model") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> rate(1e4, 1e8), occ(0.0, 5.0), extra(0.0, 0.5);
    int tested = 0;
    for (int n = 0; n < 500; ++n) {
        const MicrowaveModeParams mw{5e9, rate(rng), rate(rng)};
        const BathOccupancies truth{occ(rng), occ(rng), extra(rng)};
        const double r0 = reflection(mw, mw.frequency);
        if (r0 > 0.999) continue;
        const double on = r0 * truth.n_ex + (1 - r0) * truth.n_en + truth.delta_n_out_add;
        const double off = truth.n_ex + truth.delta_n_out_add;
        const auto got = infer_baths(on, off, mw, truth.delta_n_out_add);
        CHECK(got.n_ex == doctest::Approx(truth.n_ex).epsilon(1e-12).scale(1.0));
        CHECK(got.n_en == doctest::Approx(truth.n_en).epsilon(1e-12).scale(1.0));
        ++tested;
    }
    CHECK(tested > 400);

    // Values read back off a computed spectrum.
    const auto mw = albert().microwave;
    const BathOccupancies truth{0.5, 0.1, 0.03};
    const auto ns = output_noise_spectrum(mw, truth, {mw.frequency, 2e6, 3});
    const double off = truth.n_ex + truth.delta_n_out_add;
    const auto got = infer_baths(ns.s_dev[1], off, mw, truth.delta_n_out_add);
    CHECK(std::abs(got.n_ex - 0.5) < 1e-12);
    CHECK(std::abs(got.n_en - 0.1) < 1e-12);
}

TEST_CASE("infer_baths: error cases") {
    const auto mw = albert().microwave;
    try {
        infer_baths(0.1, 0.5, mw, 0.0);
        FAIL("expected infeasible-input");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::infeasible_input);
    }
    try {
        infer_baths(0.5, 0.05, mw, 0.1);
        FAIL("expected infeasible-input");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::infeasible_input);
    }
    // No external coupling: the on-resonance reflection is 1.
    const MicrowaveModeParams closed{5e9, 1e6, 0.0};
    try {
        infer_baths(0.5, 0.5, closed, 0.0);
        FAIL("expected uninvertible");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::uninvertible);
    }
}
