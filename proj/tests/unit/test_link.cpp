#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "eolink/constants.hpp"
#include "eolink/error.hpp"
#include "eolink/io.hpp"
#include "eolink/link.hpp"
#include "reference_devices.hpp"

using namespace eolink;
using namespace eolink::testing;

namespace {

ScatterSpectra matched(const TransducerSpec& s, double power, double span, int points) {
    return scattering_spectra(s, pump_for(s, power), {s.microwave.frequency, span, points},
                              -s.intra_cavity_residual());
}

double wrap(double phase) { return std::remainder(phase, constants::two_pi); }

FiberSpec km_fiber(double km) {
    FiberSpec f;
    f.length = 1000.0 * km;
    f.carrier_frequency = 190.6438e12;
    return f;
}

}  // namespace

TEST_CASE("fiber_response: attenuation and phase range") {
    const cplx r = fiber_response(km_fiber(1.0));
    CHECK(std::abs(r) == doctest::Approx(std::pow(10.0, -0.2 / 20.0)).epsilon(1e-14));
    CHECK(std::arg(r) > -constants::pi);
    CHECK(std::arg(r) <= constants::pi);
    CHECK(fiber_response(km_fiber(0.0)) == cplx(1.0, 0.0));

    FiberSpec bad = km_fiber(1.0);
    bad.effective_index = 0.5;
    CHECK_THROWS_AS(fiber_response(bad), Error);
}

TEST_CASE("fiber_response: phase is additive in length") {
    const double p1 = std::arg(fiber_response(km_fiber(1.0)));
    const double p5 = std::arg(fiber_response(km_fiber(5.0)));
    // About 5e9 cycles are reduced, so agreement is limited to ~1e-6 rad.
    CHECK(std::abs(wrap(p5 - 5.0 * p1)) < 1e-5);
    CHECK(std::abs(fiber_response(km_fiber(5.0))) ==
          doctest::Approx(std::pow(std::abs(fiber_response(km_fiber(1.0))), 5.0)).epsilon(1e-13));
}

TEST_CASE("CouplerSpec: default stack") {
    const CouplerSpec c;
    CHECK(c.total_loss_db() == doctest::Approx(23.72).epsilon(1e-14));
    CHECK(20.0 * std::log10(c.amplitude()) == doctest::Approx(-23.72).epsilon(1e-12));
    CHECK_THROWS_AS((CouplerSpec{-1.0, 4}.validate()), Error);
}

TEST_CASE("cascade: factorizes into component responses") {
    const auto sf = matched(felix(), 4e-3, 400e6, 801);
    const auto sa = matched(albert(), 4e-3, 400e6, 801);
    const FiberSpec fiber = km_fiber(1.0);
    const CouplerSpec couplers;
    const auto link = cascade(sf, sa, fiber, couplers);
    const cplx channel = fiber_response(fiber) * couplers.amplitude();
    for (std::size_t i = 0; i < link.s_link.size(); ++i)
        CHECK(std::abs(link.s_link[i] - sa.s_eo[i] * channel * sf.s_oe[i]) <=
              1e-15 * std::abs(link.s_link[i]));
}

TEST_CASE("cascade: peak transmission and phase at zero detuning") {
    const auto f = felix();
    const auto a = albert();
    const auto sf = matched(f, 4e-3, 400e6, 801);
    const auto sa = matched(a, 4e-3, 400e6, 801);
    const FiberSpec fiber = km_fiber(1.0);
    const double eta_f = efficiency(f, pump_for(f, 4e-3)).eta;
    const double eta_a = efficiency(a, pump_for(a, 4e-3)).eta;
    const double fiber_power = std::norm(fiber_response(fiber));

    const auto bare = cascade(sf, sa, fiber, std::nullopt);
    CHECK(std::pow(10.0, bare.peak_transmission_db / 10.0) ==
          doctest::Approx(eta_f * eta_a * fiber_power).epsilon(1e-12));
    CHECK(bare.peak_transmission_db == doctest::Approx(-58.754).epsilon(1e-4));

    const CouplerSpec couplers;
    const auto full = cascade(sf, sa, fiber, couplers);
    const double coupler_power = couplers.amplitude() * couplers.amplitude();
    CHECK(std::pow(10.0, full.peak_transmission_db / 10.0) ==
          doctest::Approx(eta_f * eta_a * fiber_power * coupler_power).epsilon(1e-12));

    const std::size_t mid = 400;
    REQUIRE(full.detuning[mid] == 0.0);
    const double sum = std::arg(sf.s_oe[mid]) + std::arg(fiber_response(fiber)) + std::arg(sa.s_eo[mid]);
    CHECK(std::abs(wrap(std::arg(full.s_link[mid]) - sum)) < 1e-12);

    // Narrower than either device alone.
    REQUIRE(full.bandwidth.has_value());
    CHECK(*full.bandwidth < conversion_bandwidth(sa));
}

TEST_CASE("cascade: a dark receiver blocks the link") {
    const auto sf = matched(felix(), 4e-3, 400e6, 401);
    const auto sa = matched(albert(), 0.0, 400e6, 401);
    const auto link = cascade(sf, sa, km_fiber(1.0), std::nullopt);
    for (const auto& v : link.s_link) CHECK(v == cplx(0.0, 0.0));
    CHECK(std::isinf(link.peak_transmission_db));
    CHECK(!link.bandwidth.has_value());
}

TEST_CASE("cascade: mismatched grids are rejected") {
    const auto sf = matched(felix(), 4e-3, 400e6, 401);
    const auto sa = matched(albert(), 4e-3, 300e6, 401);
    try {
        cascade(sf, sa, km_fiber(1.0), std::nullopt);
        FAIL("expected incompatible-grids");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::incompatible_grids);
    }
    const auto sb = matched(albert(), 4e-3, 400e6, 403);
    CHECK_THROWS_AS(cascade(sf, sb, km_fiber(1.0), std::nullopt), Error);
}

TEST_CASE("unwrapped_phase: removes 2 pi jumps") {
    std::vector<cplx> s;
    for (int i = 0; i < 200; ++i) s.push_back(std::polar(1.0, -0.7 * i));
    const auto p = unwrapped_phase(s);
    for (int i = 0; i < 200; ++i) CHECK(p[i] == doctest::Approx(-0.7 * i).epsilon(1e-12).scale(1.0));
}

TEST_CASE("budget_table: 1 km reference rows") {
    const auto rows = budget_table({1000.0});
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].technology == Technology::coax);
    CHECK(rows[0].total_loss_db == doctest::Approx(1000.0).epsilon(1e-14));
    CHECK(rows[1].technology == Technology::eom_pair);
    CHECK(rows[1].total_loss_db == doctest::Approx(140.2).epsilon(1e-14));
    CHECK(rows[2].technology == Technology::transducer_pair_onchip);
    CHECK(rows[2].total_loss_db == doctest::Approx(60.2).epsilon(1e-14));
    CHECK(rows[3].technology == Technology::transducer_pair_offchip);
    CHECK(rows[3].total_loss_db - rows[2].total_loss_db == doctest::Approx(23.7).epsilon(1e-12));
}

TEST_CASE("budget_table: grouping, monotonicity and crossover") {
    const std::vector<double> d{0.0, 10.0, 100.0, 1000.0, 1e4};
    const auto rows = budget_table(d);
    REQUIRE(rows.size() == 20);
    for (std::size_t t = 0; t < 4; ++t)
        for (std::size_t i = 0; i < d.size(); ++i) {
            CHECK(rows[t * d.size() + i].distance == d[i]);
            if (i > 0) CHECK(rows[t * d.size() + i].total_loss_db >= rows[t * d.size() + i - 1].total_loss_db);
        }
    // Coax is best at 10 m and worst at 1 km.
    CHECK(rows[1].total_loss_db < rows[11].total_loss_db);
    CHECK(rows[3].total_loss_db > rows[18].total_loss_db);
    CHECK_THROWS_AS(budget_table({-1.0}), Error);
    CHECK(to_string(Technology::transducer_pair_offchip) == "transducer_pair_offchip");
}

TEST_CASE("link and budget CSV writers") {
    const auto dir = std::filesystem::temp_directory_path() / "eolink_link_test";
    std::filesystem::create_directories(dir);
    const auto link = cascade(matched(felix(), 4e-3, 400e6, 101), matched(albert(), 4e-3, 400e6, 101),
                              km_fiber(1.0), std::nullopt);
    write_link_csv(dir / "link.csv", link);
    const auto t = io::read_table(dir / "link.csv");
    CHECK(t.header == std::vector<std::string>{"detuning_hz", "re", "im", "mag_db", "phase_rad"});
    REQUIRE(t.rows.size() == 101);
    CHECK(t.rows[50][t.column("re")] == link.s_link[50].real());
    CHECK(t.rows[50][t.column("mag_db")] == doctest::Approx(link.peak_transmission_db).epsilon(1e-12));

    write_budget_csv(dir / "budget.csv", budget_table({1000.0}));
    std::ifstream in(dir / "budget.csv");
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    CHECK(header == "technology,distance_m,loss_db");
    CHECK(first == "coax,1000,1000");
    std::filesystem::remove_all(dir);
}
