#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>

#include "config_reader.hpp"
#include "eolink/cli.hpp"
#include "eolink/comm.hpp"
#include "eolink/constants.hpp"
#include "eolink/device_file.hpp"
#include "eolink/error.hpp"
#include "eolink/fields.hpp"
#include "eolink/io.hpp"
#include "eolink/link.hpp"
#include "eolink/matcher.hpp"
#include "eolink/model.hpp"
#include "eolink/noise.hpp"
#include "eolink/spectra.hpp"

#ifndef EOLINK_VERSION
#define EOLINK_VERSION "0.0.0"
#endif

namespace eolink::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view tool_version() { return EOLINK_VERSION; }

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorKind::io, "sha256 failed");
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i)
        out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return out.str();
}

namespace {

std::string file_digest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return sha256_hex(buf.str());
}

// Files created by one run, removed again unless commit() is reached.
class Outputs {
public:
    explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}
    Outputs(const Outputs&) = delete;
    Outputs& operator=(const Outputs&) = delete;
    ~Outputs() {
        if (committed_) return;
        std::error_code ec;
        for (const auto& f : files_) fs::remove(f, ec);
    }

    fs::path add(const std::string& name) {
        fs::path p = dir_ / name;
        files_.push_back(p);
        return p;
    }
    void commit() { committed_ = true; }
    const std::vector<fs::path>& files() const { return files_; }

private:
    fs::path dir_;
    std::vector<fs::path> files_;
    bool committed_ = false;
};

void write_json(const fs::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
    out << doc.dump(2) << '\n';
    if (!out) throw Error(ErrorKind::io, "write failed: " + path.string());
}

struct Job {
    std::optional<std::uint64_t> seed;
    std::function<json(Outputs&)> execute;
};

TransducerSpec device(ConfigReader& r, const std::string& key) {
    const fs::path p = r.path(key);
    TransducerSpec spec = load_transducer(p);
    r.record(key, transducer_to_json(spec));
    return spec;
}

FrequencyGrid grid_section(ConfigReader& r, double default_center, double default_span,
                           long long default_points) {
    FrequencyGrid g;
    if (!r.has("grid")) {
        g = {default_center, default_span, static_cast<int>(default_points)};
        r.record("grid", {{"center_hz", g.center}, {"span_hz", g.span}, {"points", g.points}});
        g.validate();
        return g;
    }
    ConfigReader gr = r.section("grid");
    g.center = gr.number("center_hz", default_center);
    g.span = gr.number("span_hz", default_span);
    g.points = static_cast<int>(gr.integer("points", default_points));
    gr.finish();
    g.validate();
    return g;
}

// Optical offset that places a device at its DC-tuned operating point
// (omega_m = omega_+ - omega_-) or leaves the listed mode frequencies as is.
double operating_offset(const TransducerSpec& s, bool intra_matched) {
    return intra_matched ? -s.intra_cavity_residual() : 0.0;
}

double default_span(const TransducerSpec& s) {
    return 40.0 * std::max(s.microwave.kappa_total(), s.blue_mode.kappa_total());
}

// --- efficiency ------------------------------------------------------------

Job prepare_efficiency(ConfigReader& r) {
    TransducerSpec spec = device(r, "device");
    std::vector<double> powers = r.numbers("powers_w");
    r.finish();
    return {std::nullopt, [spec, powers](Outputs& out) {
                const auto sweep = efficiency_sweep(spec, powers);
                io::CsvWriter w(out.add("efficiency.csv"),
                                {"power_w", "n_minus", "g_eo_enhanced_hz", "cooperativity", "eta"});
                json rows = json::array();
                for (const auto& p : sweep) {
                    w.cell(p.power).cell(p.state.n_minus).cell(p.state.G_eo).cell(p.state.cooperativity).cell(p.eta);
                    w.end_row();
                    rows.push_back({{"power_w", p.power}, {"eta", p.eta}});
                }
                return json{{"points", rows}};
            }};
}

// --- spectra / calibrate ---------------------------------------------------

Job prepare_spectra(ConfigReader& r) {
    TransducerSpec spec = device(r, "device");
    const double power = r.number("power_w");
    const FrequencyGrid grid = grid_section(r, spec.microwave.frequency, default_span(spec), 4001);
    const double offset = operating_offset(spec, r.boolean("intra_cavity_matched", true));
    r.finish();
    return {std::nullopt, [spec, power, grid, offset](Outputs& out) {
                const PumpSpec pump{power, spec.red_mode.frequency};
                const ScatterSpectra sp = scattering_spectra(spec, pump, grid, offset);
                write_spectra_csv(out.add("spectra.csv"), sp);
                json report{{"eta_model", efficiency(spec, pump).eta},
                            {"eta_calibrated", calibrate_efficiency(sp)},
                            {"bandwidth_hz", conversion_bandwidth(sp)}};
                write_json(out.add("spectra_report.json"), report);
                return report;
            }};
}

Job prepare_calibrate(ConfigReader& r) {
    const fs::path csv = r.path("spectra_csv");
    r.record("spectra_csv", {{"sha256", file_digest(csv)}});
    r.finish();
    return {std::nullopt, [csv](Outputs& out) {
                const ScatterSpectra sp = read_spectra_csv(csv);
                json report{{"eta_calibrated", calibrate_efficiency(sp)},
                            {"bandwidth_hz", conversion_bandwidth(sp)}};
                write_json(out.add("calibration_report.json"), report);
                return report;
            }};
}

// --- noise -----------------------------------------------------------------

struct NoiseLevel {
    double power = 0.0;
    BathOccupancies baths;
};

Job prepare_noise(ConfigReader& r) {
    TransducerSpec spec = device(r, "device");
    const MicrowaveModeParams mw = spec.microwave;
    const FrequencyGrid grid = grid_section(r, mw.frequency, 10.0 * mw.kappa_total(), 1001);
    std::vector<NoiseLevel> levels;
    for (ConfigReader& lr : r.sections("levels")) {
        NoiseLevel lvl;
        lvl.power = lr.number("power_w");
        const double delta = lr.number("delta_n_out_add", 0.0);
        if (lr.has("s_dev_on_resonance") || lr.has("s_dev_off_resonance")) {
            lvl.baths = infer_baths(lr.number("s_dev_on_resonance"), lr.number("s_dev_off_resonance"), mw, delta);
        } else {
            lvl.baths = {lr.number("n_ex"), lr.number("n_en"), delta};
            lvl.baths.validate();
        }
        lr.finish();
        levels.push_back(lvl);
    }
    r.finish();
    if (levels.empty()) throw UsageError("noise: 'levels' is empty");
    return {std::nullopt, [mw, grid, levels](Outputs& out) {
                io::CsvWriter w(out.add("noise.csv"), {"power_w", "n_ex", "n_en", "n_mode"});
                json rows = json::array();
                for (std::size_t i = 0; i < levels.size(); ++i) {
                    const NoiseSpectrum ns = output_noise_spectrum(mw, levels[i].baths, grid);
                    w.cell(levels[i].power).cell(levels[i].baths.n_ex).cell(levels[i].baths.n_en).cell(ns.n_mode);
                    w.end_row();
                    io::CsvWriter sw(out.add("s_dev_" + std::to_string(i) + ".csv"),
                                     {"frequency_hz", "detuning_hz", "s_dev"});
                    for (int k = 0; k < grid.points; ++k) {
                        sw.cell(grid.at(k)).cell(grid.at(k) - mw.frequency).cell(ns.s_dev[static_cast<std::size_t>(k)]);
                        sw.end_row();
                    }
                    rows.push_back({{"power_w", levels[i].power},
                                    {"n_ex", levels[i].baths.n_ex},
                                    {"n_en", levels[i].baths.n_en},
                                    {"n_mode", ns.n_mode}});
                }
                return json{{"levels", rows}};
            }};
}

// --- match -----------------------------------------------------------------

json plan_to_json(const VernierPlan& p) {
    return {{"k_felix", p.k_felix},
            {"k_albert", p.k_albert},
            {"mismatch_hz", p.mismatch},
            {"vernier_period_hz", std::isfinite(p.vernier_period) ? json(p.vernier_period) : json(nullptr)},
            {"voltages_v",
             {{"felix_v1", p.voltages[0]}, {"felix_v2", p.voltages[1]},
              {"albert_v1", p.voltages[2]}, {"albert_v2", p.voltages[3]}}},
            {"residuals_hz",
             {{"intra_felix", p.intra_felix}, {"intra_albert", p.intra_albert}, {"inter", p.inter}}},
            {"iterations", p.iterations}};
}

Job prepare_match(ConfigReader& r) {
    TransducerSpec felix = device(r, "felix");
    TransducerSpec albert = device(r, "albert");
    ResonanceComb comb_f{hybridize(felix.ring_pair).omega_plus, felix.ring_pair.fsr, 0, 0};
    ResonanceComb comb_a{hybridize(albert.ring_pair).omega_plus, albert.ring_pair.fsr, 0, 0};

    SearchWindow window;
    if (r.has("window")) {
        ConfigReader wr = r.section("window");
        const double center = wr.number("center_hz", comb_f.anchor);
        const double span = wr.number("span_hz");
        wr.finish();
        require(span >= 0.0, "match: window span must be >= 0");
        window = {center - 0.5 * span, center + 0.5 * span};
    } else {
        window = vernier_window(comb_f, comb_a, comb_f.anchor);
        r.record("window", {{"center_hz", window.center()}, {"span_hz", window.hi - window.lo}});
    }
    r.finish();

    // Index ranges wide enough to reach past both window edges.
    const auto cover = [&](ResonanceComb& c) {
        c.k_min = static_cast<int>(std::floor((window.lo - c.anchor) / c.fsr)) - 2;
        c.k_max = static_cast<int>(std::ceil((window.hi - c.anchor) / c.fsr)) + 2;
    };
    cover(comb_f);
    cover(comb_a);

    return {std::nullopt, [felix, albert, comb_f, comb_a, window](Outputs& out) {
                const MatchedPair pair = find_matched_pair(comb_f, comb_a, window);
                const VernierPlan plan = solve_matching(felix, albert, pair.k_a, pair.k_b);
                const json report = plan_to_json(plan);
                write_json(out.add("match_report.json"), report);
                return report;
            }};
}

// --- budget ----------------------------------------------------------------

Job prepare_budget(ConfigReader& r) {
    const std::vector<double> distances = r.numbers("distances_m", {0.0, 1.0, 10.0, 100.0, 1000.0, 10000.0});
    r.finish();
    return {std::nullopt, [distances](Outputs& out) {
                const auto rows = budget_table(distances);
                write_budget_csv(out.add("budget.csv"), rows);
                json j = json::array();
                for (const auto& row : rows)
                    j.push_back({{"technology", to_string(row.technology)},
                                 {"distance_m", row.distance},
                                 {"loss_db", row.total_loss_db}});
                return json{{"rows", j}};
            }};
}

// --- link ------------------------------------------------------------------

struct LinkSetup {
    TransducerSpec felix, albert;
    double felix_power = 0.0, albert_power = 0.0;
    double span = 0.0;
    int points = 0;
    FiberSpec fiber;
    std::optional<CouplerSpec> couplers;
    double inter_residual = 0.0;
    bool intra_matched = true;

    LinkResponse run() const {
        const FrequencyGrid gf{felix.microwave.frequency, span, points};
        const FrequencyGrid ga{albert.microwave.frequency, span, points};
        const ScatterSpectra sf = scattering_spectra(felix, {felix_power, felix.red_mode.frequency}, gf,
                                                     operating_offset(felix, intra_matched));
        const ScatterSpectra sa =
            scattering_spectra(albert, {albert_power, albert.red_mode.frequency}, ga,
                               operating_offset(albert, intra_matched) + inter_residual);
        return cascade(sf, sa, fiber, couplers);
    }
};

LinkSetup read_link(ConfigReader& r) {
    LinkSetup s;
    s.felix = device(r, "felix");
    s.albert = device(r, "albert");
    s.felix_power = r.number("felix_power_w");
    s.albert_power = r.number("albert_power_w");
    const double span = 40.0 * std::max(s.felix.microwave.kappa_total(), s.albert.microwave.kappa_total());
    if (r.has("grid")) {
        ConfigReader gr = r.section("grid");
        s.span = gr.number("span_hz", span);
        s.points = static_cast<int>(gr.integer("points", 4001));
        gr.finish();
    } else {
        s.span = span;
        s.points = 4001;
        r.record("grid", {{"span_hz", s.span}, {"points", s.points}});
    }
    if (r.has("fiber")) {
        ConfigReader fr = r.section("fiber");
        s.fiber.length = fr.number("length_m", s.fiber.length);
        s.fiber.attenuation = fr.number("attenuation_db_per_km", s.fiber.attenuation);
        s.fiber.effective_index = fr.number("effective_index", s.fiber.effective_index);
        s.fiber.carrier_frequency = fr.number("carrier_frequency_hz", s.felix.blue_mode.frequency);
        fr.finish();
    } else {
        s.fiber.carrier_frequency = s.felix.blue_mode.frequency;
        r.record("fiber", {{"length_m", s.fiber.length},
                           {"attenuation_db_per_km", s.fiber.attenuation},
                           {"effective_index", s.fiber.effective_index},
                           {"carrier_frequency_hz", s.fiber.carrier_frequency}});
    }
    s.fiber.validate();
    if (r.has("couplers")) {
        ConfigReader cr = r.section("couplers");
        CouplerSpec c;
        c.insertion_loss_db = cr.number("insertion_loss_db", c.insertion_loss_db);
        c.passes = static_cast<int>(cr.integer("passes", c.passes));
        cr.finish();
        c.validate();
        s.couplers = c;
    }
    s.inter_residual = r.number("inter_cavity_residual_hz", 0.0);
    s.intra_matched = r.boolean("intra_cavity_matched", true);
    return s;
}

Job prepare_link(ConfigReader& r) {
    const LinkSetup setup = read_link(r);
    r.finish();
    return {std::nullopt, [setup](Outputs& out) {
                const LinkResponse lr = setup.run();
                write_link_csv(out.add("link.csv"), lr);
                const std::size_t mid = lr.s_link.size() / 2;
                json report{{"peak_transmission_db", lr.peak_transmission_db},
                            {"bandwidth_hz", lr.bandwidth ? json(*lr.bandwidth) : json(nullptr)},
                            {"center_gain_re", lr.s_link[mid].real()},
                            {"center_gain_im", lr.s_link[mid].imag()}};
                write_json(out.add("link_report.json"), report);
                return report;
            }};
}

// --- qpsk ------------------------------------------------------------------

Job prepare_qpsk(ConfigReader& r) {
    cplx gain;
    if (r.has("link")) {
        ConfigReader lr = r.section("link");
        LinkSetup setup = read_link(lr);
        lr.finish();
        setup.points = 3;
        const LinkResponse resp = setup.run();
        gain = resp.s_link[1];
    } else {
        ConfigReader gr = r.section("link_gain");
        gain = {gr.number("re"), gr.number("im", 0.0)};
        gr.finish();
    }

    QpskRun run;
    std::vector<double> syms = r.numbers("symbols", {0, 1, 2, 3});
    run.symbols.clear();
    for (const double s : syms) {
        if (s != std::floor(s)) throw UsageError("qpsk: symbols must be integers 0..3");
        run.symbols.push_back(static_cast<int>(s));
    }
    run.repeats_per_phase = static_cast<int>(r.integer("repeats_per_phase", 50));
    run.amplitude_in = r.number("amplitude_in", 1.0);
    run.seed = static_cast<std::uint64_t>(r.integer("seed", 1));

    const int noise_keys = int(r.has("noise_sigma")) + int(r.has("snr_db")) + int(r.has("occupancy"));
    if (noise_keys > 1) throw UsageError("qpsk: give at most one of noise_sigma, snr_db, occupancy");
    if (r.has("snr_db")) {
        const double snr = std::pow(10.0, r.number("snr_db") / 10.0);
        run.noise_sigma = std::abs(gain * run.amplitude_in) / std::sqrt(2.0 * snr);
    } else if (r.has("occupancy")) {
        ConfigReader orr = r.section("occupancy");
        run.noise_sigma = noise_sigma_from_occupancy(orr.number("n_mode"), orr.number("scale"));
        orr.finish();
    } else {
        run.noise_sigma = r.number("noise_sigma", 0.0);
    }
    r.finish();
    run.validate();

    return {run.seed, [gain, run](Outputs& out) {
                const auto samples = qpsk_constellation(gain, run);
                io::CsvWriter w(out.add("constellation.csv"), {"symbol", "I", "Q"});
                for (const auto& s : samples) {
                    w.cell(std::to_string(s.symbol)).cell(s.i).cell(s.q);
                    w.end_row();
                }
                const auto means = cluster_means(samples);
                json jm = json::array();
                for (const auto& m : means) jm.push_back({m.real(), m.imag()});
                json report{{"link_gain", {gain.real(), gain.imag()}},
                            {"noise_sigma", run.noise_sigma},
                            {"snr", run.noise_sigma > 0.0 ? json(qpsk_snr(gain, run.amplitude_in, run.noise_sigma))
                                                          : json(nullptr)},
                            {"symbol_errors", count_symbol_errors(samples, gain, run.amplitude_in)},
                            {"samples", samples.size()},
                            {"cluster_means", jm}};
                write_json(out.add("qpsk_report.json"), report);
                return report;
            }};
}

// --- fringe ----------------------------------------------------------------

Job prepare_fringe(ConfigReader& r) {
    FringeScan scan;
    scan.signal_amplitude = r.number("signal_amplitude", 1.0);
    scan.lo_amplitude = r.number("lo_amplitude", scan.signal_amplitude);
    const double signal_phase = r.number("signal_phase_rad", 0.0);
    if (r.has("lo_phases_rad")) {
        scan.lo_phases = r.numbers("lo_phases_rad");
    } else {
        const auto n = r.integer("lo_phase_points", 73);
        if (n < 4) throw UsageError("fringe: lo_phase_points must be >= 4");
        for (long long k = 0; k < n; ++k)
            scan.lo_phases.push_back(constants::two_pi * static_cast<double>(k) / static_cast<double>(n));
    }
    const double sigma = r.number("noise_sigma", 0.0);
    const auto seed = static_cast<std::uint64_t>(r.integer("seed", 1));
    r.finish();
    scan.validate();
    require(sigma >= 0.0, "fringe: noise_sigma must be >= 0");

    return {seed, [scan, signal_phase, sigma, seed](Outputs& out) {
                auto samples = interference_fringe(scan, signal_phase);
                if (sigma > 0.0) {
                    std::mt19937_64 rng(seed);
                    std::normal_distribution<double> noise(0.0, sigma);
                    for (auto& s : samples) s.power += noise(rng);
                }
                io::CsvWriter w(out.add("fringe.csv"), {"lo_phase_rad", "power"});
                for (const auto& s : samples) {
                    w.cell(s.lo_phase).cell(s.power);
                    w.end_row();
                }
                const SineFit fit = fit_sine(samples);
                json report{{"offset", fit.offset},
                            {"amplitude", fit.amplitude},
                            {"phase0_rad", fit.phase0},
                            {"rms_residual", fit.rms_residual},
                            {"visibility_sampled", sampled_visibility(samples)},
                            {"visibility_formula", fringe_visibility(scan.signal_amplitude, scan.lo_amplitude)}};
                write_json(out.add("fringe_report.json"), report);
                return report;
            }};
}

// --- geo -------------------------------------------------------------------

Job prepare_geo(ConfigReader& r) {
    ProfilePaths paths;
    {
        ConfigReader pr = r.section("profiles");
        const auto take = [&](const char* key, fs::path& dst) {
            dst = pr.path(key);
            pr.record(key, {{"sha256", file_digest(dst)}});
        };
        take("u_oz", paths.u_oz);
        take("u_mr", paths.u_mr);
        take("u_mz", paths.u_mz);
        take("eps_ozz", paths.eps_ozz);
        take("eps_mrr", paths.eps_mrr);
        take("eps_mzz", paths.eps_mzz);
        pr.finish();
    }
    const double r33 = r.number("r33_m_per_v");
    const double radius = r.number("ring_radius_m");
    const double f_o = r.number("optical_frequency_hz");
    const double f_m = r.number("microwave_frequency_hz");
    r.finish();
    return {std::nullopt, [paths, r33, radius, f_o, f_m](Outputs& out) {
                const OverlapResult res = compute_geo(load_profiles(paths, r33, radius, f_o, f_m));
                json report{{"g_eo_hz", res.g_eo},
                            {"v_eff_optical", res.v_eff_optical},
                            {"v_eff_microwave", res.v_eff_microwave},
                            {"overlap_numerator", res.overlap_numerator}};
                write_json(out.add("geo_report.json"), report);
                return report;
            }};
}

using Preparer = Job (*)(ConfigReader&);

const std::map<std::string, Preparer>& registry() {
    static const std::map<std::string, Preparer> table{
        {"efficiency", prepare_efficiency}, {"spectra", prepare_spectra}, {"calibrate", prepare_calibrate},
        {"noise", prepare_noise},           {"match", prepare_match},     {"budget", prepare_budget},
        {"link", prepare_link},             {"qpsk", prepare_qpsk},       {"fringe", prepare_fringe},
        {"geo", prepare_geo},
    };
    return table;
}

Job prepare(const std::string& name, const json& config, const fs::path& base_dir, json& resolved) {
    const auto it = registry().find(name);
    if (it == registry().end()) throw UsageError("unknown subcommand '" + name + "'");
    ConfigReader reader(config, resolved, base_dir, name);
    return it->second(reader);
}

std::string hash_resolved(const std::string& name, const json& resolved) {
    return sha256_hex(json{{"subcommand", name}, {"config", resolved}}.dump());
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [k, _] : registry()) n.push_back(k);
        return n;
    }();
    return names;
}

std::string config_hash(const std::string& name, const json& config, const fs::path& base_dir) {
    json resolved = json::object();
    prepare(name, config, base_dir, resolved);
    return hash_resolved(name, resolved);
}

RunResult run_subcommand(const std::string& name, const json& config, const fs::path& base_dir,
                         const fs::path& out_dir) {
    json resolved = json::object();
    Job job = prepare(name, config, base_dir, resolved);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorKind::io, "cannot create output directory " + out_dir.string());

    Outputs outputs(out_dir);
    RunResult result;
    result.subcommand = name;
    result.config_hash = hash_resolved(name, resolved);
    result.seed = job.seed;
    result.report = job.execute(outputs);

    json names = json::array();
    for (const auto& f : outputs.files()) names.push_back(f.filename().string());
    const json manifest{{"tool", "eolink"},
                        {"version", tool_version()},
                        {"subcommand", name},
                        {"config_hash", result.config_hash},
                        {"seed", job.seed ? json(*job.seed) : json(nullptr)},
                        {"config", resolved},
                        {"outputs", names}};
    write_json(outputs.add("manifest.json"), manifest);
    outputs.commit();
    result.outputs = outputs.files();
    return result;
}

}  // namespace eolink::cli
