#include "eolink/fields.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "eolink/constants.hpp"
#include "eolink/error.hpp"
#include "eolink/io.hpp"

namespace eolink {

namespace {

bool strictly_increasing(const std::vector<double>& g) {
    for (std::size_t i = 1; i < g.size(); ++i)
        if (!(g[i] > g[i - 1])) return false;
    return true;
}

Eigen::VectorXd trapezoid_weights(const std::vector<double>& grid) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        const double h = grid[i + 1] - grid[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    return w;
}

}  // namespace

void FieldProfileSet::validate() const {
    require(grid_r.size() >= 2 && grid_z.size() >= 2, "profiles: grid needs >= 2 points per axis");
    require(strictly_increasing(grid_r) && strictly_increasing(grid_z),
            "profiles: grids must be strictly increasing");
    const auto nr = static_cast<Eigen::Index>(grid_r.size());
    const auto nz = static_cast<Eigen::Index>(grid_z.size());
    for (const FieldMap* m : {&u_oz, &u_mr, &u_mz, &eps_ozz, &eps_mrr, &eps_mzz}) {
        require(m->rows() == nr && m->cols() == nz, "profiles: array shape differs from grid");
        require(m->allFinite(), "profiles: non-finite sample");
    }
    for (const FieldMap* m : {&eps_ozz, &eps_mrr, &eps_mzz})
        require((*m >= 0.0).all(), "profiles: permittivity must be >= 0");
    require(r33 >= 0.0, "profiles: r33 must be >= 0");
    require(ring_radius > 0.0, "profiles: ring_radius must be > 0");
    require(omega_o > 0.0 && omega_m > 0.0, "profiles: mode frequencies must be > 0");
}

double integrate_trapezoid(const std::vector<double>& grid_r, const std::vector<double>& grid_z,
                           const FieldMap& values) {
    const Eigen::VectorXd wr = trapezoid_weights(grid_r);
    const Eigen::VectorXd wz = trapezoid_weights(grid_z);
    return wr.dot(values.matrix() * wz);
}

OverlapResult compute_geo(const FieldProfileSet& p) {
    p.validate();
    using constants::epsilon_0;
    using constants::hbar;
    using constants::pi;
    using constants::two_pi;

    const FieldMap optical_intensity = p.u_oz.square();
    const double optical_norm = integrate_trapezoid(p.grid_r, p.grid_z, p.eps_ozz * optical_intensity);
    const double microwave_norm = integrate_trapezoid(
        p.grid_r, p.grid_z, p.eps_mrr * p.u_mr.square() + p.eps_mzz * p.u_mz.square());
    if (!(optical_norm > 0.0)) throw Error(ErrorKind::degenerate_profile, "optical normalization integral is zero");
    if (!(microwave_norm > 0.0)) throw Error(ErrorKind::degenerate_profile, "microwave normalization integral is zero");

    const double numerator = integrate_trapezoid(
        p.grid_r, p.grid_z, p.eps_ozz.square() * p.r33 * optical_intensity * p.u_mz);

    const double w_o = two_pi * p.omega_o;
    const double w_m = two_pi * p.omega_m;
    // omega_o appears twice under the root, as in the Hamiltonian reduction.
    const double prefactor = std::sqrt(hbar * w_o * w_o * w_m / (8.0 * pi * epsilon_0 * p.ring_radius));
    const double g_angular = prefactor * (numerator / optical_norm) / std::sqrt(microwave_norm);

    OverlapResult out;
    out.g_eo = g_angular / two_pi;
    out.v_eff_optical = two_pi * p.ring_radius * optical_norm;
    out.v_eff_microwave = 2.0 * two_pi * p.ring_radius * microwave_norm;
    out.overlap_numerator = numerator;
    return out;
}

ProfileComponent load_profile_component(const std::filesystem::path& path) {
    const io::Table table = io::read_table(path);
    if (table.header.size() != 3)
        throw Error(ErrorKind::io, path.string() + ": expected columns r, z, <component>");

    std::map<double, std::size_t> r_index, z_index;
    for (const auto& row : table.rows) {
        r_index.emplace(row[0], 0);
        z_index.emplace(row[1], 0);
    }
    ProfileComponent out;
    out.name = table.header[2];
    for (auto& [r, idx] : r_index) { idx = out.grid_r.size(); out.grid_r.push_back(r); }
    for (auto& [z, idx] : z_index) { idx = out.grid_z.size(); out.grid_z.push_back(z); }

    const auto nr = static_cast<Eigen::Index>(out.grid_r.size());
    const auto nz = static_cast<Eigen::Index>(out.grid_z.size());
    if (table.rows.size() != static_cast<std::size_t>(nr * nz))
        throw Error(ErrorKind::io, path.string() + ": samples do not form a full rectilinear grid");

    out.values = FieldMap::Constant(nr, nz, std::nan(""));
    for (const auto& row : table.rows) {
        double& cell = out.values(static_cast<Eigen::Index>(r_index[row[0]]),
                                  static_cast<Eigen::Index>(z_index[row[1]]));
        if (!std::isnan(cell)) throw Error(ErrorKind::io, path.string() + ": duplicate grid point");
        cell = row[2];
    }
    return out;
}

void write_profile_component(const std::filesystem::path& path, const std::string& name,
                             const std::vector<double>& grid_r,
                             const std::vector<double>& grid_z, const FieldMap& values) {
    io::CsvWriter w(path, {"r_m", "z_m", name});
    for (std::size_t i = 0; i < grid_r.size(); ++i)
        for (std::size_t j = 0; j < grid_z.size(); ++j) {
            w.cell(grid_r[i]).cell(grid_z[j]).cell(
                values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
            w.end_row();
        }
}

FieldProfileSet load_profiles(const ProfilePaths& paths, double r33, double ring_radius,
                              double omega_o, double omega_m) {
    const ProfileComponent u_oz = load_profile_component(paths.u_oz);
    FieldProfileSet set;
    set.grid_r = u_oz.grid_r;
    set.grid_z = u_oz.grid_z;
    set.u_oz = u_oz.values;

    const auto take = [&](const std::filesystem::path& p) {
        ProfileComponent c = load_profile_component(p);
        if (c.grid_r != set.grid_r || c.grid_z != set.grid_z)
            throw Error(ErrorKind::invalid_input, p.string() + ": grid differs from " + paths.u_oz.string());
        return std::move(c.values);
    };
    set.u_mr = take(paths.u_mr);
    set.u_mz = take(paths.u_mz);
    set.eps_ozz = take(paths.eps_ozz);
    set.eps_mrr = take(paths.eps_mrr);
    set.eps_mzz = take(paths.eps_mzz);
    set.r33 = r33;
    set.ring_radius = ring_radius;
    set.omega_o = omega_o;
    set.omega_m = omega_m;
    set.validate();
    return set;
}

}  // namespace eolink
