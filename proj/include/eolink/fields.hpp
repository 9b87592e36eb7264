#pragma once

// Single-photon electro-optic coupling rate from transverse (r, z) field
// profiles of the optical TM mode and the microwave capacitor field.

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <vector>

namespace eolink {

// Values sampled on a rectilinear grid: rows index r, columns index z.
using FieldMap = Eigen::ArrayXXd;

struct FieldProfileSet {
    std::vector<double> grid_r;  // m, strictly increasing
    std::vector<double> grid_z;  // m, strictly increasing
    FieldMap u_oz;     // optical TM profile, arbitrary units
    FieldMap u_mr;     // microwave radial component
    FieldMap u_mz;     // microwave vertical component
    FieldMap eps_ozz;  // relative permittivity seen by u_oz
    FieldMap eps_mrr;
    FieldMap eps_mzz;
    double r33 = 0.0;          // m/V
    double ring_radius = 0.0;  // m
    double omega_o = 0.0;      // Hz
    double omega_m = 0.0;      // Hz

    void validate() const;
};

struct OverlapResult {
    double g_eo = 0.0;  // Hz
    // 2 pi R * integral(eps_ozz |u_oz|^2); m^3 times profile units squared.
    double v_eff_optical = 0.0;
    // 4 pi R * integral(eps_mrr |u_mr|^2 + eps_mzz |u_mz|^2), both rings.
    double v_eff_microwave = 0.0;
    // integral(eps_ozz^2 r33 |u_oz|^2 u_mz) in m^3/V times profile units cubed.
    double overlap_numerator = 0.0;
};

// Trapezoidal integral over the grid.
double integrate_trapezoid(const std::vector<double>& grid_r, const std::vector<double>& grid_z,
                           const FieldMap& values);

OverlapResult compute_geo(const FieldProfileSet& profiles);

// One component read from a columnar "r z value" text file whose header row
// names the component (third column).
struct ProfileComponent {
    std::string name;
    std::vector<double> grid_r;
    std::vector<double> grid_z;
    FieldMap values;
};

ProfileComponent load_profile_component(const std::filesystem::path& path);
void write_profile_component(const std::filesystem::path& path, const std::string& name,
                             const std::vector<double>& grid_r,
                             const std::vector<double>& grid_z, const FieldMap& values);

struct ProfilePaths {
    std::filesystem::path u_oz, u_mr, u_mz, eps_ozz, eps_mrr, eps_mzz;
};

// Loads all six components and checks that they share one grid.
FieldProfileSet load_profiles(const ProfilePaths& paths, double r33, double ring_radius,
                              double omega_o, double omega_m);

}  // namespace eolink
