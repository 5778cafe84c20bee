#pragma once

#include <cstddef>
#include <vector>

#include "shf/spincore.hpp"

// Parameter sweeps and optimization over field strength and ion placement:
// rho(B) scans, rho_max over |B|, angular rho_max maps, nuclear level
// diagrams with avoided-crossing location, and jitter envelopes.

namespace shf {

struct FieldScan {
    std::vector<double> B_mT;       // strictly ascending
    std::vector<double> delta_g;    // kHz
    std::vector<double> delta_e;    // kHz
    std::vector<double> rho;
    Vec3 direction;
};

struct RhoMaxResult {
    double rho_max;
    double B_opt_mT;
    bool degenerate; // rho flat over the whole search range (direction-independent angle)
};

struct RhoMap {
    std::vector<double> theta;      // polar grid, radians, ascending, [0, pi]
    std::vector<double> phi;        // azimuthal grid, radians, ascending, [0, 2pi]
    std::vector<double> values;     // row-major [theta x phi], entries in [0,1]
    Vec3 field_direction;
    double at(std::size_t i, std::size_t j) const { return values[i * phi.size() + j]; }
};

struct LevelDiagram {
    std::vector<double> B_mT;
    // per manifold: +/- delta/2 branches (kHz)
    std::vector<double> ground_upper, ground_lower;
    std::vector<double> excited_upper, excited_lower;
    double ground_gap_B_mT, ground_gap_kHz;   // minimum splitting, parabolic refinement
    double excited_gap_B_mT, excited_gap_kHz;
};

struct SensitivityBand {
    std::vector<double> B_mT;
    std::vector<double> delta_g_lo, delta_g_hi; // kHz envelopes
    std::vector<double> delta_e_lo, delta_e_hi;
    std::vector<double> rho_lo, rho_hi;
};

struct BRange {
    double lo_mT = 0.1;
    double hi_mT = 500.0;
};

FieldScan field_scan(const SpinCenter& center, const NuclearSite& site,
                     const Vec3& direction, BRange range, std::size_t n_points);

// Maximize rho over |B| at fixed field direction for an ion along r_hat at
// r_mag angstrom: 200-point log-spaced coarse grid, then golden-section
// refinement to dB/B <= 1e-4.
RhoMaxResult rho_max_over_field(const SpinCenter& center, const Vec3& field_direction,
                                const Vec3& r_hat, double r_mag_angstrom,
                                BRange range = {}, std::size_t coarse_points = 200);

// rho_max over a (theta, phi) grid of ion directions.  Grid points are
// independent work units; the parallel kernel writes each entry into its
// index slot, so output is bitwise identical for any thread count.
RhoMap rho_map(const SpinCenter& center, const Vec3& field_direction,
               std::size_t n_theta, std::size_t n_phi, double r_mag_angstrom,
               BRange range = {}, bool parallel = true);

LevelDiagram level_diagram(const SpinCenter& center, const NuclearSite& site,
                           const Vec3& direction, BRange range, std::size_t n_points);

SensitivityBand sensitivity_band(const SpinCenter& center, const NuclearSite& site,
                                 const Vec3& direction, BRange range, std::size_t n_points,
                                 double orientation_jitter_deg, double strength_jitter_rel,
                                 std::size_t n_samples, unsigned seed = 1);

} // namespace shf
