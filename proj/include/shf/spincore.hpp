#pragma once

#include <complex>
#include <stdexcept>

#include "shf/constants.hpp"
#include "shf/geometry.hpp"

// Closed-form kernels for an anisotropic effective spin-1/2 coupled to a
// nearby nuclear spin: Zeeman splittings, electron-moment expectation
// values, point-dipole fields, perturbative effective fields at the nuclear
// site, superhyperfine splittings and the optical branching contrast.

namespace shf {

using GTensor = Mat3;

enum class Site { site1, site2 };
enum class Orientation { A, B };

// Electron Zeeman branch.  "minus" is the lower branch (Zeeman energy
// negative, moment projection along the field positive); "plus" the upper.
enum class Branch { plus, minus };

struct SpinCenter {
    GTensor g_ground;
    GTensor g_excited;
    Site site_label = Site::site1;
    Orientation orientation = Orientation::A;
};

struct NuclearSite {
    Vec3 position_angstrom;   // relative to the electron spin, crystal frame
    double gamma_MHz_per_T;   // magnitude convention, > 0
};

struct ShfResult {
    Vec3 B_g;        // total field at the nucleus, electron in ground manifold (T)
    Vec3 B_e;        // same for the excited manifold (T)
    double alpha;    // angle between B_g and B_e (rad)
    double delta_g;  // ground-manifold superhyperfine splitting (kHz)
    double delta_e;  // excited-manifold splitting (kHz)
    double R;        // branching ratio tan^2(alpha/2)
    double rho;      // branching contrast sin^2(alpha) = 4R/(1+R)^2
};

// Error taxonomy.  Invalid inputs (bad arguments, malformed data) are
// distinguished from computation-domain failures so the CLI can map them to
// different exit codes.
struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ComputationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateQuantization : ComputationError {
    using ComputationError::ComputationError;
};
struct UnphysicalGeometry : ComputationError {
    using ComputationError::ComputationError;
};
struct UndefinedAngle : ComputationError {
    using ComputationError::ComputationError;
};

// nu = (mu_B/h) |g^T B|, returned in GHz.  Linear in |B|.
double zeeman_splitting(const GTensor& g, const FieldSpec& field);

// Convenience: GHz per tesla along a unit direction.
double zeeman_coefficient(const GTensor& g, const Vec3& direction);

// <mu> for the chosen Zeeman branch, J/T.  Depends only on the field
// direction.  minus (lower) branch: +(mu_B/2) g n_hat with
// n_hat = g^T B_hat / |g^T B_hat|; plus branch is the negation.
Vec3 er_moment_expectation(const GTensor& g, const Vec3& field_direction, Branch branch);

// Point-dipole field of moment m (J/T) at displacement r (angstrom), in
// tesla: (mu0/4pi) [3(m.r_hat)r_hat - m] / r^3.
Vec3 dipole_field(const Vec3& moment, const Vec3& r_angstrom,
                  double min_r_angstrom = 0.5);

// Total field at the nuclear site for electron ground/excited manifolds:
// B_{g,e} = B_ext + dipole field of the respective branch moment.
struct EffectiveFields {
    Vec3 B_g;
    Vec3 B_e;
};
EffectiveFields effective_fields(const SpinCenter& center, const NuclearSite& site,
                                 const FieldSpec& field, Branch branch = Branch::minus);

struct BranchingResult {
    double alpha;
    double R;
    double rho;
};
// alpha = angle(B_g, B_e); R = tan^2(alpha/2); rho = 4R/(1+R)^2 = sin^2(alpha).
BranchingResult branching(const Vec3& B_g, const Vec3& B_e);

ShfResult shf_solve(const SpinCenter& center, const NuclearSite& site,
                    const FieldSpec& field, Branch branch = Branch::minus);

// Wigner D^{1/2}(alpha, beta, gamma), z-y-z Euler convention.  Unitary with
// unit-modulus determinant.
Eigen::Matrix2cd wigner_d_half(double alpha_e, double beta_e, double gamma_e);

} // namespace shf
