#include "shf/spincore.hpp"

namespace shf {

static void require_finite(const GTensor& g) {
    if (!g.allFinite())
        throw InvalidInput("g-tensor has non-finite entries");
}

double zeeman_splitting(const GTensor& g, const FieldSpec& field) {
    require_finite(g);
    if (field.magnitude_mT < 0.0)
        throw InvalidInput("field magnitude must be >= 0");
    const Vec3 B = field.tesla();
    return mu_bohr_over_h * (g.transpose() * B).norm() * hz_to_ghz;
}

double zeeman_coefficient(const GTensor& g, const Vec3& direction) {
    return zeeman_splitting(g, make_field(1000.0, direction)); // 1 T
}

Vec3 er_moment_expectation(const GTensor& g, const Vec3& field_direction, Branch branch) {
    require_finite(g);
    const double bn = field_direction.norm();
    if (!(bn > 0.0) || !std::isfinite(bn))
        throw InvalidInput("field direction must be a nonzero finite vector");
    const Vec3 b_hat = field_direction / bn;

    const Vec3 gtb = g.transpose() * b_hat;
    const double n = gtb.norm();
    if (n <= 0.0)
        throw DegenerateQuantization("g^T B_hat vanishes: no quantization axis");
    const Vec3 n_hat = gtb / n;

    // Lower branch: Zeeman energy -<mu>.B negative, so <mu>.B_hat > 0.
    const double sign = (branch == Branch::minus) ? +1.0 : -1.0;
    return sign * 0.5 * mu_bohr * (g * n_hat);
}

Vec3 dipole_field(const Vec3& moment, const Vec3& r_angstrom, double min_r_angstrom) {
    const double r_A = r_angstrom.norm();
    if (!(r_A > 0.0))
        throw UnphysicalGeometry("dipole field requested at zero displacement");
    if (r_A < min_r_angstrom)
        throw UnphysicalGeometry("dipole field requested below the minimum physical distance");
    const double r_m = r_A * angstrom;
    const Vec3 r_hat = r_angstrom / r_A;
    return mu0_over_4pi * (3.0 * moment.dot(r_hat) * r_hat - moment) / (r_m * r_m * r_m);
}

EffectiveFields effective_fields(const SpinCenter& center, const NuclearSite& site,
                                 const FieldSpec& field, Branch branch) {
    const Vec3 B_ext = field.tesla();
    Vec3 dir = field.direction;
    // At zero external field the branch moments are defined by the limiting
    // direction; the stored unit direction serves as that limit.
    const Vec3 mu_g = er_moment_expectation(center.g_ground, dir, branch);
    const Vec3 mu_e = er_moment_expectation(center.g_excited, dir, branch);
    return {B_ext + dipole_field(mu_g, site.position_angstrom),
            B_ext + dipole_field(mu_e, site.position_angstrom)};
}

BranchingResult branching(const Vec3& B_g, const Vec3& B_e) {
    const double ng = B_g.norm();
    const double ne = B_e.norm();
    if (!(ng > 0.0) || !(ne > 0.0))
        throw UndefinedAngle("branching angle undefined for a zero effective field");
    const double alpha = angle_between(B_g, B_e);
    const double t = std::tan(0.5 * alpha);
    const double R = t * t;
    const double s = std::sin(alpha);
    return {alpha, R, s * s};
}

ShfResult shf_solve(const SpinCenter& center, const NuclearSite& site,
                    const FieldSpec& field, Branch branch) {
    if (!(site.gamma_MHz_per_T > 0.0))
        throw InvalidInput("nuclear gyromagnetic ratio must be positive");
    const EffectiveFields eff = effective_fields(center, site, field, branch);
    const BranchingResult br = branching(eff.B_g, eff.B_e);
    // Delta = gamma |B_eff|: (MHz/T * T) -> MHz -> kHz.
    const double delta_g = site.gamma_MHz_per_T * eff.B_g.norm() * 1e3;
    const double delta_e = site.gamma_MHz_per_T * eff.B_e.norm() * 1e3;
    return {eff.B_g, eff.B_e, br.alpha, delta_g, delta_e, br.R, br.rho};
}

Eigen::Matrix2cd wigner_d_half(double alpha_e, double beta_e, double gamma_e) {
    if (!std::isfinite(alpha_e) || !std::isfinite(beta_e) || !std::isfinite(gamma_e))
        throw InvalidInput("Euler angles must be finite");
    using namespace std::complex_literals;
    const double c = std::cos(0.5 * beta_e);
    const double s = std::sin(0.5 * beta_e);
    Eigen::Matrix2cd d;
    d(0, 0) = std::exp(-0.5i * (alpha_e + gamma_e)) * c;
    d(0, 1) = -std::exp(-0.5i * (alpha_e - gamma_e)) * s;
    d(1, 0) = std::exp(0.5i * (alpha_e - gamma_e)) * s;
    d(1, 1) = std::exp(0.5i * (alpha_e + gamma_e)) * c;
    return d;
}

} // namespace shf
