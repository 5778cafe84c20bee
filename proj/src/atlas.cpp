#include "shf/atlas.hpp"

#include <algorithm>
#include <cmath>

namespace shf {

namespace {

// Per-direction prework: branch moments and their unit-distance dipole
// fields depend only on the field direction, not |B|.
struct DirectionKernel {
    Vec3 B_hat;
    Vec3 dip_g; // dipole field at the site for the ground-manifold moment (T)
    Vec3 dip_e;

    DirectionKernel(const SpinCenter& center, const Vec3& field_direction,
                    const Vec3& site_angstrom) {
        B_hat = field_direction.normalized();
        const Vec3 mu_g = er_moment_expectation(center.g_ground, B_hat, Branch::minus);
        const Vec3 mu_e = er_moment_expectation(center.g_excited, B_hat, Branch::minus);
        dip_g = dipole_field(mu_g, site_angstrom);
        dip_e = dipole_field(mu_e, site_angstrom);
    }

    double rho(double B_mT) const {
        const Vec3 B = B_hat * (B_mT * millitesla);
        const double a = angle_between(B + dip_g, B + dip_e);
        const double s = std::sin(a);
        return s * s;
    }
};

void check_range(const BRange& range) {
    if (!(range.lo_mT > 0.0) || !(range.hi_mT > range.lo_mT))
        throw InvalidInput("field range must satisfy 0 < lo < hi");
}

double parabolic_vertex(double x0, double x1, double x2, double y0, double y1, double y2) {
    const double num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
    const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    if (den == 0.0)
        return x1;
    const double v = x1 - 0.5 * num / den;
    return std::clamp(v, std::min(x0, x2), std::max(x0, x2));
}

// Radical-inverse (van der Corput) in the given base; Halton component.
double radical_inverse(unsigned base, unsigned long long i) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

} // namespace

FieldScan field_scan(const SpinCenter& center, const NuclearSite& site,
                     const Vec3& direction, BRange range, std::size_t n_points) {
    check_range(range);
    if (n_points < 2)
        throw InvalidInput("field scan needs at least 2 points");
    FieldScan scan;
    scan.direction = direction.normalized();
    scan.B_mT.resize(n_points);
    scan.delta_g.resize(n_points);
    scan.delta_e.resize(n_points);
    scan.rho.resize(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double B = range.lo_mT + (range.hi_mT - range.lo_mT) *
                                           static_cast<double>(i) /
                                           static_cast<double>(n_points - 1);
        const ShfResult r = shf_solve(center, site, {B, scan.direction});
        scan.B_mT[i] = B;
        scan.delta_g[i] = r.delta_g;
        scan.delta_e[i] = r.delta_e;
        scan.rho[i] = r.rho;
    }
    return scan;
}

RhoMaxResult rho_max_over_field(const SpinCenter& center, const Vec3& field_direction,
                                const Vec3& r_hat, double r_mag_angstrom,
                                BRange range, std::size_t coarse_points) {
    check_range(range);
    if (coarse_points < 3)
        throw InvalidInput("coarse grid needs at least 3 points");
    const DirectionKernel kernel(center, field_direction, r_hat.normalized() * r_mag_angstrom);

    // Coarse log-spaced grid.
    std::vector<double> B(coarse_points), f(coarse_points);
    const double loglo = std::log(range.lo_mT), loghi = std::log(range.hi_mT);
    std::size_t best = 0;
    for (std::size_t i = 0; i < coarse_points; ++i) {
        B[i] = std::exp(loglo + (loghi - loglo) * static_cast<double>(i) /
                                    static_cast<double>(coarse_points - 1));
        f[i] = kernel.rho(B[i]);
        if (f[i] > f[best])
            best = i;
    }
    const double spread = *std::max_element(f.begin(), f.end()) -
                          *std::min_element(f.begin(), f.end());
    if (spread <= 1e-14) {
        const double mid = 0.5 * (range.lo_mT + range.hi_mT);
        return {kernel.rho(mid), mid, true};
    }

    // Golden-section refinement inside the bracketing cells.
    double a = B[best > 0 ? best - 1 : 0];
    double b = B[std::min(best + 1, coarse_points - 1)];
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = kernel.rho(x1), f2 = kernel.rho(x2);
    while ((b - a) > 1e-4 * b) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = kernel.rho(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = kernel.rho(x1);
        }
    }
    double B_opt = 0.5 * (a + b);
    double rho_opt = kernel.rho(B_opt);
    // Never report less than the best coarse sample.
    if (f[best] > rho_opt) {
        rho_opt = f[best];
        B_opt = B[best];
    }
    return {rho_opt, B_opt, false};
}

RhoMap rho_map(const SpinCenter& center, const Vec3& field_direction,
               std::size_t n_theta, std::size_t n_phi, double r_mag_angstrom,
               BRange range, bool parallel) {
    if (n_theta < 1 || n_phi < 1)
        throw InvalidInput("map grids must be non-empty");
    RhoMap map;
    map.field_direction = field_direction.normalized();
    map.theta.resize(n_theta);
    map.phi.resize(n_phi);
    for (std::size_t i = 0; i < n_theta; ++i)
        map.theta[i] = M_PI * static_cast<double>(i) /
                       static_cast<double>(std::max<std::size_t>(n_theta - 1, 1));
    for (std::size_t j = 0; j < n_phi; ++j)
        map.phi[j] = 2.0 * M_PI * static_cast<double>(j) /
                     static_cast<double>(std::max<std::size_t>(n_phi - 1, 1));
    map.values.assign(n_theta * n_phi, 0.0);

    const auto total = static_cast<long long>(n_theta * n_phi);
    // Each grid point writes only its own slot: output is independent of
    // both thread count and execution order.
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 8)
        for (long long idx = 0; idx < total; ++idx) {
            const std::size_t i = static_cast<std::size_t>(idx) / n_phi;
            const std::size_t j = static_cast<std::size_t>(idx) % n_phi;
            const Vec3 r_hat = unit_from_angles(map.theta[i], map.phi[j]);
            map.values[idx] =
                rho_max_over_field(center, map.field_direction, r_hat, r_mag_angstrom, range)
                    .rho_max;
        }
    } else {
        for (long long idx = 0; idx < total; ++idx) {
            const std::size_t i = static_cast<std::size_t>(idx) / n_phi;
            const std::size_t j = static_cast<std::size_t>(idx) % n_phi;
            const Vec3 r_hat = unit_from_angles(map.theta[i], map.phi[j]);
            map.values[idx] =
                rho_max_over_field(center, map.field_direction, r_hat, r_mag_angstrom, range)
                    .rho_max;
        }
    }
    return map;
}

LevelDiagram level_diagram(const SpinCenter& center, const NuclearSite& site,
                           const Vec3& direction, BRange range, std::size_t n_points) {
    const FieldScan scan = field_scan(center, site, direction, range, n_points);
    LevelDiagram d;
    d.B_mT = scan.B_mT;
    const std::size_t n = scan.B_mT.size();
    d.ground_upper.resize(n);
    d.ground_lower.resize(n);
    d.excited_upper.resize(n);
    d.excited_lower.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        d.ground_upper[i] = 0.5 * scan.delta_g[i];
        d.ground_lower[i] = -0.5 * scan.delta_g[i];
        d.excited_upper[i] = 0.5 * scan.delta_e[i];
        d.excited_lower[i] = -0.5 * scan.delta_e[i];
    }

    const Vec3 dir = scan.direction;
    auto refine_gap = [&](const std::vector<double>& delta, bool excited,
                          double& B_out, double& gap_out) {
        std::size_t i = static_cast<std::size_t>(
            std::min_element(delta.begin(), delta.end()) - delta.begin());
        double B_star = scan.B_mT[i];
        if (i > 0 && i + 1 < delta.size())
            B_star = parabolic_vertex(scan.B_mT[i - 1], scan.B_mT[i], scan.B_mT[i + 1],
                                      delta[i - 1], delta[i], delta[i + 1]);
        const ShfResult r = shf_solve(center, site, {B_star, dir});
        const double refined = excited ? r.delta_e : r.delta_g;
        if (refined <= delta[i]) {
            B_out = B_star;
            gap_out = refined;
        } else {
            B_out = scan.B_mT[i];
            gap_out = delta[i];
        }
    };
    refine_gap(scan.delta_g, false, d.ground_gap_B_mT, d.ground_gap_kHz);
    refine_gap(scan.delta_e, true, d.excited_gap_B_mT, d.excited_gap_kHz);
    return d;
}

SensitivityBand sensitivity_band(const SpinCenter& center, const NuclearSite& site,
                                 const Vec3& direction, BRange range, std::size_t n_points,
                                 double orientation_jitter_deg, double strength_jitter_rel,
                                 std::size_t n_samples, unsigned seed) {
    if (orientation_jitter_deg < 0.0 || strength_jitter_rel < 0.0)
        throw InvalidInput("jitters must be >= 0");
    const FieldScan nominal = field_scan(center, site, direction, range, n_points);

    SensitivityBand band;
    band.B_mT = nominal.B_mT;
    band.delta_g_lo = nominal.delta_g;
    band.delta_g_hi = nominal.delta_g;
    band.delta_e_lo = nominal.delta_e;
    band.delta_e_hi = nominal.delta_e;
    band.rho_lo = nominal.rho;
    band.rho_hi = nominal.rho;

    const Vec3 d = nominal.direction;
    const Vec3 helper = std::abs(d.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
    const Vec3 e1 = d.cross(helper).normalized();
    const Vec3 e2 = d.cross(e1);

    for (std::size_t s = 1; s <= n_samples; ++s) {
        const unsigned long long idx = seed + s;
        const double u1 = radical_inverse(2, idx);
        const double u2 = radical_inverse(3, idx);
        const double u3 = radical_inverse(5, idx);
        const double tilt = orientation_jitter_deg * (M_PI / 180.0) * std::sqrt(u1);
        const double az = 2.0 * M_PI * u2;
        const Vec3 dir_s = std::cos(tilt) * d +
                           std::sin(tilt) * (std::cos(az) * e1 + std::sin(az) * e2);
        const double factor = 1.0 + strength_jitter_rel * (2.0 * u3 - 1.0);

        for (std::size_t i = 0; i < band.B_mT.size(); ++i) {
            const ShfResult r = shf_solve(center, site, {band.B_mT[i] * factor, dir_s});
            band.delta_g_lo[i] = std::min(band.delta_g_lo[i], r.delta_g);
            band.delta_g_hi[i] = std::max(band.delta_g_hi[i], r.delta_g);
            band.delta_e_lo[i] = std::min(band.delta_e_lo[i], r.delta_e);
            band.delta_e_hi[i] = std::max(band.delta_e_hi[i], r.delta_e);
            band.rho_lo[i] = std::min(band.rho_lo[i], r.rho);
            band.rho_hi[i] = std::max(band.rho_hi[i], r.rho);
        }
    }
    return band;
}

} // namespace shf
