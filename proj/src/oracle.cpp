#include "shf/oracle.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>

namespace shf {

namespace {

using Mat2c = Eigen::Matrix2cd;
using Vec4c = Eigen::Vector4cd;

std::array<Mat2c, 3> pauli() {
    Mat2c sx, sy, sz;
    sx << 0, 1, 1, 0;
    sy << std::complex<double>(0, 0), std::complex<double>(0, -1),
          std::complex<double>(0, 1), std::complex<double>(0, 0);
    sz << 1, 0, 0, -1;
    return {sx, sy, sz};
}

// A . sigma/2 as a 2x2 operator.
Mat2c spin_along(const Vec3& a) {
    const auto s = pauli();
    return 0.5 * (a.x() * s[0] + a.y() * s[1] + a.z() * s[2]);
}

Hermitian4 kron(const Mat2c& a, const Mat2c& b) {
    Hermitian4 out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
}

const GTensor& manifold_g(const SpinCenter& c, Manifold m) {
    return m == Manifold::ground ? c.g_ground : c.g_excited;
}

// Electron Zeeman operator mu_B (g^T B).S on the electron factor, joules.
Mat2c electron_zeeman(const GTensor& g, const Vec3& B_tesla) {
    return mu_bohr * spin_along(g.transpose() * B_tesla);
}

// Lower-branch electron eigenstate of the 2x2 Zeeman problem.
Eigen::Vector2cd lower_branch_state(const GTensor& g, const Vec3& B_tesla) {
    Eigen::SelfAdjointEigenSolver<Mat2c> es(electron_zeeman(g, B_tesla));
    return es.eigenvectors().col(0); // ascending order: col 0 is the lower branch
}

struct ManifoldSolution {
    Eigen::Vector4d energies;      // joules, ascending
    Eigen::Matrix4cd states;       // columns match energies
    std::array<int, 2> lower_idx;  // indices of the lower-electron-branch pair, energy-ascending
    double zeeman_scale;           // |mu_B g^T B| in joules
    double coupling_scale;         // operator norm of the coupling term
};

ManifoldSolution solve_manifold(const SpinCenter& center, const NuclearSite& site,
                                const FieldSpec& field, Manifold manifold) {
    const GTensor& g = manifold_g(center, manifold);
    const Hermitian4 H = build_manifold_hamiltonian(center, site, field, manifold);

    Eigen::SelfAdjointEigenSolver<Hermitian4> es(H);
    ManifoldSolution sol;
    sol.energies = es.eigenvalues();
    sol.states = es.eigenvectors();

    const Vec3 B = field.tesla();
    const Hermitian4 V = kron(electron_zeeman(g, B), Mat2c::Identity());
    sol.zeeman_scale = mu_bohr * (g.transpose() * B).norm();

    // Coupling scale: largest |eigenvalue| of the dipole term alone.
    const Hermitian4 coup = H - V + kron(Mat2c::Identity(),
                                         planck_h * site.gamma_MHz_per_T * mhz_per_tesla *
                                             spin_along(B));
    Eigen::SelfAdjointEigenSolver<Hermitian4> ec(coup);
    sol.coupling_scale = ec.eigenvalues().cwiseAbs().maxCoeff();

    // Branch labeling by the expectation of the electron Zeeman operator,
    // which is robust to large nuclear/coupling shifts of the energies.
    std::array<double, 4> vexp{};
    for (int k = 0; k < 4; ++k) {
        const Vec4c v = sol.states.col(k);
        vexp[k] = std::real(v.dot(V * v));
    }
    std::array<int, 4> order{0, 1, 2, 3};
    std::sort(order.begin(), order.end(), [&](int a, int b) { return vexp[a] < vexp[b]; });
    // order[0], order[1] are the lower-branch pair
    const double sep = vexp[order[2]] - vexp[order[1]];
    if (!(sep > 1e-3 * sol.zeeman_scale))
        throw ComputationError("electron branches too close to label reliably");
    sol.lower_idx = {order[0], order[1]};
    if (sol.energies[sol.lower_idx[0]] > sol.energies[sol.lower_idx[1]])
        std::swap(sol.lower_idx[0], sol.lower_idx[1]);
    return sol;
}

} // namespace

Hermitian4 build_manifold_hamiltonian(const SpinCenter& center, const NuclearSite& site,
                                      const FieldSpec& field, Manifold manifold) {
    if (!(site.gamma_MHz_per_T > 0.0))
        throw InvalidInput("nuclear gyromagnetic ratio must be positive");
    const GTensor& g = manifold_g(center, manifold);
    if (!g.allFinite())
        throw InvalidInput("g-tensor has non-finite entries");

    const double r_A = site.position_angstrom.norm();
    if (!(r_A > 0.0) || r_A < 0.5)
        throw UnphysicalGeometry("nuclear site unphysically close to the electron spin");
    const double r_m = r_A * angstrom;
    const Vec3 r_hat = site.position_angstrom / r_A;

    const Vec3 B = field.tesla();
    const double gamma_hz = site.gamma_MHz_per_T * mhz_per_tesla;

    const auto s = pauli();
    const Mat2c I2 = Mat2c::Identity();

    // Electron Zeeman: -mu_Er.B with mu_Er = -mu_B g S  ->  +mu_B (g^T B).S
    Hermitian4 H = kron(electron_zeeman(g, B), I2);

    // Nuclear Zeeman: -mu_Y.B with mu_Y = h gamma I  ->  -h gamma B.I
    H -= kron(I2, planck_h * gamma_hz * spin_along(B));

    // Point-dipole coupling (mu0/4pi)/r^3 [mu_Er.mu_Y - 3 (mu_Er.r)(mu_Y.r)]
    // written as sum_ab muEr_a (delta - 3 r r)_ab muY_b.
    const Mat3 T = (Mat3::Identity() - 3.0 * r_hat * r_hat.transpose()) *
                   (mu0_over_4pi / (r_m * r_m * r_m));
    // mu_Er components: -mu_B sum_b g_ab S_b; mu_Y components: h gamma I_b.
    for (int a = 0; a < 3; ++a) {
        Mat2c muEr_a = Mat2c::Zero();
        for (int b = 0; b < 3; ++b)
            muEr_a += -mu_bohr * g(a, b) * 0.5 * s[b];
        for (int b = 0; b < 3; ++b) {
            const Mat2c muY_b = planck_h * gamma_hz * 0.5 * s[b];
            H += T(a, b) * kron(muEr_a, muY_b);
        }
    }
    return H;
}

OracleResult oracle_solve(const SpinCenter& center, const NuclearSite& site,
                          const FieldSpec& field) {
    const ManifoldSolution gs = solve_manifold(center, site, field, Manifold::ground);
    const ManifoldSolution es = solve_manifold(center, site, field, Manifold::excited);

    OracleResult out;
    const double to_khz = hz_to_khz / planck_h; // J -> kHz
    for (int k = 0; k < 4; ++k) {
        out.eigenvalues_g[k] = (gs.energies[k] - gs.energies.mean()) * to_khz;
        out.eigenvalues_e[k] = (es.energies[k] - es.energies.mean()) * to_khz;
    }
    out.delta_g = (gs.energies[gs.lower_idx[1]] - gs.energies[gs.lower_idx[0]]) * to_khz;
    out.delta_e = (es.energies[es.lower_idx[1]] - es.energies[es.lower_idx[0]]) * to_khz;

    // Optical amplitudes through P = |-(e)><-(g)| x 1 between exact states.
    const Vec3 B = field.tesla();
    const Eigen::Vector2cd lg = lower_branch_state(center.g_ground, B);
    const Eigen::Vector2cd le = lower_branch_state(center.g_excited, B);
    const Hermitian4 P = kron(le * lg.adjoint(), Mat2c::Identity());

    const Vec4c g1 = gs.states.col(gs.lower_idx[0]);
    const Vec4c g2 = gs.states.col(gs.lower_idx[1]);
    const Vec4c e3 = es.states.col(es.lower_idx[0]);

    const double direct = std::norm(std::complex<double>(e3.dot(P * g1)));
    const double cross = std::norm(std::complex<double>(e3.dot(P * g2)));
    if (!(direct > 0.0))
        throw ComputationError("vanishing direct transition amplitude");
    out.R_oracle = cross / direct;
    const double R = out.R_oracle;
    out.rho_oracle = 4.0 * R / ((1.0 + R) * (1.0 + R));
    out.perturbative_warning =
        gs.zeeman_scale < 100.0 * gs.coupling_scale ||
        es.zeeman_scale < 100.0 * es.coupling_scale;
    return out;
}

TransitionAudit oracle_transition_audit(const SpinCenter& center, const NuclearSite& site,
                                        const FieldSpec& field) {
    const ManifoldSolution gs = solve_manifold(center, site, field, Manifold::ground);
    const ManifoldSolution es = solve_manifold(center, site, field, Manifold::excited);

    const Vec3 B = field.tesla();
    const Eigen::Vector2cd lg = lower_branch_state(center.g_ground, B);
    const Eigen::Vector2cd le = lower_branch_state(center.g_excited, B);
    const Hermitian4 P = kron(le * lg.adjoint(), Mat2c::Identity());

    TransitionAudit audit{};
    for (int f = 0; f < 2; ++f)
        for (int i = 0; i < 2; ++i) {
            const Vec4c vf = es.states.col(es.lower_idx[f]);
            const Vec4c vi = gs.states.col(gs.lower_idx[i]);
            audit.w[f][i] = std::norm(std::complex<double>(vf.dot(P * vi)));
        }
    audit.completeness_full = 0.0;
    for (int f = 0; f < 4; ++f)
        for (int i = 0; i < 4; ++i)
            audit.completeness_full +=
                std::norm(std::complex<double>(es.states.col(f).dot(P * gs.states.col(i))));
    for (int i = 0; i < 2; ++i) {
        audit.row_sum[i] = 0.0;
        const Vec4c vi = gs.states.col(gs.lower_idx[i]);
        for (int f = 0; f < 4; ++f)
            audit.row_sum[i] += std::norm(std::complex<double>(es.states.col(f).dot(P * vi)));
    }
    return audit;
}

Vec3 er_moment_bruteforce(const GTensor& g, const Vec3& field_direction, Branch branch) {
    const Vec3 b_hat = field_direction.normalized();
    // Any positive magnitude gives the same states; use 1 T.
    Eigen::SelfAdjointEigenSolver<Mat2c> solver(electron_zeeman(g, b_hat));
    const Eigen::Vector2cd psi =
        solver.eigenvectors().col(branch == Branch::minus ? 0 : 1);
    const auto s = pauli();
    Vec3 mu;
    for (int a = 0; a < 3; ++a) {
        Mat2c mu_a = Mat2c::Zero();
        for (int b = 0; b < 3; ++b)
            mu_a += -mu_bohr * g(a, b) * 0.5 * s[b];
        mu[a] = std::real(psi.dot(mu_a * psi));
    }
    return mu;
}

} // namespace shf
