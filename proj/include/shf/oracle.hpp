#pragma once

#include <array>

#include "shf/spincore.hpp"

// Brute-force reference: build and exactly diagonalize the full 4x4
// (electron doublet) x (nuclear spin-1/2) Hamiltonians for the ground and
// excited manifolds, then extract splittings and the optical branching ratio
// without any perturbative approximation.

namespace shf {

using Hermitian4 = Eigen::Matrix4cd;

enum class Manifold { ground, excited };

struct OracleResult {
    std::array<double, 4> eigenvalues_g; // kHz, offsets from the manifold mean, ascending
    std::array<double, 4> eigenvalues_e;
    double delta_g; // lower-electron-branch nuclear splitting (kHz)
    double delta_e;
    double R_oracle;
    double rho_oracle;
    // True when the electron Zeeman scale is less than 100x the coupling
    // scale, i.e. the perturbative picture this oracle validates is strained.
    bool perturbative_warning;
};

// Optical transition amplitudes |<f|P|i>|^2 with P = |-(e)><-(g)| x 1.
struct TransitionAudit {
    // lower-branch block: rows = excited {3,4}, cols = ground {1,2}
    double w[2][2];
    // sum over the full 4x4 state grid; equals 2 exactly (trace of the
    // rank-2 projector P^dag P), limited only by eigenvector orthonormality
    double completeness_full;
    // per lower ground state, summed over all four excited states; each is
    // 1 - O(eps^2) where eps is the coupling/Zeeman ratio
    double row_sum[2];
};

// H = mu_B (g^T B).S x 1 - h*gamma B.I + point-dipole coupling between
// mu_Er = -mu_B g S and mu_Y = h*gamma I.  Entries in joules.
Hermitian4 build_manifold_hamiltonian(const SpinCenter& center, const NuclearSite& site,
                                      const FieldSpec& field, Manifold manifold);

OracleResult oracle_solve(const SpinCenter& center, const NuclearSite& site,
                          const FieldSpec& field);

TransitionAudit oracle_transition_audit(const SpinCenter& center, const NuclearSite& site,
                                        const FieldSpec& field);

// <psi|mu|psi> for the chosen branch from an explicit 2x2 eigensolve of the
// electron Zeeman Hamiltonian; test oracle for er_moment_expectation.
Vec3 er_moment_bruteforce(const GTensor& g, const Vec3& field_direction, Branch branch);

} // namespace shf
