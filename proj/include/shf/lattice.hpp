#pragma once

#include <string>
#include <vector>

#include "shf/geometry.hpp"

// Crystal geometry: ligand position ingestion, nearest-neighbour queries and
// the C2(b) site-symmetry operation.
//
// File format (UTF-8 text): a header line `frame D1 D2 b`, then one row per
// site, `label x_angstrom y_angstrom z_angstrom gamma_MHz_per_T`, whitespace
// separated.  `#` starts a comment; blank lines are ignored.

namespace shf {

struct LatticeEntry {
    std::string label;
    Vec3 position_angstrom;
    double gamma_MHz_per_T;
};

struct LatticeFile {
    std::vector<LatticeEntry> sites;
};

LatticeFile load_lattice(const std::string& path);
LatticeFile parse_lattice(std::istream& in, const std::string& origin);

// k nearest sites by distance from the origin (the electron spin position);
// ties broken lexicographically on (x, y, z).
std::vector<LatticeEntry> neighbors(const LatticeFile& lattice, std::size_t k);

// Two-fold rotation about the crystal b axis: (x, y, z) -> (-x, -y, z).
inline Vec3 c2_about_b(const Vec3& p) { return {-p.x(), -p.y(), p.z()}; }

} // namespace shf
