#pragma once

#include <string>

#include "shf/dataset.hpp"
#include "shf/lattice.hpp"

// Shared access to the bundled dataset for the test binaries.  SHF_SOURCE_DIR
// comes from the build so the tests run from any working directory.

#ifndef SHF_SOURCE_DIR
#error "SHF_SOURCE_DIR must be defined by the build system"
#endif

namespace shf::test {

inline std::string data_file(const std::string& name) {
    return std::string(SHF_SOURCE_DIR) + "/data/" + name;
}

inline const GTensorSet& tensors() {
    static const GTensorSet set = load_g_tensors(data_file("g_tensors.json"));
    return set;
}

inline const LatticeFile& lattice() {
    static const LatticeFile lat = load_lattice(data_file("y_sites.txt"));
    return lat;
}

inline SpinCenter center_A() { return tensors().center(Site::site1, Orientation::A); }
inline SpinCenter center_B() { return tensors().center(Site::site1, Orientation::B); }

inline NuclearSite nuclear_site(const std::string& label) {
    const auto ion = resolve_ion(label, lattice().sites);
    return {ion.entry.position_angstrom, ion.entry.gamma_MHz_per_T};
}

}  // namespace shf::test
