#pragma once

#include <string>
#include <vector>

#include "shf/lattice.hpp"
#include "shf/spincore.hpp"

// Loading of the bundled g-tensor dataset (JSON) and ion-label resolution
// against a lattice file.  Keeps file-format concerns out of the physics
// modules.

namespace shf {

struct GTensorSet {
    std::string material;
    std::string provenance;
    // Indexed [orientation]; only site 1 is bundled.
    GTensor ground[2];
    GTensor excited[2];
    bool has_site1 = false;

    SpinCenter center(Site site, Orientation orientation) const;
};

GTensorSet load_g_tensors(const std::string& path);

// A lattice row resolved from a CLI label, together with the orientation
// whose analysis frame the alias implies.
struct ResolvedIon {
    LatticeEntry entry;
    Orientation orientation;
};

// Accepts row labels (Y01..) plus the aliases "pinned-A", "pinned-B" and
// "fast".  Unknown labels raise InvalidInput listing everything accepted.
ResolvedIon resolve_ion(const std::string& label,
                        const std::vector<LatticeEntry>& lattice,
                        Orientation default_orientation = Orientation::A);

}  // namespace shf
