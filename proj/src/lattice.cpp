#include "shf/lattice.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <tuple>

#include "shf/spincore.hpp"

namespace shf {

namespace {

[[noreturn]] void parse_fail(const std::string& origin, int line, const std::string& what) {
    throw InvalidInput(origin + ":" + std::to_string(line) + ": " + what);
}

} // namespace

LatticeFile parse_lattice(std::istream& in, const std::string& origin) {
    LatticeFile lattice;
    std::string raw;
    int lineno = 0;
    bool header_seen = false;

    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
        std::istringstream row(line);

        if (!header_seen) {
            std::string kw, a, b, c;
            if (!(row >> kw))
                continue; // blank/comment before the header
            if (kw != "frame" || !(row >> a >> b >> c) || a != "D1" || b != "D2" || c != "b")
                parse_fail(origin, lineno, "expected header 'frame D1 D2 b'");
            header_seen = true;
            continue;
        }

        LatticeEntry e;
        if (!(row >> e.label))
            continue; // blank line
        if (!(row >> e.position_angstrom.x() >> e.position_angstrom.y() >>
              e.position_angstrom.z() >> e.gamma_MHz_per_T))
            parse_fail(origin, lineno, "malformed row (need label x y z gamma)");
        std::string extra;
        if (row >> extra)
            parse_fail(origin, lineno, "unexpected trailing field '" + extra + "'");
        if (!e.position_angstrom.allFinite() || !std::isfinite(e.gamma_MHz_per_T))
            parse_fail(origin, lineno, "non-finite value");
        if (!(e.gamma_MHz_per_T > 0.0))
            parse_fail(origin, lineno, "gamma must be > 0");
        lattice.sites.push_back(std::move(e));
    }
    if (!header_seen && !lattice.sites.empty())
        parse_fail(origin, 1, "missing 'frame D1 D2 b' header");

    for (std::size_t i = 0; i < lattice.sites.size(); ++i)
        for (std::size_t j = i + 1; j < lattice.sites.size(); ++j) {
            const double d = (lattice.sites[i].position_angstrom -
                              lattice.sites[j].position_angstrom).norm();
            if (d < 1e-3)
                throw InvalidInput(origin + ": duplicate positions '" + lattice.sites[i].label +
                                   "' and '" + lattice.sites[j].label + "'");
        }
    return lattice;
}

LatticeFile load_lattice(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InvalidInput("cannot open lattice file: " + path);
    return parse_lattice(in, path);
}

std::vector<LatticeEntry> neighbors(const LatticeFile& lattice, std::size_t k) {
    if (k > lattice.sites.size())
        throw InvalidInput("neighbor count exceeds lattice size");
    std::vector<LatticeEntry> sorted = lattice.sites;
    std::sort(sorted.begin(), sorted.end(), [](const LatticeEntry& a, const LatticeEntry& b) {
        const double da = a.position_angstrom.norm();
        const double db = b.position_angstrom.norm();
        if (da != db)
            return da < db;
        const auto& pa = a.position_angstrom;
        const auto& pb = b.position_angstrom;
        return std::tie(pa.x(), pa.y(), pa.z()) < std::tie(pb.x(), pb.y(), pb.z());
    });
    sorted.resize(k);
    return sorted;
}

} // namespace shf
