#include "shf/dataset.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace shf {

namespace {

Mat3 parse_mat3(const nlohmann::json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 3)
        throw InvalidInput("g-tensor dataset: " + what + " is not a 3x3 matrix");
    Mat3 m;
    for (int r = 0; r < 3; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || row.size() != 3)
            throw InvalidInput("g-tensor dataset: " + what + " is not a 3x3 matrix");
        for (int c = 0; c < 3; ++c)
            m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    if (!m.allFinite())
        throw InvalidInput("g-tensor dataset: " + what + " has non-finite entries");
    return m;
}

}  // namespace

SpinCenter GTensorSet::center(Site site, Orientation orientation) const {
    if (site != Site::site1 || !has_site1)
        throw InvalidInput("g-tensor dataset: only site 1 is bundled");
    const int o = orientation == Orientation::A ? 0 : 1;
    return {ground[o], excited[o], site, orientation};
}

GTensorSet load_g_tensors(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open g-tensor dataset: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput("g-tensor dataset " + path + ": " + e.what());
    }

    GTensorSet set;
    set.material = j.value("material", "");
    set.provenance = j.value("provenance", "");
    if (!j.contains("sites") || !j["sites"].contains("site1"))
        throw InvalidInput("g-tensor dataset: missing sites/site1");
    const auto& s1 = j["sites"]["site1"];
    const char* orient_keys[2] = {"A", "B"};
    for (int o = 0; o < 2; ++o) {
        if (!s1.contains(orient_keys[o]))
            throw InvalidInput(std::string("g-tensor dataset: missing orientation ") +
                               orient_keys[o]);
        const auto& node = s1[orient_keys[o]];
        set.ground[o] = parse_mat3(node.at("ground"),
                                   std::string("site1/") + orient_keys[o] + "/ground");
        set.excited[o] = parse_mat3(node.at("excited"),
                                    std::string("site1/") + orient_keys[o] + "/excited");
    }
    set.has_site1 = true;
    return set;
}

ResolvedIon resolve_ion(const std::string& label,
                        const std::vector<LatticeEntry>& lattice,
                        Orientation default_orientation) {
    std::string row = label;
    Orientation orientation = default_orientation;
    if (label == "pinned-A") {
        row = "Y12";
        orientation = Orientation::A;
    } else if (label == "pinned-B") {
        row = "Y13";
        orientation = Orientation::B;
    } else if (label == "fast") {
        row = "Y02";
    }
    for (const auto& e : lattice)
        if (e.label == row) return {e, orientation};

    std::ostringstream os;
    os << "unknown ion label '" << label << "'; known labels:";
    os << " pinned-A pinned-B fast";
    for (const auto& e : lattice) os << ' ' << e.label;
    throw InvalidInput(os.str());
}

}  // namespace shf
