#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "helpers.hpp"
#include "shf/dataset.hpp"

using namespace shf;

namespace {

// Write a throwaway JSON file and load it, cleaning up afterwards.
struct TempJson {
    std::string path;
    explicit TempJson(const std::string& body)
        : path("tmp_dataset_case.json") {
        std::ofstream(path) << body;
    }
    ~TempJson() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("g-tensor dataset loads with both orientations") {
    const auto& set = test::tensors();
    CHECK(set.has_site1);
    CHECK(!set.material.empty());
    CHECK(!set.provenance.empty());

    const auto a = set.center(Site::site1, Orientation::A);
    const auto b = set.center(Site::site1, Orientation::B);
    CHECK(a.orientation == Orientation::A);
    CHECK(b.orientation == Orientation::B);
    CHECK(a.g_ground.allFinite());
    CHECK(a.g_excited.allFinite());

    CHECK_THROWS_WITH_AS(set.center(Site::site2, Orientation::A),
                         doctest::Contains("site 1"), InvalidInput);
}

TEST_CASE("orientation B is the exact two-fold conjugate of orientation A") {
    const auto a = test::center_A();
    const auto b = test::center_B();
    // S g S with S = diag(-1,-1,1) flips exactly the xz/yz blocks; the
    // bundled file stores the conjugate to the last digit, so equality is
    // bitwise, not approximate.
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double sign = ((i == 2) != (j == 2)) ? -1.0 : 1.0;
            CHECK(b.g_ground(i, j) == sign * a.g_ground(i, j));
            CHECK(b.g_excited(i, j) == sign * a.g_excited(i, j));
        }
}

TEST_CASE("dataset loader rejects missing or malformed files") {
    CHECK_THROWS_WITH_AS(load_g_tensors("/nonexistent/g.json"),
                         doctest::Contains("cannot open"), InvalidInput);
    {
        TempJson t("this is not json");
        CHECK_THROWS_AS(load_g_tensors(t.path), InvalidInput);
    }
    {
        TempJson t("{\"material\": \"x\"}");
        CHECK_THROWS_WITH_AS(load_g_tensors(t.path),
                             doctest::Contains("missing sites/site1"),
                             InvalidInput);
    }
    {
        TempJson t(
            "{\"sites\": {\"site1\": {\"A\": {\"ground\": [[1,2],[3,4]],"
            "\"excited\": [[1,0,0],[0,1,0],[0,0,1]]},"
            "\"B\": {\"ground\": [[1,0,0],[0,1,0],[0,0,1]],"
            "\"excited\": [[1,0,0],[0,1,0],[0,0,1]]}}}}");
        CHECK_THROWS_WITH_AS(load_g_tensors(t.path),
                             doctest::Contains("not a 3x3 matrix"),
                             InvalidInput);
    }
}

TEST_CASE("ion labels resolve through aliases to lattice rows") {
    const auto& sites = test::lattice().sites;

    const auto pa = resolve_ion("pinned-A", sites);
    CHECK(pa.entry.label == "Y12");
    CHECK(pa.orientation == Orientation::A);

    const auto pb = resolve_ion("pinned-B", sites);
    CHECK(pb.entry.label == "Y13");
    CHECK(pb.orientation == Orientation::B);

    // "fast" picks the 3.72 A site and keeps the caller's orientation.
    const auto f = resolve_ion("fast", sites);
    CHECK(f.entry.label == "Y02");
    CHECK(f.orientation == Orientation::A);
    CHECK(resolve_ion("fast", sites, Orientation::B).orientation ==
          Orientation::B);

    const auto raw = resolve_ion("Y07", sites);
    CHECK(raw.entry.label == "Y07");
}

TEST_CASE("unknown ion labels list everything that is accepted") {
    const auto& sites = test::lattice().sites;
    try {
        resolve_ion("nope", sites);
        FAIL_CHECK("expected InvalidInput");
    } catch (const InvalidInput& e) {
        const std::string msg = e.what();
        CHECK(msg.find("unknown ion label 'nope'") != std::string::npos);
        CHECK(msg.find("pinned-A") != std::string::npos);
        CHECK(msg.find("pinned-B") != std::string::npos);
        CHECK(msg.find("fast") != std::string::npos);
        CHECK(msg.find("Y20") != std::string::npos);
    }
}
