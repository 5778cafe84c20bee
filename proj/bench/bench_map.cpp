// Times the angular contrast-map sweep with the parallel kernel against the
// serial reference and checks they agree bitwise.  Usage:
//   bench_map [resolution_deg] [repeats]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "shf/atlas.hpp"
#include "shf/dataset.hpp"

int main(int argc, char** argv) {
    const double resolution = argc > 1 ? std::atof(argv[1]) : 2.0;
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;
    if (!(resolution > 0.0) || repeats < 1) {
        std::fprintf(stderr, "usage: bench_map [resolution_deg>0] [repeats>=1]\n");
        return 2;
    }

    const std::string data_dir = std::string(SHF_SOURCE_DIR) + "/data";
    const auto tensors = shf::load_g_tensors(data_dir + "/g_tensors.json");
    const auto center = tensors.center(shf::Site::site1, shf::Orientation::A);
    const auto dir = shf::in_plane_direction(225.0);

    const auto n_theta = static_cast<std::size_t>(std::lround(180.0 / resolution)) + 1;
    const auto n_phi = static_cast<std::size_t>(std::lround(360.0 / resolution)) + 1;
    std::printf("grid %zu x %zu (%.3g deg), %d repeats\n", n_theta, n_phi,
                resolution, repeats);
#ifdef _OPENMP
    std::printf("parallel kernel: OpenMP, max %d threads\n", omp_get_max_threads());
#else
    std::printf("parallel kernel: OpenMP not compiled in; both runs are serial\n");
#endif

    using clock = std::chrono::steady_clock;
    auto time_run = [&](bool parallel) {
        double best_ms = 1e300;
        shf::RhoMap map;
        for (int r = 0; r < repeats; ++r) {
            const auto t0 = clock::now();
            map = shf::rho_map(center, dir, n_theta, n_phi, 5.45721, {}, parallel);
            const auto t1 = clock::now();
            best_ms = std::min(
                best_ms, std::chrono::duration<double, std::milli>(t1 - t0).count());
        }
        return std::pair{best_ms, map};
    };

    const auto [serial_ms, serial_map] = time_run(false);
    const auto [parallel_ms, parallel_map] = time_run(true);

    double max_diff = 0.0;
    for (std::size_t i = 0; i < serial_map.values.size(); ++i)
        max_diff = std::max(max_diff,
                            std::abs(serial_map.values[i] - parallel_map.values[i]));

    std::printf("serial   : %10.2f ms\n", serial_ms);
    std::printf("parallel : %10.2f ms   speedup %.2fx\n", parallel_ms,
                serial_ms / parallel_ms);
    std::printf("max |serial - parallel| = %.3g %s\n", max_diff,
                max_diff == 0.0 ? "(bitwise identical)" : "(MISMATCH)");
    return max_diff == 0.0 ? 0 : 1;
}
