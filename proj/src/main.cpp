#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "shf/artifacts.hpp"
#include "shf/atlas.hpp"
#include "shf/dataset.hpp"
#include "shf/echo.hpp"
#include "shf/fitkit.hpp"
#include "shf/lattice.hpp"
#include "shf/oracle.hpp"
#include "shf/spincore.hpp"

// Command-line surface: one subcommand per analysis, CSV/JSON artifacts named
// <command>-<timestamp>.<ext> plus a run-metadata JSON, machine-readable
// result on stdout.  Exit codes: 0 success, 2 input error, 3 computation
// error.

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct CommonOpts {
    std::string tensors;
    std::string lattice;
    std::string out_dir = ".";
    int threads = 0;  // 0 = library default
};

std::string data_default(const char* file) {
    if (const char* dir = std::getenv("SHF_DATA_DIR"))
        return (fs::path(dir) / file).string();
    return (fs::path("data") / file).string();
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--tensors", opts.tensors,
                    "g-tensor dataset JSON (default $SHF_DATA_DIR/g_tensors.json)");
    cmd->add_option("--lattice", opts.lattice,
                    "ligand position file (default $SHF_DATA_DIR/y_sites.txt)");
    cmd->add_option("--out", opts.out_dir, "artifact output directory");
    cmd->add_option("--threads", opts.threads,
                    "worker threads for parallel sweeps (0 = auto)");
}

void apply_threads(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

struct FieldOpts {
    double B_mT = 0.0;
    double angle_deg = 225.0;
    double theta_deg = -1.0;
    double phi_deg = 0.0;
    bool polar_given = false;
};

void add_field_direction(CLI::App* cmd, FieldOpts& f) {
    auto* angle = cmd->add_option(
        "--angle", f.angle_deg,
        "in-plane field angle from D1 towards D2 (deg); default 225");
    auto* theta = cmd->add_option(
        "--theta", f.theta_deg, "polar field angle from the b axis (deg)");
    auto* phi = cmd->add_option(
        "--phi", f.phi_deg, "azimuthal field angle from D1 (deg)");
    theta->needs(phi);
    angle->excludes(theta);
    angle->excludes(phi);
}

shf::Vec3 field_direction(const FieldOpts& f, CLI::App* cmd) {
    if (cmd->count("--theta")) {
        constexpr double deg = M_PI / 180.0;
        return shf::unit_from_angles(f.theta_deg * deg, f.phi_deg * deg);
    }
    return shf::in_plane_direction(f.angle_deg);
}

struct Range {
    double lo, hi;
    std::size_t n;
};

Range parse_range(const std::string& text) {
    Range r{};
    char c1, c2;
    std::istringstream in(text);
    if (!(in >> r.lo >> c1 >> r.hi >> c2 >> r.n) || c1 != ':' || c2 != ':' ||
        !in.eof())
        throw shf::InvalidInput("range must be lo:hi:n, e.g. 5:100:200");
    return r;
}

json vec3_json(const shf::Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

// Everything a command needs from the bundled dataset.
struct Loaded {
    shf::GTensorSet tensors;
    shf::LatticeFile lattice;
    std::string tensors_path, lattice_path;
};

Loaded load(const CommonOpts& opts) {
    Loaded l;
    l.tensors_path = opts.tensors.empty() ? data_default("g_tensors.json") : opts.tensors;
    l.lattice_path = opts.lattice.empty() ? data_default("y_sites.txt") : opts.lattice;
    l.tensors = shf::load_g_tensors(l.tensors_path);
    l.lattice = shf::load_lattice(l.lattice_path);
    return l;
}

json dataset_metadata(const Loaded& l) {
    return {{"tensors_path", l.tensors_path},
            {"lattice_path", l.lattice_path},
            {"material", l.tensors.material},
            {"provenance", l.tensors.provenance}};
}

void write_metadata(const CommonOpts& opts, const std::string& command,
                    const json& config, const std::string& hash,
                    const json& dataset, const json& grid,
                    const std::vector<std::string>& artifacts) {
    json meta = {{"command", command},
                 {"config", config},
                 {"config_hash", hash},
                 {"dataset", dataset},
                 {"grid", grid},
                 {"artifacts", artifacts}};
    const auto now = std::chrono::system_clock::now();
    meta["written_unix_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch())
            .count();
    shf::write_json(
        (fs::path(opts.out_dir) / shf::timestamped_name(command + "-run", "json"))
            .string(),
        meta);
}

shf::Orientation parse_orientation(const std::string& s) {
    if (s == "A") return shf::Orientation::A;
    if (s == "B") return shf::Orientation::B;
    throw shf::InvalidInput("orientation must be A or B");
}

// ---------------------------------------------------------------- solve ---

struct SolveOpts {
    CommonOpts common;
    FieldOpts field;
    std::string ion = "pinned-A";
    std::string orientation = "A";
    std::string branch = "minus";
};

void cmd_solve(const SolveOpts& o, CLI::App* cmd) {
    const Loaded l = load(o.common);
    const auto ion = shf::resolve_ion(o.ion, l.lattice.sites,
                                      parse_orientation(o.orientation));
    const auto center = l.tensors.center(shf::Site::site1, ion.orientation);
    const auto dir = field_direction(o.field, cmd);
    const auto field = shf::make_field(o.field.B_mT, dir);
    const auto branch =
        o.branch == "plus" ? shf::Branch::plus : shf::Branch::minus;

    const shf::NuclearSite site{ion.entry.position_angstrom,
                                ion.entry.gamma_MHz_per_T};
    const auto res = shf::shf_solve(center, site, field, branch);

    json config = {{"ion", o.ion},
                   {"orientation", ion.orientation == shf::Orientation::A ? "A" : "B"},
                   {"B_mT", o.field.B_mT},
                   {"direction", vec3_json(dir)},
                   {"branch", o.branch}};
    json out = {{"ion", ion.entry.label},
                {"r_angstrom", ion.entry.position_angstrom.norm()},
                {"B_g_mT", vec3_json(res.B_g * 1e3)},
                {"B_e_mT", vec3_json(res.B_e * 1e3)},
                {"alpha_rad", res.alpha},
                {"delta_g_kHz", res.delta_g},
                {"delta_e_kHz", res.delta_e},
                {"R", res.R},
                {"rho", res.rho}};
    const std::string hash = shf::config_hash(config);
    out["config_hash"] = hash;
    std::cout << out.dump(2) << '\n';

    const std::string artifact =
        (fs::path(o.common.out_dir) / shf::timestamped_name("solve", "json")).string();
    json payload = out;
    payload["config"] = config;
    shf::write_json(artifact, payload);
    write_metadata(o.common, "solve", config, hash, dataset_metadata(l),
                   json::object(), {artifact});
}

// ----------------------------------------------------------------- scan ---

struct ScanOpts {
    CommonOpts common;
    FieldOpts field;
    std::string ion = "pinned-A";
    std::string orientation = "A";
    std::string range = "1:100:200";
    double orientation_jitter_deg = 0.0;
    double strength_jitter_rel = 0.0;
    std::size_t jitter_samples = 64;
    unsigned seed = 1;
};

void cmd_scan(const ScanOpts& o, CLI::App* cmd) {
    const Loaded l = load(o.common);
    const auto ion = shf::resolve_ion(o.ion, l.lattice.sites,
                                      parse_orientation(o.orientation));
    const auto center = l.tensors.center(shf::Site::site1, ion.orientation);
    const auto dir = field_direction(o.field, cmd);
    const Range r = parse_range(o.range);
    const shf::NuclearSite site{ion.entry.position_angstrom,
                                ion.entry.gamma_MHz_per_T};

    const auto scan =
        shf::field_scan(center, site, dir, {r.lo, r.hi}, r.n);

    shf::CsvTable table;
    table.columns = {"B_mT", "delta_g_kHz", "delta_e_kHz", "rho"};
    const bool jitter =
        o.orientation_jitter_deg > 0.0 || o.strength_jitter_rel > 0.0;
    shf::SensitivityBand band;
    if (jitter) {
        band = shf::sensitivity_band(center, site, dir, {r.lo, r.hi}, r.n,
                                     o.orientation_jitter_deg,
                                     o.strength_jitter_rel, o.jitter_samples,
                                     o.seed);
        table.columns.insert(table.columns.end(),
                             {"delta_g_lo", "delta_g_hi", "delta_e_lo",
                              "delta_e_hi", "rho_lo", "rho_hi"});
    }
    for (std::size_t i = 0; i < scan.B_mT.size(); ++i) {
        std::vector<double> row = {scan.B_mT[i], scan.delta_g[i],
                                   scan.delta_e[i], scan.rho[i]};
        if (jitter) {
            row.insert(row.end(),
                       {band.delta_g_lo[i], band.delta_g_hi[i],
                        band.delta_e_lo[i], band.delta_e_hi[i], band.rho_lo[i],
                        band.rho_hi[i]});
        }
        table.rows.push_back(std::move(row));
    }

    json config = {{"ion", o.ion},
                   {"direction", vec3_json(dir)},
                   {"range", o.range},
                   {"orientation_jitter_deg", o.orientation_jitter_deg},
                   {"strength_jitter_rel", o.strength_jitter_rel},
                   {"seed", o.seed}};
    const std::string hash = shf::config_hash(config);
    const std::string artifact =
        (fs::path(o.common.out_dir) / shf::timestamped_name("scan", "csv")).string();
    shf::write_csv(artifact, table, hash);
    write_metadata(o.common, "scan", config, hash, dataset_metadata(l),
                   {{"B_lo_mT", r.lo}, {"B_hi_mT", r.hi}, {"points", r.n}},
                   {artifact});
    std::cout << artifact << '\n';
}

// ------------------------------------------------------------------ map ---

struct MapOpts {
    CommonOpts common;
    FieldOpts field;
    std::string orientation = "A";
    double resolution_deg = 5.0;
    double r_angstrom = 5.45721;
    bool serial = false;
};

void cmd_map(const MapOpts& o, CLI::App* cmd) {
    if (!(o.resolution_deg > 0.0))
        throw shf::InvalidInput("resolution must be positive");
    apply_threads(o.common.threads);
    const Loaded l = load(o.common);
    const auto center =
        l.tensors.center(shf::Site::site1, parse_orientation(o.orientation));
    const auto dir = field_direction(o.field, cmd);
    const auto n_theta =
        static_cast<std::size_t>(std::lround(180.0 / o.resolution_deg)) + 1;
    const auto n_phi =
        static_cast<std::size_t>(std::lround(360.0 / o.resolution_deg)) + 1;

    const auto map = shf::rho_map(center, dir, n_theta, n_phi, o.r_angstrom,
                                  {}, !o.serial);

    shf::CsvTable table;
    table.columns = {"theta_deg", "phi_deg", "rho_max"};
    constexpr double rad2deg = 180.0 / M_PI;
    for (std::size_t i = 0; i < map.theta.size(); ++i)
        for (std::size_t j = 0; j < map.phi.size(); ++j)
            table.rows.push_back(
                {map.theta[i] * rad2deg, map.phi[j] * rad2deg, map.at(i, j)});

    json config = {{"orientation", o.orientation},
                   {"direction", vec3_json(dir)},
                   {"resolution_deg", o.resolution_deg},
                   {"r_angstrom", o.r_angstrom},
                   {"serial", o.serial}};
    const std::string hash = shf::config_hash(config);
    const std::string artifact =
        (fs::path(o.common.out_dir) / shf::timestamped_name("map", "csv")).string();
    shf::write_csv(artifact, table, hash);
    write_metadata(o.common, "map", config, hash, dataset_metadata(l),
                   {{"n_theta", n_theta}, {"n_phi", n_phi}}, {artifact});
    std::cout << artifact << '\n';
}

// --------------------------------------------------------------- levels ---

struct LevelsOpts {
    CommonOpts common;
    FieldOpts field;
    std::string ion = "pinned-A";
    std::string orientation = "A";
    std::string range = "0.5:80:400";
};

void cmd_levels(const LevelsOpts& o, CLI::App* cmd) {
    const Loaded l = load(o.common);
    const auto ion = shf::resolve_ion(o.ion, l.lattice.sites,
                                      parse_orientation(o.orientation));
    const auto center = l.tensors.center(shf::Site::site1, ion.orientation);
    const auto dir = field_direction(o.field, cmd);
    const Range r = parse_range(o.range);
    const shf::NuclearSite site{ion.entry.position_angstrom,
                                ion.entry.gamma_MHz_per_T};

    const auto levels =
        shf::level_diagram(center, site, dir, {r.lo, r.hi}, r.n);

    shf::CsvTable table;
    table.columns = {"B_mT", "ground_upper_kHz", "ground_lower_kHz",
                     "excited_upper_kHz", "excited_lower_kHz"};
    for (std::size_t i = 0; i < levels.B_mT.size(); ++i)
        table.rows.push_back({levels.B_mT[i], levels.ground_upper[i],
                              levels.ground_lower[i], levels.excited_upper[i],
                              levels.excited_lower[i]});

    json config = {{"ion", o.ion}, {"direction", vec3_json(dir)}, {"range", o.range}};
    const std::string hash = shf::config_hash(config);
    const std::string artifact =
        (fs::path(o.common.out_dir) / shf::timestamped_name("levels", "csv")).string();
    shf::write_csv(artifact, table, hash);

    json summary = {{"ground_gap_B_mT", levels.ground_gap_B_mT},
                    {"ground_gap_kHz", levels.ground_gap_kHz},
                    {"excited_gap_B_mT", levels.excited_gap_B_mT},
                    {"excited_gap_kHz", levels.excited_gap_kHz},
                    {"artifact", artifact}};
    std::cout << summary.dump(2) << '\n';
    write_metadata(o.common, "levels", config, hash, dataset_metadata(l),
                   {{"B_lo_mT", r.lo}, {"B_hi_mT", r.hi}, {"points", r.n}},
                   {artifact});
}

// ------------------------------------------------------------ neighbors ---

struct NeighborsOpts {
    CommonOpts common;
    std::size_t k = 15;
};

void cmd_neighbors(const NeighborsOpts& o) {
    const Loaded l = load(o.common);
    const auto near = shf::neighbors(l.lattice, o.k);

    json config = {{"k", o.k}};
    const std::string hash = shf::config_hash(config);
    const std::string artifact =
        (fs::path(o.common.out_dir) / shf::timestamped_name("neighbors", "csv"))
            .string();
    std::ofstream out(artifact);
    if (!out) throw shf::InvalidInput("cannot write artifact: " + artifact);
    out << "# config_hash=" << hash << '\n';
    out << "label,x_angstrom,y_angstrom,z_angstrom,r_angstrom,gamma_MHz_per_T\n";
    out << std::setprecision(12);
    for (const auto& e : near) {
        const auto& p = e.position_angstrom;
        out << e.label << ',' << p.x() << ',' << p.y() << ',' << p.z() << ','
            << p.norm() << ',' << e.gamma_MHz_per_T << '\n';
    }
    write_metadata(o.common, "neighbors", config, hash, dataset_metadata(l),
                   json::object(), {artifact});
    std::cout << artifact << '\n';
}

// ------------------------------------------------------------- echo-sim ---

struct EchoSimOpts {
    CommonOpts common;
    FieldOpts field;
    std::string ion;  // empty: use explicit modulation parameters
    std::string orientation = "A";
    double delta_g = 49.0, delta_e = 33.0, rho = 0.8;
    double I0 = 1.0, T2 = 200.0, x = 1.5;
    double noise = 0.0;
    unsigned long long seed = 1;
    double tmax = 300.0;
    std::size_t n = 500;
    bool with_spectrum = false;
};

void cmd_echo_sim(const EchoSimOpts& o, CLI::App* cmd) {
    shf::EchoParams params;
    params.I0 = o.I0;
    params.T2_us = o.T2;
    params.x = o.x;
    json source;
    if (!o.ion.empty()) {
        const Loaded l = load(o.common);
        const auto ion = shf::resolve_ion(o.ion, l.lattice.sites,
                                          parse_orientation(o.orientation));
        const auto center = l.tensors.center(shf::Site::site1, ion.orientation);
        const auto field =
            shf::make_field(o.field.B_mT, field_direction(o.field, cmd));
        const shf::NuclearSite site{ion.entry.position_angstrom,
                                    ion.entry.gamma_MHz_per_T};
        const auto res = shf::shf_solve(center, site, field);
        params.modulations.push_back({res.delta_g, res.delta_e, res.rho});
        source = {{"ion", ion.entry.label},
                  {"B_mT", o.field.B_mT},
                  {"delta_g_kHz", res.delta_g},
                  {"delta_e_kHz", res.delta_e},
                  {"rho", res.rho}};
    } else {
        params.modulations.push_back({o.delta_g, o.delta_e, o.rho});
        source = {{"delta_g_kHz", o.delta_g},
                  {"delta_e_kHz", o.delta_e},
                  {"rho", o.rho}};
    }

    if (o.n < 2) throw shf::InvalidInput("echo-sim: need at least 2 samples");
    if (!(o.tmax > 0.0)) throw shf::InvalidInput("echo-sim: tmax must be positive");
    std::vector<double> grid(o.n);
    for (std::size_t i = 0; i < o.n; ++i)
        grid[i] = o.tmax * static_cast<double>(i) / static_cast<double>(o.n - 1);

    const auto trace = shf::simulate_trace(grid, params, o.noise, o.seed);

    json config = {{"source", source},   {"I0", o.I0},    {"T2_us", o.T2},
                   {"x", o.x},           {"noise", o.noise}, {"seed", o.seed},
                   {"tmax_us", o.tmax},  {"points", o.n}};
    const std::string hash = shf::config_hash(config);
    const std::string artifact =
        (fs::path(o.common.out_dir) / shf::timestamped_name("echo-sim", "csv"))
            .string();
    shf::write_trace_csv(artifact, trace, hash);
    std::vector<std::string> artifacts = {artifact};

    if (o.with_spectrum) {
        const auto spec = shf::spectrum(trace);
        shf::CsvTable table;
        table.columns = {"freq_kHz", "magnitude"};
        for (std::size_t i = 0; i < spec.freq_kHz.size(); ++i)
            table.rows.push_back({spec.freq_kHz[i], spec.magnitude[i]});
        const std::string spec_artifact =
            (fs::path(o.common.out_dir) /
             shf::timestamped_name("echo-sim-spectrum", "csv"))
                .string();
        shf::write_csv(spec_artifact, table, hash);
        artifacts.push_back(spec_artifact);
    }

    json grid_meta = {{"tmax_us", o.tmax},
                      {"points", o.n},
                      {"modulations_active", params.modulations.size()},
                      {"product_rule_extension", params.modulations.size() > 1}};
    json dataset = o.ion.empty() ? json::object() : json{{"used_ion", o.ion}};
    write_metadata(o.common, "echo-sim", config, hash, dataset, grid_meta,
                   artifacts);
    for (const auto& a : artifacts) std::cout << a << '\n';
}

// ------------------------------------------------------------- echo-fit ---

struct EchoFitOpts {
    CommonOpts common;
    std::string in_path;
    double x = 1.5;
    int max_iter = 200;
    double tol = 1e-10;
};

void cmd_echo_fit(const EchoFitOpts& o) {
    const auto trace = shf::read_trace_csv(o.in_path);
    shf::FitConfig config;
    config.x_fixed = o.x;
    config.max_iterations = o.max_iter;
    config.tolerance = o.tol;

    const auto fit = shf::fit_echo(trace, config);

    json jconfig = {{"in", o.in_path},
                    {"x_fixed", o.x},
                    {"max_iterations", o.max_iter},
                    {"tolerance", o.tol}};
    const std::string hash = shf::config_hash(jconfig);
    json out = {{"estimates",
                 {{"I0", fit.estimates.I0},
                  {"T2_us", fit.estimates.T2_us},
                  {"delta_g_kHz", fit.estimates.delta_g_kHz},
                  {"delta_e_kHz", fit.estimates.delta_e_kHz},
                  {"rho", fit.estimates.rho}}},
                {"sigma",
                 {{"I0", fit.sigma.I0},
                  {"T2_us", fit.sigma.T2_us},
                  {"delta_g_kHz", fit.sigma.delta_g_kHz},
                  {"delta_e_kHz", fit.sigma.delta_e_kHz},
                  {"rho", fit.sigma.rho}}},
                {"residual_norm", fit.residual_norm},
                {"converged", fit.converged},
                {"iterations", fit.iterations},
                {"message", fit.message},
                {"linewidth_kHz", shf::linewidth_kHz(fit.estimates.T2_us)},
                {"config_hash", hash}};
    std::cout << out.dump(2) << '\n';

    const std::string artifact =
        (fs::path(o.common.out_dir) / shf::timestamped_name("echo-fit", "json"))
            .string();
    json payload = out;
    payload["config"] = jconfig;
    shf::write_json(artifact, payload);
    write_metadata(o.common, "echo-fit", jconfig, hash, json::object(),
                   json::object(), {artifact});
    if (!fit.converged)
        throw shf::ComputationError("echo-fit: " + fit.message);
}

// ---------------------------------------------------------- oracle-check ---

struct OracleOpts {
    CommonOpts common;
    std::size_t n = 200;
    unsigned long long seed = 20260814;
    double bmin = 20.0, bmax = 100.0;
    std::size_t sites = 15;
    double tol_rel = 1e-3, tol_rho = 1e-3;
};

void cmd_oracle_check(const OracleOpts& o) {
    if (!(o.bmin > 0.0) || !(o.bmax > o.bmin))
        throw shf::InvalidInput("oracle-check: need 0 < bmin < bmax");
    const Loaded l = load(o.common);
    const auto near = shf::neighbors(l.lattice, o.sites);
    if (near.empty()) throw shf::InvalidInput("oracle-check: no lattice sites");
    const auto center = l.tensors.center(shf::Site::site1, shf::Orientation::A);

    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> ub(o.bmin, o.bmax);
    std::uniform_real_distribution<double> ua(0.0, 360.0);
    std::uniform_int_distribution<std::size_t> us(0, near.size() - 1);

    shf::CsvTable table;
    table.columns = {"B_mT",        "angle_deg",    "site_index",
                     "delta_g_kHz", "delta_g_oracle", "delta_e_kHz",
                     "delta_e_oracle", "rho",        "rho_oracle"};
    double worst_rel = 0.0, worst_rho = 0.0;
    std::size_t warnings = 0;
    for (std::size_t i = 0; i < o.n; ++i) {
        const double B = ub(rng);
        const double angle = ua(rng);
        const std::size_t si = us(rng);
        const shf::NuclearSite site{near[si].position_angstrom,
                                    near[si].gamma_MHz_per_T};
        const auto field = shf::in_plane_field(B, angle);
        const auto pert = shf::shf_solve(center, site, field);
        const auto oracle = shf::oracle_solve(center, site, field);
        const double rel_g =
            std::abs(pert.delta_g - oracle.delta_g) / oracle.delta_g;
        const double rel_e =
            std::abs(pert.delta_e - oracle.delta_e) / oracle.delta_e;
        const double drho = std::abs(pert.rho - oracle.rho_oracle);
        worst_rel = std::max({worst_rel, rel_g, rel_e});
        worst_rho = std::max(worst_rho, drho);
        if (oracle.perturbative_warning) ++warnings;
        table.rows.push_back({B, angle, static_cast<double>(si), pert.delta_g,
                              oracle.delta_g, pert.delta_e, oracle.delta_e,
                              pert.rho, oracle.rho_oracle});
    }

    json config = {{"n", o.n},       {"seed", o.seed},   {"bmin_mT", o.bmin},
                   {"bmax_mT", o.bmax}, {"sites", o.sites}};
    const std::string hash = shf::config_hash(config);
    const std::string artifact =
        (fs::path(o.common.out_dir) / shf::timestamped_name("oracle-check", "csv"))
            .string();
    shf::write_csv(artifact, table, hash);

    const bool ok = worst_rel <= o.tol_rel && worst_rho <= o.tol_rho;
    json summary = {{"configurations", o.n},
                    {"worst_rel_delta", worst_rel},
                    {"worst_abs_rho", worst_rho},
                    {"perturbative_warnings", warnings},
                    {"within_tolerance", ok},
                    {"artifact", artifact}};
    std::cout << summary.dump(2) << '\n';
    write_metadata(o.common, "oracle-check", config, hash, dataset_metadata(l),
                   json::object(), {artifact});
    if (!ok)
        throw shf::ComputationError(
            "oracle-check: perturbative results outside tolerance");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Superhyperfine addressing toolkit: effective fields, splittings, "
        "branching contrast atlases and photon-echo simulation/fitting for an "
        "anisotropic effective spin-1/2 coupled to ligand nuclear spins"};
    app.require_subcommand(1);

    SolveOpts solve_opts;
    auto* solve = app.add_subcommand(
        "solve", "superhyperfine splittings and branching contrast for one ion");
    add_common(solve, solve_opts.common);
    solve->add_option("--ion", solve_opts.ion,
                      "ion label (Y01.., pinned-A, pinned-B, fast)");
    solve->add_option("--B", solve_opts.field.B_mT,
                      "field magnitude (mT); 0 gives dipole-only splittings")
        ->required();
    add_field_direction(solve, solve_opts.field);
    solve->add_option("--orientation", solve_opts.orientation,
                      "orientation class A or B (aliases override)");
    solve->add_option("--branch", solve_opts.branch,
                      "electron branch: minus (lower) or plus")
        ->check(CLI::IsMember({"minus", "plus"}));

    ScanOpts scan_opts;
    auto* scan = app.add_subcommand(
        "scan", "splittings and contrast versus field magnitude (CSV)");
    add_common(scan, scan_opts.common);
    scan->add_option("--ion", scan_opts.ion, "ion label");
    scan->add_option("--B", scan_opts.range, "field range lo:hi:n (mT)");
    add_field_direction(scan, scan_opts.field);
    scan->add_option("--orientation", scan_opts.orientation, "orientation A or B");
    scan->add_option("--orientation-jitter", scan_opts.orientation_jitter_deg,
                     "tensor orientation jitter half-angle (deg) for envelopes");
    scan->add_option("--strength-jitter", scan_opts.strength_jitter_rel,
                     "relative tensor magnitude jitter for envelopes");
    scan->add_option("--jitter-samples", scan_opts.jitter_samples,
                     "jitter sample count");
    scan->add_option("--seed", scan_opts.seed, "jitter sampling seed");

    MapOpts map_opts;
    auto* map = app.add_subcommand(
        "map", "maximum branching contrast over ion directions (CSV)");
    add_common(map, map_opts.common);
    map->add_option("--orientation", map_opts.orientation, "orientation A or B");
    map->add_option("--resolution", map_opts.resolution_deg,
                    "angular grid resolution (deg)");
    map->add_option("--r", map_opts.r_angstrom, "ion distance (angstrom)");
    add_field_direction(map, map_opts.field);
    map->add_flag("--serial", map_opts.serial,
                  "use the serial reference kernel instead of the parallel one");

    LevelsOpts levels_opts;
    auto* levels = app.add_subcommand(
        "levels", "nuclear doublet level diagram versus field (CSV)");
    add_common(levels, levels_opts.common);
    levels->add_option("--ion", levels_opts.ion, "ion label");
    levels->add_option("--B", levels_opts.range, "field range lo:hi:n (mT)");
    add_field_direction(levels, levels_opts.field);
    levels->add_option("--orientation", levels_opts.orientation,
                       "orientation A or B");

    NeighborsOpts neighbors_opts;
    auto* nb = app.add_subcommand("neighbors",
                                  "k nearest ligand sites from the lattice file");
    add_common(nb, neighbors_opts.common);
    nb->add_option("--k", neighbors_opts.k, "number of sites");

    EchoSimOpts sim_opts;
    auto* sim = app.add_subcommand(
        "echo-sim", "synthesize a modulated two-pulse echo trace (CSV)");
    add_common(sim, sim_opts.common);
    sim->add_option("--ion", sim_opts.ion,
                    "derive modulation parameters from this ion (else use "
                    "--delta-g/--delta-e/--rho)");
    sim->add_option("--B", sim_opts.field.B_mT, "field magnitude (mT), with --ion");
    add_field_direction(sim, sim_opts.field);
    sim->add_option("--orientation", sim_opts.orientation, "orientation A or B");
    sim->add_option("--delta-g", sim_opts.delta_g, "ground splitting (kHz)");
    sim->add_option("--delta-e", sim_opts.delta_e, "excited splitting (kHz)");
    sim->add_option("--rho", sim_opts.rho, "branching contrast in [0,1]");
    sim->add_option("--I0", sim_opts.I0, "zero-delay intensity (arbitrary units)");
    sim->add_option("--T2", sim_opts.T2, "coherence lifetime (us)");
    sim->add_option("--x", sim_opts.x, "stretching exponent (dimensionless)");
    sim->add_option("--noise", sim_opts.noise, "Gaussian noise sigma (intensity units)");
    sim->add_option("--seed", sim_opts.seed, "noise seed");
    sim->add_option("--tmax", sim_opts.tmax, "largest pulse delay t12 (us)");
    sim->add_option("--n", sim_opts.n, "number of samples");
    sim->add_flag("--spectrum", sim_opts.with_spectrum,
                  "also write the magnitude spectrum (CSV, kHz bins)");

    EchoFitOpts fit_opts;
    auto* fit = app.add_subcommand(
        "echo-fit", "fit the single-modulation echo model to a trace CSV");
    add_common(fit, fit_opts.common);
    fit->add_option("--in", fit_opts.in_path, "trace CSV (t12_us,intensity)")
        ->required();
    fit->add_option("--x", fit_opts.x, "fixed stretching exponent (dimensionless)");
    fit->add_option("--max-iter", fit_opts.max_iter, "maximum accepted steps");
    fit->add_option("--tol", fit_opts.tol, "relative cost-decrease tolerance");

    OracleOpts oracle_opts;
    auto* oracle = app.add_subcommand(
        "oracle-check",
        "compare perturbative splittings/contrast against the 4x4 diagonalization");
    add_common(oracle, oracle_opts.common);
    oracle->add_option("--n", oracle_opts.n, "number of random configurations");
    oracle->add_option("--seed", oracle_opts.seed, "configuration seed");
    oracle->add_option("--bmin", oracle_opts.bmin, "smallest field magnitude (mT)");
    oracle->add_option("--bmax", oracle_opts.bmax, "largest field magnitude (mT)");
    oracle->add_option("--sites", oracle_opts.sites, "nearest sites to draw from");

    solve->callback([&] { cmd_solve(solve_opts, solve); });
    scan->callback([&] { cmd_scan(scan_opts, scan); });
    map->callback([&] { cmd_map(map_opts, map); });
    levels->callback([&] { cmd_levels(levels_opts, levels); });
    nb->callback([&] { cmd_neighbors(neighbors_opts); });
    sim->callback([&] { cmd_echo_sim(sim_opts, sim); });
    fit->callback([&] { cmd_echo_fit(fit_opts); });
    oracle->callback([&] { cmd_oracle_check(oracle_opts); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // help/version exit 0, bad flags exit 2
    } catch (const shf::InvalidInput& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const shf::ComputationError& e) {
        std::cerr << "computation error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
