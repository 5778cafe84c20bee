#include "shf/artifacts.hpp"

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace shf {

std::string config_hash(const nlohmann::json& config) {
    const std::string dump = config.dump();  // object keys are sorted
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setfill('0') << std::setw(16) << h;
    return os.str();
}

std::string timestamped_name(const std::string& command, const std::string& ext) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t secs = std::chrono::system_clock::to_time_t(now);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        now.time_since_epoch()) %
                    1000;
    std::tm tm{};
    gmtime_r(&secs, &tm);
    std::ostringstream os;
    os << command << '-' << std::put_time(&tm, "%Y%m%dT%H%M%S") << std::setw(3)
       << std::setfill('0') << ms.count() << "Z." << ext;
    return os.str();
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write artifact: " + path);
    return out;
}

void print_value(std::ostream& os, double v) {
    os << std::setprecision(12) << v;
}

}  // namespace

void write_csv(const std::string& path, const CsvTable& table,
               const std::string& hash) {
    auto out = open_out(path);
    out << "# config_hash=" << hash << '\n';
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        out << (c ? "," : "") << table.columns[c];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            print_value(out, row[c]);
        }
        out << '\n';
    }
}

void write_json(const std::string& path, const nlohmann::json& payload) {
    auto out = open_out(path);
    out << payload.dump(2) << '\n';
}

void write_trace_csv(const std::string& path, const EchoTrace& trace,
                     const std::string& hash) {
    CsvTable table;
    table.columns = {"t12_us", "intensity"};
    table.rows.reserve(trace.t12_us.size());
    for (std::size_t i = 0; i < trace.t12_us.size(); ++i)
        table.rows.push_back({trace.t12_us[i], trace.intensity[i]});
    write_csv(path, table, hash);
}

EchoTrace read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open trace: " + path);
    EchoTrace trace;
    std::string line;
    bool header_seen = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line.find("t12_us") == std::string::npos)
                throw InvalidInput(path + ": expected header 't12_us,intensity'");
            header_seen = true;
            continue;
        }
        std::istringstream row(line);
        double t, v;
        char comma;
        if (!(row >> t >> comma >> v) || comma != ',')
            throw InvalidInput(path + ':' + std::to_string(line_no) +
                               ": malformed trace row");
        trace.t12_us.push_back(t);
        trace.intensity.push_back(v);
    }
    trace.validate();
    return trace;
}

}  // namespace shf
