#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "shf/echo.hpp"

// Machine-readable run artifacts: deterministic CSV payloads, run-metadata
// JSON, config hashing and timestamped file naming.  Timestamps appear only
// in file names and metadata, never inside CSV payloads, so identical
// configurations reproduce byte-identical rows.

namespace shf {

// 64-bit FNV-1a over the canonical (key-sorted) config dump, hex-encoded.
std::string config_hash(const nlohmann::json& config);

// "<command>-YYYYMMDDTHHMMSSmmmZ.<ext>" in UTC.
std::string timestamped_name(const std::string& command, const std::string& ext);

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

// Leading "# config_hash=..." comment, header row, then rows printed with
// 12 significant digits.
void write_csv(const std::string& path, const CsvTable& table,
               const std::string& hash);

void write_json(const std::string& path, const nlohmann::json& payload);

// Trace CSV round-trip ("t12_us,intensity" header, '#' comments ignored).
void write_trace_csv(const std::string& path, const EchoTrace& trace,
                     const std::string& hash);
EchoTrace read_trace_csv(const std::string& path);

}  // namespace shf
