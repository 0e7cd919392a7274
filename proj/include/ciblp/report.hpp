#pragma once

#include <map>
#include <string>
#include <vector>

#include "ciblp/config.hpp"

namespace ciblp {

// CSV emission per the fixed schemas (LF endings, %.6e reals).
std::string ser_sweep_csv(const std::vector<SerCell>& cells);
std::string block_sweep_csv(const std::vector<BlockSweepCell>& cells);
std::string timing_csv(const std::vector<TimingCell>& cells);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// SVG line plots rendered from a CSV file on disk (the CSV is the source
// of truth; plots never read simulation state).
void svg_from_ser_csv(const std::string& csv_path, const std::string& svg_path);
void svg_from_block_csv(const std::string& csv_path, const std::string& svg_path);
void svg_from_timing_csv(const std::string& csv_path, const std::string& svg_path);

struct RunManifest {
    std::string command;
    std::string version;
    std::uint64_t seed = 0;
    std::string started_utc;
    std::string finished_utc;
    std::map<std::string, std::string> config_echo;
    std::map<std::string, long long> failures_per_scheme;
    std::vector<std::string> outputs;
};

std::string version_string();
std::string manifest_json(const RunManifest& m);
void write_manifest(const RunManifest& m, const std::string& dir);

std::string utc_timestamp();

// Minimal CSV reader used by the plotters: header + rows of strings.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
CsvTable parse_csv(const std::string& content);

}  // namespace ciblp
