#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "mkdv/grid.hpp"

namespace mkdv {

// Binary snapshot: magic "MKDV1", L float64, N uint64, t float64, then N
// little-endian float64 values.
void write_snapshot(const std::string& path, const Field& u, double t);

struct Snapshot {
    Field u;
    double t = 0.0;
};
Snapshot read_snapshot(const std::string& path);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

// %.17g formatting, deterministic across runs.
void write_csv(const std::string& path, const CsvTable& table);

struct ReportItem {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

// Structured record of one experiment run.
struct RunReport {
    std::string experiment;
    nlohmann::ordered_json config_echo;
    std::vector<ReportItem> items;
    nlohmann::ordered_json fitted = nlohmann::ordered_json::object();
    std::vector<std::pair<std::string, CsvTable>> series;
    double noise_floor = 0.0;
    double wall_clock_s = 0.0;

    bool pass() const;
    void add_item(const std::string& name, double value, double tolerance, bool ok);
    // |value| <= tolerance convenience form.
    void add_abs_item(const std::string& name, double value, double tolerance);

    nlohmann::ordered_json to_json() const;
    // report.json plus one CSV file per series entry.
    void write(const std::string& out_dir) const;
};

}  // namespace mkdv
