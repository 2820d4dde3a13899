#include "mkdv/report.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace mkdv {

namespace {

constexpr char kMagic[5] = {'M', 'K', 'D', 'V', '1'};

void put_f64(std::ofstream& out, double x) {
    static_assert(sizeof(double) == 8);
    out.write(reinterpret_cast<const char*>(&x), 8);
}

double get_f64(std::ifstream& in) {
    double x = 0.0;
    in.read(reinterpret_cast<char*>(&x), 8);
    return x;
}

}  // namespace

void write_snapshot(const std::string& path, const Field& u, double t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open snapshot for writing: " + path);
    out.write(kMagic, 5);
    put_f64(out, u.grid->length);
    const std::uint64_t n = static_cast<std::uint64_t>(u.grid->n);
    out.write(reinterpret_cast<const char*>(&n), 8);
    put_f64(out, t);
    for (double x : u.v) put_f64(out, x);
    if (!out) throw std::runtime_error("snapshot write failed: " + path);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open snapshot: " + path);
    char magic[5];
    in.read(magic, 5);
    if (!in || std::memcmp(magic, kMagic, 5) != 0)
        throw std::runtime_error("bad snapshot magic in " + path);
    const double length = get_f64(in);
    std::uint64_t n = 0;
    in.read(reinterpret_cast<char*>(&n), 8);
    const double t = get_f64(in);
    Snapshot snap;
    snap.t = t;
    snap.u = Field(make_grid(length, static_cast<int>(n)));
    for (double& x : snap.u.v) x = get_f64(in);
    if (!in) throw std::runtime_error("truncated snapshot: " + path);
    return snap;
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open csv for writing: " + path);
    for (size_t i = 0; i < table.header.size(); ++i)
        out << (i ? "," : "") << table.header[i];
    out << "\n";
    char buf[32];
    for (const auto& row : table.rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
            out << (i ? "," : "") << buf;
        }
        out << "\n";
    }
}

bool RunReport::pass() const {
    for (const ReportItem& item : items)
        if (!item.pass) return false;
    return true;
}

void RunReport::add_item(const std::string& name, double value, double tolerance, bool ok) {
    items.push_back({name, value, tolerance, ok});
}

void RunReport::add_abs_item(const std::string& name, double value, double tolerance) {
    items.push_back({name, value, tolerance, std::fabs(value) <= tolerance});
}

nlohmann::ordered_json RunReport::to_json() const {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["experiment"] = experiment;
    j["config"] = config_echo;
    auto arr = nlohmann::ordered_json::array();
    for (const ReportItem& item : items)
        arr.push_back({{"name", item.name},
                       {"value", item.value},
                       {"tolerance", item.tolerance},
                       {"pass", item.pass}});
    j["items"] = arr;
    j["fitted"] = fitted;
    j["noise_floor"] = noise_floor;
    j["wall_clock_s"] = wall_clock_s;
    j["pass"] = pass();
    return j;
}

void RunReport::write(const std::string& out_dir) const {
    std::filesystem::create_directories(out_dir);
    std::ofstream out(out_dir + "/report.json");
    if (!out) throw std::runtime_error("cannot write report.json in " + out_dir);
    out << to_json().dump(2) << "\n";
    for (const auto& [name, table] : series) write_csv(out_dir + "/" + name + ".csv", table);
}

}  // namespace mkdv
