#include "qmetro/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qmetro {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open for writing: " + path.string());
    f << content;
    if (!f) throw Error("write failed: " + path.string());
}

void write_ensemble_csv(const std::filesystem::path& path, const std::vector<EnsembleRecord>& records) {
    std::ostringstream out;
    out << "state_id,seed,purity,concurrence,negativity,ree,mqfi,mqfi_norm\n";
    for (const auto& r : records) {
        out << r.state_id << ',' << r.seed << ',' << format_double(r.purity) << ','
            << format_double(r.concurrence) << ',' << format_double(r.negativity) << ',';
        if (r.ree) out << format_double(*r.ree);
        out << ',' << format_double(r.mqfi) << ',' << format_double(r.mqfi_norm) << '\n';
    }
    write_text_file(path, out.str());
}

std::vector<EnsembleRecord> read_ensemble_csv(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open ensemble file: " + path.string());
    std::string line;
    if (!std::getline(f, line)) throw Error("empty ensemble file: " + path.string());
    if (line.rfind("state_id,", 0) != 0) throw Error("unexpected header in " + path.string());

    std::vector<EnsembleRecord> out;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (line.back() == ',') cells.emplace_back();
        if (cells.size() != 8) throw Error("bad row in " + path.string() + ": " + line);
        EnsembleRecord r;
        r.state_id = std::strtoull(cells[0].c_str(), nullptr, 10);
        r.seed = std::strtoull(cells[1].c_str(), nullptr, 10);
        r.purity = std::strtod(cells[2].c_str(), nullptr);
        r.concurrence = std::strtod(cells[3].c_str(), nullptr);
        r.negativity = std::strtod(cells[4].c_str(), nullptr);
        if (!cells[5].empty()) r.ree = std::strtod(cells[5].c_str(), nullptr);
        r.mqfi = std::strtod(cells[6].c_str(), nullptr);
        r.mqfi_norm = std::strtod(cells[7].c_str(), nullptr);
        out.push_back(r);
    }
    return out;
}

}  // namespace qmetro
