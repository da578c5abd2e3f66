#include "ssdrl/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ssdrl/errors.hpp"

namespace ssdrl::harness {

std::size_t Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) {
            return i;
        }
    }
    throw ConfigError("no column named '" + name + "'");
}

void Table::add_row(std::vector<double> row) {
    if (row.size() != columns.size()) {
        throw SizeMismatchError(row.size(), columns.size());
    }
    rows.push_back(std::move(row));
}

std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string to_csv(const Table& table) {
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out += (i ? "," : "") + table.columns[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) {
                out += ',';
            }
            out += format_number(row[i]);
        }
        out += '\n';
    }
    return out;
}

void write_csv(const std::filesystem::path& path, const Table& table) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    f << to_csv(table);
    if (!f) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

Table read_csv(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) {
        throw std::runtime_error("cannot open " + path.string());
    }
    Table t;
    std::string line;
    if (!std::getline(f, line)) {
        throw ConfigError(path.string() + " is empty");
    }
    std::stringstream header(line);
    for (std::string cell; std::getline(header, cell, ',');) {
        t.columns.push_back(cell);
    }
    while (std::getline(f, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) {
            row.push_back(std::strtod(cell.c_str(), nullptr));
        }
        t.add_row(std::move(row));
    }
    return t;
}

}  // namespace ssdrl::harness
