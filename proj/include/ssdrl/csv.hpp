#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ssdrl::harness {

// Header plus numeric records; integers round-trip exactly through the text form.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const;
    void add_row(std::vector<double> row);
};

// Shortest text that reads back to the same double (17 significant digits at most).
std::string format_number(double v);

std::string to_csv(const Table& table);
void write_csv(const std::filesystem::path& path, const Table& table);
Table read_csv(const std::filesystem::path& path);

}  // namespace ssdrl::harness
