#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace tristable::cli {

/// Column-oriented table written as CSV (17 significant digits, LF) or as a
/// JSON object of columns.
struct Table {
    using Cell = std::variant<double, std::string>;

    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

std::string format_double(double value);

/// Writes `<dir>/<stem>.csv` (or `.json`) plus the sidecar `<dir>/<stem>.meta.json`
/// and returns the data file path.
std::filesystem::path write_table(const std::filesystem::path& dir, const std::string& stem, const Table& table,
                                  const std::string& format, const nlohmann::json& sidecar);

/// Writes a JSON document (2-space indent, trailing LF).
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/// Parsed CSV: header plus rows of numbers (non-numeric cells become NaN).
struct CsvData {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    int column(const std::string& name) const;  // -1 if absent
    std::vector<double> values(int index) const;
};

CsvData read_csv(const std::filesystem::path& path);

}  // namespace tristable::cli
