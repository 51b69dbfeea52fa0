#include "tristable_cli/output.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tristable/error.hpp"

namespace tristable::cli {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    return out;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::filesystem::path write_table(const std::filesystem::path& dir, const std::string& stem, const Table& table,
                                  const std::string& format, const nlohmann::json& sidecar) {
    const bool json_format = format == "json";
    const std::filesystem::path path = dir / (stem + (json_format ? ".json" : ".csv"));
    {
        std::ofstream out = open_output(path);
        if (json_format) {
            nlohmann::json doc = nlohmann::json::object();
            for (std::size_t c = 0; c < table.columns.size(); ++c) {
                nlohmann::json col = nlohmann::json::array();
                for (const auto& row : table.rows) {
                    const auto& cell = row.at(c);
                    if (const double* d = std::get_if<double>(&cell)) {
                        col.push_back(std::isfinite(*d) ? nlohmann::json(*d) : nlohmann::json(nullptr));
                    } else {
                        col.push_back(std::get<std::string>(cell));
                    }
                }
                doc[table.columns[c]] = std::move(col);
            }
            out << doc.dump(2) << '\n';
        } else {
            for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
            out << '\n';
            for (const auto& row : table.rows) {
                for (std::size_t c = 0; c < row.size(); ++c) {
                    if (c) out << ',';
                    if (const double* d = std::get_if<double>(&row[c])) {
                        out << format_double(*d);
                    } else {
                        out << std::get<std::string>(row[c]);
                    }
                }
                out << '\n';
            }
        }
        if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
    }
    nlohmann::json meta = sidecar;
    meta["file"] = path.filename().string();
    meta["columns"] = table.columns;
    meta["rows"] = table.rows.size();
    write_json(dir / (stem + ".meta.json"), meta);
    return path;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
    std::ofstream out = open_output(path);
    out << doc.dump(2) << '\n';
    if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

int CsvData::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return static_cast<int>(i);
    }
    return -1;
}

std::vector<double> CsvData::values(int index) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.at(static_cast<std::size_t>(index)));
    return out;
}

CsvData read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open table " + path.string());
    CsvData data;
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::IoError, path.string() + " is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    data.columns = split(line);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != data.columns.size()) {
            throw Error(ErrorCode::IoError, path.string() + ":" + std::to_string(lineno) + ": expected " +
                                                std::to_string(data.columns.size()) + " cells");
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) {
            char* end = nullptr;
            const double v = std::strtod(c.c_str(), &end);
            row.push_back(end != c.c_str() && *end == '\0' ? v : std::nan(""));
        }
        data.rows.push_back(std::move(row));
    }
    return data;
}

}  // namespace tristable::cli
