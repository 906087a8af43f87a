#pragma once

#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lcf/errors.hpp"
#include "lcf/time_series.hpp"

namespace lcf::csv {

/// Split one CSV record. Handles RFC-style double-quoted fields with embedded
/// delimiters and "" escapes; does not handle embedded newlines (one sample
/// per row by contract).
inline std::vector<std::string> split_record(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delim) {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

inline std::string quote_field(const std::string& s, char delim = ',') {
    bool needs = s.find(delim) != std::string::npos ||
                 s.find('"') != std::string::npos || s.find('\n') != std::string::npos;
    if (!needs) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

/// Read one numeric column from a headered CSV file into a TimeSeries.
/// Row indices in error messages are 1-based and count the header as row 1.
inline TimeSeries ingest_csv(const std::string& path, const std::string& column,
                             char delim = ',', double dt = 1.0,
                             const std::string& unit = {}) {
    std::ifstream in(path);
    if (!in) throw DataError("ingest_csv: cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line))
        throw DataError("ingest_csv: empty file: " + path);

    const auto header = split_record(line, delim);
    std::size_t col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == column) { col = i; break; }
    if (col == header.size())
        throw DataError("ingest_csv: column '" + column + "' not found in " + path);

    std::vector<double> values;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto fields = split_record(line, delim);
        if (col >= fields.size())
            throw DataError("ingest_csv: row " + std::to_string(row) +
                            " has no field for column '" + column + "'");
        const std::string& cell = fields[col];
        try {
            std::size_t pos = 0;
            const double v = std::stod(cell, &pos);
            while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
            if (pos != cell.size()) throw std::invalid_argument(cell);
            values.push_back(v);
        } catch (const std::exception&) {
            throw DataError("ingest_csv: non-numeric cell '" + cell + "' at row " +
                            std::to_string(row) + " in column '" + column + "'");
        }
        if (!std::isfinite(values.back()))
            throw DataError("ingest_csv: non-finite value at row " + std::to_string(row));
    }
    if (values.empty()) throw DataError("ingest_csv: no data rows in " + path);
    return TimeSeries(std::move(values), 0.0, dt, unit);
}

/// Write named columns to CSV. All columns must have equal length.
inline void write_columns(const std::string& path,
                          const std::vector<std::string>& names,
                          const std::vector<std::vector<double>>& columns,
                          char delim = ',') {
    if (names.size() != columns.size())
        throw ConfigError("write_columns: names/columns size mismatch");
    std::ofstream out(path);
    if (!out) throw DataError("write_columns: cannot open for writing: " + path);
    out.precision(17);
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out << delim;
        out << quote_field(names[i], delim);
    }
    out << "\n";
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns)
        if (c.size() != rows)
            throw ConfigError("write_columns: ragged columns");
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i) out << delim;
            out << columns[i][r];
        }
        out << "\n";
    }
}

} // namespace lcf::csv
