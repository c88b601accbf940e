// Copyright (c) 2026 sepcoef contributors
// SPDX-License-Identifier: Apache-2.0
//
// Minimal numeric CSV support for the command-line surface: comma
// separated, header row required, UTF-8, scientific notation accepted.
// Parse failures carry 1-based row/column coordinates.

#pragma once

#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "sepcoef/common.hpp"
#include "sepcoef/core.hpp"

namespace sepcoef {

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows; // row-major, rows[i].size() == columns.size()

    std::size_t column_index(const std::string& name) const {
        for (std::size_t j = 0; j < columns.size(); ++j)
            if (columns[j] == name) return j;
        throw CsvError("column '" + name + "' not found");
    }
};

namespace detail_csv {

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            out.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    out.push_back(field);
    return out;
}

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

} // namespace detail_csv

inline CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw CsvError("empty input: header row required");
    for (auto& name : detail_csv::split_line(line)) {
        const auto t = detail_csv::trim(name);
        if (t.empty()) throw CsvError("header contains an empty column name");
        table.columns.push_back(t);
    }

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = detail_csv::split_line(line);
        if (fields.size() != table.columns.size())
            throw CsvError("row " + std::to_string(lineno) + ": expected " +
                           std::to_string(table.columns.size()) + " fields, got " +
                           std::to_string(fields.size()));
        std::vector<double> row(fields.size());
        for (std::size_t j = 0; j < fields.size(); ++j) {
            const auto t = detail_csv::trim(fields[j]);
            const char* begin = t.c_str();
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (t.empty() || end != begin + t.size())
                throw CsvError("row " + std::to_string(lineno) + ", column '" +
                               table.columns[j] + "': non-numeric cell '" + t + "'");
            row[j] = v;
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

inline CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open '" + path + "'");
    try {
        return read_csv(in);
    } catch (const CsvError& e) {
        throw CsvError(path + ": " + e.what());
    }
}

/// Assemble an ObservationSet from named columns of a table.
/// Empty predictor list means "all columns except the response".
inline ObservationSet table_to_observations(const CsvTable& table, const std::string& response,
                                            std::vector<std::string> predictors = {}) {
    const std::size_t yj = table.column_index(response);
    if (predictors.empty())
        for (std::size_t j = 0; j < table.columns.size(); ++j)
            if (j != yj) predictors.push_back(table.columns[j]);
    if (predictors.empty()) throw CsvError("no predictor columns left");

    std::vector<std::size_t> pj;
    for (const auto& name : predictors) pj.push_back(table.column_index(name));

    const std::size_t n = table.rows.size();
    if (n < 2) throw CsvError("need at least 2 data rows");
    Matrix x(n, pj.size());
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < pj.size(); ++j) x(i, j) = table.rows[i][pj[j]];
        y[i] = table.rows[i][yj];
    }
    try {
        return ObservationSet(std::move(x), std::move(y), std::move(predictors));
    } catch (const std::invalid_argument& e) {
        throw CsvError(e.what()); // non-finite or malformed data is an input error
    }
}

/// 17 significant digits, enough to round-trip doubles exactly.
inline void write_csv(std::ostream& os, const ObservationSet& obs,
                      const std::string& response_name = "y") {
    os.precision(17);
    if (obs.column_names().empty()) {
        for (std::size_t j = 0; j < obs.p(); ++j) os << "x" << (j + 1) << ",";
    } else {
        for (const auto& name : obs.column_names()) os << name << ",";
    }
    os << response_name << "\n";
    for (std::size_t i = 0; i < obs.n(); ++i) {
        for (std::size_t j = 0; j < obs.p(); ++j) os << obs.x()(i, j) << ",";
        os << obs.y()[i] << "\n";
    }
}

} // namespace sepcoef
