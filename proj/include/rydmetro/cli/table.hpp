// Copyright 2026 The rydmetro Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

// Result tables and their CSV / JSON writers.

#include <charconv>
#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rydmetro/errors.hpp"

namespace rydmetro::cli {

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
    std::string schema; ///< e.g. rydmetro.toy-fi.v1
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row) {
        detail::require(row.size() == columns.size(), "table row does not match columns");
        rows.push_back(std::move(row));
    }

    [[nodiscard]] std::size_t column(const std::string &name) const {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (columns[i] == name) {
                return i;
            }
        }
        throw ValidationError("no column '" + name + "'");
    }

    [[nodiscard]] double number(std::size_t row, const std::string &name) const {
        const Cell &c = rows.at(row).at(column(name));
        if (const auto *d = std::get_if<double>(&c)) {
            return *d;
        }
        if (const auto *i = std::get_if<std::int64_t>(&c)) {
            return static_cast<double>(*i);
        }
        throw ValidationError("column '" + name + "' is not numeric");
    }
};

/// 12 significant digits, '.' decimal separator, independent of locale.
inline std::string format_number(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    return {buf, r.ptr};
}

inline std::string format_cell(const Cell &c) {
    if (const auto *d = std::get_if<double>(&c)) {
        return format_number(*d);
    }
    if (const auto *i = std::get_if<std::int64_t>(&c)) {
        return std::to_string(*i);
    }
    return std::get<std::string>(c);
}

inline void write_csv(std::ostream &out, const Table &t) {
    out << "# schema: " << t.schema << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        out << (i ? "," : "") << t.columns[i];
    }
    out << '\n';
    for (const auto &row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << format_cell(row[i]);
        }
        out << '\n';
    }
}

inline nlohmann::json to_json(const Table &t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto &row : t.rows) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto &c : row) {
            std::visit([&](const auto &v) { r.push_back(v); }, c);
        }
        rows.push_back(std::move(r));
    }
    return {{"schema", t.schema}, {"columns", t.columns}, {"rows", std::move(rows)}};
}

inline void write_json(std::ostream &out, const Table &t) { out << to_json(t).dump(2) << '\n'; }

} // namespace rydmetro::cli
