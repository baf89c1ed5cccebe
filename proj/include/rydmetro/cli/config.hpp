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

// Run configuration: a flat JSON object checked against a per-command
// schema. Unknown keys, missing required keys and type mismatches raise
// ValidationError.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rydmetro/errors.hpp"

namespace rydmetro::cli {

using nlohmann::json;

enum class KeyType { number, integer, string, number_list, number_or_list };

struct KeySpec {
    KeyType type = KeyType::number;
    bool required = false;
    json fallback = nullptr; ///< default when absent and not required
    std::vector<std::string> choices;
    std::string help;
};

using Schema = std::map<std::string, KeySpec>;

/// Keys every subcommand accepts.
inline const Schema &common_keys() {
    static const Schema keys{
        {"seed", {KeyType::integer, false, 12345, {}, "master RNG seed"}},
        {"format", {KeyType::string, false, "csv", {"csv", "json"}, "output format"}},
        {"output", {KeyType::string, false, "", {}, "output file path"}},
    };
    return keys;
}

namespace detail {

using rydmetro::detail::require;

inline std::string type_name(KeyType t) {
    switch (t) {
    case KeyType::number: return "a number";
    case KeyType::integer: return "an integer";
    case KeyType::string: return "a string";
    case KeyType::number_list: return "a list of numbers";
    case KeyType::number_or_list: return "a number or a list of numbers";
    }
    return "?";
}

inline bool is_number_list(const json &v) {
    if (!v.is_array()) {
        return false;
    }
    for (const auto &x : v) {
        if (!x.is_number()) {
            return false;
        }
    }
    return true;
}

inline bool matches(const json &v, const KeySpec &spec) {
    switch (spec.type) {
    case KeyType::number: return v.is_number();
    case KeyType::integer:
        return v.is_number_integer() ||
               (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>());
    case KeyType::string: return v.is_string();
    case KeyType::number_list: return is_number_list(v);
    case KeyType::number_or_list: return v.is_number() || is_number_list(v);
    }
    return false;
}

} // namespace detail

/// Validated view of one run's parameters.
class RunConfig {
  public:
    RunConfig(std::string command, json values, const Schema &schema)
        : command_(std::move(command)), values_(std::move(values)) {
        detail::require(values_.is_object(), "config must be a JSON object");
        Schema all = schema;
        for (const auto &[k, v] : common_keys()) {
            all.emplace(k, v);
        }
        for (const auto &[key, value] : values_.items()) {
            const auto it = all.find(key);
            detail::require(it != all.end(),
                            "unknown key '" + key + "' for " + command_);
            detail::require(detail::matches(value, it->second),
                            "key '" + key + "' must be " + detail::type_name(it->second.type));
            if (!it->second.choices.empty()) {
                bool ok = false;
                for (const auto &c : it->second.choices) {
                    ok = ok || value.get<std::string>() == c;
                }
                detail::require(ok, "key '" + key + "' has unsupported value '" +
                                        value.get<std::string>() + "'");
            }
        }
        for (const auto &[key, spec] : all) {
            if (!values_.contains(key)) {
                detail::require(!spec.required,
                                "missing required key '" + key + "' for " + command_);
                if (!spec.fallback.is_null()) {
                    values_[key] = spec.fallback;
                }
            }
        }
    }

    [[nodiscard]] const std::string &command() const noexcept { return command_; }
    [[nodiscard]] const json &values() const noexcept { return values_; }
    [[nodiscard]] bool has(const std::string &key) const { return values_.contains(key); }

    [[nodiscard]] double number(const std::string &key) const { return at(key).get<double>(); }
    [[nodiscard]] std::int64_t integer(const std::string &key) const {
        const json &v = at(key);
        return v.is_number_integer() ? v.get<std::int64_t>()
                                     : static_cast<std::int64_t>(v.get<double>());
    }
    [[nodiscard]] std::string string(const std::string &key) const {
        return at(key).get<std::string>();
    }
    /// A scalar is returned as a one-element list.
    [[nodiscard]] std::vector<double> numbers(const std::string &key) const {
        const json &v = at(key);
        if (v.is_number()) {
            return {v.get<double>()};
        }
        return v.get<std::vector<double>>();
    }

  private:
    const json &at(const std::string &key) const {
        detail::require(values_.contains(key), "missing key '" + key + "' for " + command_);
        return values_.at(key);
    }

    std::string command_;
    json values_;
};

/// Reads a JSON config file.
inline json load_config_file(const std::string &path) {
    std::ifstream in(path);
    detail::require(static_cast<bool>(in), "cannot open config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error &e) {
        throw ValidationError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

/// Applies "key=value" overrides; values are parsed as JSON when they can
/// be, otherwise kept as strings.
inline void apply_overrides(json &config, const std::vector<std::string> &overrides) {
    if (config.is_null()) {
        config = json::object();
    }
    for (const auto &item : overrides) {
        const auto eq = item.find('=');
        detail::require(eq != std::string::npos && eq > 0,
                        "override '" + item + "' must have the form key=value");
        const std::string key = item.substr(0, eq);
        const std::string text = item.substr(eq + 1);
        json value = json::parse(text, nullptr, false);
        if (value.is_discarded()) {
            value = text;
        }
        config[key] = std::move(value);
    }
}

} // namespace rydmetro::cli
