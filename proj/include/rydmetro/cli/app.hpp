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

// Command-line front end. Exit codes: 0 success, 2 invalid input,
// 3 numerical convergence failure, 1 anything else.

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rydmetro/cli/commands.hpp"

namespace rydmetro::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_other = 1;
inline constexpr int exit_invalid = 2;
inline constexpr int exit_convergence = 3;

/// Writes the table in the configured format to `path`, or to `out` when
/// `path` is empty.
inline void emit(const Table &t, const std::string &format, const std::string &path,
                 std::ostream &out) {
    auto write = [&](std::ostream &os) {
        if (format == "json") {
            write_json(os, t);
        } else {
            write_csv(os, t);
        }
    };
    if (path.empty()) {
        write(out);
        return;
    }
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::filesystem::create_directories(p.parent_path());
    }
    std::ofstream file(p, std::ios::binary);
    rydmetro::detail::require(static_cast<bool>(file), "cannot open output file '" + path + "'");
    write(file);
}

inline int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Rydberg-ensemble metrology simulations", "rydmetro"};
    app.require_subcommand(1);

    struct Options {
        std::string config;
        std::vector<std::string> overrides;
        std::optional<std::string> output;
        std::optional<std::string> format;
        std::optional<std::int64_t> seed;
    };
    std::vector<Options> opts(commands().size());
    std::vector<CLI::App *> subs;
    for (std::size_t i = 0; i < commands().size(); ++i) {
        auto *sub = app.add_subcommand(commands()[i].name, commands()[i].summary);
        sub->add_option("-c,--config", opts[i].config, "JSON config file");
        sub->add_option("--set", opts[i].overrides, "key=value override (repeatable)");
        sub->add_option("-o,--output", opts[i].output, "output path");
        sub->add_option("--format", opts[i].format, "csv or json");
        sub->add_option("--seed", opts[i].seed, "master RNG seed");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << '\n';
        return exit_invalid;
    }

    try {
        std::size_t which = 0;
        while (!subs[which]->parsed()) {
            ++which;
        }
        const Options &o = opts[which];
        const std::string &name = commands()[which].name;
        json config = o.config.empty() ? json::object() : load_config_file(o.config);
        apply_overrides(config, o.overrides);
        if (o.output) {
            config["output"] = *o.output;
        }
        if (o.format) {
            config["format"] = *o.format;
        }
        if (o.seed) {
            config["seed"] = *o.seed;
        }

        const Command &cmd = find_command(name);
        const RunConfig cfg(name, config, cmd.schema());
        const Table table = cmd.run(cfg);

        const std::string format = cfg.string("format");
        std::string path = cfg.string("output");
        if (path.empty()) {
            if (const char *dir = std::getenv("RYDMETRO_OUTPUT_DIR"); dir && *dir) {
                path = (std::filesystem::path(dir) / (name + "." + format)).string();
            }
        }
        emit(table, format, path, out);
        return exit_ok;
    } catch (const ValidationError &e) {
        err << "error: " << e.what() << '\n';
        return exit_invalid;
    } catch (const ConvergenceError &e) {
        err << "convergence failure: " << e.what() << '\n';
        return exit_convergence;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return exit_other;
    }
}

} // namespace rydmetro::cli
