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

// Subcommands. Each takes a validated RunConfig and returns a Table; all
// physical inputs and outputs are SI unless a column name says otherwise.

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "rydmetro/cli/config.hpp"
#include "rydmetro/cli/table.hpp"
#include "rydmetro/constants.hpp"
#include "rydmetro/dipolar.hpp"
#include "rydmetro/estimation.hpp"
#include "rydmetro/multiparticle.hpp"
#include "rydmetro/toy_model.hpp"

namespace rydmetro::cli {

namespace detail {

inline std::vector<double> linspace(double lo, double hi, std::int64_t n) {
    require(n >= 1, "theta_points must be >= 1");
    require(std::isfinite(lo) && std::isfinite(hi) && hi >= lo,
            "theta_max must not be below theta_min");
    std::vector<double> v(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        v[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    }
    return v;
}

inline Schema theta_keys(double lo, double hi, int points) {
    return {{"thetas", {KeyType::number_list, false, nullptr, {}, "explicit angles, rad"}},
            {"theta_min", {KeyType::number, false, lo, {}, "rad"}},
            {"theta_max", {KeyType::number, false, hi, {}, "rad"}},
            {"theta_points", {KeyType::integer, false, points, {}, "grid size"}}};
}

inline std::vector<double> thetas(const RunConfig &cfg) {
    if (cfg.has("thetas")) {
        auto v = cfg.numbers("thetas");
        require(!v.empty(), "theta grid is empty");
        return v;
    }
    return linspace(cfg.number("theta_min"), cfg.number("theta_max"),
                    cfg.integer("theta_points"));
}

inline Schema merge(Schema a, const Schema &b) {
    a.insert(b.begin(), b.end());
    return a;
}

inline Schema model_keys(double gamma_tau) {
    return {{"n0", {KeyType::number, false, 55.0, {}, "mean intrinsic excitation number"}},
            {"eta", {KeyType::number, false, 0.02, {}, "detection efficiency"}},
            {"gamma_tau", {KeyType::number, false, gamma_tau, {}, "decay-time product"}},
            {"loss_order",
             {KeyType::string, false, "after", {"after", "before"}, "loss placement"}}};
}

inline multiparticle::LossOrder loss_order(const std::string &s) {
    return s == "before" ? multiparticle::LossOrder::before_interaction
                         : multiparticle::LossOrder::after_interaction;
}

inline std::string loss_order_name(multiparticle::LossOrder o) {
    return o == multiparticle::LossOrder::before_interaction ? "before" : "after";
}

inline multiparticle::ProtocolParams model(const RunConfig &cfg) {
    multiparticle::ProtocolParams p{cfg.number("n0"), cfg.number("eta"),
                                    cfg.has("gamma_tau") ? cfg.number("gamma_tau") : 0.0,
                                    loss_order(cfg.string("loss_order"))};
    p.validate();
    return p;
}

} // namespace detail

inline Schema toy_fi_schema() {
    return detail::merge(
        {{"eta", {KeyType::number_or_list, false, json::array({0.02}), {}, "efficiencies"}}},
        detail::theta_keys(0.0, constants::pi, 51));
}

inline Table cmd_toy_fi(const RunConfig &cfg) {
    Table t{"rydmetro.toy-fi.v1",
            {"eta", "theta", "fi_without", "fi_with", "qfi_bound", "ratio", "mean_nd_with",
             "mean_nd_without"},
            {}};
    const auto grid = detail::thetas(cfg);
    const auto etas = cfg.numbers("eta");
    rydmetro::detail::require(!etas.empty(), "eta list is empty");
    for (double eta : etas) {
        const auto curve = toy::enhancement_curve({eta, grid});
        const auto means = toy::expectation_curves(eta, grid);
        for (std::size_t i = 0; i < curve.size(); ++i) {
            const auto &c = curve[i];
            const double ratio = c.fi_without > 0.0 ? c.fi_with / c.fi_without : 0.0;
            t.add_row({eta, c.theta, c.fi_without, c.fi_with, c.qfi_bound, ratio,
                       means[i].nd_with, means[i].nd_without});
        }
    }
    return t;
}

inline Schema decay_scan_schema() {
    Schema s = detail::merge(detail::model_keys(0.0), {
        {"gamma", {KeyType::number, false, 1.9e3, {}, "decay rate, 1/s"}},
        {"taus", {KeyType::number_list, false, nullptr, {}, "interaction times, s"}},
        {"tau_max", {KeyType::number, false, 20e-6, {}, "s"}},
        {"tau_points", {KeyType::integer, false, 21, {}, "grid size"}},
        {"model", {KeyType::string, false, "exact", {"exact", "approx"}, "decay form"}},
    });
    s.erase("gamma_tau");
    return detail::merge(s, {{"thetas", {KeyType::number_list, false,
                                         json::array({0.0, 0.5, 1.0, 1.5, 2.0, 2.5}), {},
                                         "rad"}}});
}

/// Mean d-mode counts against interaction time at fixed angles, with a
/// single-exponential fit of each curve.
inline Table cmd_decay_scan(const RunConfig &cfg) {
    const double gamma = cfg.number("gamma");
    rydmetro::detail::require(std::isfinite(gamma) && gamma >= 0.0, "gamma must be >= 0");
    const auto taus = cfg.has("taus")
                          ? cfg.numbers("taus")
                          : detail::linspace(0.0, cfg.number("tau_max"), cfg.integer("tau_points"));
    rydmetro::detail::require(taus.size() >= 2, "need at least 2 interaction times");
    for (double tau : taus) {
        rydmetro::detail::require(std::isfinite(tau) && tau >= 0.0, "taus must be >= 0");
    }
    const auto grid = cfg.numbers("thetas");
    rydmetro::detail::require(!grid.empty(), "theta grid is empty");
    const bool approx = cfg.string("model") == "approx";

    Table t{"rydmetro.decay-scan.v1",
            {"theta", "tau", "gamma_tau", "mean_nd", "control_population", "fitted_rate"},
            {}};
    for (double theta : grid) {
        std::vector<double> means;
        for (double tau : taus) {
            auto p = detail::model(cfg);
            p.gamma_tau = gamma * tau;
            means.push_back(approx ? multiparticle::super_rabi_means_approx(p, theta).first
                                   : multiparticle::super_rabi_means(p, theta).first);
        }
        double rate = std::nan("");
        if (means.front() > 0.0) {
            rate = multiparticle::fit_exponential(taus, means).rate;
        }
        const double control = cfg.number("n0") * std::pow(std::sin(0.5 * theta), 2);
        for (std::size_t i = 0; i < taus.size(); ++i) {
            t.add_row({theta, taus[i], gamma * taus[i], means[i], control, rate});
        }
    }
    return t;
}

inline Schema super_rabi_schema() {
    return detail::merge(detail::model_keys(0.04), detail::theta_keys(0.0, constants::pi, 61));
}

inline Table cmd_super_rabi(const RunConfig &cfg) {
    const auto p = detail::model(cfg);
    auto reference = p;
    reference.gamma_tau = 0.0;
    Table t{"rydmetro.super-rabi.v1",
            {"theta", "mean_nd", "mean_np", "mean_nd_reference", "mean_np_reference"},
            {}};
    for (double theta : detail::thetas(cfg)) {
        const auto [nd, np] = multiparticle::super_rabi_means(p, theta);
        const auto [rd, rp] = multiparticle::super_rabi_means(reference, theta);
        t.add_row({theta, nd, np, rd, rp});
    }
    return t;
}

inline Schema fi_scan_schema() {
    Schema s = detail::merge(detail::model_keys(0.0),
                             detail::theta_keys(0.0, constants::pi, 61));
    s.erase("gamma_tau");
    s["loss_order"] = {KeyType::string, false, "both", {"after", "before", "both"}, ""};
    s["gamma_tau"] = {KeyType::number_or_list, false,
                      json::array({0.0, 0.028, 0.1, 0.3, 1.0}), {}, "decay-time products"};
    return s;
}

inline Table cmd_fi_scan(const RunConfig &cfg) {
    const std::string order = cfg.string("loss_order");
    std::vector<multiparticle::LossOrder> orders;
    if (order != "before") {
        orders.push_back(multiparticle::LossOrder::after_interaction);
    }
    if (order != "after") {
        orders.push_back(multiparticle::LossOrder::before_interaction);
    }
    const auto grid = detail::thetas(cfg);
    Table t{"rydmetro.fi-scan.v1", {"loss_order", "gamma_tau", "theta", "fi", "normalized_fi"}, {}};
    for (auto o : orders) {
        for (double g : cfg.numbers("gamma_tau")) {
            const multiparticle::ProtocolParams p{cfg.number("n0"), cfg.number("eta"), g, o};
            p.validate();
            for (double theta : grid) {
                const double fi = multiparticle::fisher_information(p, theta);
                const double norm = p.n0 * p.eta > 0.0 ? fi / (p.n0 * p.eta) : 0.0;
                t.add_row({detail::loss_order_name(o), g, theta, fi, norm});
            }
        }
    }
    return t;
}

inline Schema ml_experiment_schema() {
    return detail::merge(detail::model_keys(0.028), {
        {"thetas", {KeyType::number_list, false,
                    json::array({0.4, 0.7, 1.0, 1.3, 1.6, 1.9, 2.2, 2.5, 2.8}), {}, "rad"}},
        {"shots", {KeyType::integer, false, 10000, {}, "N0, total shots per angle"}},
        {"shots_per_realization", {KeyType::integer, false, 100, {}, "N"}},
        {"bootstrap", {KeyType::integer, false, 200, {}, "resamples"}},
        {"grid_points", {KeyType::integer, false, 2000, {}, "likelihood grid"}},
    });
}

inline Table cmd_ml_experiment(const RunConfig &cfg) {
    const auto p = detail::model(cfg);
    const auto n0 = cfg.integer("shots");
    const auto n = cfg.integer("shots_per_realization");
    rydmetro::detail::require(n0 > 0 && n > 0, "shot counts must be positive");
    rydmetro::detail::require(cfg.integer("bootstrap") >= 0, "bootstrap must be >= 0");
    estimation::EstimationOptions opt{static_cast<std::size_t>(cfg.integer("grid_points")),
                                      static_cast<std::size_t>(cfg.integer("bootstrap"))};
    const auto seed = static_cast<std::uint64_t>(cfg.integer("seed"));
    Table t{"rydmetro.ml-experiment.v1",
            {"theta_true", "theta_hat", "variance", "fi_per_shot", "fi_error", "bias",
             "fi_analytic", "realizations", "few_realizations"},
            {}};
    const auto grid = cfg.numbers("thetas");
    rydmetro::detail::require(!grid.empty(), "theta grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto r = estimation::run_estimation(p, grid[i], static_cast<std::size_t>(n0),
                                                  static_cast<std::size_t>(n), seed + i, opt);
        t.add_row({grid[i], r.theta_hat_mean, r.variance, r.fi_per_shot, r.fi_error, r.bias,
                   multiparticle::fisher_information(p, grid[i]),
                   static_cast<std::int64_t>(r.realizations),
                   static_cast<std::int64_t>(r.few_realizations ? 1 : 0)});
    }
    return t;
}

inline Schema sensitivity_schema() {
    return detail::merge(detail::model_keys(0.028), {
        {"rabi_frequency", {KeyType::number, false, constants::two_pi * 0.66e6, {}, "rad/s"}},
        {"dipole_moment", {KeyType::number, true, nullptr, {}, "C m"}},
        {"angle_rule", {KeyType::string, false, "fisher", {"fisher", "field"}, ""}},
        {"fi_per_shot", {KeyType::number, false, 0.0, {}, "override; 0 uses the model"}},
        {"grid_points", {KeyType::integer, false, 400, {}, "angle search grid"}},
    });
}

inline Table cmd_sensitivity(const RunConfig &cfg) {
    estimation::SensitivityConfig sc;
    sc.model = detail::model(cfg);
    sc.rabi_frequency = cfg.number("rabi_frequency");
    sc.dipole_moment = cfg.number("dipole_moment");
    sc.rule = cfg.string("angle_rule") == "field" ? estimation::AngleRule::field
                                                  : estimation::AngleRule::fisher;
    sc.fi_per_shot = cfg.number("fi_per_shot");
    rydmetro::detail::require(sc.fi_per_shot >= 0.0, "fi_per_shot must be >= 0");
    rydmetro::detail::require(cfg.integer("grid_points") >= 3, "grid_points must be >= 3");
    sc.grid_points = static_cast<std::size_t>(cfg.integer("grid_points"));
    const auto r = estimation::sensitivity_report(sc);
    Table t{"rydmetro.sensitivity.v1",
            {"theta_star", "pulse_time_T", "fi_per_shot", "delta_theta", "delta_E_V_per_cm",
             "S_V_per_cm_rtHz", "dipole_moment", "rabi_frequency", "angle_rule"},
            {}};
    t.add_row({r.theta_star, r.pulse_time_T, r.fi_per_shot, r.delta_theta, r.delta_E,
               r.sensitivity_S, r.dipole_moment, r.rabi_frequency, r.angle_rule});
    return t;
}

inline Schema dipolar_schema() {
    return {
        {"c3", {KeyType::number, false, dipolar::reference_c3_hz_um3 * 1e-18, {}, "Hz m^3"}},
        {"c3_convention", {KeyType::string, false, "angular", {"angular", "cyclic"}, ""}},
        {"cloud", {KeyType::string, false, "box", {"box", "gaussian"}, ""}},
        {"cloud_dimensions",
         {KeyType::number_list, false, json::array({80e-6, 80e-6, 4000e-6}), {}, "m"}},
        {"times", {KeyType::number_list, false, json::array({1e-7, 1e-6, 1e-5}), {}, "s"}},
        {"angular_panels", {KeyType::integer, false, 256, {}, ""}},
        {"cutoff_radius", {KeyType::number, false, 0.1, {}, "m, imaginary part only"}},
    };
}

inline Table cmd_dipolar(const RunConfig &cfg) {
    const auto dims = cfg.numbers("cloud_dimensions");
    rydmetro::detail::require(dims.size() == 3, "cloud_dimensions needs three lengths");
    dipolar::CloudGeometry cloud{
        cfg.string("cloud") == "gaussian" ? dipolar::CloudKind::gaussian : dipolar::CloudKind::box,
        {dims[0] * 1e6, dims[1] * 1e6, dims[2] * 1e6}};
    const double c3_um = cfg.number("c3") * 1e18;
    const auto chosen = cfg.string("c3_convention") == "cyclic" ? dipolar::C3Convention::cyclic
                                                                : dipolar::C3Convention::angular;
    const auto params = dipolar::DipolarParams::from_tabulated(c3_um, chosen, cloud);
    const auto angular =
        dipolar::DipolarParams::from_tabulated(c3_um, dipolar::C3Convention::angular, cloud);
    const auto cyclic =
        dipolar::DipolarParams::from_tabulated(c3_um, dipolar::C3Convention::cyclic, cloud);

    dipolar::QuadratureSpec spec;
    spec.angular_panels = static_cast<int>(cfg.integer("angular_panels"));
    spec.cutoff_radius_um = cfg.number("cutoff_radius") * 1e6;

    const auto times = cfg.numbers("times");
    rydmetro::detail::require(!times.empty(), "times is empty");
    std::vector<double> times_us;
    for (double s : times) {
        rydmetro::detail::require(std::isfinite(s) && s > 0.0, "times must be positive");
        times_us.push_back(s * 1e6);
    }
    const auto fit = dipolar::fit_volumetric_rate(times_us, params, spec);
    Table t{"rydmetro.dipolar.v1",
            {"t", "re_A", "im_A", "q_fit", "q_closed_form", "gamma", "gamma_angular",
             "gamma_cyclic"},
            {}};
    for (std::size_t i = 0; i < times.size(); ++i) {
        const auto a = dipolar::excluded_volume_integral(times_us[i], params, spec);
        t.add_row({times[i], a.value.real() * 1e-18, a.value.imag() * 1e-18, fit.slope * 1e-18,
                   dipolar::volumetric_rate_q(params) * 1e-18, dipolar::decay_rate_gamma(params),
                   dipolar::decay_rate_gamma(angular), dipolar::decay_rate_gamma(cyclic)});
    }
    return t;
}

struct Command {
    std::string name;
    std::string summary;
    std::function<Schema()> schema;
    std::function<Table(const RunConfig &)> run;
};

inline const std::vector<Command> &commands() {
    static const std::vector<Command> all{
        {"toy-fi", "two-excitation FI with and without error prevention", toy_fi_schema,
         cmd_toy_fi},
        {"decay-scan", "d-mode decay against interaction time", decay_scan_schema,
         cmd_decay_scan},
        {"super-rabi", "detected means against rotation angle", super_rabi_schema,
         cmd_super_rabi},
        {"fi-scan", "count-statistics FI against angle and decay", fi_scan_schema, cmd_fi_scan},
        {"ml-experiment", "simulated shots and maximum-likelihood estimation",
         ml_experiment_schema, cmd_ml_experiment},
        {"sensitivity", "field precision and sensitivity", sensitivity_schema, cmd_sensitivity},
        {"dipolar", "excluded volume, Q and gamma", dipolar_schema, cmd_dipolar},
    };
    return all;
}

inline const Command &find_command(const std::string &name) {
    for (const auto &c : commands()) {
        if (c.name == name) {
            return c;
        }
    }
    throw ValidationError("unknown subcommand '" + name + "'");
}

/// Validates `config` against the command's schema and runs it.
inline Table run_command(const std::string &name, const json &config) {
    const Command &cmd = find_command(name);
    const RunConfig cfg(name, config.is_null() ? json::object() : config, cmd.schema());
    return cmd.run(cfg);
}

} // namespace rydmetro::cli
