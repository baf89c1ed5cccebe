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

// Shot-level simulation of the counting experiment, maximum-likelihood
// angle estimation with bootstrap error bars, and conversion of angle
// precision to microwave-field precision.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "rydmetro/constants.hpp"
#include "rydmetro/errors.hpp"
#include "rydmetro/multiparticle.hpp"
#include "rydmetro/random.hpp"

namespace rydmetro::estimation {

using multiparticle::ProtocolParams;

struct ShotBatch {
    std::vector<int> counts;
    double theta_true = 0.0;
    ProtocolParams params;
    std::uint64_t seed = 0;
};

namespace detail {

using rydmetro::detail::require;

inline std::vector<double> cumulative(const std::vector<double> &p) {
    std::vector<double> c(p.size());
    std::partial_sum(p.begin(), p.end(), c.begin());
    return c;
}

inline int draw(const std::vector<double> &cdf, Rng &rng) {
    std::uniform_real_distribution<double> u(0.0, cdf.back());
    const double x = u(rng);
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(),
                                                     static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

} // namespace detail

/// Inverse-CDF draws from the detected-count distribution. `stream`
/// selects an independent generator derived from `seed`.
inline ShotBatch sample_shots(const ProtocolParams &params, double theta, std::size_t n_shots,
                              std::uint64_t seed, std::uint64_t stream = 0) {
    detail::require(n_shots >= 1, "sample_shots: n_shots must be >= 1");
    const auto cdf = detail::cumulative(multiparticle::count_distribution(params, theta).probabilities);
    Rng rng = make_stream(seed, stream, StreamTag::shots);
    ShotBatch batch{{}, theta, params, seed};
    batch.counts.reserve(n_shots);
    for (std::size_t i = 0; i < n_shots; ++i) {
        batch.counts.push_back(detail::draw(cdf, rng));
    }
    return batch;
}

/// Strictly interior grid pi i / (points + 1), i = 1..points.
inline std::vector<double> theta_grid(std::size_t points = 2000, double upper = constants::pi) {
    detail::require(points >= 3, "theta_grid: need at least 3 points");
    detail::require(upper > 0.0, "theta_grid: upper bound must be positive");
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i) {
        g[i] = upper * static_cast<double>(i + 1) / static_cast<double>(points + 1);
    }
    return g;
}

/// log P_theta(n) on a theta grid, extended on demand to larger counts.
class LikelihoodTable {
  public:
    LikelihoodTable(const ProtocolParams &params, std::vector<double> grid)
        : params_(params), grid_(std::move(grid)) {
        detail::require(grid_.size() >= 3, "LikelihoodTable: grid needs at least 3 points");
        for (std::size_t i = 1; i < grid_.size(); ++i) {
            detail::require(grid_[i] > grid_[i - 1], "LikelihoodTable: grid must increase");
        }
        rows_.reserve(grid_.size());
        for (double t : grid_) {
            const auto dist = multiparticle::count_distribution(params_, t);
            std::vector<double> row(dist.probabilities.size());
            std::transform(dist.probabilities.begin(), dist.probabilities.end(), row.begin(),
                           [](double p) { return std::log(p); });
            rows_.push_back(std::move(row));
        }
    }

    [[nodiscard]] const std::vector<double> &grid() const noexcept { return grid_; }
    [[nodiscard]] const ProtocolParams &params() const noexcept { return params_; }

    /// Makes sure every count up to n has a column.
    void extend(int n) {
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            auto &row = rows_[i];
            while (static_cast<int>(row.size()) <= n) {
                row.push_back(std::log(multiparticle::count_probability(
                    params_, grid_[i], static_cast<int>(row.size()))));
            }
        }
    }

    /// sum_n hist[n] log P_theta_i(n); extend() must cover hist.
    [[nodiscard]] double log_likelihood(std::size_t i, const std::vector<std::size_t> &hist) const {
        double ll = 0.0;
        const auto &row = rows_[i];
        for (std::size_t n = 0; n < hist.size(); ++n) {
            if (hist[n] != 0) {
                ll += static_cast<double>(hist[n]) * row[n];
            }
        }
        return ll;
    }

  private:
    ProtocolParams params_;
    std::vector<double> grid_;
    std::vector<std::vector<double>> rows_;
};

namespace detail {

inline std::vector<std::size_t> histogram(const std::vector<int> &counts) {
    std::vector<std::size_t> h;
    for (int n : counts) {
        require(n >= 0, "counts must be nonnegative");
        if (h.size() <= static_cast<std::size_t>(n)) {
            h.resize(static_cast<std::size_t>(n) + 1, 0);
        }
        ++h[static_cast<std::size_t>(n)];
    }
    return h;
}

/// Argmax over the grid (first of equal maxima) with a parabolic step
/// through the neighbours, clamped to one grid spacing.
inline double refined_argmax(const std::vector<double> &grid, const std::vector<double> &values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) {
            best = i;
        }
    }
    require(std::isfinite(values[best]),
            "ml_estimate: counts are impossible at every grid angle");
    if (best == 0 || best + 1 == values.size()) {
        return grid[best];
    }
    const double y0 = values[best - 1], y1 = values[best], y2 = values[best + 1];
    const double curvature = y0 - 2.0 * y1 + y2;
    if (!(curvature < 0.0) || !std::isfinite(y0) || !std::isfinite(y2)) {
        return grid[best];
    }
    const double shift = std::clamp(0.5 * (y0 - y2) / curvature, -1.0, 1.0);
    const double step = shift < 0 ? grid[best] - grid[best - 1] : grid[best + 1] - grid[best];
    return grid[best] + shift * step;
}

} // namespace detail

/// Maximum-likelihood angle for a set of counts.
inline double ml_estimate(const std::vector<int> &counts, LikelihoodTable &table) {
    detail::require(!counts.empty(), "ml_estimate: no counts");
    const auto hist = detail::histogram(counts);
    table.extend(static_cast<int>(hist.size()) - 1);
    std::vector<double> ll(table.grid().size());
    for (std::size_t i = 0; i < ll.size(); ++i) {
        ll[i] = table.log_likelihood(i, hist);
    }
    return detail::refined_argmax(table.grid(), ll);
}

inline double ml_estimate(const std::vector<int> &counts, const ProtocolParams &params,
                          const std::vector<double> &grid = theta_grid()) {
    LikelihoodTable table(params, grid);
    return ml_estimate(counts, table);
}

struct EstimationOptions {
    std::size_t grid_points = 2000;
    std::size_t bootstrap_resamples = 200;
};

struct EstimationResult {
    double theta_true = 0.0;
    double theta_hat_mean = 0.0;
    double variance = 0.0;
    double fi_per_shot = 0.0;
    double fi_error = 0.0;
    double bias = 0.0;
    std::size_t shots_per_realization = 0; ///< N
    std::size_t realizations = 0;          ///< k
    bool few_realizations = false;         ///< k < 10: variance unreliable
    std::vector<double> estimates;

    bool operator==(const EstimationResult &) const = default;
};

namespace detail {

struct Spread {
    double mean;
    double variance;
};

inline Spread spread(const std::vector<double> &x) {
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : x) {
        ss += (v - mean) * (v - mean);
    }
    return {mean, ss / (n - 1.0)};
}

inline double fi_from_variance(double variance, std::size_t n) {
    return variance > 0.0 ? 1.0 / (static_cast<double>(n) * variance)
                          : std::numeric_limits<double>::infinity();
}

} // namespace detail

/**
 * Simulates N0 shots at theta_true, splits them into k = N0/N realizations,
 * and estimates the angle in each. FI per shot is 1/(N var). The bootstrap
 * reshuffles which shots form each realization.
 */
inline EstimationResult run_estimation(const ProtocolParams &params, double theta_true,
                                       std::size_t n0_shots, std::size_t n_per_realization,
                                       std::uint64_t seed, const EstimationOptions &opt = {}) {
    params.validate();
    detail::require(n_per_realization >= 1, "run_estimation: N must be >= 1");
    detail::require(n0_shots % n_per_realization == 0, "run_estimation: N must divide N0");
    const std::size_t k = n0_shots / n_per_realization;
    detail::require(k >= 2, "run_estimation: need at least 2 realizations");

    LikelihoodTable table(params, theta_grid(opt.grid_points));
    std::vector<int> shots;
    shots.reserve(n0_shots);
    for (std::size_t r = 0; r < k; ++r) {
        const auto batch = sample_shots(params, theta_true, n_per_realization, seed, r);
        shots.insert(shots.end(), batch.counts.begin(), batch.counts.end());
    }

    auto estimate_all = [&](const std::vector<int> &pool) {
        std::vector<double> est(k);
        std::vector<int> slice(n_per_realization);
        for (std::size_t r = 0; r < k; ++r) {
            std::copy_n(pool.begin() + static_cast<std::ptrdiff_t>(r * n_per_realization),
                        n_per_realization, slice.begin());
            est[r] = ml_estimate(slice, table);
        }
        return est;
    };

    EstimationResult res;
    res.theta_true = theta_true;
    res.shots_per_realization = n_per_realization;
    res.realizations = k;
    res.few_realizations = k < 10;
    res.estimates = estimate_all(shots);
    const auto s = detail::spread(res.estimates);
    res.theta_hat_mean = s.mean;
    res.variance = s.variance;
    res.bias = s.mean - theta_true;
    res.fi_per_shot = detail::fi_from_variance(s.variance, n_per_realization);

    std::vector<double> boot;
    boot.reserve(opt.bootstrap_resamples);
    std::vector<int> pool = shots;
    for (std::size_t b = 0; b < opt.bootstrap_resamples; ++b) {
        pool = shots;
        Rng rng = make_stream(seed, b, StreamTag::bootstrap);
        std::shuffle(pool.begin(), pool.end(), rng);
        const double f =
            detail::fi_from_variance(detail::spread(estimate_all(pool)).variance, n_per_realization);
        if (std::isfinite(f)) {
            boot.push_back(f);
        }
    }
    if (boot.size() >= 2) {
        res.fi_error = std::sqrt(detail::spread(boot).variance);
    }
    return res;
}

/// Field precision and sensitivity for one pulse.
struct SensitivityReport {
    double delta_theta = 0.0;    ///< rad, per shot
    double pulse_time_T = 0.0;   ///< s
    double delta_E = 0.0;        ///< V/cm
    double sensitivity_S = 0.0;  ///< V cm^-1 Hz^-1/2
    double dipole_moment = 0.0;  ///< C m
    double rabi_frequency = 0.0; ///< rad/s, zero when not known
    double theta_star = 0.0;     ///< rad, zero when not chosen by a pipeline
    double fi_per_shot = 0.0;    ///< 1/rad^2, zero when not known
    std::string angle_rule;
};

/// Omega = d E / hbar for E in V/m.
inline double rabi_from_field(double field_v_per_m, double dipole_moment) {
    return dipole_moment * field_v_per_m / constants::hbar;
}

/// Field amplitude in V/m that rotates by theta in time T.
inline double field_from_angle(double theta, double pulse_time, double dipole_moment) {
    detail::require(pulse_time > 0.0 && dipole_moment > 0.0,
                    "field_from_angle: T and d must be positive");
    return theta / pulse_time * constants::hbar / dipole_moment;
}

/// Delta E = sqrt(var theta) / T * hbar / d, reported in V/cm; S = Delta E sqrt(T).
inline SensitivityReport field_precision(double delta2_theta, double pulse_time,
                                         double dipole_moment, double rabi_frequency = 0.0) {
    detail::require(std::isfinite(delta2_theta) && delta2_theta > 0.0,
                    "field_precision: angle variance must be positive");
    detail::require(std::isfinite(pulse_time) && pulse_time > 0.0,
                    "field_precision: pulse time must be positive");
    detail::require(std::isfinite(dipole_moment) && dipole_moment > 0.0,
                    "field_precision: dipole moment must be positive");
    SensitivityReport r;
    r.delta_theta = std::sqrt(delta2_theta);
    r.pulse_time_T = pulse_time;
    r.delta_E = field_from_angle(r.delta_theta, pulse_time, dipole_moment) / 100.0;
    r.sensitivity_S = r.delta_E * std::sqrt(pulse_time);
    r.dipole_moment = dipole_moment;
    r.rabi_frequency = rabi_frequency;
    return r;
}

enum class AngleRule {
    fisher, ///< argmax of the per-shot FI
    field   ///< argmax of theta^2 F, i.e. smallest field error at fixed Omega
};

inline std::string to_string(AngleRule r) { return r == AngleRule::fisher ? "fisher" : "field"; }

struct SensitivityConfig {
    ProtocolParams model;
    double rabi_frequency = 0.0; ///< rad/s
    double dipole_moment = 0.0;  ///< C m
    AngleRule rule = AngleRule::fisher;
    std::size_t grid_points = 400;
    double fi_per_shot = 0.0; ///< use this F instead of the model value when > 0
};

/// Picks theta*, sets T = theta*/Omega and Delta theta = 1/sqrt(F).
inline SensitivityReport sensitivity_report(const SensitivityConfig &cfg) {
    cfg.model.validate();
    detail::require(std::isfinite(cfg.rabi_frequency) && cfg.rabi_frequency > 0.0,
                    "sensitivity: rabi_frequency must be positive");
    detail::require(std::isfinite(cfg.dipole_moment) && cfg.dipole_moment > 0.0,
                    "sensitivity: dipole_moment must be positive");
    const auto grid = theta_grid(cfg.grid_points);
    std::vector<double> score(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double f = multiparticle::fisher_information(cfg.model, grid[i]);
        score[i] = cfg.rule == AngleRule::fisher ? f : grid[i] * grid[i] * f;
    }
    const double theta_star = detail::refined_argmax(grid, score);
    const double model_fi = multiparticle::fisher_information(cfg.model, theta_star);
    const double fi = cfg.fi_per_shot > 0.0 ? cfg.fi_per_shot : model_fi;
    detail::require(fi > 0.0, "sensitivity: Fisher information vanishes at the chosen angle");
    SensitivityReport r = field_precision(1.0 / fi, theta_star / cfg.rabi_frequency,
                                          cfg.dipole_moment, cfg.rabi_frequency);
    r.theta_star = theta_star;
    r.fi_per_shot = fi;
    r.angle_rule = to_string(cfg.rule);
    return r;
}

/// Transition dipole 1950 e a0 of the d-p pair, in C m.
inline double reference_dipole_moment() { return constants::dipole_from_atomic_units(1950.0); }

} // namespace rydmetro::estimation
