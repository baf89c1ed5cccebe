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

// Photon-count statistics of a bi-coherent two-mode state under mutual
// interaction-induced decay, with detection loss applied before or after
// the interaction.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "rydmetro/errors.hpp"
#include "rydmetro/fockspace.hpp"

namespace rydmetro::multiparticle {

enum class LossOrder { after_interaction, before_interaction };

struct ProtocolParams {
    double n0 = 0.0;        ///< mean intrinsic excitation number
    double eta = 1.0;       ///< detection efficiency
    double gamma_tau = 0.0; ///< decay-time product
    LossOrder loss_order = LossOrder::after_interaction;
    int n_trunc = 0;        ///< control-number cutoff; 0 picks it from the tail

    void validate() const {
        rydmetro::detail::require(std::isfinite(n0) && n0 >= 0.0, "n0 must be >= 0");
        rydmetro::detail::require(std::isfinite(eta) && eta >= 0.0 && eta <= 1.0,
                                  "eta must lie in [0, 1]");
        rydmetro::detail::require(std::isfinite(gamma_tau) && gamma_tau >= 0.0,
                                  "gamma_tau must be >= 0");
        rydmetro::detail::require(n_trunc >= 0, "n_trunc must be >= 0");
    }
};

struct CountDistribution {
    std::vector<double> probabilities; ///< index = detected count
    double theta = 0.0;
    int control_cutoff = 0;
    double tail_mass = 0.0; ///< neglected control-number mass

    [[nodiscard]] double mean() const {
        double m = 0.0;
        for (std::size_t n = 0; n < probabilities.size(); ++n) {
            m += static_cast<double>(n) * probabilities[n];
        }
        return m;
    }
    [[nodiscard]] double total() const {
        double s = 0.0;
        for (double p : probabilities) {
            s += p;
        }
        return s;
    }
};

namespace detail {

using rydmetro::detail::require;

inline constexpr int max_cutoff = 200;
inline constexpr double cutoff_tail = 1e-12;
inline constexpr double max_tail = 1e-10;

inline double poisson_pmf(int n, double mu) {
    if (mu == 0.0) {
        return n == 0 ? 1.0 : 0.0;
    }
    return std::exp(n * std::log(mu) - mu - std::lgamma(n + 1.0));
}

/// P(X > n) for X ~ Poisson(mu).
inline double poisson_tail(int n, double mu) {
    return mu == 0.0 ? 0.0 : boost::math::gamma_p(n + 1.0, mu);
}

/// Smallest n with P(X > n) below the cutoff tail, at most max_cutoff.
inline int poisson_cutoff(double mu) {
    int n = 0;
    while (n < max_cutoff && poisson_tail(n, mu) >= cutoff_tail) {
        ++n;
    }
    return n;
}

/// Mean of the mode driving the decay (B) and the undecayed detected mean
/// of the read-out mode (D). `scale_*` are the theta-free prefactors.
struct Means {
    double control;
    double readout;
    double scale_control;
    double scale_readout;
};

inline Means protocol_means(const ProtocolParams &p, double theta, Mode readout) {
    const double c2 = std::pow(std::cos(0.5 * theta), 2);
    const double s2 = std::pow(std::sin(0.5 * theta), 2);
    const double control_share = readout == Mode::d ? s2 : c2;
    const double readout_share = readout == Mode::d ? c2 : s2;
    const double scale_control =
        p.loss_order == LossOrder::after_interaction ? p.n0 : p.eta * p.n0;
    const double scale_readout = p.eta * p.n0;
    return {scale_control * control_share, scale_readout * readout_share, scale_control,
            scale_readout};
}

} // namespace detail

/// Detected means in modes d and p; the decay exponent uses the control
/// mean seen by the interaction, so it depends on the loss order.
inline std::pair<double, double> super_rabi_means(const ProtocolParams &params, double theta) {
    params.validate();
    const double damping = -std::expm1(-params.gamma_tau);
    const auto d = detail::protocol_means(params, theta, Mode::d);
    const auto p = detail::protocol_means(params, theta, Mode::p);
    return {d.readout * std::exp(-d.control * damping), p.readout * std::exp(-p.control * damping)};
}

/// Small-gamma_tau form with exp(-B gamma_tau) in place of exp(-B(1 - e^{-gamma_tau})).
inline std::pair<double, double> super_rabi_means_approx(const ProtocolParams &params,
                                                         double theta) {
    params.validate();
    const auto d = detail::protocol_means(params, theta, Mode::d);
    const auto p = detail::protocol_means(params, theta, Mode::p);
    return {d.readout * std::exp(-d.control * params.gamma_tau),
            p.readout * std::exp(-p.control * params.gamma_tau)};
}

/**
 * P(n) = sum_k Poisson(k; B) Poisson(n; D e^{-gamma_tau k}) for the chosen
 * read-out mode. Cutoffs depend on the parameters only, never on theta, so
 * distributions at neighbouring angles share their support.
 */
inline CountDistribution count_distribution(const ProtocolParams &params, double theta,
                                            Mode readout = Mode::d) {
    params.validate();
    rydmetro::detail::require(std::isfinite(theta), "theta must be finite");
    const auto m = detail::protocol_means(params, theta, readout);

    const int k_max =
        params.n_trunc > 0 ? params.n_trunc : detail::poisson_cutoff(m.scale_control);
    const double tail = detail::poisson_tail(k_max, m.control);
    if (tail > detail::max_tail) {
        throw ConvergenceError("count_distribution: control-number cutoff too small", tail);
    }
    const int n_max = detail::poisson_cutoff(m.scale_readout);
    if (detail::poisson_tail(n_max, m.scale_readout) > detail::max_tail) {
        throw ConvergenceError("count_distribution: detected-count cutoff too small",
                               detail::poisson_tail(n_max, m.scale_readout));
    }

    CountDistribution out;
    out.theta = theta;
    out.control_cutoff = k_max;
    out.tail_mass = tail;
    out.probabilities.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (int k = 0; k <= k_max; ++k) {
        const double weight = detail::poisson_pmf(k, m.control);
        if (weight == 0.0) {
            continue;
        }
        const double mu = m.readout * std::exp(-params.gamma_tau * k);
        for (int n = 0; n <= n_max; ++n) {
            out.probabilities[static_cast<std::size_t>(n)] += weight * detail::poisson_pmf(n, mu);
        }
    }
    return out;
}

/// Single entry P(n) of count_distribution, for counts beyond its support.
inline double count_probability(const ProtocolParams &params, double theta, int n,
                                Mode readout = Mode::d) {
    params.validate();
    rydmetro::detail::require(n >= 0, "count_probability: n must be >= 0");
    const auto m = detail::protocol_means(params, theta, readout);
    const int k_max =
        params.n_trunc > 0 ? params.n_trunc : detail::poisson_cutoff(m.scale_control);
    double p = 0.0;
    for (int k = 0; k <= k_max; ++k) {
        p += detail::poisson_pmf(k, m.control) *
             detail::poisson_pmf(n, m.readout * std::exp(-params.gamma_tau * k));
    }
    return p;
}

/// Exact mean of count_distribution: D exp(-B (1 - e^{-gamma_tau})).
inline double analytic_mean(const ProtocolParams &params, double theta, Mode readout = Mode::d) {
    const auto means = super_rabi_means(params, theta);
    return readout == Mode::d ? means.first : means.second;
}

namespace detail {

inline double binomial_coefficient(int n, int k) {
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

} // namespace detail

/**
 * Interaction channel on a truncated two-mode space.
 *
 * Symmetric: K_{k,m}|n_d, n_p> = c |n_d - m, n_p - k>, where each control
 * excitation in one mode removes each excitation of the other with
 * probability 1 - e^{-gamma_tau}, counted against the initial occupations.
 * Asymmetric: only mode d is damped, conditioned on n_p.
 */
inline KrausChannel interaction_channel_kraus(const FockBasis &basis, double gamma_tau,
                                              bool symmetric) {
    rydmetro::detail::require(std::isfinite(gamma_tau) && gamma_tau >= 0.0,
                              "gamma_tau must be >= 0");
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    const int n_max = basis.n_max();
    std::vector<CMatrix> ops;

    auto loss_weight = [&](int count, int other, int lost) {
        // C(count, lost) (1 - e^{-g other})^lost e^{-g other (count - lost)}
        const double x = gamma_tau * other;
        const double q = -std::expm1(-x);
        if (lost == 0) {
            return std::exp(-x * count);
        }
        if (q == 0.0) {
            return 0.0;
        }
        return detail::binomial_coefficient(count, lost) * std::pow(q, lost) *
               std::exp(-x * (count - lost));
    };

    if (symmetric) {
        for (int k = 0; k <= n_max; ++k) {
            for (int m = 0; k + m <= n_max; ++m) {
                CMatrix op = CMatrix::Zero(dim, dim);
                bool any = false;
                for (const Occupation &o : basis.occupations()) {
                    if (o.n_p < k || o.n_d < m) {
                        continue;
                    }
                    const double w = loss_weight(o.n_p, o.n_d, k) * loss_weight(o.n_d, o.n_p, m);
                    if (w == 0.0) {
                        continue;
                    }
                    const auto from = static_cast<Eigen::Index>(basis.index(o));
                    const auto to = static_cast<Eigen::Index>(basis.index({o.n_d - m, o.n_p - k}));
                    op(to, from) = std::sqrt(w);
                    any = true;
                }
                if (any) {
                    ops.push_back(std::move(op));
                }
            }
        }
    } else {
        for (int l = 0; l <= n_max; ++l) {
            CMatrix op = CMatrix::Zero(dim, dim);
            bool any = false;
            for (const Occupation &o : basis.occupations()) {
                if (o.n_d < l) {
                    continue;
                }
                const double w = loss_weight(o.n_d, o.n_p, l);
                if (w == 0.0) {
                    continue;
                }
                const auto from = static_cast<Eigen::Index>(basis.index(o));
                const auto to = static_cast<Eigen::Index>(basis.index({o.n_d - l, o.n_p}));
                op(to, from) = std::sqrt(w);
                any = true;
            }
            if (any) {
                ops.push_back(std::move(op));
            }
        }
    }
    KrausChannel channel(basis, std::move(ops), false);
    if (channel.completeness_defect() > 1e-6) {
        throw ConvergenceError("interaction_channel_kraus: basis too small, probability leaks",
                               channel.completeness_defect());
    }
    return {basis, channel.operators()};
}

/// Classical FI of the detected-count distribution in mode d.
inline FisherInformation fisher_information_detail(const ProtocolParams &params, double theta,
                                                   const FiniteDifference &fd = {}) {
    params.validate();
    return classical_fi([&](double t) { return count_distribution(params, t); }, theta, fd);
}

/// FI per shot; at degenerate angles the limit of the vanishing outcomes is included.
inline double fisher_information(const ProtocolParams &params, double theta,
                                 const FiniteDifference &fd = {}) {
    return std::max(0.0, fisher_information_detail(params, theta, fd).with_limit());
}

/// FI per mean detected excitation, F / (n0 eta).
inline double normalized_fi(const ProtocolParams &params, double theta,
                            const FiniteDifference &fd = {}) {
    params.validate();
    rydmetro::detail::require(params.n0 * params.eta > 0.0,
                              "normalized_fi: n0 * eta must be positive");
    return fisher_information(params, theta, fd) / (params.n0 * params.eta);
}

struct FiPeak {
    double theta = 0.0;
    double value = 0.0;
};

/// Grid maximum of normalized_fi on (0, pi) refined by a parabola through
/// the best grid point and its neighbours.
inline FiPeak max_normalized_fi(const ProtocolParams &params, int grid_points = 181) {
    rydmetro::detail::require(grid_points >= 3, "max_normalized_fi: need at least 3 points");
    const double pi = 3.14159265358979323846;
    std::vector<double> grid, values;
    for (int i = 1; i <= grid_points; ++i) {
        grid.push_back(pi * i / (grid_points + 1));
        values.push_back(normalized_fi(params, grid.back()));
    }
    const auto best = static_cast<std::size_t>(
        std::max_element(values.begin(), values.end()) - values.begin());
    FiPeak peak{grid[best], values[best]};
    if (best > 0 && best + 1 < grid.size()) {
        const double y0 = values[best - 1], y1 = values[best], y2 = values[best + 1];
        const double denom = y0 - 2 * y1 + y2;
        if (denom < 0.0) {
            const double h = grid[1] - grid[0];
            const double shift = 0.5 * (y0 - y2) / denom;
            const double t = grid[best] + shift * h;
            const double v = normalized_fi(params, t);
            if (v > peak.value) {
                peak = {t, v};
            }
        }
    }
    return peak;
}

struct DecayFit {
    double rate = 0.0;      ///< per unit of the abscissa
    double amplitude = 0.0; ///< value at zero
    double rms_log_residual = 0.0;
};

/// Least-squares fit of log(y) = log(a) - rate x. Values must be positive.
inline DecayFit fit_exponential(const std::vector<double> &x, const std::vector<double> &y) {
    rydmetro::detail::require(x.size() == y.size() && x.size() >= 2,
                              "fit_exponential: need matching inputs with at least 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        rydmetro::detail::require(y[i] > 0.0, "fit_exponential: values must be positive");
        const double ly = std::log(y[i]);
        sx += x[i];
        sy += ly;
        sxx += x[i] * x[i];
        sxy += x[i] * ly;
    }
    const double denom = n * sxx - sx * sx;
    rydmetro::detail::require(denom > 0.0, "fit_exponential: abscissae must differ");
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    double res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = std::log(y[i]) - intercept - slope * x[i];
        res += r * r;
    }
    return {-slope, std::exp(intercept), std::sqrt(res / n)};
}

} // namespace rydmetro::multiparticle
