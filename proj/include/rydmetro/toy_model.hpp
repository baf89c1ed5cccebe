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

// Two-excitation error-prevention protocol: a |2,0> probe is rotated, the
// |1,1> component is optionally dumped to vacuum, and both modes are read
// out with efficiency eta.

#include <array>
#include <cmath>
#include <vector>

#include "rydmetro/constants.hpp"
#include "rydmetro/errors.hpp"
#include "rydmetro/fockspace.hpp"

namespace rydmetro::toy {

/// Outcome order used by every toy-model distribution.
inline constexpr std::array<Occupation, 6> outcome_labels{
    Occupation{2, 0}, Occupation{0, 2}, Occupation{1, 1},
    Occupation{0, 0}, Occupation{1, 0}, Occupation{0, 1}};

inline FockBasis toy_basis() { return FockBasis(2); }

namespace detail {

inline void require_eta(double eta, bool allow_zero) {
    rydmetro::detail::require(std::isfinite(eta) && eta <= 1.0 &&
                                  (allow_zero ? eta >= 0.0 : eta > 0.0),
                              allow_zero ? "eta must lie in [0, 1]"
                                         : "eta must lie in (0, 1]");
}

inline PovmSet reorder(const PovmSet &povm) {
    std::vector<PovmElement> ordered;
    ordered.reserve(outcome_labels.size());
    for (const Occupation &o : outcome_labels) {
        ordered.push_back({o, povm.element(o)});
    }
    return {povm.basis(), std::move(ordered)};
}

} // namespace detail

/**
 * Lossy photon-number readout on the n_max = 2 space: the exact number
 * measurement seen through independent per-excitation loss. On the
 * two-excitation sector this gives eta^2 on the surviving pair,
 * 2 eta(1-eta) or eta(1-eta) on single survivors and (1-eta)^2 on vacuum.
 */
inline PovmSet lossy_povm(double eta) {
    detail::require_eta(eta, true);
    const FockBasis b = toy_basis();
    return detail::reorder(pull_back(number_povm(b), detection_loss_channel(b, eta)));
}

/// K0 = |0,0><1,1|, K1 = 1 - |1,1><1,1|.
inline KrausChannel error_prevention_channel() {
    const FockBasis b = toy_basis();
    const auto dim = static_cast<Eigen::Index>(b.dimension());
    const auto i11 = static_cast<Eigen::Index>(b.index({1, 1}));
    const auto i00 = static_cast<Eigen::Index>(b.index({0, 0}));
    CMatrix k0 = CMatrix::Zero(dim, dim);
    k0(i00, i11) = 1.0;
    CMatrix k1 = CMatrix::Identity(dim, dim);
    k1(i11, i11) = 0.0;
    return {b, {std::move(k0), std::move(k1)}};
}

inline TwoModeFockState rotated_state(double theta) {
    return rotate(TwoModeFockState::number_state(toy_basis(), {2, 0}), theta);
}

/// Detection-side state, with or without the prevention step.
inline DensityOperator prepared_state(double theta, bool prevention) {
    DensityOperator rho(rotated_state(theta));
    if (prevention) {
        rho = apply_channel(rho, error_prevention_channel());
    }
    return rho;
}

inline OutcomeDistribution outcome_distribution(double eta, double theta, bool prevention) {
    return measure(prepared_state(theta, prevention), lossy_povm(eta));
}

struct ToyFisher {
    double value = 0.0;
    /// Set when some outcome probabilities vanish at theta; value is then
    /// the limit including their (p')^2/p contribution.
    bool degenerate = false;
    double step_relative_change = 0.0;
};

namespace detail {

template <class Family>
ToyFisher evaluate(Family &&family, double theta, const FiniteDifference &fd) {
    const FisherInformation fi = classical_fi(family, theta, fd);
    ToyFisher out;
    out.degenerate = fi.skipped_outcomes > 0;
    out.value = out.degenerate ? fi.with_limit() : fi.value;
    out.step_relative_change = fi.step_relative_change;
    return out;
}

} // namespace detail

inline ToyFisher fi_without_prevention(double eta, double theta,
                                       const FiniteDifference &fd = {}) {
    detail::require_eta(eta, false);
    rydmetro::detail::require(std::isfinite(theta), "theta must be finite");
    const PovmSet povm = lossy_povm(eta);
    return detail::evaluate(
        [&](double t) { return measure(prepared_state(t, false), povm); }, theta, fd);
}

inline ToyFisher fi_with_prevention(double eta, double theta,
                                    const FiniteDifference &fd = {}) {
    detail::require_eta(eta, false);
    rydmetro::detail::require(std::isfinite(theta), "theta must be finite");
    const PovmSet povm = lossy_povm(eta);
    return detail::evaluate(
        [&](double t) { return measure(prepared_state(t, true), povm); }, theta, fd);
}

/// Prevention applied after the loss, then an ideal number readout.
inline ToyFisher fi_prevention_after_loss(double eta, double theta,
                                          const FiniteDifference &fd = {}) {
    detail::require_eta(eta, false);
    const FockBasis b = toy_basis();
    const KrausChannel loss = detection_loss_channel(b, eta);
    const KrausChannel lambda = error_prevention_channel();
    const PovmSet povm = number_povm(b);
    return detail::evaluate(
        [&](double t) {
            return measure(apply_channel(apply_channel(DensityOperator(rotated_state(t)), loss),
                                         lambda),
                           povm);
        },
        theta, fd);
}

/// Upper bound eta(2-eta) F_Q with F_Q = 2 for the rotated |2,0> probe.
inline double qfi_bound(double eta) { return 2.0 * eta * (2.0 - eta); }

struct ToyConfig {
    double eta = 0.02;
    std::vector<double> theta_grid;

    void validate() const {
        detail::require_eta(eta, false);
        rydmetro::detail::require(!theta_grid.empty(), "theta grid is empty");
        for (std::size_t i = 0; i < theta_grid.size(); ++i) {
            rydmetro::detail::require(std::isfinite(theta_grid[i]), "theta must be finite");
            if (i > 0) {
                rydmetro::detail::require(theta_grid[i] > theta_grid[i - 1],
                                          "theta grid must be strictly increasing");
            }
        }
    }
};

struct ToyFiCurve {
    double theta = 0.0;
    double fi_without = 0.0;
    double fi_with = 0.0;
    double qfi_bound = 0.0;
    bool degenerate = false;
};

inline std::vector<ToyFiCurve> enhancement_curve(const ToyConfig &config) {
    config.validate();
    std::vector<ToyFiCurve> rows;
    rows.reserve(config.theta_grid.size());
    for (double theta : config.theta_grid) {
        const ToyFisher without = fi_without_prevention(config.eta, theta);
        const ToyFisher with = fi_with_prevention(config.eta, theta);
        rows.push_back({theta, std::max(without.value, 0.0), std::max(with.value, 0.0),
                        qfi_bound(config.eta), without.degenerate});
    }
    return rows;
}

/// fi_with(pi/2) / fi_without(pi/2); tends to 2 - eta.
inline double enhancement_ratio(double eta) {
    const double half_pi = 0.5 * constants::pi;
    return fi_with_prevention(eta, half_pi).value / fi_without_prevention(eta, half_pi).value;
}

struct DetectedMeans {
    double theta = 0.0;
    double nd_with = 0.0;
    double np_with = 0.0;
    double nd_without = 0.0;
    double np_without = 0.0;
};

/// Expected detected excitation numbers in each mode.
inline std::vector<DetectedMeans> expectation_curves(double eta,
                                                     const std::vector<double> &theta_grid) {
    ToyConfig{eta, theta_grid}.validate();
    const FockBasis b = toy_basis();
    const KrausChannel loss = detection_loss_channel(b, eta);
    const CMatrix nd = mode_operator(b, Mode::d, LadderKind::number);
    const CMatrix np = mode_operator(b, Mode::p, LadderKind::number);
    std::vector<DetectedMeans> out;
    out.reserve(theta_grid.size());
    for (double theta : theta_grid) {
        const DensityOperator with = apply_channel(prepared_state(theta, true), loss);
        const DensityOperator without = apply_channel(prepared_state(theta, false), loss);
        out.push_back({theta, with.expectation(nd), with.expectation(np),
                       without.expectation(nd), without.expectation(np)});
    }
    return out;
}

} // namespace rydmetro::toy
