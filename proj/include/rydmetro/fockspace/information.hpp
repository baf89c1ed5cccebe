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
/**
 * @file information.hpp
 * Classical and quantum Fisher information of one-parameter families,
 * with derivatives taken by central finite differences.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <type_traits>
#include <vector>

#include <Eigen/Eigenvalues>

#include "rydmetro/fockspace/measurement.hpp"

namespace rydmetro {

struct FiniteDifference {
    double step = 1e-5;            ///< radians, must lie in [1e-6, 1e-3]
    double skip_threshold = 1e-15; ///< outcomes below this are skipped
    bool step_check = true;        ///< also evaluate at step/2
};

struct FisherInformation {
    double value = 0.0;
    std::size_t skipped_outcomes = 0;
    /// Estimated (p')^2/p contribution of the skipped outcomes, from the
    /// one-sided slope of sqrt(p). Finite when p vanishes quadratically.
    double skipped_limit = 0.0;
    /// |F(step) - F(step/2)| / F(step); zero when the check is disabled.
    double step_relative_change = 0.0;

    [[nodiscard]] bool step_consistent(double tol = 1e-4) const {
        return step_relative_change < tol;
    }
    /// value + skipped_limit: the limit value at degenerate points.
    [[nodiscard]] double with_limit() const { return value + skipped_limit; }
};

namespace detail {

inline const std::vector<double> &probabilities_of(const std::vector<double> &p) {
    return p;
}
inline const std::vector<double> &probabilities_of(const OutcomeDistribution &d) {
    return d.probabilities;
}
template <class T>
    requires requires(const T &t) { t.probabilities; }
const std::vector<double> &probabilities_of(const T &t) {
    return t.probabilities;
}

inline double checked_probability(const std::vector<double> &p, std::size_t i) {
    const double v = i < p.size() ? p[i] : 0.0;
    detail::require(v >= -1e-12 && std::isfinite(v),
                    "classical_fi: negative or non-finite probability");
    return std::max(v, 0.0);
}

inline void check_step(double step) {
    detail::require(step >= 1e-6 && step <= 1e-3,
                    "finite-difference step must lie in [1e-6, 1e-3] rad");
}

struct FiPass {
    double value = 0.0;
    std::size_t skipped = 0;
    double skipped_limit = 0.0;
};

inline FiPass fi_pass(const std::vector<double> &p0, const std::vector<double> &pp,
                      const std::vector<double> &pm, double h, double threshold) {
    FiPass pass;
    const std::size_t n = std::max({p0.size(), pp.size(), pm.size()});
    for (std::size_t i = 0; i < n; ++i) {
        const double c = checked_probability(p0, i);
        const double up = checked_probability(pp, i);
        const double down = checked_probability(pm, i);
        if (c < threshold) {
            if (up > 0.0 || down > 0.0) {
                ++pass.skipped;
                const double root = std::sqrt(c);
                const double slope =
                    std::max(std::abs(std::sqrt(up) - root),
                             std::abs(std::sqrt(down) - root)) / h;
                pass.skipped_limit += 4.0 * slope * slope;
            }
            continue;
        }
        const double derivative = (up - down) / (2.0 * h);
        pass.value += derivative * derivative / c;
    }
    return pass;
}

} // namespace detail

/**
 * Classical Fisher information sum_n (dP/dtheta)^2 / P of the outcome
 * distribution returned by `family(theta)`.
 *
 * `family` may return std::vector<double>, OutcomeDistribution, or any type
 * with a `probabilities` member. Distributions of different lengths are
 * zero-padded. Throws ValidationError on negative probabilities.
 */
template <class Family>
FisherInformation classical_fi(Family &&family, double theta,
                               const FiniteDifference &fd = {}) {
    detail::check_step(fd.step);
    const auto centre = family(theta);
    const auto &p0 = detail::probabilities_of(centre);

    auto run = [&](double h) {
        const auto up = family(theta + h);
        const auto down = family(theta - h);
        return detail::fi_pass(p0, detail::probabilities_of(up),
                               detail::probabilities_of(down), h,
                               fd.skip_threshold);
    };

    const detail::FiPass full = run(fd.step);
    FisherInformation result{full.value, full.skipped, full.skipped_limit, 0.0};
    if (fd.step_check) {
        const detail::FiPass half = run(0.5 * fd.step);
        const double scale = std::max(std::abs(full.value), 1e-12);
        result.step_relative_change = std::abs(full.value - half.value) / scale;
    }
    return result;
}

struct QuantumFisherInformation {
    double value = 0.0;
    double step_relative_change = 0.0;
};

namespace detail {

inline CMatrix density_matrix_of(const DensityOperator &rho) { return rho.matrix(); }

inline CMatrix density_matrix_of(const CMatrix &m) {
    detail::require(m.rows() == m.cols(), "qfi: density matrix must be square");
    detail::require(hermiticity_defect(m) <= 1e-10, "qfi: non-Hermitian input");
    return m;
}

inline double sld_sum(const Eigen::SelfAdjointEigenSolver<CMatrix> &eig,
                      const CMatrix &derivative, double tolerance) {
    const CMatrix rotated =
        eig.eigenvectors().adjoint() * derivative * eig.eigenvectors();
    const auto &lambda = eig.eigenvalues();
    double f = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        for (Eigen::Index j = 0; j < lambda.size(); ++j) {
            const double s = std::max(lambda(i), 0.0) + std::max(lambda(j), 0.0);
            if (s > tolerance) {
                f += 2.0 * std::norm(rotated(i, j)) / s;
            }
        }
    }
    return f;
}

} // namespace detail

struct QfiOptions {
    double step = 1e-5;
    double eigen_tolerance = 1e-12; ///< pairs with lambda_i + lambda_j below are dropped
    bool step_check = true;
};

/**
 * Quantum Fisher information from the eigendecomposition of rho(theta):
 *
 *     F_Q = sum_{i,j: l_i + l_j > tol} 2 |<i| d rho |j>|^2 / (l_i + l_j)
 *
 * `family` returns a DensityOperator or a (Hermitian) CMatrix.
 */
template <class Family>
QuantumFisherInformation qfi(Family &&family, double theta,
                             const QfiOptions &opt = {}) {
    detail::check_step(opt.step);
    const CMatrix rho = detail::density_matrix_of(family(theta));
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(rho);

    auto run = [&](double h) {
        const CMatrix up = detail::density_matrix_of(family(theta + h));
        const CMatrix down = detail::density_matrix_of(family(theta - h));
        return detail::sld_sum(eig, (up - down) / (2.0 * h), opt.eigen_tolerance);
    };

    QuantumFisherInformation result{run(opt.step), 0.0};
    if (opt.step_check) {
        const double half = run(0.5 * opt.step);
        result.step_relative_change =
            std::abs(result.value - half) / std::max(std::abs(result.value), 1e-12);
    }
    return result;
}

} // namespace rydmetro
