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
 * @file states.hpp
 * State vectors and density operators on a truncated two-mode Fock basis.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>

#include "rydmetro/fockspace/basis.hpp"

namespace rydmetro {

namespace detail {

inline double hermiticity_defect(const CMatrix &m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline double log_factorial(int n) { return std::lgamma(n + 1.0); }

} // namespace detail

/**
 * Pure state. Normalized within 1e-12 unless built through
 * `TwoModeFockState::unnormalized`, which is used for truncated coherent
 * states whose discarded tail is reported in `tail_mass()`.
 */
class TwoModeFockState {
  public:
    TwoModeFockState(FockBasis basis, CVector amplitudes)
        : basis_(std::move(basis)), amplitudes_(std::move(amplitudes)) {
        check_dimension();
        detail::require(std::abs(amplitudes_.squaredNorm() - 1.0) <= 1e-12,
                        "TwoModeFockState: state is not normalized");
    }

    static TwoModeFockState unnormalized(FockBasis basis, CVector amplitudes,
                                         double tail_mass) {
        return TwoModeFockState(std::move(basis), std::move(amplitudes),
                                tail_mass, Unchecked{});
    }

    static TwoModeFockState number_state(const FockBasis &basis,
                                         Occupation occupation) {
        CVector amplitudes = CVector::Zero(static_cast<Eigen::Index>(basis.dimension()));
        amplitudes(static_cast<Eigen::Index>(basis.index(occupation))) = 1.0;
        return {basis, std::move(amplitudes)};
    }

    /**
     * Product of coherent states |alpha_d> (x) |alpha_p>, truncated to the
     * basis. Throws if the discarded probability exceeds `max_tail_mass`.
     */
    static TwoModeFockState coherent(const FockBasis &basis, Complex alpha_d,
                                     Complex alpha_p,
                                     double max_tail_mass = 1e-8) {
        const double mean_d = std::norm(alpha_d);
        const double mean_p = std::norm(alpha_p);
        CVector amplitudes(static_cast<Eigen::Index>(basis.dimension()));
        for (std::size_t i = 0; i < basis.dimension(); ++i) {
            const auto [n_d, n_p] = basis.occupation(i);
            amplitudes(static_cast<Eigen::Index>(i)) =
                std::exp(-0.5 * (mean_d + mean_p) -
                         0.5 * (detail::log_factorial(n_d) +
                                detail::log_factorial(n_p))) *
                std::pow(alpha_d, n_d) * std::pow(alpha_p, n_p);
        }
        const double tail = std::max(0.0, 1.0 - amplitudes.squaredNorm());
        detail::require(tail < max_tail_mass,
                        "coherent state: truncation n_max=" +
                            std::to_string(basis.n_max()) +
                            " leaves tail mass " + std::to_string(tail));
        return unnormalized(basis, std::move(amplitudes), tail);
    }

    [[nodiscard]] const FockBasis &basis() const noexcept { return basis_; }
    [[nodiscard]] const CVector &amplitudes() const noexcept { return amplitudes_; }
    [[nodiscard]] double tail_mass() const noexcept { return tail_mass_; }

    [[nodiscard]] Complex amplitude(Occupation o) const {
        return amplitudes_(static_cast<Eigen::Index>(basis_.index(o)));
    }

  private:
    struct Unchecked {};

    TwoModeFockState(FockBasis basis, CVector amplitudes, double tail_mass,
                     Unchecked)
        : basis_(std::move(basis)), amplitudes_(std::move(amplitudes)),
          tail_mass_(tail_mass) {
        check_dimension();
    }

    void check_dimension() const {
        detail::require(static_cast<std::size_t>(amplitudes_.size()) ==
                            basis_.dimension(),
                        "TwoModeFockState: amplitude vector has wrong size");
    }

    FockBasis basis_;
    CVector amplitudes_;
    double tail_mass_ = 0.0;
};

/**
 * Hermitian positive semidefinite operator. Construction checks
 * Hermiticity (1e-12), positivity (eigenvalues >= -1e-10) and
 * trace <= 1 + 1e-10. Sub-normalized operators are allowed: they arise from
 * truncated coherent inputs and from trace-decreasing channels.
 */
class DensityOperator {
  public:
    DensityOperator(FockBasis basis, CMatrix matrix)
        : basis_(std::move(basis)), matrix_(std::move(matrix)) {
        const auto dim = static_cast<Eigen::Index>(basis_.dimension());
        detail::require(matrix_.rows() == dim && matrix_.cols() == dim,
                        "DensityOperator: matrix does not match basis dimension");
        detail::require(detail::hermiticity_defect(matrix_) <= 1e-12,
                        "DensityOperator: matrix is not Hermitian");
        // Symmetrize away round-off so downstream eigensolvers see an exact
        // Hermitian matrix.
        matrix_ = 0.5 * (matrix_ + matrix_.adjoint()).eval();
        detail::require(trace() <= 1.0 + 1e-10,
                        "DensityOperator: trace exceeds one");
        detail::require(min_eigenvalue() >= -1e-10,
                        "DensityOperator: matrix is not positive semidefinite");
    }

    explicit DensityOperator(const TwoModeFockState &psi)
        : DensityOperator(psi.basis(),
                          psi.amplitudes() * psi.amplitudes().adjoint()) {}

    [[nodiscard]] const FockBasis &basis() const noexcept { return basis_; }
    [[nodiscard]] const CMatrix &matrix() const noexcept { return matrix_; }

    [[nodiscard]] double trace() const { return matrix_.trace().real(); }

    [[nodiscard]] bool is_normalized(double tol = 1e-10) const {
        return std::abs(trace() - 1.0) <= tol;
    }

    [[nodiscard]] double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<CMatrix> solver(matrix_,
                                                      Eigen::EigenvaluesOnly);
        return solver.eigenvalues().minCoeff();
    }

    [[nodiscard]] double population(Occupation o) const {
        const auto i = static_cast<Eigen::Index>(basis_.index(o));
        return matrix_(i, i).real();
    }

    /// tr(rho A) for a Hermitian observable A; returns the real part.
    [[nodiscard]] double expectation(const CMatrix &observable) const {
        detail::require(observable.rows() == matrix_.rows() &&
                            observable.cols() == matrix_.cols(),
                        "DensityOperator::expectation: dimension mismatch");
        return (matrix_ * observable).trace().real();
    }

  private:
    FockBasis basis_;
    CMatrix matrix_;
};

} // namespace rydmetro
