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
 * @file channels.hpp
 * Kraus channels on the truncated two-mode space.
 */
#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include "rydmetro/fockspace/states.hpp"

namespace rydmetro {

using SparseCMatrix = Eigen::SparseMatrix<Complex>;

class KrausChannel {
  public:
    /**
     * Checks sum K^dagger K = 1 within 1e-10 when `trace_preserving`,
     * otherwise that its largest eigenvalue is at most 1 + 1e-10.
     */
    KrausChannel(FockBasis basis, std::vector<CMatrix> operators,
                 bool trace_preserving = true)
        : basis_(std::move(basis)), operators_(std::move(operators)),
          trace_preserving_(trace_preserving) {
        detail::require(!operators_.empty(), "KrausChannel: no operators");
        const auto dim = static_cast<Eigen::Index>(basis_.dimension());
        CMatrix sum = CMatrix::Zero(dim, dim);
        sparse_.reserve(operators_.size());
        for (const CMatrix &k : operators_) {
            detail::require(k.rows() == dim && k.cols() == dim,
                            "KrausChannel: operator does not match basis");
            sparse_.push_back(k.sparseView());
            const SparseCMatrix &ks = sparse_.back();
            sum += CMatrix(ks.adjoint() * ks);
        }
        completeness_defect_ = (sum - CMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
        if (trace_preserving_) {
            detail::require(completeness_defect_ <= 1e-10,
                            "KrausChannel: not trace preserving (defect " +
                                std::to_string(completeness_defect_) + ")");
        } else {
            Eigen::SelfAdjointEigenSolver<CMatrix> solver(
                0.5 * (sum + sum.adjoint()), Eigen::EigenvaluesOnly);
            detail::require(solver.eigenvalues().maxCoeff() <= 1.0 + 1e-10,
                            "KrausChannel: sum K^dagger K exceeds identity");
        }
    }

    static KrausChannel identity(const FockBasis &basis) {
        const auto dim = static_cast<Eigen::Index>(basis.dimension());
        return {basis, {CMatrix::Identity(dim, dim)}};
    }

    [[nodiscard]] const FockBasis &basis() const noexcept { return basis_; }
    [[nodiscard]] const std::vector<CMatrix> &operators() const noexcept {
        return operators_;
    }
    /// The same operators in compressed storage.
    [[nodiscard]] const std::vector<SparseCMatrix> &sparse_operators() const noexcept {
        return sparse_;
    }
    [[nodiscard]] bool trace_preserving() const noexcept {
        return trace_preserving_;
    }
    /// max |sum K^dagger K - 1|; zero up to round-off for exact channels.
    [[nodiscard]] double completeness_defect() const noexcept {
        return completeness_defect_;
    }

    /**
     * Column-stacking superoperator S with vec(Lambda(rho)) = S vec(rho),
     * S = sum conj(K) (x) K. Two channels are equal iff their superoperators
     * are.
     */
    [[nodiscard]] CMatrix superoperator() const {
        const auto dim = static_cast<Eigen::Index>(basis_.dimension());
        CMatrix s = CMatrix::Zero(dim * dim, dim * dim);
        for (const CMatrix &k : operators_) {
            const CMatrix kc = k.conjugate();
            for (Eigen::Index a = 0; a < dim; ++a) {
                for (Eigen::Index b = 0; b < dim; ++b) {
                    if (kc(a, b) != Complex(0.0)) {
                        s.block(a * dim, b * dim, dim, dim) += kc(a, b) * k;
                    }
                }
            }
        }
        return s;
    }

  private:
    FockBasis basis_;
    std::vector<CMatrix> operators_;
    std::vector<SparseCMatrix> sparse_;
    bool trace_preserving_;
    double completeness_defect_ = 0.0;
};

/// rho -> sum_k K rho K^dagger
inline DensityOperator apply_channel(const DensityOperator &rho,
                                     const KrausChannel &channel) {
    require_same_basis(rho.basis(), channel.basis(), "apply_channel");
    const auto dim = static_cast<Eigen::Index>(rho.basis().dimension());
    CMatrix out = CMatrix::Zero(dim, dim);
    CMatrix tmp(dim, dim);
    // K rho K^dagger = K (K rho)^dagger for Hermitian rho.
    for (const SparseCMatrix &k : channel.sparse_operators()) {
        tmp.noalias() = k * rho.matrix();
        out.noalias() += k * tmp.adjoint();
    }
    return {rho.basis(), std::move(out)};
}

/// `second` after `first`: Kraus set {B_j A_i}, zero products dropped.
inline KrausChannel compose(const KrausChannel &second,
                            const KrausChannel &first) {
    require_same_basis(second.basis(), first.basis(), "compose");
    std::vector<CMatrix> ops;
    ops.reserve(second.operators().size() * first.operators().size());
    for (const CMatrix &b : second.operators()) {
        for (const CMatrix &a : first.operators()) {
            CMatrix ba = b * a;
            if (ba.cwiseAbs().maxCoeff() > 0.0) {
                ops.push_back(std::move(ba));
            }
        }
    }
    if (ops.empty()) {
        const auto dim = static_cast<Eigen::Index>(first.basis().dimension());
        ops.push_back(CMatrix::Zero(dim, dim));
    }
    return {first.basis(), std::move(ops),
            second.trace_preserving() && first.trace_preserving()};
}

namespace detail {

/// sqrt of the binomial weight C(n, k) q^k (1-q)^(n-k).
inline double binomial_amplitude(int n, int k, double q) {
    if (k < 0 || k > n) {
        return 0.0;
    }
    const double log_choose =
        log_factorial(n) - log_factorial(k) - log_factorial(n - k);
    const double pk = k == 0 ? 1.0 : std::pow(q, k);
    const double rest = n - k == 0 ? 1.0 : std::pow(1.0 - q, n - k);
    return std::sqrt(std::exp(log_choose) * pk * rest);
}

} // namespace detail

/**
 * Independent binomial thinning of both modes with survival probability
 * eta (beam splitter against vacuum). Kraus operator E_{a,b} removes a
 * excitations from mode d and b from mode p.
 */
inline KrausChannel detection_loss_channel(const FockBasis &basis, double eta) {
    detail::require(eta >= 0.0 && eta <= 1.0,
                    "detection_loss_channel: eta must lie in [0, 1]");
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    const double loss = 1.0 - eta;
    std::vector<CMatrix> ops;
    for (int lost_d = 0; lost_d <= basis.n_max(); ++lost_d) {
        for (int lost_p = 0; lost_d + lost_p <= basis.n_max(); ++lost_p) {
            CMatrix k = CMatrix::Zero(dim, dim);
            for (std::size_t col = 0; col < basis.dimension(); ++col) {
                const Occupation in = basis.occupation(col);
                if (in.n_d < lost_d || in.n_p < lost_p) {
                    continue;
                }
                const Occupation out{in.n_d - lost_d, in.n_p - lost_p};
                k(static_cast<Eigen::Index>(basis.index(out)),
                  static_cast<Eigen::Index>(col)) =
                    detail::binomial_amplitude(in.n_d, lost_d, loss) *
                    detail::binomial_amplitude(in.n_p, lost_p, loss);
            }
            if (k.cwiseAbs().maxCoeff() > 0.0) {
                ops.push_back(std::move(k));
            }
        }
    }
    return {basis, std::move(ops)};
}

} // namespace rydmetro
