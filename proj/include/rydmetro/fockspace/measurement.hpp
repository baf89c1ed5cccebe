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
 * @file measurement.hpp
 * Generalized measurements (POVMs) with occupation-labelled outcomes.
 */
#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "rydmetro/fockspace/channels.hpp"

namespace rydmetro {

struct PovmElement {
    Occupation label;
    CMatrix matrix;
};

namespace detail {

/// Smallest eigenvalue of a Hermitian matrix; diagonal input is read directly.
inline double min_eigenvalue(const CMatrix &m) {
    const CMatrix off = m - CMatrix(m.diagonal().asDiagonal());
    if (off.cwiseAbs().maxCoeff() == 0.0) {
        return m.diagonal().real().minCoeff();
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

} // namespace detail

class PovmSet {
  public:
    /// Checks positivity (>= -1e-10) of every element and completeness (1e-10).
    PovmSet(FockBasis basis, std::vector<PovmElement> elements)
        : basis_(std::move(basis)), elements_(std::move(elements)) {
        detail::require(!elements_.empty(), "PovmSet: no elements");
        const auto dim = static_cast<Eigen::Index>(basis_.dimension());
        CMatrix sum = CMatrix::Zero(dim, dim);
        for (const auto &[label, m] : elements_) {
            detail::require(m.rows() == dim && m.cols() == dim,
                            "PovmSet: element " + to_string(label) +
                                " does not match basis");
            detail::require(detail::hermiticity_defect(m) <= 1e-12,
                            "PovmSet: element " + to_string(label) +
                                " is not Hermitian");
            detail::require(detail::min_eigenvalue(m) >= -1e-10,
                            "PovmSet: element " + to_string(label) +
                                " is not positive semidefinite");
            sum += m;
        }
        completeness_defect_ =
            (sum - CMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
        detail::require(completeness_defect_ <= 1e-10,
                        "PovmSet: elements do not sum to identity (defect " +
                            std::to_string(completeness_defect_) + ")");
    }

    [[nodiscard]] const FockBasis &basis() const noexcept { return basis_; }
    [[nodiscard]] const std::vector<PovmElement> &elements() const noexcept {
        return elements_;
    }
    [[nodiscard]] double completeness_defect() const noexcept {
        return completeness_defect_;
    }

    [[nodiscard]] const CMatrix &element(Occupation label) const {
        for (const auto &e : elements_) {
            if (e.label == label) {
                return e.matrix;
            }
        }
        throw ValidationError("PovmSet: no element labelled " + to_string(label));
    }

  private:
    FockBasis basis_;
    std::vector<PovmElement> elements_;
    double completeness_defect_ = 0.0;
};

/// Probabilities of labelled outcomes, in POVM element order.
struct OutcomeDistribution {
    std::vector<Occupation> labels;
    std::vector<double> probabilities;

    [[nodiscard]] double probability(Occupation label) const {
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == label) {
                return probabilities[i];
            }
        }
        throw ValidationError("OutcomeDistribution: no outcome " + to_string(label));
    }

    [[nodiscard]] double total() const {
        double s = 0.0;
        for (double p : probabilities) {
            s += p;
        }
        return s;
    }
};

/// p_(i,j) = tr(rho M_(i,j)). Round-off negatives above -1e-12 are clipped.
inline OutcomeDistribution measure(const DensityOperator &rho,
                                   const PovmSet &povm) {
    require_same_basis(rho.basis(), povm.basis(), "measure");
    OutcomeDistribution out;
    out.labels.reserve(povm.elements().size());
    out.probabilities.reserve(povm.elements().size());
    for (const auto &[label, m] : povm.elements()) {
        double p = (rho.matrix().transpose().cwiseProduct(m)).sum().real();
        detail::require(p >= -1e-12, "measure: negative outcome probability");
        out.labels.push_back(label);
        out.probabilities.push_back(std::max(p, 0.0));
    }
    return out;
}

/// Projective photon-number measurement of both modes.
inline PovmSet number_povm(const FockBasis &basis) {
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    std::vector<PovmElement> elements;
    elements.reserve(basis.dimension());
    for (std::size_t i = 0; i < basis.dimension(); ++i) {
        CMatrix m = CMatrix::Zero(dim, dim);
        const auto k = static_cast<Eigen::Index>(i);
        m(k, k) = 1.0;
        elements.push_back({basis.occupation(i), std::move(m)});
    }
    return {basis, std::move(elements)};
}

/**
 * Heisenberg-picture POVM of `channel` followed by `povm`:
 * M'_x = sum_k K^dagger M_x K.
 */
inline PovmSet pull_back(const PovmSet &povm, const KrausChannel &channel) {
    require_same_basis(povm.basis(), channel.basis(), "pull_back");
    std::vector<PovmElement> elements;
    elements.reserve(povm.elements().size());
    for (const auto &[label, m] : povm.elements()) {
        CMatrix pulled = CMatrix::Zero(m.rows(), m.cols());
        for (const CMatrix &k : channel.operators()) {
            pulled.noalias() += k.adjoint() * m * k;
        }
        elements.push_back({label, std::move(pulled)});
    }
    return {povm.basis(), std::move(elements)};
}

/// Marginal distribution of n_d from a number measurement outcome set.
inline std::vector<double> marginal_d(const OutcomeDistribution &joint) {
    int n_max = 0;
    for (const Occupation &o : joint.labels) {
        n_max = std::max(n_max, o.n_d);
    }
    std::vector<double> marginal(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (std::size_t i = 0; i < joint.labels.size(); ++i) {
        marginal[static_cast<std::size_t>(joint.labels[i].n_d)] += joint.probabilities[i];
    }
    return marginal;
}

} // namespace rydmetro
