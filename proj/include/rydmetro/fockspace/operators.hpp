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
 * @file operators.hpp
 * Ladder/number operators and the Rabi rotation on the truncated basis.
 */
#pragma once

#include <cmath>

#include <Eigen/Eigenvalues>

#include "rydmetro/fockspace/states.hpp"

namespace rydmetro {

enum class LadderKind { annihilate, create, number };

/**
 * Matrix of d, d^dagger, d^dagger d (or the p-mode counterparts).
 *
 * Creation is truncated: components that would leave the space are
 * dropped, so create() is not the exact adjoint-closure on the top shell.
 * Use `apply_creation` to get the discarded norm for a given state.
 */
inline CMatrix mode_operator(const FockBasis &basis, Mode mode,
                             LadderKind kind) {
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    CMatrix op = CMatrix::Zero(dim, dim);
    for (std::size_t col = 0; col < basis.dimension(); ++col) {
        const Occupation in = basis.occupation(col);
        const int n = mode == Mode::d ? in.n_d : in.n_p;
        const auto c = static_cast<Eigen::Index>(col);
        switch (kind) {
        case LadderKind::number:
            op(c, c) = static_cast<double>(n);
            break;
        case LadderKind::annihilate: {
            if (n == 0) {
                break;
            }
            Occupation out = in;
            (mode == Mode::d ? out.n_d : out.n_p) -= 1;
            op(static_cast<Eigen::Index>(basis.index(out)), c) = std::sqrt(n);
            break;
        }
        case LadderKind::create: {
            Occupation out = in;
            (mode == Mode::d ? out.n_d : out.n_p) += 1;
            if (basis.contains(out)) {
                op(static_cast<Eigen::Index>(basis.index(out)), c) =
                    std::sqrt(n + 1.0);
            }
            break;
        }
        }
    }
    return op;
}

struct CreationResult {
    CVector amplitudes;    ///< truncated image, not renormalized
    double leaked_norm;    ///< squared norm dropped at the n_max boundary
};

inline CreationResult apply_creation(const TwoModeFockState &psi, Mode mode) {
    const FockBasis &basis = psi.basis();
    CreationResult result{
        mode_operator(basis, mode, LadderKind::create) * psi.amplitudes(), 0.0};
    for (std::size_t i = 0; i < basis.dimension(); ++i) {
        const Occupation o = basis.occupation(i);
        if (o.total() == basis.n_max()) {
            const int n = mode == Mode::d ? o.n_d : o.n_p;
            result.leaked_norm +=
                (n + 1.0) * std::norm(psi.amplitudes()(static_cast<Eigen::Index>(i)));
        }
    }
    return result;
}

/**
 * Rabi rotation between the modes,
 *
 *     U(theta) = exp(+i theta/2 (d^dagger p + p^dagger d)),
 *
 * evaluated through the eigendecomposition of the Hermitian generator.
 * With this sign U(theta)|2,0> = cos^2(theta/2)|2,0>
 * + (i/sqrt 2) sin(theta)|1,1> - sin^2(theta/2)|0,2>, and a coherent
 * |alpha, 0> maps to |alpha cos(theta/2), i alpha sin(theta/2)>.
 * The generator conserves n_d + n_p, so U is exactly unitary on the
 * truncated space.
 */
inline CMatrix rabi_rotation(const FockBasis &basis, double theta) {
    detail::require(std::isfinite(theta), "rabi_rotation: theta must be finite");
    const CMatrix d = mode_operator(basis, Mode::d, LadderKind::annihilate);
    const CMatrix p = mode_operator(basis, Mode::p, LadderKind::annihilate);
    CMatrix generator = d.adjoint() * p + p.adjoint() * d;
    generator = 0.5 * (generator + generator.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(generator);
    const Complex i_half_theta(0.0, 0.5 * theta);
    const CVector phases =
        (i_half_theta * solver.eigenvalues().cast<Complex>()).array().exp();
    return solver.eigenvectors() * phases.asDiagonal() *
           solver.eigenvectors().adjoint();
}

inline TwoModeFockState rotate(const TwoModeFockState &psi, double theta) {
    CVector out = rabi_rotation(psi.basis(), theta) * psi.amplitudes();
    if (psi.tail_mass() == 0.0) {
        return {psi.basis(), std::move(out)};
    }
    return TwoModeFockState::unnormalized(psi.basis(), std::move(out),
                                          psi.tail_mass());
}

} // namespace rydmetro
