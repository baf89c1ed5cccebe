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
 * @file basis.hpp
 * Truncated two-mode Fock basis {|n_d, n_p>} with n_d + n_p <= n_max.
 *
 * Basis states are ordered by total excitation number N and, inside each
 * shell, by increasing n_p:
 *
 *     index(n_d, n_p) = N (N + 1) / 2 + n_p,   N = n_d + n_p
 *
 * so the vacuum is index 0 and a shell occupies a contiguous block.
 */
#pragma once

#include <complex>
#include <compare>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rydmetro/errors.hpp"

namespace rydmetro {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

enum class Mode { d, p };

/// Occupation pair (n_d, n_p); also used as a measurement outcome label.
struct Occupation {
    int n_d = 0;
    int n_p = 0;

    [[nodiscard]] int total() const noexcept { return n_d + n_p; }
    auto operator<=>(const Occupation &) const = default;
};

inline std::string to_string(const Occupation &o) {
    return "(" + std::to_string(o.n_d) + "," + std::to_string(o.n_p) + ")";
}

class FockBasis {
  public:
    explicit FockBasis(int n_max) : n_max_(n_max) {
        detail::require(n_max >= 0, "FockBasis: n_max must be non-negative");
        occupations_.reserve(dimension());
        for (int total = 0; total <= n_max_; ++total) {
            for (int n_p = 0; n_p <= total; ++n_p) {
                occupations_.push_back({total - n_p, n_p});
            }
        }
    }

    [[nodiscard]] int n_max() const noexcept { return n_max_; }

    [[nodiscard]] std::size_t dimension() const noexcept {
        const auto n = static_cast<std::size_t>(n_max_);
        return (n + 1) * (n + 2) / 2;
    }

    [[nodiscard]] bool contains(Occupation o) const noexcept {
        return o.n_d >= 0 && o.n_p >= 0 && o.total() <= n_max_;
    }

    [[nodiscard]] std::size_t index(Occupation o) const {
        detail::require(contains(o), "FockBasis: occupation " + to_string(o) +
                                         " outside truncated space");
        const auto total = static_cast<std::size_t>(o.total());
        return total * (total + 1) / 2 + static_cast<std::size_t>(o.n_p);
    }

    [[nodiscard]] Occupation occupation(std::size_t index) const {
        detail::require(index < occupations_.size(),
                        "FockBasis: index out of range");
        return occupations_[index];
    }

    [[nodiscard]] const std::vector<Occupation> &occupations() const noexcept {
        return occupations_;
    }

    bool operator==(const FockBasis &other) const noexcept {
        return n_max_ == other.n_max_;
    }

  private:
    int n_max_;
    std::vector<Occupation> occupations_;
};

inline void require_same_basis(const FockBasis &a, const FockBasis &b,
                               const char *where) {
    detail::require(a == b, std::string(where) +
                                ": operands live on different truncated bases");
}

} // namespace rydmetro
