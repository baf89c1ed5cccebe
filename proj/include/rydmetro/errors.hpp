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
 * @file errors.hpp
 * Exception types shared by every module. The cli maps ValidationError to
 * exit code 2 and ConvergenceError to exit code 3.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace rydmetro {

/// Bad input: out-of-range parameter, dimension mismatch, broken invariant.
class ValidationError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine could not reach its accuracy contract.
class ConvergenceError : public std::runtime_error {
  public:
    ConvergenceError(const std::string &what, double achieved_error)
        : std::runtime_error(what + " (achieved error estimate " +
                             std::to_string(achieved_error) + ")"),
          achieved_error_(achieved_error) {}

    [[nodiscard]] double achieved_error() const noexcept {
        return achieved_error_;
    }

  private:
    double achieved_error_;
};

namespace detail {
inline void require(bool condition, const std::string &message) {
    if (!condition) {
        throw ValidationError(message);
    }
}
} // namespace detail

} // namespace rydmetro
