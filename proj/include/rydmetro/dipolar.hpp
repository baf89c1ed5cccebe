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

// Dipolar exchange between a readout excitation and control excitations:
// excluded-volume integral A(t), its growth rate Q, the per-excitation
// decay rate gamma = 2Q/V, and a Monte Carlo check of the readout
// suppression in a Gaussian cloud.
//
// Units: lengths in um, times passed to A(t) in us, rates returned in 1/s.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rydmetro/constants.hpp"
#include "rydmetro/errors.hpp"
#include "rydmetro/random.hpp"

namespace rydmetro::dipolar {

namespace detail {
using rydmetro::detail::require;
} // namespace detail

enum class CloudKind { box, gaussian };

/// Box: edge lengths. Gaussian: per-axis standard deviations of the density.
struct CloudGeometry {
    CloudKind kind = CloudKind::box;
    std::array<double, 3> dimensions_um{80.0, 80.0, 4000.0};

    void validate() const {
        for (double d : dimensions_um) {
            detail::require(std::isfinite(d) && d > 0.0, "cloud dimensions must be positive");
        }
    }

    /// 1 / integral of p^2: the edge product for a box, (4 pi)^{3/2} sx sy sz
    /// for a Gaussian.
    [[nodiscard]] double effective_volume() const {
        validate();
        const double product = dimensions_um[0] * dimensions_um[1] * dimensions_um[2];
        if (kind == CloudKind::box) {
            return product;
        }
        return std::pow(4.0 * constants::pi, 1.5) * product;
    }
};

/// How a tabulated C3 value in Hz um^3 is turned into C3/hbar.
enum class C3Convention {
    angular, ///< tabulated value is C3 / (2 pi hbar): multiply by 2 pi
    cyclic   ///< tabulated value used directly as C3 / hbar
};

struct DipolarParams {
    double c3_over_hbar = 0.0; ///< rad/s um^3
    CloudGeometry cloud;

    void validate() const {
        detail::require(std::isfinite(c3_over_hbar) && c3_over_hbar > 0.0,
                        "c3_over_hbar must be positive");
        cloud.validate();
    }

    static DipolarParams from_tabulated(double c3_hz_um3, C3Convention convention,
                                        CloudGeometry cloud) {
        const double factor = convention == C3Convention::angular ? constants::two_pi : 1.0;
        DipolarParams p{c3_hz_um3 * factor, cloud};
        p.validate();
        return p;
    }
};

/// Tabulated C3 of the d-p pair used throughout, in Hz um^3.
inline constexpr double reference_c3_hz_um3 = 3.709e9;

/// Angular factor (3 cos 2v + 1) / 4 of the dipole pair potential.
inline double angular_factor(double vartheta) {
    return 0.25 * (3.0 * std::cos(2.0 * vartheta) + 1.0);
}

/// V / hbar in rad/s for a pair separated by r um at polar angle vartheta.
inline double pair_potential(double r_um, double vartheta, const DipolarParams &params) {
    detail::require(std::isfinite(r_um) && r_um > 0.0, "pair_potential: r must be positive");
    return params.c3_over_hbar / (r_um * r_um * r_um) * angular_factor(vartheta);
}

struct QuadratureSpec {
    int angular_panels = 256;        ///< Gauss-Legendre panels in cos(vartheta)
    int radial_periods = 8;          ///< whole oscillation periods integrated numerically
    double radial_tolerance = 1e-8;  ///< absolute, per radial panel
    unsigned max_depth = 15;
    double cutoff_radius_um = 1e5;   ///< outer radius for the imaginary part

    void validate() const {
        detail::require(angular_panels >= 3, "angular_panels must be at least 3");
        detail::require(radial_periods >= 1, "radial_periods must be at least 1");
        detail::require(radial_tolerance > 0.0, "radial_tolerance must be positive");
        detail::require(cutoff_radius_um > 0.0, "cutoff_radius_um must be positive");
    }
};

namespace detail {

using boost::math::quadrature::gauss;
using boost::math::quadrature::gauss_kronrod;

inline constexpr double inv_sqrt3 = 0.57735026918962576451;

template <class F>
double adaptive(F &&f, double a, double b, const QuadratureSpec &spec, double &error_sum) {
    double error = 0.0;
    double l1 = 0.0;
    const double value =
        gauss_kronrod<double, 31>::integrate(f, a, b, spec.max_depth, spec.radial_tolerance,
                                             &error, &l1);
    const double absolute = error;
    if (!(absolute <= spec.radial_tolerance * std::max(1.0, l1))) {
        throw ConvergenceError("excluded_volume_integral: radial panel did not converge",
                               absolute);
    }
    error_sum += absolute;
    return value;
}

/// Angular integral over cos(vartheta) of g(f) with f the angular factor,
/// split at the zeros of f so each panel sees a smooth integrand.
template <class G>
double angular_integral(G &&g, int panels) {
    const std::array<double, 4> cuts{-1.0, -inv_sqrt3, inv_sqrt3, 1.0};
    double total = 0.0;
    for (std::size_t piece = 0; piece < 3; ++piece) {
        const double lo = cuts[piece], hi = cuts[piece + 1];
        const int n = std::max(1, static_cast<int>(std::lround(panels * (hi - lo) / 2.0)));
        const double width = (hi - lo) / n;
        for (int k = 0; k < n; ++k) {
            const double a = lo + k * width;
            total += gauss<double, 10>::integrate(
                [&](double x) { return g(0.5 * (3.0 * x * x - 1.0)); }, a, a + width);
        }
    }
    return constants::two_pi * total;
}

/// integral_0^inf (1 - cos v) / v^2 dv, on whole periods plus an asymptotic tail.
inline double radial_real(const QuadratureSpec &spec, double &error_sum) {
    const double period = constants::two_pi;
    auto integrand = [](double v) {
        if (v < 1e-4) {
            return 0.5 - v * v / 24.0;
        }
        const double s = std::sin(0.5 * v);
        return 2.0 * s * s / (v * v);
    };
    double sum = 0.0;
    for (int j = 0; j < spec.radial_periods; ++j) {
        sum += adaptive(integrand, j * period, (j + 1) * period, spec, error_sum);
    }
    const double u = spec.radial_periods * period;
    return sum + 1.0 / u - 2.0 / std::pow(u, 3) + 24.0 / std::pow(u, 5);
}

/// integral_eps^inf sin v / v^2 dv for eps > 0.
inline double radial_imag(double eps, const QuadratureSpec &spec, double &error_sum) {
    const double period = constants::two_pi;
    double sum = 0.0;
    if (eps < period) {
        // v = e^s turns the 1/v growth into a bounded integrand.
        sum += adaptive([](double s) {
                            const double v = std::exp(s);
                            return std::sin(v) / v;
                        },
                        std::log(eps), std::log(period), spec, error_sum);
    }
    const double start = std::max(eps, period);
    const double first = std::ceil(start / period);
    double lo = start;
    for (int j = 0; j < spec.radial_periods; ++j) {
        const double hi = (first + j) * period;
        if (hi > lo) {
            sum += adaptive([](double v) { return std::sin(v) / (v * v); }, lo, hi, spec,
                            error_sum);
        }
        lo = hi;
    }
    return sum + 1.0 / (lo * lo) - 6.0 / std::pow(lo, 4);
}

} // namespace detail

/// 2 pi times the integral of |(3x^2 - 1)/2| over x = cos(vartheta) in [-1, 1].
inline double angular_abs_integral(const QuadratureSpec &spec = {}) {
    spec.validate();
    return detail::angular_integral([](double f) { return std::abs(f); }, spec.angular_panels);
}

struct ExcludedVolume {
    std::complex<double> value; ///< um^3
    double error_estimate = 0.0;
};

/**
 * A(t) = integral of [1 - exp(-i t V(x)/hbar)] d^3x for t in us.
 *
 * With u = 1/r^3 each direction contributes (1/3) int (1 - e^{-i a u}) / u^2 du,
 * a = t C3 f / hbar. The real radial integral scales as |a|; the imaginary
 * one is cut off at cutoff_radius_um and has no accuracy guarantee.
 */
inline ExcludedVolume excluded_volume_integral(double t_us, const DipolarParams &params,
                                               const QuadratureSpec &spec = {}) {
    detail::require(std::isfinite(t_us) && t_us > 0.0,
                    "excluded_volume_integral: t must be positive");
    params.validate();
    spec.validate();
    const double phase_scale = t_us * 1e-6 * params.c3_over_hbar; // um^3
    double error = 0.0;

    const double real_radial = detail::radial_real(spec, error);
    const double real = phase_scale / 3.0 * real_radial * angular_abs_integral(spec);

    const double eps = std::pow(spec.cutoff_radius_um, -3);
    double imag_error = 0.0;
    const double imag = detail::angular_integral(
        [&](double f) {
            const double a = phase_scale * f;
            if (a == 0.0) {
                return 0.0;
            }
            // int sin(a u)/u^2 du = a * int_{|a| eps} sin v / v^2 dv, odd in a.
            return a * detail::radial_imag(std::abs(a) * eps, spec, imag_error) / 3.0;
        },
        spec.angular_panels);

    const double scale = phase_scale / 3.0 * angular_abs_integral(spec);
    return {{real, imag}, error * scale + imag_error * phase_scale};
}

/// Q = (4 pi^2 / (9 sqrt 3)) C3/hbar in um^3/s.
inline double volumetric_rate_q(const DipolarParams &params) {
    params.validate();
    return 4.0 * constants::pi * constants::pi / (9.0 * std::sqrt(3.0)) * params.c3_over_hbar;
}

/// gamma = 2Q / V in 1/s.
inline double decay_rate_gamma(const DipolarParams &params) {
    return 2.0 * volumetric_rate_q(params) / params.cloud.effective_volume();
}

struct LinearRateFit {
    double slope = 0.0;             ///< um^3 / s
    double relative_residual = 0.0; ///< rms residual / rms value
};

/// Least-squares slope through the origin of Re A(t) against t.
inline LinearRateFit fit_volumetric_rate(const std::vector<double> &t_us,
                                         const DipolarParams &params,
                                         const QuadratureSpec &spec = {}) {
    detail::require(!t_us.empty(), "fit_volumetric_rate: no times given");
    std::vector<double> values;
    double num = 0.0, den = 0.0;
    for (double t : t_us) {
        const double re = excluded_volume_integral(t, params, spec).value.real();
        values.push_back(re);
        const double ts = t * 1e-6;
        num += ts * re;
        den += ts * ts;
    }
    LinearRateFit fit;
    fit.slope = num / den;
    double res = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < t_us.size(); ++i) {
        const double r = values[i] - fit.slope * t_us[i] * 1e-6;
        res += r * r;
        norm += values[i] * values[i];
    }
    fit.relative_residual = std::sqrt(res / norm);
    return fit;
}

enum class InnerIntegral {
    local_density, ///< |1 - p(y) A(t)|^2 per control excitation
    direct         ///< sample the readout position as well
};

struct ReadoutMcOptions {
    InnerIntegral mode = InnerIntegral::local_density;
    std::size_t inner_samples = 64; ///< direct mode only
    std::size_t shards = 16;
    std::optional<double> target_error;
    QuadratureSpec quadrature{};
};

struct ReadoutEstimate {
    double value = 0.0;
    double standard_error = 0.0;
    std::size_t samples = 0;
};

namespace detail {

struct GaussianCloud {
    std::array<double, 3> sigma;
    double norm;

    explicit GaussianCloud(const CloudGeometry &g)
        : sigma(g.dimensions_um),
          norm(1.0 / (std::pow(constants::two_pi, 1.5) * sigma[0] * sigma[1] * sigma[2])) {}

    [[nodiscard]] std::array<double, 3> sample(Rng &rng) const {
        std::normal_distribution<double> n(0.0, 1.0);
        return {sigma[0] * n(rng), sigma[1] * n(rng), sigma[2] * n(rng)};
    }

    [[nodiscard]] double density(const std::array<double, 3> &x) const {
        double q = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            q += x[i] * x[i] / (sigma[i] * sigma[i]);
        }
        return norm * std::exp(-0.5 * q);
    }
};

/// V(x - y) t / hbar for positions in um, t in us.
inline double pair_phase(const std::array<double, 3> &x, const std::array<double, 3> &y,
                         double t_us, const DipolarParams &params) {
    const double dx = x[0] - y[0], dy = x[1] - y[1], dz = x[2] - y[2];
    const double r2 = dx * dx + dy * dy + dz * dz;
    if (r2 == 0.0) {
        return 0.0;
    }
    const double cos2 = dz * dz / r2;
    const double f = 0.5 * (3.0 * cos2 - 1.0);
    return t_us * 1e-6 * params.c3_over_hbar * f / (r2 * std::sqrt(r2));
}

} // namespace detail

/**
 * Monte Carlo estimate of the phase-matched readout <d^dagger d> per
 * readout excitation with n_p control excitations in a Gaussian cloud.
 * Samples are split over shards with independent seeded streams, so the
 * result depends only on (seed, samples, shards).
 */
inline ReadoutEstimate readout_expectation_mc(double t_us, int n_p, const DipolarParams &params,
                                              std::size_t samples, std::uint64_t seed,
                                              const ReadoutMcOptions &options = {}) {
    params.validate();
    detail::require(params.cloud.kind == CloudKind::gaussian,
                    "readout_expectation_mc: requires a gaussian cloud");
    detail::require(samples >= 10000, "readout_expectation_mc: at least 1e4 samples required");
    detail::require(std::isfinite(t_us) && t_us >= 0.0, "readout_expectation_mc: t must be >= 0");
    detail::require(n_p >= 0, "readout_expectation_mc: n_p must be >= 0");
    detail::require(options.shards >= 1, "readout_expectation_mc: shards must be >= 1");
    detail::require(options.mode != InnerIntegral::direct || options.inner_samples >= 2,
                    "readout_expectation_mc: direct mode needs at least 2 inner samples");
    if (t_us == 0.0 || n_p == 0) {
        return {1.0, 0.0, samples};
    }

    const detail::GaussianCloud cloud(params.cloud);
    std::complex<double> area{};
    if (options.mode == InnerIntegral::local_density) {
        area = excluded_volume_integral(t_us, params, options.quadrature).value;
    }

    double sum = 0.0, sum_sq = 0.0;
    const std::size_t per_shard = samples / options.shards;
    std::vector<std::array<double, 3>> controls(static_cast<std::size_t>(n_p));
    for (std::size_t shard = 0; shard < options.shards; ++shard) {
        Rng rng = make_stream(seed, shard, StreamTag::readout_mc);
        const std::size_t count =
            per_shard + (shard < samples % options.shards ? 1 : 0);
        for (std::size_t s = 0; s < count; ++s) {
            for (auto &y : controls) {
                y = cloud.sample(rng);
            }
            double w = 1.0;
            if (options.mode == InnerIntegral::local_density) {
                for (const auto &y : controls) {
                    w *= std::norm(1.0 - cloud.density(y) * area);
                }
            } else {
                std::complex<double> z_sum{};
                const std::size_t m = options.inner_samples;
                for (std::size_t k = 0; k < m; ++k) {
                    const auto x = cloud.sample(rng);
                    double phase = 0.0;
                    for (const auto &y : controls) {
                        phase += detail::pair_phase(x, y, t_us, params);
                    }
                    z_sum += std::polar(1.0, -phase);
                }
                const double md = static_cast<double>(m);
                w = (std::norm(z_sum) - md) / (md * (md - 1.0));
            }
            sum += w;
            sum_sq += w * w;
        }
    }
    const double n = static_cast<double>(samples);
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    ReadoutEstimate est{mean, std::sqrt(var / n), samples};
    if (options.target_error && est.standard_error > *options.target_error) {
        throw ConvergenceError("readout_expectation_mc: standard error above target; "
                               "increase samples",
                               est.standard_error);
    }
    return est;
}

} // namespace rydmetro::dipolar
