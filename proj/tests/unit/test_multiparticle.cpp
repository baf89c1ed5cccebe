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
#include <cmath>
#include <tuple>
#include <vector>

#include <catch_amalgamated.hpp>

#include "rydmetro/multiparticle.hpp"

using namespace rydmetro;
using namespace rydmetro::multiparticle;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double pi = 3.14159265358979323846;

double pois(int n, double mu) {
    if (mu == 0.0) {
        return n == 0 ? 1.0 : 0.0;
    }
    return std::exp(n * std::log(mu) - mu - std::lgamma(n + 1.0));
}

double total_variation(const std::vector<double> &a, const std::vector<double> &b) {
    double tv = 0.0;
    for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
        tv += std::abs((i < a.size() ? a[i] : 0.0) - (i < b.size() ? b[i] : 0.0));
    }
    return 0.5 * tv;
}

std::vector<double> marginal_p(const OutcomeDistribution &joint) {
    std::vector<double> out;
    for (std::size_t i = 0; i < joint.labels.size(); ++i) {
        const auto n = static_cast<std::size_t>(joint.labels[i].n_p);
        if (out.size() <= n) {
            out.resize(n + 1, 0.0);
        }
        out[n] += joint.probabilities[i];
    }
    return out;
}

// Brute-force joint count distribution: rotated coherent input, interaction
// and loss channels in the requested order, exact number readout.
OutcomeDistribution fock_pipeline(const FockBasis &b, const KrausChannel &interaction,
                                  const KrausChannel &loss, LossOrder order, double n0,
                                  double theta) {
    const auto input = TwoModeFockState::coherent(b, std::sqrt(n0), 0.0);
    DensityOperator rho(rotate(input, theta));
    if (order == LossOrder::after_interaction) {
        rho = apply_channel(apply_channel(rho, interaction), loss);
    } else {
        rho = apply_channel(apply_channel(rho, loss), interaction);
    }
    return measure(rho, number_povm(b));
}

// FI from the analytic theta-derivative of the Poisson mixture.
double analytic_fi(double b0, double d0, double g, double theta) {
    const double s2 = std::pow(std::sin(theta / 2), 2), c2 = 1 - s2;
    const double B = b0 * s2, D = d0 * c2;
    const double dB = b0 * std::sin(theta) / 2, dD = -d0 * std::sin(theta) / 2;
    double fi = 0.0;
    for (int n = 0; n < 80; ++n) {
        double p = 0.0, dp = 0.0;
        for (int k = 0; k < 200; ++k) {
            const double mu = D * std::exp(-g * k);
            const double wk = pois(k, B);
            const double dwk = (k > 0 ? pois(k - 1, B) : 0.0) - wk;
            const double pn = pois(n, mu);
            const double dpn = (n > 0 ? pois(n - 1, mu) : 0.0) - pn;
            p += wk * pn;
            dp += dwk * dB * pn + wk * dpn * std::exp(-g * k) * dD;
        }
        if (p > 1e-300) {
            fi += dp * dp / p;
        }
    }
    return fi;
}

} // namespace

TEST_CASE("super_rabi_means", "[multiparticle]") {
    const ProtocolParams exp_params{55.0, 0.02, 0.028};
    CHECK_THAT(super_rabi_means({55.0, 0.02, 0.0}, pi / 2).first, WithinAbs(0.55, 1e-12));
    CHECK(super_rabi_means(exp_params, 0.0).first == 0.02 * 55.0);
    CHECK_THAT(super_rabi_means(exp_params, pi / 2).first, WithinAbs(0.257, 5e-4));
    const auto [nd, np] = super_rabi_means(exp_params, 1.0);
    const double c2 = std::pow(std::cos(0.5), 2), s2 = 1 - c2;
    CHECK_THAT(nd, WithinRel(1.1 * c2 * std::exp(-55 * (1 - std::exp(-0.028)) * s2), 1e-14));
    CHECK_THAT(np, WithinRel(1.1 * s2 * std::exp(-55 * (1 - std::exp(-0.028)) * c2), 1e-14));

    SECTION("decay seen by detected controls when losses come first") {
        ProtocolParams before = exp_params;
        before.loss_order = LossOrder::before_interaction;
        CHECK_THAT(super_rabi_means(before, 1.0).first,
                   WithinRel(1.1 * c2 * std::exp(-1.1 * (1 - std::exp(-0.028)) * s2), 1e-14));
    }
    SECTION("approximate form only differs at order gamma_tau^2") {
        const auto exact = super_rabi_means(exp_params, 1.2);
        const auto approx = super_rabi_means_approx(exp_params, 1.2);
        CHECK(approx.first < exact.first);
        CHECK_THAT(approx.first, WithinRel(exact.first, 0.03));
    }
    SECTION("invalid parameters") {
        CHECK_THROWS_AS(super_rabi_means({-1.0, 0.5, 0.1}, 1.0), ValidationError);
        CHECK_THROWS_AS(super_rabi_means({1.0, 1.5, 0.1}, 1.0), ValidationError);
        CHECK_THROWS_AS(super_rabi_means({1.0, 0.5, -0.1}, 1.0), ValidationError);
    }
}

TEST_CASE("count_distribution", "[multiparticle]") {
    SECTION("no decay gives a Poisson law") {
        const ProtocolParams p{10.0, 0.3, 0.0};
        const auto dist = count_distribution(p, 1.1);
        const double mu = 3.0 * std::pow(std::cos(0.55), 2);
        for (std::size_t n = 0; n < dist.probabilities.size(); ++n) {
            CHECK_THAT(dist.probabilities[n], WithinAbs(pois(static_cast<int>(n), mu), 1e-14));
        }
    }
    SECTION("theta = 0 is independent of the loss order") {
        for (auto order : {LossOrder::after_interaction, LossOrder::before_interaction}) {
            const auto dist = count_distribution({5.0, 0.4, 1.0, order}, 0.0);
            for (std::size_t n = 0; n < dist.probabilities.size(); ++n) {
                CHECK_THAT(dist.probabilities[n], WithinAbs(pois(static_cast<int>(n), 2.0), 1e-14));
            }
        }
    }
    SECTION("normalization and mean on a parameter grid") {
        for (double n0 : {0.5, 10.0, 55.0}) {
            for (double g : {0.0, 0.028, 0.5}) {
                for (auto order : {LossOrder::after_interaction, LossOrder::before_interaction}) {
                    const ProtocolParams p{n0, 0.2, g, order};
                    for (double t : {0.0, 0.4, 1.5, 2.9, pi}) {
                        const auto dist = count_distribution(p, t);
                        CHECK_THAT(dist.total(), WithinAbs(1.0, 1e-9));
                        CHECK_THAT(dist.mean(), WithinAbs(analytic_mean(p, t), 1e-8));
                        for (double v : dist.probabilities) {
                            CHECK(v >= 0.0);
                        }
                    }
                }
            }
        }
    }
    SECTION("d/p symmetry under theta -> pi - theta") {
        const ProtocolParams p{7.0, 0.5, 0.3};
        for (double t : {0.3, 1.0, 2.2}) {
            const auto a = count_distribution(p, t, Mode::p);
            const auto b = count_distribution(p, pi - t, Mode::d);
            CHECK(total_variation(a.probabilities, b.probabilities) < 1e-13);
        }
    }
    SECTION("a user cutoff that leaves too much tail is a convergence failure") {
        ProtocolParams p{50.0, 0.1, 0.2};
        p.n_trunc = 20;
        CHECK_THROWS_AS(count_distribution(p, pi / 2), ConvergenceError);
        p.n_trunc = 150;
        CHECK_NOTHROW(count_distribution(p, pi / 2));
    }
}

TEST_CASE("interaction_channel_kraus", "[multiparticle]") {
    const FockBasis b(4);
    SECTION("gamma_tau = 0 is the identity channel") {
        for (bool sym : {true, false}) {
            const auto ch = interaction_channel_kraus(b, 0.0, sym);
            CHECK((ch.superoperator() - KrausChannel::identity(b).superoperator())
                      .cwiseAbs()
                      .maxCoeff() < 1e-15);
        }
    }
    SECTION("trace preserving") {
        for (double g : {0.01, 0.7, 5.0}) {
            CHECK(interaction_channel_kraus(b, g, true).completeness_defect() < 1e-9);
            CHECK(interaction_channel_kraus(b, g, false).completeness_defect() < 1e-9);
        }
    }
    SECTION("strong interaction sends |1,1> to vacuum") {
        const DensityOperator rho(TwoModeFockState::number_state(b, {1, 1}));
        const auto out = apply_channel(rho, interaction_channel_kraus(b, 40.0, true));
        CHECK_THAT(out.population({0, 0}), WithinAbs(1.0, 1e-8));
    }
    SECTION("|2,0> untouched") {
        const DensityOperator rho(TwoModeFockState::number_state(b, {2, 0}));
        for (double g : {0.1, 3.0}) {
            for (bool sym : {true, false}) {
                const auto out = apply_channel(rho, interaction_channel_kraus(b, g, sym));
                CHECK((out.matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-15);
            }
        }
    }
    SECTION("asymmetric variant leaves mode p alone") {
        const DensityOperator rho(TwoModeFockState::number_state(b, {2, 2}));
        const auto out = apply_channel(rho, interaction_channel_kraus(b, 0.4, false));
        const double q = 1 - std::exp(-0.8);
        CHECK_THAT(out.population({2, 2}), WithinAbs((1 - q) * (1 - q), 1e-14));
        CHECK_THAT(out.population({1, 2}), WithinAbs(2 * q * (1 - q), 1e-14));
        CHECK_THAT(out.population({0, 2}), WithinAbs(q * q, 1e-14));
    }
    CHECK_THROWS_AS(interaction_channel_kraus(b, -1.0, true), ValidationError);
}

TEST_CASE("count_distribution agrees with the truncated Fock-space pipeline",
          "[multiparticle][oracle]") {
    const FockBasis b(14);
    const double eta = 0.6;
    const KrausChannel loss = detection_loss_channel(b, eta);
    for (double g : {0.0, 0.5, 2.0}) {
        const KrausChannel interaction = interaction_channel_kraus(b, g, true);
        for (double n0 : {0.5, 1.0, 2.0}) {
            for (double t : {0.0, pi / 4, pi / 2, pi}) {
                for (auto order : {LossOrder::after_interaction, LossOrder::before_interaction}) {
                    const auto joint = fock_pipeline(b, interaction, loss, order, n0, t);
                    const ProtocolParams p{n0, eta, g, order};
                    CHECK(total_variation(marginal_d(joint),
                                          count_distribution(p, t).probabilities) < 1e-6);
                    CHECK(total_variation(marginal_p(joint),
                                          count_distribution(p, t, Mode::p).probabilities) <
                          1e-6);
                }
            }
        }
    }
}

TEST_CASE("fisher_information", "[multiparticle]") {
    SECTION("no decay gives the Poisson value eta n0 sin^2(theta/2)") {
        for (auto order : {LossOrder::after_interaction, LossOrder::before_interaction}) {
            const ProtocolParams p{20.0, 0.1, 0.0, order};
            for (double t : {0.5, 1.5, 2.5}) {
                CHECK_THAT(fisher_information(p, t),
                           WithinRel(2.0 * std::pow(std::sin(t / 2), 2), 1e-7));
            }
        }
        CHECK_THAT(normalized_fi({20.0, 0.1, 0.0}, pi), WithinAbs(1.0, 1e-6));
    }
    SECTION("matches the analytic derivative of the mixture") {
        // (B scale, D scale, gamma_tau, order): B = n0 after the interaction,
        // B = eta n0 before it.
        const std::vector<std::tuple<double, double, double, LossOrder>> cases{
            {55.0, 1.1, 0.028, LossOrder::after_interaction},
            {55.0, 1.1, 0.3, LossOrder::after_interaction},
            {1.1, 1.1, 0.5, LossOrder::before_interaction},
            {8.0, 2.0, 1.0, LossOrder::after_interaction}};
        for (const auto &[b0, d0, g, order] : cases) {
            const double n0 = order == LossOrder::after_interaction ? b0 : 55.0;
            const ProtocolParams p{n0, d0 / n0, g, order};
            for (double t : {0.6, 1.2, 2.0, 2.8}) {
                CHECK_THAT(fisher_information(p, t), WithinRel(analytic_fi(b0, d0, g, t), 1e-6));
            }
        }
    }
    SECTION("losses after the interaction beat the loss-free bound per photon") {
        const ProtocolParams p{55.0, 0.02, 0.3};
        CHECK(max_normalized_fi(p).value > 1.0);
    }
    SECTION("losses before the interaction never do") {
        for (double g : {0.0, 0.1, 1.0, 10.0}) {
            const ProtocolParams p{55.0, 0.02, g, LossOrder::before_interaction};
            for (int i = 1; i < 60; ++i) {
                CHECK(normalized_fi(p, pi * i / 60) <= 1.0 + 1e-6);
            }
        }
    }
    SECTION("without loss the normalized FI stays at or below 1") {
        for (double n0 : {1.0, 5.0}) {
            for (double g : {0.1, 1.0}) {
                for (int i = 1; i < 30; ++i) {
                    CHECK(normalized_fi({n0, 1.0, g}, pi * i / 30) <= 1.0 + 1e-6);
                }
            }
        }
    }
    SECTION("extra read-out loss never adds information") {
        for (double g : {0.05, 0.5}) {
            for (double t : {0.7, 1.4, 2.3}) {
                double previous = 1e300;
                for (double eta : {0.5, 0.25, 0.1, 0.02}) {
                    const double f = fisher_information({30.0, eta, g}, t);
                    CHECK(f <= previous + 1e-9);
                    previous = f;
                }
            }
        }
    }
    SECTION("normalized FI needs detected photons") {
        CHECK_THROWS_AS(normalized_fi({0.0, 0.5, 0.1}, 1.0), ValidationError);
        CHECK(fisher_information({0.0, 0.5, 0.1}, 1.0) == 0.0);
    }
}

TEST_CASE("fit_exponential", "[multiparticle]") {
    std::vector<double> x, y;
    for (int i = 0; i < 10; ++i) {
        x.push_back(0.1 * i);
        y.push_back(2.5 * std::exp(-3.7 * x.back()));
    }
    const auto fit = fit_exponential(x, y);
    CHECK_THAT(fit.rate, WithinAbs(3.7, 1e-6));
    CHECK_THAT(fit.amplitude, WithinRel(2.5, 1e-9));
    CHECK_THROWS_AS(fit_exponential({1.0}, {1.0}), ValidationError);
    CHECK_THROWS_AS(fit_exponential({1.0, 2.0}, {1.0, -1.0}), ValidationError);
}
