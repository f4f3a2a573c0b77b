#include "qmicro/thermo.hpp"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "qmicro/errors.hpp"

namespace qmicro {
namespace {

TEST(Entropy, Examples) {
    const auto two = build_density(make_linear(2));
    for (double E : {0.1, 0.5, 0.9}) EXPECT_NEAR(entropy(two, E), std::log(std::numbers::pi), 1e-15);
    const auto three = build_density(make_linear(3));
    EXPECT_NEAR(entropy(three, 1.0), std::log(std::numbers::pi * std::numbers::pi / 2), 1e-14);
    EXPECT_NEAR(entropy(three, 0.5), entropy(three, 1.5), 1e-14);
    EXPECT_THROW(entropy(three, 0.0), DomainError);
    EXPECT_THROW(entropy(three, 2.0), DomainError);
    EXPECT_THROW(entropy(three, 3.0), DomainError);
}

TEST(Beta, Examples) {
    const auto three = build_density(make_linear(3));
    EXPECT_NEAR(beta_of_E(three, 0.5), 2.0, 1e-13);
    EXPECT_NEAR(beta_of_E(three, 1.5), -2.0, 1e-13);
    const auto peak = beta_sample(three, 1.0);
    EXPECT_TRUE(peak.at_knot);
    EXPECT_NEAR(peak.value, 0.0, 1e-14);
    EXPECT_FALSE(beta_sample(three, 0.7).at_knot);
    EXPECT_THROW(beta_of_E(three, 0.0), DomainError);

    const auto rescaled = build_density(rescale_to_unit(make_linear(8)));
    EXPECT_NEAR(beta_of_E(rescaled, 0.5), 0.0, 1e-10);
}

TEST(Beta, LinearSpectrumAntisymmetric) {
    for (int N : {4, 7, 10, 12}) {
        const auto d = build_density(rescale_to_unit(make_linear(N)));
        for (double x = 0.011; x < 0.5; x += 0.037) {
            EXPECT_NEAR(beta_of_E(d, 0.5 + x), -beta_of_E(d, 0.5 - x), 1e-10 * std::max(1.0, std::abs(beta_of_E(d, 0.5 - x))))
                << N << " " << x;
        }
    }
}

TEST(Peak, Examples) {
    for (int N = 3; N <= 12; ++N) {
        EXPECT_NEAR(peak_energy(build_density(rescale_to_unit(make_linear(N)))), 0.5, 1e-9) << N;
    }
    // frozen from a 50-digit bisection on the closed-form derivative
    EXPECT_NEAR(peak_energy(build_density(rescale_to_unit(make_quadratic(11)))), 0.330601473556525, 1e-9);
    EXPECT_NEAR(find_peak(build_density(rescale_to_unit(make_quadratic(11)))).mu, 4.192287220614359, 1e-9);
    const double root_peak = peak_energy(build_density(rescale_to_unit(make_inverse_power(6, 2))));
    EXPECT_NEAR(root_peak, 0.663515491824542, 1e-9);
    EXPECT_NEAR(root_peak, 1.0 - 1.0 / 3.0, 0.07);
    EXPECT_THROW(peak_energy(build_density(make_linear(2))), DomainError);
}

TEST(Peak, SuiteSpectraAreUnimodal) {
    for (int N = 3; N <= 12; ++N) EXPECT_TRUE(is_unimodal(build_density(make_linear(N))));
    for (int k = 1; k <= 10; ++k) {
        EXPECT_TRUE(is_unimodal(build_density(rescale_to_unit(make_power(6, k)))));
        EXPECT_TRUE(is_unimodal(build_density(rescale_to_unit(make_inverse_power(6, k)))));
    }
}

TEST(EnergyOfT, ThreeLevelInversion) {
    const auto three = build_density(make_linear(3));
    const double E = energy_of_T(three, 0.5);
    EXPECT_NEAR(E, 0.5, 1e-12);  // beta = 1/E on the rising edge
    EXPECT_NEAR(beta_of_E(three, E), 2.0, 1e-10);
}

TEST(EnergyOfT, Asymptotes) {
    const auto linear = build_density(rescale_to_unit(make_linear(10)));
    EXPECT_NEAR(energy_of_T(linear, 1e4), 0.5, 1e-3);
    EXPECT_LE(energy_of_T(linear, 1e4), 0.5);
    EXPECT_LT(energy_of_T(linear, 1e-3), 0.01);

    const auto quad = build_density(rescale_to_unit(make_quadratic(11)));
    EXPECT_NEAR(energy_of_T(quad, 1e4), 1.0 / 3.0, 0.05);
}

TEST(EnergyOfT, RoundTripAndMonotone) {
    for (const auto& s : {make_linear(5), make_linear(10), make_quadratic(8), make_power(6, 3), make_inverse_power(6, 3)}) {
        const auto d = build_density(rescale_to_unit(s));
        double previous = -1.0;
        for (int i = 0; i <= 60; ++i) {
            const double T = std::pow(10.0, -2.0 + 6.0 * i / 60.0);
            const double E = energy_of_T(d, T);
            EXPECT_LT(std::abs(1.0 / beta_of_E(d, E) - T) / T, 1e-8) << "n=" << s.n() << " T=" << T;
            EXPECT_GT(E, previous);
            previous = E;
        }
    }
}

TEST(EnergyOfT, NegativeBranch) {
    const auto d = build_density(rescale_to_unit(make_linear(6)));
    const double E = energy_of_T(d, -0.05, Branch::negative);
    EXPECT_GT(E, 0.5);
    EXPECT_NEAR(1.0 / beta_of_E(d, E), -0.05, 1e-9);
    EXPECT_NEAR(energy_of_T(d, -1e4, Branch::negative), 0.5, 1e-3);
    EXPECT_THROW(energy_of_T(d, 0.1, Branch::negative), std::invalid_argument);
    EXPECT_THROW(energy_of_T(d, -0.1), std::invalid_argument);
}

TEST(ThermoCurve, Branches) {
    const auto d = build_density(rescale_to_unit(make_linear(6)));
    const auto pos = thermo_curve(d, 0.01, 100.0, 25);
    ASSERT_EQ(pos.samples.size(), 25u);
    EXPECT_TRUE(pos.unimodal);
    EXPECT_NEAR(pos.E_peak, 0.5, 1e-9);
    for (std::size_t i = 1; i < pos.samples.size(); ++i) {
        EXPECT_GT(pos.samples[i].E, pos.samples[i - 1].E);
        EXPECT_GT(pos.samples[i].beta, 0.0);
        EXPECT_LT(pos.samples[i].E, pos.E_peak);
    }
    const auto neg = thermo_curve(d, 0.01, 100.0, 25, Branch::negative);
    for (const auto& s : neg.samples) {
        EXPECT_LT(s.T, 0.0);
        EXPECT_LT(s.beta, 0.0);
        EXPECT_GT(s.E, neg.E_peak);
    }
    EXPECT_THROW(thermo_curve(d, 0.0, 1.0, 5), std::invalid_argument);
}

}  // namespace
}  // namespace qmicro
