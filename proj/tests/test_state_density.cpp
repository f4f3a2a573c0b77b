#include "qmicro/state_density.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "qmicro/errors.hpp"
#include "qmicro/mc_oracle.hpp"

namespace qmicro {
namespace {

using Wide = boost::multiprecision::cpp_bin_float_100;
constexpr double kPi = std::numbers::pi;

// Closed-form alternating sum carried out in 100-digit arithmetic.
double wide_omega(const Spectrum& s, double E) {
    std::vector<Wide> levels(s.levels().begin(), s.levels().end());
    Wide value = detail::closed_form_sum<Wide>(levels, Wide(E));
    for (int i = 0; i < s.n(); ++i) value *= boost::math::constants::pi<Wide>();
    return static_cast<double>(value);
}

// Linear family, unit spacing: mu(E) = (-1)^n n sum_{k >= E} (-1)^k (k-E)^{n-1} / (k!(n-k)!).
long double linear_family_mu(int n, long double E) {
    long double acc = 0.0L;
    for (int k = 0; k <= n; ++k) {
        if (k < E) continue;
        acc += ((k % 2) ? -1.0L : 1.0L) * std::pow(k - E, n - 1) / (std::tgamma(k + 1.0L) * std::tgamma(n - k + 1.0L));
    }
    return ((n % 2) ? -1.0L : 1.0L) * n * acc;
}

// Quadratic family E_k = k^2: mu(E) = 2n(-1)^n sum_{k^2 >= E} (-1)^k (k^2-E)^{n-1} / ((n+k)!(n-k)!),
// valid for E > 0 (the k = 0 term of the product identity is off by a factor of two).
long double quadratic_family_mu(int n, long double E) {
    long double acc = 0.0L;
    for (int k = 1; k <= n; ++k) {
        const long double x = static_cast<long double>(k) * k - E;
        if (x < 0) continue;
        acc += ((k % 2) ? -1.0L : 1.0L) * std::pow(x, n - 1) / (std::tgamma(n + k + 1.0L) * std::tgamma(n - k + 1.0L));
    }
    return 2.0L * n * ((n % 2) ? -1.0L : 1.0L) * acc;
}

std::vector<Spectrum> suite_spectra() {
    std::vector<Spectrum> out;
    for (int N = 2; N <= 12; ++N) out.push_back(make_linear(N));
    for (int N = 4; N <= 11; ++N) out.push_back(make_quadratic(N));
    for (int k = 1; k <= 10; ++k) {
        out.push_back(make_power(6, k));
        out.push_back(make_inverse_power(6, k));
    }
    return out;
}

TEST(TruncatedPower, Branches) {
    EXPECT_EQ(truncated_power(-1.0, 3), 0.0);
    EXPECT_DOUBLE_EQ(truncated_power(2.0, 3), 2.0);
    EXPECT_EQ(truncated_power(0.0, 1), 1.0);
    EXPECT_DOUBLE_EQ(truncated_power(1.5, 4), 1.5 * 1.5 * 1.5 / 6.0);
    EXPECT_THROW(truncated_power(1.0, 0), std::invalid_argument);
}

TEST(Normalization, PhaseSpaceVolume) {
    EXPECT_DOUBLE_EQ(normalization(1), kPi);
    EXPECT_DOUBLE_EQ(normalization(2), kPi * kPi / 2);
    EXPECT_NEAR(normalization(5), std::pow(kPi, 5) / 120, 1e-14 * normalization(5));
    EXPECT_THROW(normalization(0), std::invalid_argument);
}

TEST(OmegaDirect, Examples) {
    EXPECT_NEAR(omega_direct(make_linear(2), 0.5).value, kPi, 1e-15);
    // mu(1) = 1 on {0,1,2} so Omega(1) = V_Gamma = pi^2/2
    EXPECT_NEAR(omega_direct(make_linear(3), 1.0).value, kPi * kPi / 2, 1e-14);
    EXPECT_EQ(omega_direct(make_linear(4), -0.5).value, 0.0);
    EXPECT_FALSE(omega_direct(make_linear(16), 3.0).precision_warning);
    EXPECT_TRUE(omega_direct(make_linear(17), 3.0).precision_warning);
}

TEST(OmegaStable, Examples) {
    const auto three = make_linear(3);
    EXPECT_NEAR(omega_stable(three, 0.5), omega_direct(three, 0.5).value, 1e-14);
    EXPECT_DOUBLE_EQ(omega_stable(make_linear(2), 0.25), kPi);
    EXPECT_DOUBLE_EQ(omega_stable(make_linear(2), 0.0), kPi);
    EXPECT_EQ(omega_stable(three, -0.1), 0.0);
    EXPECT_EQ(omega_stable(three, 2.1), 0.0);
}

TEST(OmegaStable, AgreesWithDirectPathUpToCap) {
    std::mt19937_64 gen(20261015);
    for (const auto& s : suite_spectra()) {
        if (s.n() > kDirectSumCap) continue;
        std::uniform_real_distribution<double> pick(s.e_min(), s.e_max());
        for (int i = 0; i < 100; ++i) {
            const double E = pick(gen);
            const double stable = omega_stable(s, E);
            const double direct = omega_direct(s, E).value;
            if (stable == 0.0) continue;
            EXPECT_LT(std::abs(direct - stable) / stable, 1e-10) << "n=" << s.n() << " E=" << E;
        }
    }
}

TEST(OmegaStable, MatchesWideReferenceWhereDoubleDirectFails) {
    const auto s = make_linear(33);
    const double mid = 0.5 * (s.e_min() + s.e_max());
    EXPECT_LT(std::abs(omega_stable(s, mid) - wide_omega(s, mid)) / wide_omega(s, mid), 1e-12);
    // away from the centre both tails of the alternating sum cancel by ~1e27
    const double E = 3.3;
    const double reference = wide_omega(s, E);
    const double stable = omega_stable(s, E);
    const auto direct = omega_direct(s, E);
    double plain = 0.0;  // the active tail alone, in plain doubles
    {
        std::vector<double> t = s.levels();
        double fact = 1.0;
        for (int i = 2; i <= s.n() - 1; ++i) fact *= i;
        for (std::size_t k = 0; k < t.size(); ++k) {
            if (t[k] < E) continue;
            double term = std::pow(t[k] - E, s.n() - 1) / fact;
            for (std::size_t l = 0; l < t.size(); ++l) {
                if (l != k) term /= t[l] - t[k];
            }
            plain += term;
        }
    }
    for (int i = 0; i < s.n(); ++i) plain *= kPi;
    ASSERT_GT(reference, 0.0);
    EXPECT_TRUE(std::isfinite(stable));
    EXPECT_GT(stable, 0.0);
    EXPECT_LT(std::abs(stable - reference) / reference, 1e-12);
    EXPECT_TRUE(direct.precision_warning);
    // the alternating sum in plain doubles has lost essentially every digit
    EXPECT_GT(std::abs(plain - reference), 1e-3 * reference);
}

TEST(OmegaStable, AccurateTo64Levels) {
    std::mt19937_64 gen(7);
    for (const auto& s : {make_linear(65), rescale_to_unit(make_quadratic(40)), make_power(30, 1.5)}) {
        std::uniform_real_distribution<double> pick(s.e_min(), s.e_max());
        const double peak_scale = omega_stable(s, 0.5 * (s.e_min() + s.e_max()));
        for (int i = 0; i < 20; ++i) {
            const double E = pick(gen);
            const double reference = wide_omega(s, E);
            const double stable = omega_stable(s, E);
            EXPECT_NEAR(stable, reference, 1e-11 * std::max(reference, 1e-6 * peak_scale)) << "n=" << s.n();
        }
    }
}

TEST(BuildDensity, TwoLevelIsUniform) {
    const auto d = build_density(make_linear(2));
    for (double E : {0.0, 0.3, 0.7, 1.0}) EXPECT_DOUBLE_EQ(eval_mu(d, E), 1.0);
    EXPECT_EQ(eval_mu(d, 1.2), 0.0);
}

TEST(BuildDensity, ThreeLevelTriangle) {
    const auto d = build_density(make_linear(3));
    EXPECT_NEAR(eval_mu(d, 0.5), 0.5, 1e-15);
    EXPECT_NEAR(eval_mu(d, 1.0), 1.0, 1e-15);
    EXPECT_NEAR(eval_mu(d, 1.5), 0.5, 1e-15);
    EXPECT_EQ(eval_mu(d, 2.5), 0.0);
    EXPECT_EQ(eval_mu(d, 0.0), 0.0);
    EXPECT_EQ(eval_mu(d, 2.0), 0.0);
    for (double E = 0.05; E < 2.0; E += 0.05) {
        EXPECT_NEAR(eval_mu(d, E), E <= 1.0 ? E : 2.0 - E, 1e-14);
    }
}

TEST(BuildDensity, MatchesLinearFamilyFormula) {
    for (int N = 3; N <= 12; ++N) {
        const int n = N - 1;
        const auto d = build_density(make_linear(N));
        for (int i = 1; i < 40; ++i) {
            const double E = n * (i + 0.137) / 40.5;
            EXPECT_NEAR(eval_mu(d, E), static_cast<double>(linear_family_mu(n, E)), 1e-10) << N << " " << E;
        }
    }
}

TEST(BuildDensity, MatchesQuadraticFamilyFormula) {
    for (int N = 4; N <= 8; ++N) {
        const int n = N - 1;
        const auto d = build_density(make_quadratic(N));
        for (int i = 1; i <= 20; ++i) {
            const double E = n * n * (i - 0.31) / 20.0;
            EXPECT_NEAR(eval_mu(d, E), static_cast<double>(quadratic_family_mu(n, E)), 1e-11) << N << " " << E;
        }
    }
}

TEST(BuildDensity, PiecesMatchStablePath) {
    for (const auto& s : {make_linear(40), make_linear(65), rescale_to_unit(make_quadratic(30)),
                          rescale_to_unit(make_power(6, 10))}) {
        const auto d = build_density(s);
        const double scale = d.v_gamma;
        for (int i = 0; i <= 997; ++i) {
            const double E = s.e_min() + s.width() * i / 997.0;
            const double reference = omega_stable(s, E);
            EXPECT_NEAR(eval_omega(d, E), reference, 1e-9 * std::max(reference, 1e-3 * scale))
                << "n=" << s.n() << " E=" << E;
        }
    }
}

TEST(BuildDensity, NormalizedUpTo64Levels) {
    auto spectra = suite_spectra();
    for (int N : {20, 33, 48, 65}) spectra.push_back(make_linear(N));
    spectra.push_back(rescale_to_unit(make_quadratic(40)));
    for (const auto& s : spectra) {
        const auto d = build_density(s);
        EXPECT_LT(std::abs(d.mu.total_integral() - 1.0), 1e-9) << "n=" << s.n();
        EXPECT_NEAR(eval_w(d, s.e_max()), d.v_gamma, 1e-9 * d.v_gamma);
        EXPECT_EQ(eval_w(d, s.e_min()), 0.0);
    }
}

TEST(BuildDensity, ContinuousAndNonnegative) {
    auto spectra = suite_spectra();
    spectra.push_back(make_linear(65));
    for (const auto& s : spectra) {
        if (s.n() < 2) continue;
        const auto d = build_density(s);
        double max_mu = 0.0;
        for (std::size_t p = 0; p < d.mu.num_pieces(); ++p) max_mu = std::max(max_mu, d.mu.eval_local(p, 0.5));
        for (std::size_t p = 0; p + 1 < d.mu.num_pieces(); ++p) {
            const double left = d.mu.eval_local(p, 1.0);
            const double right = d.mu.eval_local(p + 1, 0.0);
            EXPECT_NEAR(left, right, 1e-10 * max_mu) << "n=" << s.n() << " knot " << p + 1;
            if (s.n() >= 3) {
                const double knot = s.levels()[p + 1];
                const double dl = d.mu.derivative(knot, Side::left);
                const double dr = d.mu.derivative(knot, Side::right);
                EXPECT_NEAR(dl, dr, 1e-8 * max_mu / s.width() * s.n()) << "n=" << s.n() << " knot " << p + 1;
            }
        }
        for (int i = 0; i <= 500; ++i) {
            EXPECT_GE(eval_mu(d, s.e_min() + s.width() * i / 500.0), -1e-12 * max_mu);
        }
        EXPECT_EQ(eval_mu(d, s.e_min() - 1e-9), 0.0);
        EXPECT_EQ(eval_mu(d, s.e_max() + 1e-9), 0.0);
    }
}

TEST(BuildDensity, LinearSpectrumSymmetric) {
    for (int N = 3; N <= 20; ++N) {
        const auto d = build_density(make_linear(N));
        const double mid = 0.5 * (N - 1);
        for (double x = 0.013; x < mid; x += 0.071) {
            EXPECT_NEAR(eval_mu(d, mid + x), eval_mu(d, mid - x), 1e-12) << N;
        }
    }
}

TEST(EvalW, Examples) {
    EXPECT_DOUBLE_EQ(eval_w(build_density(make_linear(2)), 1.0), kPi);
    const auto three = build_density(make_linear(3));
    EXPECT_NEAR(eval_w(three, 1.0), kPi * kPi / 4, 1e-14);
    EXPECT_EQ(eval_w(three, 0.0), 0.0);
    // dW/dE = Omega
    for (double E : {0.3, 0.9, 1.4}) {
        const double h = 1e-6;
        EXPECT_NEAR((eval_w(three, E + h) - eval_w(three, E - h)) / (2 * h), eval_omega(three, E), 1e-8);
    }
}

TEST(EvalMuDerivative, Examples) {
    const auto three = build_density(make_linear(3));
    EXPECT_NEAR(eval_mu_derivative(three, 0.5), 1.0, 1e-14);
    EXPECT_NEAR(eval_mu_derivative(three, 1.5), -1.0, 1e-14);
    EXPECT_NEAR(eval_mu_derivative(three, 1.0, Side::left), 1.0, 1e-14);
    EXPECT_NEAR(eval_mu_derivative(three, 1.0, Side::right), -1.0, 1e-14);
    EXPECT_NEAR(eval_mu_derivative(build_density(make_linear(2)), 0.5), 0.0, 1e-15);
}

TEST(BuildDensity, RejectsDegenerateInput) {
    EXPECT_THROW(build_density(Spectrum::custom({0.0, 0.0, 1.0})), DegenerateSpectrumError);
}

TEST(BuildDensity, AgreesWithSimplexHistogram) {
    // Histogram of simplex-uniform convex combinations of {0,1,2} against the triangle.
    const auto s = make_linear(3);
    const auto d = build_density(s);
    const auto batch = sample_energies(s, 400000, 99);
    const int bins = 20;
    std::vector<double> counts(bins, 0.0);
    for (double E : batch.energies) counts[std::min(bins - 1, static_cast<int>(E / 2.0 * bins))] += 1.0;
    for (int b = 0; b < bins; ++b) {
        const double lo = 2.0 * b / bins, hi = 2.0 * (b + 1) / bins;
        const double expected = (d.mu.integral_to(hi) - d.mu.integral_to(lo)) * batch.count;
        EXPECT_NEAR(counts[b], expected, 5.0 * std::sqrt(expected)) << "bin " << b;
    }
}

}  // namespace
}  // namespace qmicro

namespace qmicro {
namespace {

// On the outermost intervals only one truncated power survives.
double edge_product(const std::vector<double>& t, bool upper) {
    double p = 1.0;
    const double end = upper ? t.back() : t.front();
    for (double x : t) {
        if (x != end) p *= std::abs(x - end);
    }
    return p;
}

TEST(CumulativeFraction, TriangleAndTails) {
    const auto three = make_linear(3);
    EXPECT_NEAR(cumulative_fraction(three, 0.5), 0.125, 1e-16);
    EXPECT_NEAR(cumulative_fraction(three, 1.5, true), 0.125, 1e-16);
    EXPECT_EQ(cumulative_fraction(three, -1.0), 0.0);
    EXPECT_EQ(cumulative_fraction(three, 2.0), 1.0);
    EXPECT_EQ(cumulative_fraction(three, 2.0, true), 0.0);

    for (const auto& s : {make_linear(12), make_quadratic(9), make_power(8, 3), make_inverse_power(7, 2)}) {
        const auto& t = s.levels();
        const int n = s.n();
        for (double frac : {1e-6, 1e-3, 0.3}) {
            const double lo = t[0] + frac * (t[1] - t[0]);
            const double hi = t[n] - frac * (t[n] - t[n - 1]);
            const double want_lo = std::pow(lo - t[0], n) / edge_product(t, false);
            const double want_hi = std::pow(t[n] - hi, n) / edge_product(t, true);
            EXPECT_LT(std::abs(cumulative_fraction(s, lo) - want_lo) / want_lo, 1e-12) << n << " " << frac;
            EXPECT_LT(std::abs(cumulative_fraction(s, hi, true) - want_hi) / want_hi, 1e-12) << n << " " << frac;
        }
    }
}

TEST(CumulativeFraction, MatchesPiecewiseVolume) {
    for (const auto& s : {make_linear(6), make_quadratic(5), Spectrum::custom({-2.0, 0.1, 0.3, 5.0})}) {
        const auto d = build_density(s);
        for (int i = 0; i <= 50; ++i) {
            const double E = s.e_min() + s.width() * i / 50.0;
            const double lower = cumulative_fraction(s, E);
            EXPECT_NEAR(lower, eval_w(d, E) / d.v_gamma, 1e-12);
            EXPECT_NEAR(lower + cumulative_fraction(s, E, true), 1.0, 1e-14);
        }
    }
}

TEST(BsplineDerivative, MatchesPiecesAndEdges) {
    const auto s = make_linear(10);
    const auto d = build_density(s);
    for (double E = 0.3; E < 9.0; E += 0.71) {
        EXPECT_NEAR(detail::bspline_density_derivative(s.levels(), E), eval_mu_derivative(d, E), 1e-12);
    }
    // one-sided limits of the triangle at its peak
    EXPECT_DOUBLE_EQ(detail::bspline_density_derivative({0.0, 1.0, 2.0}, 1.0, Side::left), 1.0);
    EXPECT_DOUBLE_EQ(detail::bspline_density_derivative({0.0, 1.0, 2.0}, 1.0, Side::right), -1.0);
    // relative accuracy next to the upper end, where mu' = -n(n-1)(E_max - E)^(n-2)/prod
    const auto& t = s.levels();
    const int n = s.n();
    const double E = t[n] - 1e-4;
    const double want = -n * (n - 1) * std::pow(t[n] - E, n - 2) / edge_product(t, true);
    EXPECT_LT(std::abs(detail::bspline_density_derivative(t, E) - want) / std::abs(want), 1e-12);
}

}  // namespace
}  // namespace qmicro
