#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "qmicro/piecewise.hpp"
#include "qmicro/spectrum.hpp"

namespace qmicro {

/// Largest n for which the alternating closed-form sum is trusted in double.
inline constexpr int kDirectSumCap = 15;

/// n-fold repeated integral of the delta function: 0 for x < 0,
/// x^(order-1)/(order-1)! for x >= 0.
double truncated_power(double x, int order);

/// Total phase-space volume pi^n / n! of an (n+1)-level system.
double normalization(int n);

namespace detail {

/// Neumaier-compensated accumulator; works for any field type with abs().
template <typename Real>
class CompensatedSum {
public:
    void add(const Real& x) {
        using std::abs;
        const Real t = sum_ + x;
        if (abs(sum_) >= abs(x)) {
            carry_ += (sum_ - t) + x;
        } else {
            carry_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    Real value() const { return sum_ + carry_; }

private:
    Real sum_ = Real(0);
    Real carry_ = Real(0);
};

/// (-1)^n sum_k trunc_n(E_k - E) prod_{l != k} 1/(E_l - E_k), i.e. Omega / pi^n.
///
/// The sum over levels with E_k >= E equals minus the same sum over E_k < E
/// (the full n-th divided difference of a degree n-1 polynomial is zero), so
/// both tails are formed and the one with less cancellation is returned.
/// Each tail inherits the cancellation of the alternating sum; instantiate
/// with a wide type to get a reference value for large n.
template <typename Real>
Real closed_form_sum(const std::vector<Real>& levels, const Real& E) {
    using std::abs;
    const std::size_t count = levels.size();
    const int n = static_cast<int>(count) - 1;
    if (E < levels.front() || E > levels.back()) return Real(0);
    Real factorial(1);
    for (int i = 2; i <= n - 1; ++i) factorial *= Real(i);

    CompensatedSum<Real> active, inactive;
    Real active_mass(0), inactive_mass(0);
    for (std::size_t k = 0; k < count; ++k) {
        const Real x = levels[k] - E;
        Real term(1);
        for (int p = 0; p < n - 1; ++p) term *= x;
        term /= factorial;
        for (std::size_t l = 0; l < count; ++l) {
            if (l != k) term /= (levels[l] - levels[k]);
        }
        if (x >= Real(0)) {
            active.add(term);
            active_mass += abs(term);
        } else {
            inactive.add(term);
            inactive_mass += abs(term);
        }
    }
    const Real tail = active_mass <= inactive_mass ? active.value() : -inactive.value();
    return (n % 2 == 0) ? tail : -tail;
}

/// Normalized B-spline over `knots` (integrates to one) by the Cox-de Boor
/// triangle. Every intermediate is a convex combination of nonnegative terms.
/// At an interior knot `side` picks the one-sided limit; it matters only for
/// low orders, where the spline is not continuous there.
double bspline_density(const std::vector<double>& knots, double E, Side side = Side::left);

/// Derivative of bspline_density as the difference of the two normalized
/// splines one order lower. Neither term cancels near the support ends.
double bspline_density_derivative(const std::vector<double>& knots, double E, Side side = Side::left);

/// Integral of the normalized B-spline from knots.front() to E (or from E to
/// knots.back() when `upper`), by de Boor's algorithm on clamped knots with
/// 0/1 coefficients. Both tails keep full relative accuracy.
double bspline_cumulative(const std::vector<double>& knots, double E, bool upper = false);

}  // namespace detail

struct DirectEvaluation {
    double value = 0.0;
    /// Set when n exceeds kDirectSumCap and the alternating sum is unreliable.
    bool precision_warning = false;
};

/// Omega(E) straight from the closed-form alternating sum, with every term and
/// the compensated sum carried in double-double arithmetic.
DirectEvaluation omega_direct(const Spectrum& s, double E);

/// Omega(E) = V_Gamma * M(E), M the normalized B-spline on the levels.
double omega_stable(const Spectrum& s, double E);

/// Share of phase space with energy expectation <= E, or >= E when `upper`.
double cumulative_fraction(const Spectrum& s, double E, bool upper = false);

/// Unnormalized and normalized density of states compiled to piecewise form.
struct StateDensity {
    Spectrum spectrum;
    PiecewisePoly omega;
    double v_gamma = 0.0;
    PiecewisePoly mu;
};

StateDensity build_density(const Spectrum& s);

double eval_mu(const StateDensity& d, double E);
double eval_omega(const StateDensity& d, double E);
/// Phase-space volume of states with energy expectation <= E.
double eval_w(const StateDensity& d, double E);
/// Exact derivative of the active piece; at knots the `side` limit is used.
double eval_mu_derivative(const StateDensity& d, double E, Side side = Side::left);

}  // namespace qmicro
