#include "qmicro/state_density.hpp"

#include <numbers>

#include "qmicro/double_double.hpp"
#include <stdexcept>

namespace qmicro {

double truncated_power(double x, int order) {
    if (order < 1) throw std::invalid_argument("truncated_power: order must be >= 1");
    if (x < 0.0) return 0.0;
    double value = 1.0;
    for (int p = 1; p < order; ++p) value *= x / p;
    return value;
}

double normalization(int n) {
    if (n < 1) throw std::invalid_argument("normalization: n must be >= 1");
    double value = 1.0;
    for (int i = 1; i <= n; ++i) value *= std::numbers::pi / i;
    return value;
}

namespace detail {

double bspline_density(const std::vector<double>& t, double E, Side side) {
    const std::size_t count = t.size();
    const int n = static_cast<int>(count) - 1;
    if (E < t.front() || E > t.back()) return 0.0;
    if (side == Side::right && E == t.back()) return 0.0;

    // left: interval j with t[j] < E <= t[j+1], the lower endpoint joining
    // interval 0; right: t[j] <= E < t[j+1]
    std::size_t j = 0;
    if (side == Side::left) {
        while (j + 2 < count && E > t[j + 1]) ++j;
    } else {
        while (j + 2 < count && E >= t[j + 1]) ++j;
    }

    // b[r] holds B_{j-m+1+r, m}; start at order 1
    std::vector<double> b(static_cast<std::size_t>(n) + 1, 0.0);
    b[0] = 1.0;
    for (int m = 2; m <= n; ++m) {
        // new level has m entries for i = j-m+1 .. j (those with i < 0 or i > n-m vanish)
        std::vector<double> next(static_cast<std::size_t>(m), 0.0);
        for (int r = 0; r < m; ++r) {
            const long i = static_cast<long>(j) - m + 1 + r;
            if (i < 0 || i > n - m) continue;
            const auto iu = static_cast<std::size_t>(i);
            // B_{i,m-1} sits at index r-1 of the previous level, B_{i+1,m-1} at r
            const double left = (r >= 1) ? b[static_cast<std::size_t>(r) - 1] : 0.0;
            const double right = (r < m - 1) ? b[static_cast<std::size_t>(r)] : 0.0;
            double value = 0.0;
            if (left != 0.0) value += (E - t[iu]) / (t[iu + m - 1] - t[iu]) * left;
            if (right != 0.0) value += (t[iu + m] - E) / (t[iu + m] - t[iu + 1]) * right;
            next[static_cast<std::size_t>(r)] = value;
        }
        std::copy(next.begin(), next.end(), b.begin());
    }
    // only B_{0,n} survives at the top level; its index is r = n-1-j
    const double spline = b[static_cast<std::size_t>(n - 1) - j];
    return spline * n / (t.back() - t.front());
}

double bspline_density_derivative(const std::vector<double>& t, double E, Side side) {
    const int n = static_cast<int>(t.size()) - 1;
    if (n < 2) return 0.0;
    const std::vector<double> lower(t.begin(), t.end() - 1);
    const std::vector<double> upper(t.begin() + 1, t.end());
    // genuine one-sided limits: a left limit at the first knot is zero
    const auto limit = [&](const std::vector<double>& k) {
        return side == Side::left && E <= k.front() ? 0.0 : bspline_density(k, E, side);
    };
    return n / (t.back() - t.front()) * (limit(lower) - limit(upper));
}

double bspline_cumulative(const std::vector<double>& t, double E, bool upper) {
    const int n = static_cast<int>(t.size()) - 1;
    if (E <= t.front()) return upper ? 1.0 : 0.0;
    if (E >= t.back()) return upper ? 0.0 : 1.0;

    // degree-n splines on t padded to multiplicity n+1 at both ends; the
    // antiderivative has coefficient 1 on every spline starting at t[0] or later
    std::vector<double> tau(static_cast<std::size_t>(n), t.front());
    tau.insert(tau.end(), t.begin(), t.end());
    tau.insert(tau.end(), static_cast<std::size_t>(n), t.back());
    const auto coeff = [&](int j) { return (j >= n) != upper ? 1.0 : 0.0; };

    int l = n;
    while (E >= tau[static_cast<std::size_t>(l) + 1]) ++l;

    std::vector<double> d(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) d[static_cast<std::size_t>(i)] = coeff(i + l - n);
    for (int r = 1; r <= n; ++r) {
        for (int i = n; i >= r; --i) {
            const double lo = tau[static_cast<std::size_t>(i + l - n)];
            const double hi = tau[static_cast<std::size_t>(i + 1 + l - r)];
            const auto iu = static_cast<std::size_t>(i);
            d[iu] = ((hi - E) * d[iu - 1] + (E - lo) * d[iu]) / (hi - lo);
        }
    }
    return d[static_cast<std::size_t>(n)];
}

}  // namespace detail

double cumulative_fraction(const Spectrum& s, double E, bool upper) {
    return detail::bspline_cumulative(s.levels(), E, upper);
}

DirectEvaluation omega_direct(const Spectrum& s, double E) {
    // Terms and their sum carried in double-double: the alternating sum cancels
    // by many orders of magnitude near the support edges.
    const std::vector<DoubleDouble> levels(s.levels().begin(), s.levels().end());
    const double reduced = static_cast<double>(detail::closed_form_sum<DoubleDouble>(levels, DoubleDouble(E)));
    double pi_n = 1.0;
    for (int i = 0; i < s.n(); ++i) pi_n *= std::numbers::pi;
    return {reduced * pi_n, s.n() > kDirectSumCap};
}

double omega_stable(const Spectrum& s, double E) {
    return normalization(s.n()) * detail::bspline_density(s.levels(), E);
}

namespace {

using Poly = std::vector<double>;

// (a + b u) * p
Poly mul_linear(const Poly& p, double a, double b) {
    Poly out(p.size() + 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        out[i] += a * p[i];
        out[i + 1] += b * p[i];
    }
    return out;
}

void add_into(Poly& acc, const Poly& p) {
    if (acc.size() < p.size()) acc.resize(p.size(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) acc[i] += p[i];
}

// Local-coordinate coefficients of the normalized B-spline on (t[j], t[j+1]].
Poly compile_piece(const std::vector<double>& t, std::size_t j) {
    const int n = static_cast<int>(t.size()) - 1;
    const double h = t[j + 1] - t[j];
    std::vector<Poly> b{Poly{1.0}};
    for (int m = 2; m <= n; ++m) {
        std::vector<Poly> next(static_cast<std::size_t>(m));
        for (int r = 0; r < m; ++r) {
            const long i = static_cast<long>(j) - m + 1 + r;
            Poly value;
            if (i < 0 || i > n - m) {
                next[static_cast<std::size_t>(r)] = Poly{0.0};
                continue;
            }
            const auto iu = static_cast<std::size_t>(i);
            if (r >= 1) {
                const double d = t[iu + m - 1] - t[iu];
                add_into(value, mul_linear(b[static_cast<std::size_t>(r) - 1], (t[j] - t[iu]) / d, h / d));
            }
            if (r < m - 1) {
                const double d = t[iu + m] - t[iu + 1];
                add_into(value, mul_linear(b[static_cast<std::size_t>(r)], (t[iu + m] - t[j]) / d, -h / d));
            }
            next[static_cast<std::size_t>(r)] = value.empty() ? Poly{0.0} : std::move(value);
        }
        b = std::move(next);
    }
    Poly out = b[static_cast<std::size_t>(n - 1) - j];
    out.resize(static_cast<std::size_t>(n), 0.0);
    const double scale = n / (t.back() - t.front());
    for (auto& c : out) c *= scale;
    return out;
}

}  // namespace

StateDensity build_density(const Spectrum& s) {
    const auto& t = s.levels();
    std::vector<std::vector<double>> pieces;
    pieces.reserve(t.size() - 1);
    for (std::size_t j = 0; j + 1 < t.size(); ++j) pieces.push_back(compile_piece(t, j));

    StateDensity d{s, {}, normalization(s.n()), PiecewisePoly(t, std::move(pieces))};
    d.omega = d.mu.scaled(d.v_gamma);
    return d;
}

double eval_mu(const StateDensity& d, double E) { return d.mu(E); }

double eval_omega(const StateDensity& d, double E) { return d.omega(E); }

double eval_w(const StateDensity& d, double E) { return d.v_gamma * d.mu.integral_to(E); }

double eval_mu_derivative(const StateDensity& d, double E, Side side) {
    return d.mu.derivative(E, side);
}

}  // namespace qmicro
