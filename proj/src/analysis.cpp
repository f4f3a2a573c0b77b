#include "qmicro/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qmicro/errors.hpp"
#include "qmicro/parallel.hpp"
#include "qmicro/thermo.hpp"

namespace qmicro {

namespace {

GaussRule make_gauss_legendre(int order) {
    GaussRule rule;
    rule.nodes.resize(static_cast<std::size_t>(order));
    rule.weights.resize(static_cast<std::size_t>(order));
    for (int i = 0; i < order; ++i) {
        // Newton on P_order from the Chebyshev-like initial guess
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= order; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes[static_cast<std::size_t>(i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

template <typename F>
double gauss(const F& f, double a, double b) {
    const auto& rule = gauss_legendre_64();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return acc * half;
}

constexpr double kQuadTol = 1e-10;
constexpr int kMaxDepth = 40;
constexpr int kEndpointSplits = 40;

template <typename F>
double adaptive(const F& f, double a, double b, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double left = gauss(f, a, m);
    const double right = gauss(f, m, b);
    if (std::abs(left + right - whole) <= tol) return left + right;
    if (depth >= kMaxDepth) throw NumericalError("hellinger: quadrature did not converge");
    return adaptive(f, a, m, left, 0.5 * tol, depth + 1) + adaptive(f, m, b, right, 0.5 * tol, depth + 1);
}

// Splits [a, b] geometrically toward whichever ends are support endpoints,
// where the square root of the density has an unbounded derivative.
std::vector<double> breakpoints(double a, double b, bool split_left, bool split_right) {
    std::vector<double> pts{a, b};
    const double w = b - a;
    if (split_left && split_right) pts.push_back(0.5 * (a + b));
    const double reach = (split_left && split_right) ? 0.5 * w : w;
    for (int k = 1; k <= kEndpointSplits; ++k) {
        const double off = reach * std::ldexp(1.0, -k);
        if (split_left) pts.push_back(a + off);
        if (split_right) pts.push_back(b - off);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

}  // namespace

const GaussRule& gauss_legendre_64() {
    static const GaussRule rule = make_gauss_legendre(64);
    return rule;
}

double hellinger(const StateDensity& a, const StateDensity& b) {
    if (a.mu.lower() != b.mu.lower() || a.mu.upper() != b.mu.upper()) {
        throw std::invalid_argument("hellinger: densities live on different supports");
    }
    std::vector<double> knots = a.mu.knots();
    knots.insert(knots.end(), b.mu.knots().begin(), b.mu.knots().end());
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    auto integrand = [&](double E) { return std::sqrt(std::max(0.0, a.mu(E)) * std::max(0.0, b.mu(E))); };
    const double lower = knots.front();
    const double upper = knots.back();
    const double span = upper - lower;

    double overlap = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const auto pts = breakpoints(knots[i], knots[i + 1], knots[i] == lower, knots[i + 1] == upper);
        for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
            const double lo = pts[j], hi = pts[j + 1];
            const double tol = kQuadTol * (hi - lo) / span;
            overlap += adaptive(integrand, lo, hi, gauss(integrand, lo, hi), tol, 0);
        }
    }
    return std::sqrt(std::max(0.0, 2.0 - 2.0 * overlap));
}

HellingerReport convergence_study(int k_min, int k_max) {
    if (k_min < 2 || k_max <= k_min || k_max > 64) {
        throw std::invalid_argument("convergence_study: need 2 <= k_min < k_max <= 64");
    }
    const std::size_t count = static_cast<std::size_t>(k_max - k_min + 1);
    HellingerReport report;
    report.pairs.resize(count);
    parallel_for(count, [&](std::size_t i) {
        const int k = k_min + static_cast<int>(i);
        const auto small = build_density(rescale_to_unit(make_linear(k)));
        const auto large = build_density(rescale_to_unit(make_linear(k + 1)));
        report.pairs[i] = {k, hellinger(small, large)};
    });

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(count);
    for (const auto& [k, dist] : report.pairs) {
        const double x = std::log(static_cast<double>(k));
        const double y = std::log(dist);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    report.fitted_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    report.intercept = (sy - report.fitted_slope * sx) / m;
    double ss = 0.0;
    for (const auto& [k, dist] : report.pairs) {
        const double r = std::log(dist) - (report.intercept + report.fitted_slope * std::log(static_cast<double>(k)));
        ss += r * r;
    }
    report.fit_residual = std::sqrt(ss / m);
    return report;
}

PeakStudy peak_study(const std::vector<int>& k_values, int num_levels, const std::vector<Family>& families) {
    if (num_levels < 3) throw std::invalid_argument("peak_study: need at least three levels");
    PeakStudy study;
    for (const Family family : families) {
        if (family != Family::power && family != Family::inverse_power) {
            throw std::invalid_argument("peak_study: families are power and inverse_power");
        }
        for (const int k : k_values) {
            if (k < 1) throw std::invalid_argument("peak_study: k must be >= 1");
            const auto s = family == Family::power ? make_power(num_levels, k) : make_inverse_power(num_levels, k);
            const auto peak = find_peak(build_density(rescale_to_unit(s)));
            study.entries.push_back({family, static_cast<double>(k), peak.energy, peak.mu});
        }
    }
    return study;
}

}  // namespace qmicro
