#include "qmicro/thermo.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "qmicro/errors.hpp"

namespace qmicro {

namespace {

bool interior(const StateDensity& d, double E) {
    return E > d.mu.lower() && E < d.mu.upper();
}

// mu and mu' from the B-spline recurrences rather than the compiled pieces:
// the pieces lose relative accuracy where mu vanishes at the upper end.
double stable_mu(const StateDensity& d, double E) { return detail::bspline_density(d.spectrum.levels(), E); }

double stable_slope(const StateDensity& d, double E, bool at_knot) {
    const auto& t = d.spectrum.levels();
    const double left = detail::bspline_density_derivative(t, E, Side::left);
    return at_knot ? 0.5 * (left + detail::bspline_density_derivative(t, E, Side::right)) : left;
}

// mu'/mu without domain checks; +inf/-inf where mu underflows near an endpoint.
double log_slope(const StateDensity& d, double E) {
    const double mu = stable_mu(d, E);
    const double slope = stable_slope(d, E, d.mu.is_knot(E));
    if (mu > 0.0) return slope / mu;
    const double mid = 0.5 * (d.mu.lower() + d.mu.upper());
    return E < mid ? std::numeric_limits<double>::infinity()
                   : -std::numeric_limits<double>::infinity();
}

}  // namespace

double entropy(const StateDensity& d, double E) {
    const double omega = d.v_gamma * stable_mu(d, E);
    if (!interior(d, E) || !(omega > 0.0)) {
        throw DomainError("entropy: density of states vanishes at E = " + std::to_string(E));
    }
    return std::log(omega);
}

BetaValue beta_sample(const StateDensity& d, double E) {
    const double mu = stable_mu(d, E);
    if (!interior(d, E) || !(mu > 0.0)) {
        throw DomainError("beta: density of states vanishes at E = " + std::to_string(E));
    }
    BetaValue out;
    out.at_knot = d.mu.is_knot(E);
    out.value = stable_slope(d, E, out.at_knot) / mu;
    return out;
}

double beta_of_E(const StateDensity& d, double E) { return beta_sample(d, E).value; }

Peak find_peak(const StateDensity& d) {
    if (d.spectrum.n() < 2) throw DomainError("find_peak: a two-level density is flat");
    const auto& mu = d.mu;
    Peak best{mu.lower(), 0.0};
    auto consider = [&](double E, double value) {
        if (value > best.mu) best = {E, value};
    };
    const int degree = d.spectrum.n() - 1;
    const int scan = 4 * degree + 16;
    for (std::size_t p = 0; p < mu.num_pieces(); ++p) {
        const double left = mu.knots()[p];
        const double h = mu.width(p);
        consider(left + h, mu.eval_local(p, 1.0));
        double u0 = 0.0;
        double g0 = mu.derivative_local(p, u0);
        for (int s = 1; s <= scan; ++s) {
            const double u1 = static_cast<double>(s) / scan;
            const double g1 = mu.derivative_local(p, u1);
            if (g0 > 0.0 && g1 <= 0.0) {
                // bisect the sign change down to adjacent doubles
                double a = u0, b = u1;
                while (true) {
                    const double m = 0.5 * (a + b);
                    if (m <= a || m >= b) break;
                    (mu.derivative_local(p, m) > 0.0 ? a : b) = m;
                }
                const double u = 0.5 * (a + b);
                consider(left + u * h, mu.eval_local(p, u));
            }
            u0 = u1;
            g0 = g1;
        }
    }
    return best;
}

double peak_energy(const StateDensity& d) { return find_peak(d).energy; }

bool is_unimodal(const StateDensity& d) {
    const auto& mu = d.mu;
    int changes = 0;
    int last_sign = 0;
    const int per_piece = 4 * d.spectrum.n() + 16;
    for (std::size_t p = 0; p < mu.num_pieces(); ++p) {
        for (int s = 1; s < per_piece; ++s) {
            const double g = mu.derivative_local(p, static_cast<double>(s) / per_piece);
            const double scale = std::abs(mu.eval_local(p, static_cast<double>(s) / per_piece));
            if (std::abs(g) <= 1e-12 * scale) continue;
            const int sign = g > 0.0 ? 1 : -1;
            if (last_sign != 0 && sign != last_sign) ++changes;
            last_sign = sign;
        }
    }
    return changes <= 1;
}

double energy_of_T(const StateDensity& d, double T, Branch branch) {
    if (branch == Branch::positive && !(T > 0.0)) {
        throw std::invalid_argument("energy_of_T: positive branch needs T > 0");
    }
    if (branch == Branch::negative && !(T < 0.0)) {
        throw std::invalid_argument("energy_of_T: negative branch needs T < 0");
    }
    const double peak = peak_energy(d);
    const double target = 1.0 / T;
    // f is nonincreasing in E (the density is log-concave); root where f = 0
    auto f = [&](double E) { return log_slope(d, E) - target; };

    double lo = branch == Branch::positive ? d.mu.lower() : peak;
    double hi = branch == Branch::positive ? peak : d.mu.upper();
    const double f_lo = branch == Branch::positive ? std::numeric_limits<double>::infinity() : f(lo);
    const double f_hi = branch == Branch::positive ? f(hi) : -std::numeric_limits<double>::infinity();
    if (!(f_lo > 0.0) || !(f_hi < 0.0)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "energy_of_T: cannot bracket T = " << T << " on [" << lo << ", " << hi
            << "]; beta - 1/T = " << f_lo << " and " << f_hi << " at the ends";
        throw NumericalError(msg.str());
    }

    const double width_tol = 1e-12 * (peak - d.mu.lower());
    while (hi - lo > width_tol) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    // refine with Illinois-modified regula falsi until the bracket stops shrinking
    double a = lo, b = hi;
    double fa = f(a), fb = f(b);
    if (!std::isfinite(fa) || !std::isfinite(fb)) return 0.5 * (a + b);
    int stale = 0;
    for (int iter = 0; iter < 200 && b - a > 0.0; ++iter) {
        double c = b - fb * (b - a) / (fb - fa);
        if (!(c > a && c < b)) c = 0.5 * (a + b);
        if (c <= a || c >= b) break;
        const double fc = f(c);
        if (fc == 0.0) return c;
        if (fc > 0.0) {
            a = c;
            fa = fc;
            if (stale == -1) fb *= 0.5;
            stale = -1;
        } else {
            b = c;
            fb = fc;
            if (stale == 1) fa *= 0.5;
            stale = 1;
        }
    }
    return std::abs(fa) < std::abs(fb) ? a : b;
}

ThermoCurve thermo_curve(const StateDensity& d, double t_min, double t_max, int points, Branch branch) {
    if (!(t_min > 0.0) || !(t_max >= t_min) || points < 1) {
        throw std::invalid_argument("thermo_curve: need 0 < tmin <= tmax and points >= 1");
    }
    ThermoCurve curve;
    curve.branch = branch;
    curve.E_peak = peak_energy(d);
    curve.unimodal = is_unimodal(d);
    const double log_lo = std::log(t_min);
    const double log_hi = std::log(t_max);
    for (int i = 0; i < points; ++i) {
        const double frac = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        double T = std::exp(log_lo + frac * (log_hi - log_lo));
        if (branch == Branch::negative) {
            const double fneg = points == 1 ? 0.0 : static_cast<double>(points - 1 - i) / (points - 1);
            T = -std::exp(log_lo + fneg * (log_hi - log_lo));
        }
        ThermoSample sample;
        sample.T = T;
        sample.E = energy_of_T(d, T, branch);
        sample.S = entropy(d, sample.E);
        const auto beta = beta_sample(d, sample.E);
        sample.beta = beta.value;
        sample.at_knot = beta.at_knot;
        curve.samples.push_back(sample);
    }
    return curve;
}

}  // namespace qmicro
