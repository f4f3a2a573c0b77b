#include "qmicro/densmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qmicro/errors.hpp"
#include "qmicro/state_density.hpp"

namespace qmicro {

namespace {

// Step for level k: h, but never more than a quarter of the gap to either
// neighbour, so a perturbed level cannot approach the next one.
double level_step(const Spectrum& s, std::size_t k, double h) {
    double gap = s.width();
    if (k > 0) gap = std::min(gap, s.level(k) - s.level(k - 1));
    if (k + 1 < s.size()) gap = std::min(gap, s.level(k + 1) - s.level(k));
    return std::min(h, 0.25 * gap);
}

// One entry of d(W/V_Gamma)/dE_k at steps h and h/2.
struct LevelDifference {
    double coarse = 0.0;
    double fine = 0.0;
    // The stencil is centred on E_k = E, where the second derivative in E_k
    // jumps (three levels only).
    bool centred_on_kink = false;
};

// Central differences of the cumulative fraction under E_k -> E_k +- step.
// V_Gamma does not depend on the levels, so above the median the
// complementary tail is differenced instead; W itself is then close to
// V_Gamma and the difference would cancel.
LevelDifference level_difference(const Spectrum& s, std::size_t k, double E, double h, bool upper) {
    double step = level_step(s, k, h);
    LevelDifference out;
    // The volume is C^(n-1) in E_k, so only three levels (n = 2) see a jump
    // in the second derivative at E_k = E. There, keep the stencil on one
    // side of it, or centre it when the offset is negligible against the step.
    const double offset = std::abs(E - s.level(k));
    if (s.n() == 2 && offset < 2.0 * step) {
        if (offset > 1e-3 * step) {
            step = 0.5 * offset;
        } else {
            out.centred_on_kink = true;
        }
    }
    const double sign = upper ? -1.0 : 1.0;
    auto diff = [&](double d) {
        const double up = cumulative_fraction(s.with_shifted_level(k, d), E, upper);
        const double down = cumulative_fraction(s.with_shifted_level(k, -d), E, upper);
        return sign * (up - down) / (2.0 * d);
    };
    out.coarse = diff(step);
    out.fine = diff(0.5 * step);
    return out;
}

}  // namespace

DensityMatrixDiag diag_by_knot_perturbation(const Spectrum& s, double E, double h) {
    if (!(E > s.e_min() && E < s.e_max())) {
        throw DomainError("diag_by_knot_perturbation: E must lie strictly inside the spectrum");
    }
    if (!(h > 0.0)) h = 1e-5 * s.width();

    const double mu = detail::bspline_density(s.levels(), E);
    if (!(mu > 0.0)) throw DomainError("diag_by_knot_perturbation: Omega(E) vanishes");

    const bool upper = cumulative_fraction(s, E) > 0.5;

    DensityMatrixDiag dm;
    dm.E = E;
    dm.method = DiagMethod::knot_perturbation;
    dm.at_knot = std::find(s.levels().begin(), s.levels().end(), E) != s.levels().end();
    for (std::size_t k = 0; k < s.size(); ++k) {
        const auto d = level_difference(s, k, E, h, upper);
        const double coarse = -d.coarse / mu;
        const double fine = -d.fine / mu;
        // extrapolate away the leading error: h^2, or h on a kink
        dm.entries.push_back(d.centred_on_kink ? 2.0 * fine - coarse : (4.0 * fine - coarse) / 3.0);
        dm.uncertainty.push_back(std::abs(coarse - fine));
        if (std::abs(coarse - fine) > kRichardsonTol) dm.step_warning = true;
    }
    return dm;
}

DensityMatrixDiag diag_from_monte_carlo(const ProjectorEstimate& est) {
    DensityMatrixDiag dm;
    dm.E = est.energy;
    dm.method = DiagMethod::monte_carlo;
    dm.entries = est.mean;
    dm.uncertainty = est.std_error;
    return dm;
}

double expectation_of_observable(const DensityMatrixDiag& dm, std::span<const double> diag_observable) {
    if (diag_observable.size() != dm.entries.size()) {
        throw std::invalid_argument("expectation_of_observable: observable has " +
                                    std::to_string(diag_observable.size()) + " entries, density matrix " +
                                    std::to_string(dm.entries.size()));
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < dm.entries.size(); ++k) acc += diag_observable[k] * dm.entries[k];
    return acc;
}

}  // namespace qmicro
