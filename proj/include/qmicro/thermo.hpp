#pragma once

#include <vector>

#include "qmicro/state_density.hpp"

namespace qmicro {

/// Which side of the density peak a temperature maps to. The negative
/// branch (E above the peak, beta < 0) is not reachable in equilibrium and
/// is only produced on request.
enum class Branch { positive, negative };

/// Entropy S(E) = ln Omega(E) with k = 1 and the energy shell width set to one
/// unit (it only shifts S by a constant). Throws DomainError where Omega = 0.
double entropy(const StateDensity& d, double E);

struct BetaValue {
    double value = 0.0;
    /// E sits on a level; value is the mean of the one-sided limits.
    bool at_knot = false;
};

/// beta = dS/dE = Omega'(E)/Omega(E), with the knot flag.
BetaValue beta_sample(const StateDensity& d, double E);
double beta_of_E(const StateDensity& d, double E);

struct Peak {
    double energy = 0.0;
    double mu = 0.0;
};

/// Global maximum of mu from the roots of each piece's derivative. Requires n >= 2.
Peak find_peak(const StateDensity& d);
double peak_energy(const StateDensity& d);

/// True when mu' changes sign exactly once over the support (sampled check).
bool is_unimodal(const StateDensity& d);

/// E(T): the energy on the requested branch where 1/beta(E) = T.
/// Positive branch needs T > 0, negative branch T < 0.
/// Throws NumericalError when no bracket can be formed.
double energy_of_T(const StateDensity& d, double T, Branch branch = Branch::positive);

struct ThermoSample {
    double T = 0.0;
    double E = 0.0;
    double S = 0.0;
    double beta = 0.0;
    bool at_knot = false;
};

struct ThermoCurve {
    std::vector<ThermoSample> samples;
    Branch branch = Branch::positive;
    double E_peak = 0.0;
    /// False when the sampled density looked multimodal (reported, not fatal).
    bool unimodal = true;
};

/// E(T) on `points` log-spaced |T| in [t_min, t_max]; the negative branch
/// uses T in [-t_max, -t_min] ordered from -t_max upward.
ThermoCurve thermo_curve(const StateDensity& d, double t_min, double t_max, int points,
                         Branch branch = Branch::positive);

}  // namespace qmicro
