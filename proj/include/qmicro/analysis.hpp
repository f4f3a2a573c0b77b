#pragma once

#include <utility>
#include <vector>

#include "qmicro/spectrum.hpp"
#include "qmicro/state_density.hpp"

namespace qmicro {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussRule& gauss_legendre_64();

/// Hellinger distance sqrt(2 - 2 int sqrt(mu1 mu2) dE) between two densities
/// on the same support. Throws std::invalid_argument if the supports differ
/// and NumericalError if the quadrature does not settle.
double hellinger(const StateDensity& a, const StateDensity& b);

struct HellingerReport {
    /// (k, D(mu_k, mu_{k+1})) with k the number of levels of the smaller system.
    std::vector<std::pair<int, double>> pairs;
    double fitted_slope = 0.0;
    double intercept = 0.0;
    /// Root-mean-square residual of the log-log fit.
    double fit_residual = 0.0;
};

/// D(mu_k, mu_{k+1}) for rescaled equally spaced spectra, k = k_min..k_max,
/// and the least-squares slope of log D against log k.
HellingerReport convergence_study(int k_min, int k_max);

struct PeakEntry {
    Family family = Family::power;
    double k = 1.0;
    double peak_E = 0.0;
    double peak_mu = 0.0;
};

struct PeakStudy {
    std::vector<PeakEntry> entries;
};

/// Peak of the rescaled density for E_m = m^k and/or E_m = m^(1/k).
PeakStudy peak_study(const std::vector<int>& k_values, int num_levels,
                     const std::vector<Family>& families = {Family::power, Family::inverse_power});

}  // namespace qmicro
