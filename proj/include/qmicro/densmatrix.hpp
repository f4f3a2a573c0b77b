#pragma once

#include <span>
#include <vector>

#include "qmicro/mc_oracle.hpp"
#include "qmicro/spectrum.hpp"

namespace qmicro {

enum class DiagMethod { knot_perturbation, monte_carlo };

/// Diagonal of the microcanonical density matrix in the energy eigenbasis.
/// Off-diagonal elements vanish identically there (the overall phases of the
/// amplitudes integrate out), so only the diagonal is stored.
struct DensityMatrixDiag {
    std::vector<double> entries;
    double E = 0.0;
    DiagMethod method = DiagMethod::knot_perturbation;
    /// Per-entry uncertainty: |step h - step h/2| for knot perturbation,
    /// the standard error for Monte Carlo.
    std::vector<double> uncertainty;
    /// Step-halving check disagreed beyond kRichardsonTol.
    bool step_warning = false;
    /// E coincides with a level; the one-sided behaviour there is not characterized.
    bool at_knot = false;
};

inline constexpr double kRichardsonTol = 1e-5;

/// entries[k] = -(dW/dE)^{-1} dW/dE_k at fixed E, with dW/dE_k a central
/// difference of the exact phase-space volume under E_k -> E_k +- h.
/// h <= 0 selects the default 1e-5 * (E_max - E_min).
/// Throws DomainError unless E_min < E < E_max and DegenerateSpectrumError
/// when a perturbed spectrum is no longer separated.
DensityMatrixDiag diag_by_knot_perturbation(const Spectrum& s, double E, double h = 0.0);

/// Wraps a projector average as a density-matrix diagonal.
DensityMatrixDiag diag_from_monte_carlo(const ProjectorEstimate& est);

/// sum_k F_kk * entries[k]; throws std::invalid_argument on length mismatch.
double expectation_of_observable(const DensityMatrixDiag& dm, std::span<const double> diag_observable);

}  // namespace qmicro
