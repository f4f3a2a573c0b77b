#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qmicro/rng.hpp"
#include "qmicro/spectrum.hpp"
#include "qmicro/state_density.hpp"

namespace qmicro {

/// How a uniformly distributed pure state is generated.
///  - sphere:  2(n+1) standard normals form a complex Gaussian vector,
///             normalized onto the unit sphere; weights are |Z_k|^2.
///  - simplex: n+1 unit exponentials normalized by their sum (flat Dirichlet).
enum class SamplingRoute { simplex, sphere };

/// Squared moduli of a random unit vector in the energy eigenbasis.
struct PureStateSample {
    std::vector<double> weights;

    /// sum_k weights[k] * E_k, clamped to [E_min, E_max] against rounding.
    double energy(const Spectrum& s) const;
};

PureStateSample sample_state(int n_plus_1, Rng& rng, SamplingRoute route = SamplingRoute::simplex);

/// Full complex amplitudes of a Haar-random unit vector (sphere route).
std::vector<std::complex<double>> sample_amplitudes(int n_plus_1, Rng& rng);

/// Draws per chunk of this size come from substream (seed, chunk index).
inline constexpr std::size_t kSampleChunk = 65536;

struct SampleBatch {
    std::vector<double> energies;
    std::uint64_t seed = 0;
    std::size_t count = 0;
    Spectrum spectrum;
    SamplingRoute route = SamplingRoute::simplex;
};

/// `count` independent energy expectations; bit-identical for a given seed.
SampleBatch sample_energies(const Spectrum& s, std::size_t count, std::uint64_t seed,
                            SamplingRoute route = SamplingRoute::simplex);

/// sup |F_empirical - F| over sorted samples.
template <typename Cdf>
double ks_statistic(std::span<const double> sorted, Cdf&& cdf) {
    const double count = static_cast<double>(sorted.size());
    double stat = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        const double above = static_cast<double>(i + 1) / count - f;
        const double below = f - static_cast<double>(i) / count;
        stat = std::max({stat, above, below});
    }
    return stat;
}

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Kolmogorov-Smirnov distance between the batch and W(E)/V_Gamma.
/// Throws std::invalid_argument if the batch was drawn from another spectrum.
double ks_against_density(const SampleBatch& batch, const StateDensity& d);

/// Pass threshold used by the suite and the CLI: twice the 1% critical value.
inline double ks_threshold(std::size_t count) {
    return 2.0 * 1.63 / std::sqrt(static_cast<double>(count));
}

/// Fewest in-window samples projector_averages accepts.
inline constexpr std::size_t kMinWindowSamples = 1000;

struct ProjectorEstimate {
    double energy = 0.0;
    double window = 0.0;
    std::vector<double> mean;    ///< conditional mean of |Z_k|^2
    std::vector<double> std_error;  ///< standard error of each mean
    std::size_t retained = 0;
    std::size_t drawn = 0;
    /// Largest |mean of conj(Z_j) Z_k|, j != k, and its standard error.
    double max_offdiag_abs = 0.0;
    double offdiag_stderr = 0.0;
};

/// Default conditioning window: 1% of the spectral width.
double default_window(const Spectrum& s);

/// Averages the diagonal of the pure-state projector over states whose energy
/// falls in [E_target - window/2, E_target + window/2].
/// Throws std::invalid_argument when the window leaves the spectrum range and
/// NumericalError when fewer than kMinWindowSamples states land in it.
ProjectorEstimate projector_averages(const Spectrum& s, double E_target, double window,
                                     std::size_t count, std::uint64_t seed);

}  // namespace qmicro
