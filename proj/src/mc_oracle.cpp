#include "qmicro/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qmicro/errors.hpp"
#include "qmicro/parallel.hpp"

namespace qmicro {

double PureStateSample::energy(const Spectrum& s) const {
    const auto& levels = s.levels();
    const double base = levels.front();
    double acc = 0.0;
    for (std::size_t k = 1; k < weights.size(); ++k) acc += weights[k] * (levels[k] - base);
    return std::clamp(base + acc, s.e_min(), s.e_max());
}

namespace {

void normalize(std::vector<double>& w) {
    double total = 0.0;
    for (double x : w) total += x;
    for (double& x : w) x /= total;
}

}  // namespace

PureStateSample sample_state(int n_plus_1, Rng& rng, SamplingRoute route) {
    if (n_plus_1 < 2) throw std::invalid_argument("sample_state: need at least two levels");
    PureStateSample sample;
    sample.weights.resize(static_cast<std::size_t>(n_plus_1));
    if (route == SamplingRoute::simplex) {
        for (auto& w : sample.weights) w = rng.exponential();
    } else {
        for (auto& w : sample.weights) {
            const double re = rng.normal();
            const double im = rng.normal();
            w = re * re + im * im;
        }
    }
    normalize(sample.weights);
    return sample;
}

std::vector<std::complex<double>> sample_amplitudes(int n_plus_1, Rng& rng) {
    if (n_plus_1 < 2) throw std::invalid_argument("sample_amplitudes: need at least two levels");
    std::vector<std::complex<double>> z(static_cast<std::size_t>(n_plus_1));
    double norm = 0.0;
    for (auto& c : z) {
        const double re = rng.normal();
        const double im = rng.normal();
        c = {re, im};
        norm += re * re + im * im;
    }
    const double inv = 1.0 / std::sqrt(norm);
    for (auto& c : z) c *= inv;
    return z;
}

SampleBatch sample_energies(const Spectrum& s, std::size_t count, std::uint64_t seed,
                            SamplingRoute route) {
    if (count < 1) throw std::invalid_argument("sample_energies: count must be >= 1");
    SampleBatch batch{std::vector<double>(count), seed, count, s, route};
    const std::size_t chunks = (count + kSampleChunk - 1) / kSampleChunk;
    const int dim = static_cast<int>(s.size());
    parallel_for(chunks, [&](std::size_t c) {
        Rng rng(seed, c);
        const std::size_t begin = c * kSampleChunk;
        const std::size_t end = std::min(count, begin + kSampleChunk);
        for (std::size_t i = begin; i < end; ++i) {
            batch.energies[i] = sample_state(dim, rng, route).energy(s);
        }
    });
    return batch;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double stat = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        stat = std::max(stat, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return stat;
}

double ks_against_density(const SampleBatch& batch, const StateDensity& d) {
    if (batch.spectrum.levels() != d.spectrum.levels()) {
        throw std::invalid_argument("ks_against_density: batch and density use different spectra");
    }
    std::vector<double> sorted = batch.energies;
    std::sort(sorted.begin(), sorted.end());
    const double total = d.mu.total_integral();
    return ks_statistic(sorted, [&](double E) { return d.mu.integral_to(E) / total; });
}

double default_window(const Spectrum& s) { return 0.01 * s.width(); }

namespace {

struct WindowSums {
    std::size_t drawn = 0;
    std::size_t retained = 0;
    std::vector<double> sum;
    std::vector<double> sum_sq;
    std::vector<std::complex<double>> off;  // upper triangle, row-major
    std::vector<double> off_sq;
};

}  // namespace

ProjectorEstimate projector_averages(const Spectrum& s, double E_target, double window,
                                     std::size_t count, std::uint64_t seed) {
    if (!(window > 0.0)) throw std::invalid_argument("projector_averages: window must be positive");
    const double lo = E_target - 0.5 * window;
    const double hi = E_target + 0.5 * window;
    if (lo < s.e_min() || hi > s.e_max()) {
        throw std::invalid_argument("projector_averages: window leaves the spectral range");
    }
    const std::size_t dim = s.size();
    const std::size_t num_off = dim * (dim - 1) / 2;
    const std::size_t chunks = (count + kSampleChunk - 1) / kSampleChunk;
    std::vector<WindowSums> partial(chunks);

    parallel_for(chunks, [&](std::size_t c) {
        WindowSums& acc = partial[c];
        acc.sum.assign(dim, 0.0);
        acc.sum_sq.assign(dim, 0.0);
        acc.off.assign(num_off, {0.0, 0.0});
        acc.off_sq.assign(num_off, 0.0);
        Rng rng(seed, c);
        const std::size_t begin = c * kSampleChunk;
        const std::size_t end = std::min(count, begin + kSampleChunk);
        PureStateSample state;
        state.weights.resize(dim);
        for (std::size_t i = begin; i < end; ++i) {
            const auto z = sample_amplitudes(static_cast<int>(dim), rng);
            for (std::size_t k = 0; k < dim; ++k) state.weights[k] = std::norm(z[k]);
            ++acc.drawn;
            const double e = state.energy(s);
            if (e < lo || e > hi) continue;
            ++acc.retained;
            for (std::size_t k = 0; k < dim; ++k) {
                acc.sum[k] += state.weights[k];
                acc.sum_sq[k] += state.weights[k] * state.weights[k];
            }
            std::size_t idx = 0;
            for (std::size_t j = 0; j < dim; ++j) {
                for (std::size_t k = j + 1; k < dim; ++k, ++idx) {
                    const auto p = std::conj(z[j]) * z[k];
                    acc.off[idx] += p;
                    acc.off_sq[idx] += std::norm(p);
                }
            }
        }
    });

    WindowSums total;
    total.sum.assign(dim, 0.0);
    total.sum_sq.assign(dim, 0.0);
    total.off.assign(num_off, {0.0, 0.0});
    total.off_sq.assign(num_off, 0.0);
    for (const auto& p : partial) {
        total.drawn += p.drawn;
        total.retained += p.retained;
        for (std::size_t k = 0; k < dim; ++k) {
            total.sum[k] += p.sum[k];
            total.sum_sq[k] += p.sum_sq[k];
        }
        for (std::size_t k = 0; k < num_off; ++k) {
            total.off[k] += p.off[k];
            total.off_sq[k] += p.off_sq[k];
        }
    }
    if (total.retained < kMinWindowSamples) {
        std::ostringstream msg;
        msg << "projector_averages: only " << total.retained << " of " << total.drawn
            << " samples fell in the window; need " << kMinWindowSamples;
        throw NumericalError(msg.str());
    }

    ProjectorEstimate est;
    est.energy = E_target;
    est.window = window;
    est.retained = total.retained;
    est.drawn = total.drawn;
    const double m = static_cast<double>(total.retained);
    for (std::size_t k = 0; k < dim; ++k) {
        const double mean = total.sum[k] / m;
        const double var = std::max(0.0, total.sum_sq[k] / m - mean * mean) * m / (m - 1.0);
        est.mean.push_back(mean);
        est.std_error.push_back(std::sqrt(var / m));
    }
    for (std::size_t k = 0; k < num_off; ++k) {
        const double mag = std::abs(total.off[k] / m);
        if (mag >= est.max_offdiag_abs) {
            est.max_offdiag_abs = mag;
            est.offdiag_stderr = std::sqrt(total.off_sq[k] / m / m);
        }
    }
    return est;
}

}  // namespace qmicro
