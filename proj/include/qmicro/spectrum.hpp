#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace qmicro {

enum class Family { linear, quadratic, power, inverse_power, custom };

std::string_view to_string(Family f);

/// Default relative gap below which two levels count as degenerate.
inline constexpr double kDefaultGapTol = 1e-9;

struct ValidationReport {
    bool accepted = false;
    double min_normalized_gap = 0.0;
    /// Adjacent index pairs (i, i+1) whose gap is below tolerance or non-positive.
    std::vector<std::pair<std::size_t, std::size_t>> offending;
};

/// Checks a raw level list for strict increase with gaps >= gap_tol * width.
ValidationReport validate_levels(std::span<const double> levels, double gap_tol = kDefaultGapTol);

/// A validated, strictly increasing, finite list of energy eigenvalues.
///
/// Immutable after construction. `param()` carries the family parameter:
/// the energy scale for linear/quadratic, the exponent k for power and
/// inverse_power, 0 for custom.
class Spectrum {
public:
    /// Throws DegenerateSpectrumError (with the offending pair) or
    /// std::invalid_argument for fewer than two / non-finite levels.
    static Spectrum custom(std::vector<double> levels, double gap_tol = kDefaultGapTol);

    const std::vector<double>& levels() const noexcept { return levels_; }
    double level(std::size_t k) const { return levels_.at(k); }
    /// n = number of levels - 1.
    int n() const noexcept { return static_cast<int>(levels_.size()) - 1; }
    std::size_t size() const noexcept { return levels_.size(); }
    double e_min() const noexcept { return levels_.front(); }
    double e_max() const noexcept { return levels_.back(); }
    double width() const noexcept { return levels_.back() - levels_.front(); }

    Family family() const noexcept { return family_; }
    double param() const noexcept { return param_; }
    double energy_scale() const noexcept { return energy_scale_; }

    /// Same spectrum with level k moved by `delta`; revalidated.
    Spectrum with_shifted_level(std::size_t k, double delta, double gap_tol = kDefaultGapTol) const;

    friend bool operator==(const Spectrum&, const Spectrum&) = default;

private:
    friend Spectrum make_spectrum(std::vector<double>, Family, double, double, double);
    Spectrum() = default;

    std::vector<double> levels_;
    Family family_ = Family::custom;
    double param_ = 0.0;
    double energy_scale_ = 1.0;
};

Spectrum make_spectrum(std::vector<double> levels, Family family, double param,
                       double energy_scale, double gap_tol = kDefaultGapTol);

/// levels[k] = scale * k.
Spectrum make_linear(int num_levels, double scale = 1.0);
/// levels[k] = scale * k^2.
Spectrum make_quadratic(int num_levels, double scale = 1.0);
/// levels[m] = m^exponent.
Spectrum make_power(int num_levels, double exponent);
/// levels[m] = m^(1/k).
Spectrum make_inverse_power(int num_levels, double k);

/// Affine map sending the lowest level to 0 and the highest to 1.
Spectrum rescale_to_unit(const Spectrum& s);

ValidationReport validate(const Spectrum& s, double gap_tol = kDefaultGapTol);

/// Parses `linear:N`, `quadratic:N`, `power:N:k`, `invpower:N:k`, `custom:a,b,c`.
Spectrum parse_spectrum(std::string_view designator, double gap_tol = kDefaultGapTol);

nlohmann::json to_json(const Spectrum& s);
Spectrum spectrum_from_json(const nlohmann::json& j, double gap_tol = kDefaultGapTol);

}  // namespace qmicro
