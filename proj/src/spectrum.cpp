#include "qmicro/spectrum.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "qmicro/errors.hpp"

namespace qmicro {

std::string_view to_string(Family f) {
    switch (f) {
        case Family::linear: return "linear";
        case Family::quadratic: return "quadratic";
        case Family::power: return "power";
        case Family::inverse_power: return "inverse_power";
        case Family::custom: return "custom";
    }
    return "custom";
}

ValidationReport validate_levels(std::span<const double> levels, double gap_tol) {
    ValidationReport report;
    if (levels.size() < 2) return report;
    const double width = levels.back() - levels.front();
    report.min_normalized_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
        const double gap = levels[i + 1] - levels[i];
        const double normalized = width > 0.0 ? gap / width : -1.0;
        report.min_normalized_gap = std::min(report.min_normalized_gap, normalized);
        // Exact coincidence is rejected for any tolerance, including zero.
        if (!(gap > 0.0) || !(normalized >= gap_tol)) report.offending.emplace_back(i, i + 1);
    }
    report.accepted = report.offending.empty();
    return report;
}

ValidationReport validate(const Spectrum& s, double gap_tol) {
    return validate_levels(s.levels(), gap_tol);
}

Spectrum make_spectrum(std::vector<double> levels, Family family, double param,
                       double energy_scale, double gap_tol) {
    if (levels.size() < 2) throw std::invalid_argument("spectrum needs at least two levels");
    for (double e : levels) {
        if (!std::isfinite(e)) throw std::invalid_argument("spectrum levels must be finite");
    }
    const auto report = validate_levels(levels, gap_tol);
    if (!report.accepted) {
        const auto [i, j] = report.offending.front();
        std::ostringstream msg;
        msg.precision(17);
        msg << "degenerate spectrum: levels " << i << " and " << j << " (" << levels[i] << ", "
            << levels[j] << ") are not separated by gap_tol * width";
        throw DegenerateSpectrumError(msg.str(), i, j);
    }
    Spectrum s;
    s.levels_ = std::move(levels);
    s.family_ = family;
    s.param_ = param;
    s.energy_scale_ = energy_scale;
    return s;
}

Spectrum Spectrum::custom(std::vector<double> levels, double gap_tol) {
    return make_spectrum(std::move(levels), Family::custom, 0.0, 1.0, gap_tol);
}

Spectrum Spectrum::with_shifted_level(std::size_t k, double delta, double gap_tol) const {
    auto levels = levels_;
    levels.at(k) += delta;
    return make_spectrum(std::move(levels), family_, param_, energy_scale_, gap_tol);
}

namespace {

void check_count(int num_levels) {
    if (num_levels < 2) throw std::invalid_argument("num_levels must be >= 2");
}

}  // namespace

Spectrum make_linear(int num_levels, double scale) {
    check_count(num_levels);
    if (!(scale > 0.0)) throw std::invalid_argument("energy scale must be positive");
    std::vector<double> levels(static_cast<std::size_t>(num_levels));
    for (int k = 0; k < num_levels; ++k) levels[k] = scale * k;
    return make_spectrum(std::move(levels), Family::linear, scale, scale);
}

Spectrum make_quadratic(int num_levels, double scale) {
    check_count(num_levels);
    if (!(scale > 0.0)) throw std::invalid_argument("energy scale must be positive");
    std::vector<double> levels(static_cast<std::size_t>(num_levels));
    for (int k = 0; k < num_levels; ++k) levels[k] = scale * static_cast<double>(k) * k;
    return make_spectrum(std::move(levels), Family::quadratic, scale, scale);
}

Spectrum make_power(int num_levels, double exponent) {
    check_count(num_levels);
    if (!(exponent > 0.0)) throw std::invalid_argument("exponent must be positive");
    std::vector<double> levels(static_cast<std::size_t>(num_levels));
    for (int m = 0; m < num_levels; ++m) levels[m] = std::pow(static_cast<double>(m), exponent);
    return make_spectrum(std::move(levels), Family::power, exponent, 1.0);
}

Spectrum make_inverse_power(int num_levels, double k) {
    check_count(num_levels);
    if (!(k > 0.0)) throw std::invalid_argument("root order must be positive");
    std::vector<double> levels(static_cast<std::size_t>(num_levels));
    for (int m = 0; m < num_levels; ++m) levels[m] = std::pow(static_cast<double>(m), 1.0 / k);
    return make_spectrum(std::move(levels), Family::inverse_power, k, 1.0);
}

Spectrum rescale_to_unit(const Spectrum& s) {
    const double lo = s.e_min();
    const double width = s.width();
    std::vector<double> levels(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) levels[i] = (s.levels()[i] - lo) / width;
    // Pin the endpoints so the map is exactly idempotent.
    levels.front() = 0.0;
    levels.back() = 1.0;
    return make_spectrum(std::move(levels), s.family(), s.param(), s.energy_scale() / width, 0.0);
}

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        out.push_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_double(std::string_view field, std::string_view what) {
    double value = 0.0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || field.empty()) {
        throw std::invalid_argument("cannot parse " + std::string(what) + " '" + std::string(field) + "'");
    }
    return value;
}

int parse_int(std::string_view field, std::string_view what) {
    int value = 0;
    const auto* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), last, value);
    if (ec != std::errc() || ptr != last || field.empty()) {
        throw std::invalid_argument("cannot parse " + std::string(what) + " '" + std::string(field) + "'");
    }
    return value;
}

}  // namespace

Spectrum parse_spectrum(std::string_view designator, double gap_tol) {
    const auto colon = designator.find(':');
    if (colon == std::string_view::npos) {
        throw std::invalid_argument("spectrum designator needs the form family:args, got '" +
                                    std::string(designator) + "'");
    }
    const auto family = designator.substr(0, colon);
    const auto args = split(designator.substr(colon + 1), family == "custom" ? ',' : ':');

    auto expect_args = [&](std::size_t count) {
        if (args.size() != count) {
            throw std::invalid_argument("spectrum '" + std::string(family) + "' expects " +
                                        std::to_string(count) + " argument(s)");
        }
    };

    if (family == "linear") {
        expect_args(1);
        return make_linear(parse_int(args[0], "level count"));
    }
    if (family == "quadratic") {
        expect_args(1);
        return make_quadratic(parse_int(args[0], "level count"));
    }
    if (family == "power") {
        expect_args(2);
        return make_power(parse_int(args[0], "level count"), parse_double(args[1], "exponent"));
    }
    if (family == "invpower") {
        expect_args(2);
        return make_inverse_power(parse_int(args[0], "level count"), parse_double(args[1], "root order"));
    }
    if (family == "custom") {
        std::vector<double> levels;
        levels.reserve(args.size());
        for (auto a : args) levels.push_back(parse_double(a, "level"));
        return Spectrum::custom(std::move(levels), gap_tol);
    }
    throw std::invalid_argument("unknown spectrum family '" + std::string(family) + "'");
}

nlohmann::json to_json(const Spectrum& s) {
    return {{"levels", s.levels()}, {"family", to_string(s.family())}, {"param", s.param()}};
}

Spectrum spectrum_from_json(const nlohmann::json& j, double gap_tol) {
    auto levels = j.at("levels").get<std::vector<double>>();
    const auto name = j.value("family", std::string("custom"));
    const double param = j.value("param", 0.0);
    Family family = Family::custom;
    if (name == "linear") family = Family::linear;
    else if (name == "quadratic") family = Family::quadratic;
    else if (name == "power") family = Family::power;
    else if (name == "inverse_power") family = Family::inverse_power;
    else if (name != "custom") throw std::invalid_argument("unknown spectrum family '" + name + "'");
    const double scale = (family == Family::linear || family == Family::quadratic) ? param : 1.0;
    return make_spectrum(std::move(levels), family, param, scale, gap_tol);
}

}  // namespace qmicro
