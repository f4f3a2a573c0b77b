#include "qmicro/cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qmicro/analysis.hpp"
#include "qmicro/densmatrix.hpp"
#include "qmicro/errors.hpp"
#include "qmicro/mc_oracle.hpp"
#include "qmicro/spectrum.hpp"
#include "qmicro/state_density.hpp"
#include "qmicro/thermo.hpp"

namespace qmicro::cli {

using nlohmann::json;

std::string format_double(double value) {
    char buf[64];
    const auto result = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    return std::string(buf, result.ptr);
}

namespace {

constexpr const char* kSchema = "qmicro/1";

/// Rows of numbers/strings rendered as CSV or as {"schema","columns","rows"} JSON.
struct Table {
    std::vector<std::string> columns;
    std::vector<json> rows;

    void add(json row) { rows.push_back(std::move(row)); }
};

std::string render_cell(const json& cell) {
    if (cell.is_number_float()) return format_double(cell.get<double>());
    if (cell.is_string()) return cell.get<std::string>();
    return cell.dump();
}

void write_csv(std::ostream& os, const Table& t) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << render_cell(row[i]);
        os << '\n';
    }
}

json table_json(const std::string& command, const Table& t) {
    return {{"schema", kSchema}, {"command", command}, {"columns", t.columns}, {"rows", t.rows}};
}

void emit(std::ostream& os, const std::string& command, const Table& t, bool as_json) {
    if (as_json) {
        os << table_json(command, t).dump(2) << '\n';
    } else {
        write_csv(os, t);
    }
}

std::vector<double> grid(double lo, double hi, int points) {
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        g[static_cast<std::size_t>(i)] = points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
    }
    g.back() = hi;
    return g;
}

std::vector<double> log_grid(double lo, double hi, int points) {
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double frac = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        g[static_cast<std::size_t>(i)] = std::exp(std::log(lo) + frac * (std::log(hi) - std::log(lo)));
    }
    return g;
}

struct SpectrumArgs {
    std::string designator;
    bool rescale = false;
    double gap_tol = kDefaultGapTol;

    Spectrum resolve() const {
        auto s = parse_spectrum(designator, gap_tol);
        return rescale ? rescale_to_unit(s) : s;
    }
};

void add_spectrum_options(CLI::App* cmd, SpectrumArgs& args) {
    cmd->add_option("--spectrum", args.designator,
                    "linear:N | quadratic:N | power:N:k | invpower:N:k | custom:a,b,c,...")
        ->required();
    cmd->add_flag("--rescale", args.rescale, "map the spectrum affinely onto [0,1] (default off)");
    cmd->add_option("--gap-tol", args.gap_tol, "relative gap below which levels count as degenerate")
        ->capture_default_str();
}

Table density_table(const StateDensity& d, int points) {
    Table t{{"E", "mu", "omega", "W"}, {}};
    for (double E : grid(d.mu.lower(), d.mu.upper(), points)) {
        t.add(json::array({E, eval_mu(d, E), eval_omega(d, E), eval_w(d, E)}));
    }
    return t;
}

json density_json(const StateDensity& d) {
    return {{"schema", kSchema},
            {"spectrum", to_json(d.spectrum)},
            {"knots", d.mu.knots()},
            {"pieces", d.mu.pieces()},
            {"v_gamma", d.v_gamma}};
}

Table thermo_table(const StateDensity& d, double tmin, double tmax, int points, bool include_negative) {
    Table t{{"T", "E", "S", "beta"}, {}};
    auto append = [&](const ThermoCurve& curve) {
        for (const auto& s : curve.samples) t.add(json::array({s.T, s.E, s.S, s.beta}));
    };
    append(thermo_curve(d, tmin, tmax, points, Branch::positive));
    if (include_negative) append(thermo_curve(d, tmin, tmax, points, Branch::negative));
    return t;
}

SamplingRoute parse_route(const std::string& name) {
    if (name == "simplex") return SamplingRoute::simplex;
    if (name == "sphere") return SamplingRoute::sphere;
    throw std::invalid_argument("unknown sampling route '" + name + "'");
}

Table peaks_table(const PeakStudy& study) {
    Table t{{"family", "k", "peak_E", "peak_mu"}, {}};
    for (const auto& e : study.entries) {
        t.add(json::array({e.family == Family::power ? "power" : "invpower", static_cast<int>(e.k), e.peak_E,
                           e.peak_mu}));
    }
    return t;
}

Table hellinger_table(const HellingerReport& r) {
    Table t{{"k", "distance"}, {}};
    for (const auto& [k, dist] : r.pairs) t.add(json::array({k, dist}));
    return t;
}

// Column-per-curve table of densities sharing one grid.
Table curves_table(const std::vector<std::pair<std::string, StateDensity>>& curves, double lo, double hi,
                   int points) {
    Table t{{"E"}, {}};
    for (const auto& [name, d] : curves) t.columns.push_back(name);
    for (double E : grid(lo, hi, points)) {
        json row = json::array({E});
        for (const auto& [name, d] : curves) row.push_back(eval_mu(d, E));
        t.add(std::move(row));
    }
    return t;
}

Table energy_temperature_table(const std::vector<std::pair<std::string, StateDensity>>& curves, double tmin,
                               double tmax, int points) {
    Table t{{"T"}, {}};
    for (const auto& [name, d] : curves) t.columns.push_back(name);
    for (double T : log_grid(tmin, tmax, points)) {
        json row = json::array({T});
        for (const auto& [name, d] : curves) row.push_back(energy_of_T(d, T));
        t.add(std::move(row));
    }
    return t;
}

void write_file(const std::filesystem::path& path, const Table& t) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    write_csv(os, t);
}

void write_figures(const std::filesystem::path& dir, int points) {
    std::filesystem::create_directories(dir);
    const char* suffix = "abc";
    for (int i = 0; i < 3; ++i) {
        const auto d = build_density(make_linear(i + 2));
        write_file(dir / ("fig1" + std::string(1, suffix[i]) + ".csv"),
                   curves_table({{"mu", d}}, d.mu.lower(), d.mu.upper(), points));
        const auto q = build_density(make_quadratic(i + 2));
        write_file(dir / ("fig5" + std::string(1, suffix[i]) + ".csv"),
                   curves_table({{"mu", q}}, q.mu.lower(), q.mu.upper(), points));
    }

    auto rescaled_family = [](auto make, int first, int last) {
        std::vector<std::pair<std::string, StateDensity>> out;
        for (int N = first; N <= last; ++N) {
            out.emplace_back("N" + std::to_string(N), build_density(rescale_to_unit(make(N))));
        }
        return out;
    };
    const auto linear = [](int N) { return make_linear(N); };
    const auto quadratic = [](int N) { return make_quadratic(N); };

    write_file(dir / "fig2.csv", curves_table(rescaled_family(linear, 3, 12), 0.0, 1.0, points));
    write_file(dir / "fig3.csv", energy_temperature_table(rescaled_family(linear, 4, 10), 1e-2, 1e2, 100));

    const auto report = convergence_study(2, 10);
    write_file(dir / "fig4.csv", hellinger_table(report));
    Table fit{{"slope", "intercept", "residual"}, {}};
    fit.add(json::array({report.fitted_slope, report.intercept, report.fit_residual}));
    write_file(dir / "fig4_fit.csv", fit);

    write_file(dir / "fig6.csv", curves_table(rescaled_family(quadratic, 4, 11), 0.0, 1.0, points));
    write_file(dir / "fig7.csv", energy_temperature_table(rescaled_family(quadratic, 5, 11), 1e-2, 1e2, 100));

    std::vector<std::pair<std::string, StateDensity>> fig8;
    for (int k = 1; k <= 10; ++k) {
        fig8.emplace_back("power_k" + std::to_string(k), build_density(rescale_to_unit(make_power(6, k))));
    }
    for (int k = 1; k <= 10; ++k) {
        fig8.emplace_back("invpower_k" + std::to_string(k),
                          build_density(rescale_to_unit(make_inverse_power(6, k))));
    }
    write_file(dir / "fig8.csv", curves_table(fig8, 0.0, 1.0, points));
    std::vector<int> ks(10);
    for (int k = 1; k <= 10; ++k) ks[static_cast<std::size_t>(k - 1)] = k;
    write_file(dir / "fig8_peaks.csv", peaks_table(peak_study(ks, 6)));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"qmicro: quantum microcanonical density of states for nondegenerate finite spectra"};
    app.require_subcommand(1);
    app.footer(
        "Exit codes: 0 success, 1 validation or usage error, 2 numerical failure.\n"
        "QMICRO_THREADS caps worker threads. Floats are printed with 17 significant digits.");

    bool as_json = false;

    SpectrumArgs density_spec;
    int density_grid = 512;
    auto* density = app.add_subcommand("density", "tabulate mu, Omega and W on a uniform energy grid");
    add_spectrum_options(density, density_spec);
    density->add_option("--grid", density_grid, "number of grid points (>= 2)")->capture_default_str();
    density->add_flag("--json", as_json, "emit the piecewise representation as JSON");

    SpectrumArgs thermo_spec;
    double tmin = 1e-2, tmax = 1e2;
    int thermo_points = 100;
    bool include_negative = false;
    auto* thermo = app.add_subcommand("thermo", "temperature-energy curve T,E,S,beta on a log grid");
    add_spectrum_options(thermo, thermo_spec);
    thermo->add_option("--tmin", tmin, "smallest |T|")->capture_default_str();
    thermo->add_option("--tmax", tmax, "largest |T|")->capture_default_str();
    thermo->add_option("--points", thermo_points, "grid points per branch")->capture_default_str();
    thermo->add_flag("--include-negative", include_negative, "append the negative-temperature branch");
    thermo->add_flag("--json", as_json, "emit JSON instead of CSV");

    SpectrumArgs sample_spec;
    std::size_t sample_count = 100000;
    std::uint64_t sample_seed = 1;
    int hist_bins = 0;
    std::string sample_route = "simplex";
    auto* sample = app.add_subcommand("sample", "Monte Carlo energy expectations of uniform pure states");
    add_spectrum_options(sample, sample_spec);
    sample->add_option("--count", sample_count, "number of states")->capture_default_str();
    sample->add_option("--seed", sample_seed, "64-bit seed")->capture_default_str();
    sample->add_option("--hist", hist_bins, "histogram bins (0 = raw samples)")->capture_default_str();
    sample->add_option("--route", sample_route, "simplex | sphere")->capture_default_str();
    sample->add_flag("--json", as_json, "emit JSON instead of CSV");

    SpectrumArgs ks_spec;
    std::size_t ks_count = 1000000;
    std::uint64_t ks_seed = 1;
    std::string ks_route = "simplex";
    auto* ks = app.add_subcommand("ks", "Kolmogorov-Smirnov test of sampled energies against mu");
    add_spectrum_options(ks, ks_spec);
    ks->add_option("--count", ks_count, "number of states")->capture_default_str();
    ks->add_option("--seed", ks_seed, "64-bit seed")->capture_default_str();
    ks->add_option("--route", ks_route, "simplex | sphere")->capture_default_str();
    ks->add_flag("--json", as_json, "emit JSON instead of CSV");

    SpectrumArgs dm_spec;
    double dm_energy = 0.0, dm_step = 0.0, dm_window = 0.0;
    std::size_t dm_mc = 0;
    std::uint64_t dm_seed = 1;
    auto* dmatrix = app.add_subcommand("dmatrix", "diagonal of the microcanonical density matrix");
    add_spectrum_options(dmatrix, dm_spec);
    dmatrix->add_option("--energy", dm_energy, "energy E strictly inside the spectrum")->required();
    dmatrix->add_option("--step", dm_step, "level perturbation h (0 = 1e-5 * width)")->capture_default_str();
    dmatrix->add_option("--mc-count", dm_mc, "also estimate by Monte Carlo with this many states (0 = off)")
        ->capture_default_str();
    dmatrix->add_option("--seed", dm_seed, "Monte Carlo seed")->capture_default_str();
    dmatrix->add_option("--window", dm_window, "Monte Carlo energy window (0 = 1% of width)")
        ->capture_default_str();
    dmatrix->add_flag("--json", as_json, "emit JSON instead of CSV");

    int kmin = 2, kmax = 10;
    auto* hell = app.add_subcommand("hellinger", "Hellinger distances between consecutive rescaled linear spectra");
    hell->add_option("--kmin", kmin, "smallest level count")->capture_default_str();
    hell->add_option("--kmax", kmax, "largest level count of the smaller system")->capture_default_str();
    hell->add_flag("--json", as_json, "emit JSON instead of CSV");

    std::string families = "power,invpower";
    int peak_kmax = 10, peak_levels = 6;
    auto* peaks = app.add_subcommand("peaks", "peak of the rescaled density for E_m = m^k and m^(1/k)");
    peaks->add_option("--families", families, "comma list of power, invpower")->capture_default_str();
    peaks->add_option("--kmax", peak_kmax, "k runs from 1 to kmax")->capture_default_str();
    peaks->add_option("--levels", peak_levels, "number of levels")->capture_default_str();
    peaks->add_flag("--json", as_json, "emit JSON instead of CSV");

    std::string out_dir;
    int figure_grid = 512;
    auto* figures = app.add_subcommand("figures", "write one CSV per figure into a directory");
    figures->add_option("--out", out_dir, "output directory")->required();
    figures->add_option("--grid", figure_grid, "energy grid points per density curve")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitValidation;
    }

    try {
        if (*density) {
            if (density_grid < 2) throw std::invalid_argument("--grid must be >= 2");
            const auto d = build_density(density_spec.resolve());
            if (as_json) {
                out << density_json(d).dump(2) << '\n';
            } else {
                write_csv(out, density_table(d, density_grid));
            }
        } else if (*thermo) {
            const auto d = build_density(thermo_spec.resolve());
            if (d.spectrum.n() < 2) throw std::invalid_argument("thermo needs at least three levels");
            emit(out, "thermo", thermo_table(d, tmin, tmax, thermo_points, include_negative), as_json);
        } else if (*sample) {
            const auto s = sample_spec.resolve();
            const auto batch = sample_energies(s, sample_count, sample_seed, parse_route(sample_route));
            if (hist_bins > 0) {
                std::vector<long> counts(static_cast<std::size_t>(hist_bins), 0);
                for (double E : batch.energies) {
                    auto bin = static_cast<long>((E - s.e_min()) / s.width() * hist_bins);
                    bin = std::clamp(bin, 0L, static_cast<long>(hist_bins) - 1);
                    ++counts[static_cast<std::size_t>(bin)];
                }
                Table t{{"bin_left", "bin_right", "count"}, {}};
                const auto edges = grid(s.e_min(), s.e_max(), hist_bins + 1);
                for (int b = 0; b < hist_bins; ++b) {
                    const auto ub = static_cast<std::size_t>(b);
                    t.add(json::array({edges[ub], edges[ub + 1], counts[ub]}));
                }
                emit(out, "sample", t, as_json);
            } else {
                Table t{{"E"}, {}};
                t.rows.reserve(batch.energies.size());
                for (double E : batch.energies) t.add(json::array({E}));
                emit(out, "sample", t, as_json);
            }
        } else if (*ks) {
            const auto s = ks_spec.resolve();
            const auto batch = sample_energies(s, ks_count, ks_seed, parse_route(ks_route));
            const double stat = ks_against_density(batch, build_density(s));
            const double threshold = ks_threshold(ks_count);
            const bool pass = stat < threshold;
            Table t{{"ks", "threshold", "count", "result"}, {}};
            t.add(json::array({stat, threshold, ks_count, pass ? "PASS" : "FAIL"}));
            emit(out, "ks", t, as_json);
            return pass ? kExitOk : kExitNumerical;
        } else if (*dmatrix) {
            const auto s = dm_spec.resolve();
            const auto dm = diag_by_knot_perturbation(s, dm_energy, dm_step);
            if (dm.at_knot) err << "warning: E coincides with a level; result is not characterized there\n";
            if (dm.step_warning) err << "warning: step-halving check disagrees beyond 1e-5; consider --step\n";
            Table t{{"k", "E_k", "entry"}, {}};
            std::optional<ProjectorEstimate> mc;
            if (dm_mc > 0) {
                mc = projector_averages(s, dm_energy, dm_window > 0.0 ? dm_window : default_window(s), dm_mc,
                                        dm_seed);
                t.columns.push_back("mc_entry");
                t.columns.push_back("mc_stderr");
            }
            for (std::size_t k = 0; k < s.size(); ++k) {
                json row = json::array({k, s.level(k), dm.entries[k]});
                if (mc) {
                    row.push_back(mc->mean[k]);
                    row.push_back(mc->std_error[k]);
                }
                t.add(std::move(row));
            }
            emit(out, "dmatrix", t, as_json);
        } else if (*hell) {
            const auto report = convergence_study(kmin, kmax);
            const auto t = hellinger_table(report);
            if (as_json) {
                auto j = table_json("hellinger", t);
                j["slope"] = report.fitted_slope;
                j["residual"] = report.fit_residual;
                out << j.dump(2) << '\n';
            } else {
                write_csv(out, t);
                out << "slope,residual\n"
                    << format_double(report.fitted_slope) << ',' << format_double(report.fit_residual) << '\n';
            }
        } else if (*peaks) {
            std::vector<Family> fams;
            std::stringstream ss(families);
            for (std::string item; std::getline(ss, item, ',');) {
                if (item == "power") fams.push_back(Family::power);
                else if (item == "invpower") fams.push_back(Family::inverse_power);
                else throw std::invalid_argument("unknown family '" + item + "' (use power, invpower)");
            }
            if (peak_kmax < 1) throw std::invalid_argument("--kmax must be >= 1");
            std::vector<int> ks_values;
            for (int k = 1; k <= peak_kmax; ++k) ks_values.push_back(k);
            emit(out, "peaks", peaks_table(peak_study(ks_values, peak_levels, fams)), as_json);
        } else if (*figures) {
            if (figure_grid < 2) throw std::invalid_argument("--grid must be >= 2");
            write_figures(out_dir, figure_grid);
            out << "wrote figures to " << out_dir << '\n';
        }
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const DegenerateSpectrumError& e) {
        err << "invalid spectrum: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitValidation;
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}

}  // namespace qmicro::cli
