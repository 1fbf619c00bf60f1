#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "hbarsim/config.hpp"
#include "hbarsim/csv.hpp"
#include "hbarsim/errors.hpp"
#include "hbarsim/fitsuite.hpp"

namespace {

using namespace hbarsim;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitFit = 4;

struct Args {
    std::string config_path;
    std::string in_path;
    std::string out_path;
    bool high_power = false;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int f_points = 0;
    int flux_points = 0;
    bool f_points_set = false;
    bool flux_points_set = false;
    std::string table_path;
};

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> grid;
    grid.reserve(n);
    if (n == 1) {
        grid.push_back(lo);
        return grid;
    }
    for (int i = 0; i < n; ++i) grid.push_back(lo + (hi - lo) * i / (n - 1.0));
    return grid;
}

void write_file(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file '" + path + "'");
    out << content;
    if (!out) throw IoError("failed writing output file '" + path + "'");
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open input file '" + path + "'");
    return in;
}

PhononLadder ladder_from(const RunConfig& cfg) {
    const double v_t = shear_velocity(cfg.material);
    const double fundamental = free_spectral_range(v_t, cfg.geometry);
    const DriveField field(1.0, cfg.geometry.dipole_angle_rad);
    return coupled_mode_ladder(cfg.phonon_band.center_hz, cfg.phonon_band.halfwidth_hz,
                               fundamental, cfg.phonon_band.g_ref_hz,
                               cfg.phonon_band.gamma_hz, field);
}

int run_modes(const Args& args) {
    const RunConfig cfg = load_config(args.config_path);
    const PhononLadder ladder = ladder_from(cfg);

    std::ostringstream out;
    write_ladder_csv(out, ladder);
    write_file(args.out_path, out.str());

    if (!args.table_path.empty()) {
        const double v_t = shear_velocity(cfg.material);
        ModeTable table;
        if (!ladder.modes.empty())
            table = make_mode_table(v_t, cfg.geometry, ladder.modes.front().n,
                                    ladder.modes.back().n, Parity::odd);
        else
            table.fundamental_hz = free_spectral_range(v_t, cfg.geometry);
        std::ostringstream tout;
        write_mode_table_csv(tout, table);
        write_file(args.table_path, tout.str());
    }
    return kExitOk;
}

int run_eigen(const Args& args) {
    const RunConfig cfg = load_config(args.config_path);
    const double v_t = shear_velocity(cfg.material);
    const double fundamental = free_spectral_range(v_t, cfg.geometry);
    const auto fd = fd_eigenfrequencies(v_t, cfg.geometry, cfg.sweep.eigen_grid_points,
                                        cfg.sweep.eigen_mode_count);

    std::vector<EigenComparisonRow> rows;
    for (std::size_t k = 0; k < fd.size(); ++k) {
        const double analytic = (k + 1) * fundamental;
        rows.push_back({static_cast<int>(k + 1), fd[k], analytic,
                        (fd[k] - analytic) / analytic});
    }
    std::ostringstream out;
    write_eigen_comparison_csv(out, rows);
    write_file(args.out_path, out.str());
    return kExitOk;
}

int run_simulate(const Args& args, bool with_noise) {
    const RunConfig cfg = load_config(args.config_path);
    const SystemModel model(cfg.cavity, cfg.qubit, ladder_from(cfg),
                            DriveField(1.0, cfg.geometry.dipole_angle_rad));

    const int f_points = args.f_points_set ? args.f_points : cfg.sweep.f_points;
    const int flux_points =
        args.flux_points_set ? args.flux_points : cfg.sweep.flux_points;
    if (f_points < 1) throw ConfigError("'--f-points' must be >= 1");
    if (flux_points < 1) throw ConfigError("'--flux-points' must be >= 1");

    const auto freq_grid = linspace(cfg.sweep.f_min_hz, cfg.sweep.f_max_hz, f_points);
    const std::uint64_t seed = args.seed_set ? args.seed : cfg.noise.seed;

    std::ostringstream out;
    if (flux_points >= 2) {
        const auto flux_grid =
            linspace(cfg.sweep.flux_min, cfg.sweep.flux_max, flux_points);
        Spectrogram gram =
            sweep_spectrogram(model, flux_grid, freq_grid, args.high_power);
        if (with_noise) gram = add_noise(gram, cfg.noise.sigma, seed);
        write_spectrogram_csv(out, gram);
    } else {
        Spectrum spectrum = compute_spectrum(model, freq_grid, args.high_power);
        if (with_noise) spectrum = add_noise(spectrum, cfg.noise.sigma, seed);
        write_spectrum_csv(out, spectrum);
    }
    write_file(args.out_path, out.str());
    return kExitOk;
}

int finish_fit(const Args& args, const FitResult& result) {
    write_file(args.out_path, fit_result_to_json(result));
    if (!result.converged) {
        std::cerr << "error: fit did not converge (result written)\n";
        return kExitFit;
    }
    return kExitOk;
}

int run_fit_crossing(const Args& args) {
    load_config(args.config_path);  // validate the pipeline configuration
    auto in = open_input(args.in_path);
    const Spectrogram gram = read_spectrogram_csv(in);

    double max_mag = 0.0;
    for (const auto& row : gram.magnitude)
        for (double v : row) max_mag = std::max(max_mag, v);
    if (!(max_mag > 0.0)) throw FitError("fit-crossing: spectrogram is all zero");
    const BranchPoints points = extract_branches(gram, 0.05 * max_mag);
    return finish_fit(args, fit_avoided_crossing(points));
}

int run_fit_notches(const Args& args) {
    const RunConfig cfg = load_config(args.config_path);
    auto in = open_input(args.in_path);
    const Spectrum spectrum = read_spectrum_csv(in);
    return finish_fit(args, fit_notches(spectrum, ladder_from(cfg), cfg.cavity));
}

int run_qfactor(const Args& args) {
    load_config(args.config_path);
    auto in = open_input(args.in_path);
    const Spectrum spectrum = read_spectrum_csv(in);
    return finish_fit(args, q_factor(spectrum));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hbarsim: cavity / transmon / bulk-phonon spectroscopy toolkit"};
    app.require_subcommand(1);

    Args args;
    auto add_common = [&](CLI::App* sub, bool needs_input) {
        sub->add_option("--config", args.config_path, "JSON run configuration")
            ->required();
        sub->add_option("--out", args.out_path, "Output file (default: stdout)");
        if (needs_input)
            sub->add_option("--in", args.in_path, "Input data file")->required();
    };

    auto* modes = app.add_subcommand("modes", "Emit the coupled phonon ladder CSV");
    add_common(modes, false);
    modes->add_option("--table", args.table_path,
                      "Also write the acoustic mode table CSV to this path");

    auto* eigen = app.add_subcommand(
        "eigen", "Emit the finite-difference vs analytic eigenfrequency CSV");
    add_common(eigen, false);

    auto* simulate =
        app.add_subcommand("simulate", "Synthesize a spectrum or spectrogram CSV");
    auto* synth = app.add_subcommand(
        "synth", "Synthesize like 'simulate' and add seeded noise");
    for (CLI::App* sub : {simulate, synth}) {
        add_common(sub, false);
        sub->add_flag("--high-power", args.high_power,
                      "Drop the qubit term (saturated qubit)");
        sub->add_option("--f-points", args.f_points, "Override sweep.f_points")
            ->each([&args](const std::string&) { args.f_points_set = true; });
        sub->add_option("--flux-points", args.flux_points,
                        "Override sweep.flux_points")
            ->each([&args](const std::string&) { args.flux_points_set = true; });
    }
    synth->add_option("--seed", args.seed, "Override noise.seed")
        ->each([&args](const std::string&) { args.seed_set = true; });

    auto* fit_crossing = app.add_subcommand(
        "fit-crossing", "Fit an avoided crossing from a spectrogram CSV");
    add_common(fit_crossing, true);

    auto* fit_notch = app.add_subcommand(
        "fit-notches", "Fit the high-power notch spectrum from a spectrum CSV");
    add_common(fit_notch, true);

    auto* qfactor =
        app.add_subcommand("qfactor", "Extract the quality factor of a resonance");
    add_common(qfactor, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (modes->parsed()) return run_modes(args);
        if (eigen->parsed()) return run_eigen(args);
        if (simulate->parsed()) return run_simulate(args, false);
        if (synth->parsed()) return run_simulate(args, true);
        if (fit_crossing->parsed()) return run_fit_crossing(args);
        if (fit_notch->parsed()) return run_fit_notches(args);
        if (qfactor->parsed()) return run_qfactor(args);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const FitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFit;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
