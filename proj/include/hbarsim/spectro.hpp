#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "hbarsim/piezo.hpp"

namespace hbarsim {

/// Two-port cavity: bare frequency, total linewidth and the two port rates.
/// Passivity requires kappa_in + kappa_out <= kappa_total.
struct CavityParams {
    double f_c_hz;
    double kappa_total_hz;
    double kappa_in_hz;
    double kappa_out_hz;

    CavityParams(double f_c_hz, double kappa_total_hz, double kappa_in_hz,
                 double kappa_out_hz);
};

/// Flux-tunable transmon treated as a linear mode: f_q drops from f_max with
/// the sqrt|cos| dispersion, period one flux quantum.
struct QubitParams {
    double f_max_hz;
    double flux;  // Phi / Phi_0
    double gamma_q_hz;
    double g_hz;  // qubit-cavity coupling

    QubitParams(double f_max_hz, double flux, double gamma_q_hz, double g_hz);
};

/// Cavity dressed by an optional qubit and a phonon ladder. Phonon couplings
/// are stored already projected onto the drive field (the ladder builder
/// applies |cos theta| once); `field` records the orientation used.
struct SystemModel {
    CavityParams cavity;
    std::optional<QubitParams> qubit;
    PhononLadder phonons;
    DriveField field;

    SystemModel(CavityParams cavity, std::optional<QubitParams> qubit,
                PhononLadder phonons, DriveField field = {});
};

struct Spectrum {
    std::vector<double> frequencies_hz;          // strictly increasing
    std::vector<std::complex<double>> s21;
};

struct Spectrogram {
    std::vector<double> flux_axis;
    std::vector<double> freq_axis_hz;
    std::vector<std::vector<double>> magnitude;  // one row of |S21| per flux
};

/// Qubit frequency f_max * sqrt(|cos(pi * flux)|). The flux is reduced to
/// [-1/2, 1/2] first, so the period-1 symmetry and the zeros at half-integer
/// flux are exact in floating point.
double qubit_frequency(const QubitParams& q);

/// Linear-response transmission S21(f) = sqrt(kappa_in * kappa_out) / D(f)
/// with D(f) = i(f_c - f) + kappa_total/2 + Sigma_qubit(f) + Sigma_phonon(f).
/// Each self-energy is g^2 / (i(f_mode - f) + gamma/2); all quantities are
/// ordinary frequencies in Hz. With high_power set the qubit term is dropped
/// entirely (saturated qubit), the phonon terms remain.
std::complex<double> transmission(const SystemModel& model, double f_hz,
                                  bool high_power = false);

/// Complex eigenfrequencies of the coupled-mode matrix with diagonal
/// f_j - i*gamma_j/2 and symmetric couplings cavity-qubit (g) and
/// cavity-phonon (g_m); qubit and phonons do not couple directly.
/// Sorted by real part.
std::vector<std::complex<double>> dressed_frequencies(const SystemModel& model);

/// Evaluate S21 over a strictly increasing frequency grid.
Spectrum compute_spectrum(const SystemModel& model,
                          const std::vector<double>& freq_grid_hz,
                          bool high_power = false);

/// |S21| over freq_grid for each flux value in flux_grid. With high_power set
/// the qubit is saturated, so every row is identical.
Spectrogram sweep_spectrogram(const SystemModel& model,
                              const std::vector<double>& flux_grid,
                              const std::vector<double>& freq_grid_hz,
                              bool high_power = false);

/// Seeded Gaussian noise of standard deviation sigma on the real and
/// imaginary parts. Identical seeds give bit-identical output.
Spectrum add_noise(const Spectrum& spectrum, double sigma, std::uint64_t seed);

/// Seeded Gaussian noise on the magnitude, clipped at zero.
Spectrogram add_noise(const Spectrogram& spectrogram, double sigma,
                      std::uint64_t seed);

}  // namespace hbarsim
