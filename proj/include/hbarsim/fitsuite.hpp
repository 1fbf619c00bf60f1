#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hbarsim/spectro.hpp"

namespace hbarsim {

enum class ExtremumKind { peak, dip };
enum class Branch { upper, lower };

struct BranchPoint {
    double flux;
    double f_peak_hz;
    Branch branch;
};
using BranchPoints = std::vector<BranchPoint>;

/// Recovered parameters with 1-sigma uncertainties from the linearized
/// residual covariance. residual_norm is ||r||_2 / ||data||_2, which keeps it
/// dimensionless for frequency-valued and magnitude-valued fits alike.
struct FitResult {
    std::map<std::string, double> parameters;
    std::map<std::string, double> uncertainties;
    double residual_norm = 0.0;
    bool converged = false;
    int iterations = 0;
};

struct Extremum {
    double f_hz;
    double value;
};

/// Damped Gauss-Newton (Levenberg-style) on a residual vector with central
/// finite-difference Jacobians. Steps that would increase the residual norm
/// are rejected, so accepted norms decrease monotonically.
struct LeastSquaresOptions {
    int max_iterations = 200;
    double rel_tol = 1e-9;     // relative residual-norm change
    double grad_tol = 1e-12;   // scaled gradient norm
    double fd_rel_step = 1e-6;
    std::vector<double>* trace = nullptr;  // accepted residual norms
};

struct LeastSquaresResult {
    Eigen::VectorXd x;
    Eigen::MatrixXd covariance;  // sigma^2 (J^T J)^-1 at the solution
    double residual_norm = 0.0;
    bool converged = false;
    int iterations = 0;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

LeastSquaresResult least_squares(const ResidualFn& residual,
                                 Eigen::VectorXd x0,
                                 const LeastSquaresOptions& options = {});

/// Local extrema of |S21| whose prominence (height over the surrounding
/// saddle level) exceeds the threshold, refined by quadratic interpolation
/// through each extremum and its neighbors. Needs at least 3 samples.
std::vector<Extremum> extract_peaks(const Spectrum& spectrum, ExtremumKind kind,
                                    double prominence);

/// Branch points from a spectrogram: per flux row the two most prominent
/// peaks, sorted by frequency, define the upper and lower branch. Rows with a
/// single qualifying peak contribute one upper point; rows with none are
/// skipped.
BranchPoints extract_branches(const Spectrogram& spectrogram, double prominence);

/// Fit f(flux) = (f_c + f_q)/2 +- sqrt(g^2 + (f_q - f_c)^2 / 4) with
/// f_q = f_max sqrt|cos(pi * flux_scale * (flux - flux_offset))|.
/// Free parameters: f_c_hz, f_max_hz, flux_offset, flux_scale, g_hz.
/// Needs at least 6 points covering both branches; returns g >= 0.
FitResult fit_avoided_crossing(const BranchPoints& points);

/// Fit |S21(f)| of the high-power model (cavity plus phonon self-energies,
/// no qubit). Free parameters: f_c_hz, kappa_total_hz and per-mode
/// mode{i}_f_hz, mode{i}_g_hz, mode{i}_gamma_hz (i starting at 1). The port
/// rates are fixed from cavity_guess. Also reports fsr_hz, the mean
/// consecutive mode spacing, with its standard error.
FitResult fit_notches(const Spectrum& spectrum, const PhononLadder& initial_ladder,
                      const CavityParams& cavity_guess);

/// Fit a single Lorentzian to |S21|^2 and report q = f0 / fwhm.
/// Parameters: f0_hz, fwhm_hz, amplitude, q. Throws FitError when the trace
/// has no dominant resonance.
FitResult q_factor(const Spectrum& spectrum);

/// Q_m = f_m / gamma_m for every mode in a fit_notches result.
std::vector<double> estimate_phonon_q(const FitResult& notch_fit);

}  // namespace hbarsim
