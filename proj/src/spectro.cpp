#include "hbarsim/spectro.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <unordered_set>

namespace hbarsim {

namespace {

constexpr double kPi = std::numbers::pi;

void check_grid(const std::vector<double>& grid, const char* what) {
    if (grid.empty())
        throw std::invalid_argument(std::string(what) + " grid must not be empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument(std::string(what) +
                                        " grid must be strictly increasing");
}

// One Gaussian deviate per call (Box-Muller on the raw 64-bit stream), so the
// sequence depends only on the seed, not on the standard library.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

    double operator()() {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();        // [0, 1)
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

private:
    double uniform() { return (rng_() >> 11) * 0x1.0p-53; }
    std::mt19937_64 rng_;
};

}  // namespace

CavityParams::CavityParams(double f_c, double kappa_total, double kappa_in,
                           double kappa_out)
    : f_c_hz(f_c),
      kappa_total_hz(kappa_total),
      kappa_in_hz(kappa_in),
      kappa_out_hz(kappa_out) {
    if (!(f_c_hz > 0.0))
        throw std::invalid_argument("CavityParams: f_c_hz must be positive");
    if (!(kappa_total_hz > 0.0))
        throw std::invalid_argument("CavityParams: kappa_total_hz must be positive");
    if (!(kappa_in_hz >= 0.0) || !(kappa_out_hz >= 0.0))
        throw std::invalid_argument("CavityParams: port rates must be >= 0");
    if (kappa_in_hz + kappa_out_hz > kappa_total_hz)
        throw std::invalid_argument(
            "CavityParams: kappa_in_hz + kappa_out_hz must not exceed kappa_total_hz");
}

QubitParams::QubitParams(double f_max, double flux_, double gamma_q, double g)
    : f_max_hz(f_max), flux(flux_), gamma_q_hz(gamma_q), g_hz(g) {
    if (!(f_max_hz > 0.0))
        throw std::invalid_argument("QubitParams: f_max_hz must be positive");
    if (!(gamma_q_hz > 0.0))
        throw std::invalid_argument("QubitParams: gamma_q_hz must be positive");
    if (!(g_hz >= 0.0))
        throw std::invalid_argument("QubitParams: g_hz must be >= 0");
    if (!std::isfinite(flux))
        throw std::invalid_argument("QubitParams: flux must be finite");
}

SystemModel::SystemModel(CavityParams cavity_, std::optional<QubitParams> qubit_,
                         PhononLadder phonons_, DriveField field_)
    : cavity(cavity_),
      qubit(std::move(qubit_)),
      phonons(std::move(phonons_)),
      field(field_) {
    std::unordered_set<double> seen;
    for (const auto& mode : phonons.modes) {
        if (!(mode.frequency_hz > 0.0))
            throw std::invalid_argument("SystemModel: phonon frequencies must be positive");
        if (!seen.insert(mode.frequency_hz).second)
            throw std::invalid_argument("SystemModel: phonon frequencies must be distinct");
    }
}

double qubit_frequency(const QubitParams& q) {
    // reduce to [-1/2, 1/2]; the sine form makes the half-integer zeros exact
    const double fr = std::fabs(q.flux - std::round(q.flux));
    return q.f_max_hz * std::sqrt(std::sin(kPi * (0.5 - fr)));
}

std::complex<double> transmission(const SystemModel& model, double f_hz,
                                  bool high_power) {
    const CavityParams& c = model.cavity;
    std::complex<double> denom(c.kappa_total_hz / 2.0, c.f_c_hz - f_hz);
    if (model.qubit && !high_power) {
        const double fq = qubit_frequency(*model.qubit);
        const double g = model.qubit->g_hz;
        denom += g * g /
                 std::complex<double>(model.qubit->gamma_q_hz / 2.0, fq - f_hz);
    }
    for (const auto& mode : model.phonons.modes) {
        denom += mode.coupling_hz * mode.coupling_hz /
                 std::complex<double>(mode.linewidth_hz / 2.0,
                                      mode.frequency_hz - f_hz);
    }
    return std::sqrt(c.kappa_in_hz * c.kappa_out_hz) / denom;
}

std::vector<std::complex<double>> dressed_frequencies(const SystemModel& model) {
    const bool has_qubit = model.qubit.has_value();
    const int m = static_cast<int>(model.phonons.modes.size());
    const int dim = 1 + (has_qubit ? 1 : 0) + m;

    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
    a(0, 0) = std::complex<double>(model.cavity.f_c_hz,
                                   -model.cavity.kappa_total_hz / 2.0);
    int row = 1;
    if (has_qubit) {
        a(row, row) = std::complex<double>(qubit_frequency(*model.qubit),
                                           -model.qubit->gamma_q_hz / 2.0);
        a(0, row) = a(row, 0) = model.qubit->g_hz;
        ++row;
    }
    for (const auto& mode : model.phonons.modes) {
        a(row, row) =
            std::complex<double>(mode.frequency_hz, -mode.linewidth_hz / 2.0);
        a(0, row) = a(row, 0) = mode.coupling_hz;
        ++row;
    }

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(a, false);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("dressed_frequencies: eigensolver failed to converge");

    std::vector<std::complex<double>> values(solver.eigenvalues().data(),
                                             solver.eigenvalues().data() + dim);
    std::sort(values.begin(), values.end(),
              [](const auto& lhs, const auto& rhs) { return lhs.real() < rhs.real(); });
    return values;
}

Spectrum compute_spectrum(const SystemModel& model,
                          const std::vector<double>& freq_grid_hz,
                          bool high_power) {
    check_grid(freq_grid_hz, "frequency");
    Spectrum spectrum;
    spectrum.frequencies_hz = freq_grid_hz;
    spectrum.s21.reserve(freq_grid_hz.size());
    for (double f : freq_grid_hz)
        spectrum.s21.push_back(transmission(model, f, high_power));
    return spectrum;
}

Spectrogram sweep_spectrogram(const SystemModel& model,
                              const std::vector<double>& flux_grid,
                              const std::vector<double>& freq_grid_hz,
                              bool high_power) {
    check_grid(flux_grid, "flux");
    check_grid(freq_grid_hz, "frequency");

    Spectrogram gram;
    gram.flux_axis = flux_grid;
    gram.freq_axis_hz = freq_grid_hz;
    gram.magnitude.reserve(flux_grid.size());

    SystemModel working = model;
    for (double flux : flux_grid) {
        if (working.qubit) working.qubit->flux = flux;
        std::vector<double> row;
        row.reserve(freq_grid_hz.size());
        for (double f : freq_grid_hz)
            row.push_back(std::abs(transmission(working, f, high_power)));
        gram.magnitude.push_back(std::move(row));
    }
    return gram;
}

Spectrum add_noise(const Spectrum& spectrum, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0))
        throw std::invalid_argument("add_noise: sigma must be >= 0");
    if (sigma == 0.0) return spectrum;

    Spectrum noisy = spectrum;
    GaussianStream gauss(seed);
    for (auto& value : noisy.s21) {
        const double re = value.real() + sigma * gauss();
        const double im = value.imag() + sigma * gauss();
        value = {re, im};
    }
    return noisy;
}

Spectrogram add_noise(const Spectrogram& spectrogram, double sigma,
                      std::uint64_t seed) {
    if (!(sigma >= 0.0))
        throw std::invalid_argument("add_noise: sigma must be >= 0");
    if (sigma == 0.0) return spectrogram;

    Spectrogram noisy = spectrogram;
    GaussianStream gauss(seed);
    for (auto& row : noisy.magnitude)
        for (auto& value : row)
            value = std::max(0.0, value + sigma * gauss());
    return noisy;
}

}  // namespace hbarsim
