#include "hbarsim/piezo.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hbarsim {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = kPi / 2.0;
}  // namespace

StrainProfile::StrainProfile(int n_, double thickness, double amplitude_)
    : amplitude(amplitude_), n(n_), thickness_m(thickness) {
    if (n < 1)
        throw std::invalid_argument("StrainProfile: n must be >= 1");
    if (!(thickness_m > 0.0))
        throw std::invalid_argument("StrainProfile: thickness_m must be positive");
}

double StrainProfile::value(double y_m) const {
    return amplitude * std::sin(n * kPi * y_m / thickness_m);
}

double StrainProfile::wavelength_m() const { return 2.0 * thickness_m / n; }

DriveField::DriveField(double magnitude_, double angle)
    : magnitude(magnitude_), angle_rad(angle) {
    if (!(magnitude >= 0.0))
        throw std::invalid_argument("DriveField: magnitude must be >= 0");
    if (!std::isfinite(angle_rad))
        throw std::invalid_argument("DriveField: angle must be finite");
}

double dipole_projection(double angle_rad) {
    const double folded = fold_dipole_angle(angle_rad);
    // sin(pi/2 - a) == cos(a), but is exactly 0 when a lands on pi/2
    return std::sin(kHalfPi - folded);
}

double overlap_integral(int n, double thickness_m) {
    if (n < 1)
        throw std::invalid_argument("overlap_integral: n must be >= 1");
    if (!(thickness_m > 0.0))
        throw std::invalid_argument("overlap_integral: thickness must be positive");
    if (n % 2 == 0) return 0.0;  // even harmonics cancel exactly
    return 2.0 * thickness_m / (n * kPi);
}

CouplingWeight coupling_weight(int n, const DriveField& field) {
    if (n < 1)
        throw std::invalid_argument("coupling_weight: n must be >= 1");
    if (n % 2 == 0) return {n, 0.0};
    return {n, dipole_projection(field.angle_rad) / n};
}

PhononLadder coupled_mode_ladder(double band_center_hz, double band_halfwidth_hz,
                                 double fundamental_hz, double g_ref_hz,
                                 double gamma_hz, const DriveField& field) {
    if (!(band_halfwidth_hz > 0.0))
        throw std::invalid_argument("coupled_mode_ladder: halfwidth must be positive");
    if (!(fundamental_hz > 0.0))
        throw std::invalid_argument("coupled_mode_ladder: fundamental must be positive");
    if (!(g_ref_hz > 0.0))
        throw std::invalid_argument("coupled_mode_ladder: g_ref must be positive");
    if (!(gamma_hz > 0.0))
        throw std::invalid_argument("coupled_mode_ladder: gamma must be positive");

    PhononLadder ladder;
    ladder.fundamental_hz = fundamental_hz;

    const double projection = dipole_projection(field.angle_rad);
    const int n_ref = mode_index_near(band_center_hz, fundamental_hz, Parity::odd);
    const double hi = band_center_hz + band_halfwidth_hz;

    long long n = std::max(
        1LL, static_cast<long long>(std::floor((band_center_hz - band_halfwidth_hz) /
                                               fundamental_hz)) - 1);
    if (n % 2 == 0) ++n;
    for (;; n += 2) {
        const double f = static_cast<double>(n) * fundamental_hz;
        const bool inside = std::fabs(f - band_center_hz) <= band_halfwidth_hz;
        if (f > hi && !inside) break;
        if (inside)
            ladder.modes.push_back({static_cast<int>(n), f,
                                    g_ref_hz * (static_cast<double>(n_ref) / n) * projection,
                                    gamma_hz});
    }
    return ladder;
}

}  // namespace hbarsim
