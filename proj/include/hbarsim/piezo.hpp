#pragma once

#include <vector>

#include "hbarsim/acoustics.hpp"

namespace hbarsim {

/// Normalized transverse strain standing wave S(y) = S0 * sin(2 pi y / lambda_n)
/// with lambda_n = 2t/n; vanishes at both faces for every n.
struct StrainProfile {
    double amplitude = 1.0;
    int n;
    double thickness_m;

    StrainProfile(int n, double thickness_m, double amplitude = 1.0);

    double value(double y_m) const;
    double wavelength_m() const;
};

/// Spatially uniform drive field; angle is measured against the device dipole
/// axis. Magnitude stays at 1 for relative couplings.
struct DriveField {
    double magnitude = 1.0;
    double angle_rad = 0.0;

    DriveField() = default;
    DriveField(double magnitude, double angle_rad);
};

struct CouplingWeight {
    int n;
    double weight;  // normalized so n=1 at theta=0 gives 1
};

struct PhononMode {
    int n;
    double frequency_hz;
    double coupling_hz;
    double linewidth_hz;
};

struct PhononLadder {
    double fundamental_hz = 0.0;
    std::vector<PhononMode> modes;
};

/// |cos theta| after folding by the dipole symmetry. Exactly zero at
/// theta = pi/2 and exactly one at theta = 0.
double dipole_projection(double angle_rad);

/// Closed form of the drive-strain overlap, integral of sin(n pi y / t) over
/// [0, t]: 2t/(n pi) for odd n, exactly zero for even n.
double overlap_integral(int n, double thickness_m);

/// Relative electromechanical coupling of harmonic n in the given field:
/// |cos theta| * overlap(n)/overlap(1), i.e. |cos theta| / n for odd n and
/// zero for even n.
CouplingWeight coupling_weight(int n, const DriveField& field);

/// All odd harmonics with |f_n - band_center| <= band_halfwidth. Couplings
/// follow g_ref * (n_ref / n) * |cos theta| where n_ref is the odd index
/// nearest band_center; every mode gets linewidth gamma_hz. An empty band
/// yields an empty ladder.
PhononLadder coupled_mode_ladder(double band_center_hz, double band_halfwidth_hz,
                                 double fundamental_hz, double g_ref_hz,
                                 double gamma_hz, const DriveField& field);

}  // namespace hbarsim
