#pragma once

#include <string>
#include <vector>

namespace hbarsim {

/// Elastic properties of the piezoelectric slab. Transverse (shear) waves
/// are governed by the C44 stiffness component and the mass density.
struct MaterialSpec {
    std::string name;
    double c44_pa;
    double density_kg_m3;

    MaterialSpec(std::string name, double c44_pa, double density_kg_m3);
};

/// Through-thickness geometry of the slab plus the orientation of the device
/// dipole relative to the cavity field. The angle is folded into [0, pi/2]
/// at construction (the coupling only depends on |cos theta|).
struct SlabGeometry {
    double thickness_m;
    double dipole_angle_rad;

    explicit SlabGeometry(double thickness_m, double dipole_angle_rad = 0.0);
};

/// Bulk standing-wave ladder: f_n = n * fundamental, lambda_n = 2t / n.
struct ModeTable {
    struct Entry {
        int n;
        double f_hz;
        double lambda_m;
    };
    double fundamental_hz = 0.0;
    std::vector<Entry> entries;
};

enum class Parity { any, odd };

/// Fold an arbitrary dipole angle into [0, pi/2] using the symmetry of the
/// projection |cos theta| (period pi, even).
double fold_dipole_angle(double angle_rad);

/// Shear sound velocity v_t = sqrt(C44 / rho).
double shear_velocity(const MaterialSpec& material);

/// Frequency of the n-th through-thickness harmonic, f_n = n * v_t / (2 t).
/// Throws std::domain_error for n < 1.
double mode_frequency(int n, double v_t, const SlabGeometry& geometry);

/// Spacing between adjacent harmonics, v_t / (2 t).
double free_spectral_range(double v_t, const SlabGeometry& geometry);

/// Harmonic index whose frequency is closest to f_target, optionally
/// restricted to odd indices. Ties resolve toward the smaller index.
int mode_index_near(double f_target_hz, double fundamental_hz,
                    Parity parity = Parity::any);

/// Ladder entries for every index of the requested parity in [n_min, n_max].
ModeTable make_mode_table(double v_t, const SlabGeometry& geometry, int n_min,
                          int n_max, Parity parity = Parity::any);

/// Lowest `count` nonzero eigenfrequencies (Hz, ascending) of the 1D wave
/// equation -v_t^2 u'' = omega^2 u on [0, t] with stress-free faces,
/// discretized by second-order central differences on `grid_points` nodes.
/// The zero-frequency rigid-body mode is filtered out by a relative
/// eigenvalue threshold of 1e-6 against the squared fundamental scale
/// (equivalently, frequencies below 1e-3 * v_t/(2t) are dropped). Requires
/// grid_points >= 16, count >= 1 and count < grid_points / 4.
std::vector<double> fd_eigenfrequencies(double v_t, const SlabGeometry& geometry,
                                        int grid_points, int count);

/// Eigenfrequencies together with the displacement mode shapes on the grid.
struct FdModes {
    std::vector<double> frequencies_hz;
    std::vector<std::vector<double>> shapes;  // one displacement vector per mode
};

FdModes fd_eigenmodes(double v_t, const SlabGeometry& geometry, int grid_points,
                      int count);

}  // namespace hbarsim
