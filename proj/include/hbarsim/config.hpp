#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "hbarsim/acoustics.hpp"
#include "hbarsim/spectro.hpp"

namespace hbarsim {

struct PhononBand {
    double center_hz;
    double halfwidth_hz;
    double g_ref_hz;
    double gamma_hz;
};

struct SweepSpec {
    double f_min_hz;
    double f_max_hz;
    int f_points;
    double flux_min = 0.0;
    double flux_max = 0.0;
    int flux_points = 1;
    int eigen_grid_points = 2001;
    int eigen_mode_count = 20;
};

struct NoiseSpec {
    double sigma = 0.0;
    std::uint64_t seed = 1;
};

struct RunConfig {
    MaterialSpec material;
    SlabGeometry geometry;
    CavityParams cavity;
    std::optional<QubitParams> qubit;
    PhononBand phonon_band;
    SweepSpec sweep;
    NoiseSpec noise;
};

/// Load and validate a JSON run configuration. The schema is strict: unknown
/// keys are rejected and every physical quantity carries a unit suffix in its
/// key (_hz, _m, _pa, _kg_m3, _rad). Throws ConfigError naming the offending
/// key, or IoError when the file cannot be read.
RunConfig load_config(const std::filesystem::path& path);

}  // namespace hbarsim
