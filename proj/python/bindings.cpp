#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "hbarsim/config.hpp"
#include "hbarsim/csv.hpp"
#include "hbarsim/fitsuite.hpp"

namespace py = pybind11;
using namespace hbarsim;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Hybrid cavity / transmon / bulk-phonon spectroscopy toolkit";

    py::enum_<Parity>(m, "Parity")
        .value("any", Parity::any)
        .value("odd", Parity::odd);

    py::enum_<ExtremumKind>(m, "ExtremumKind")
        .value("peak", ExtremumKind::peak)
        .value("dip", ExtremumKind::dip);

    py::enum_<Branch>(m, "Branch")
        .value("upper", Branch::upper)
        .value("lower", Branch::lower);

    py::class_<MaterialSpec>(m, "MaterialSpec")
        .def(py::init<std::string, double, double>(), py::arg("name"),
             py::arg("c44_pa"), py::arg("density_kg_m3"))
        .def_readonly("name", &MaterialSpec::name)
        .def_readonly("c44_pa", &MaterialSpec::c44_pa)
        .def_readonly("density_kg_m3", &MaterialSpec::density_kg_m3);

    py::class_<SlabGeometry>(m, "SlabGeometry")
        .def(py::init<double, double>(), py::arg("thickness_m"),
             py::arg("dipole_angle_rad") = 0.0)
        .def_readonly("thickness_m", &SlabGeometry::thickness_m)
        .def_readonly("dipole_angle_rad", &SlabGeometry::dipole_angle_rad);

    py::class_<ModeTable::Entry>(m, "ModeTableEntry")
        .def_readonly("n", &ModeTable::Entry::n)
        .def_readonly("f_hz", &ModeTable::Entry::f_hz)
        .def_readonly("lambda_m", &ModeTable::Entry::lambda_m);

    py::class_<ModeTable>(m, "ModeTable")
        .def_readonly("fundamental_hz", &ModeTable::fundamental_hz)
        .def_readonly("entries", &ModeTable::entries);

    py::class_<FdModes>(m, "FdModes")
        .def_readonly("frequencies_hz", &FdModes::frequencies_hz)
        .def_readonly("shapes", &FdModes::shapes);

    m.def("shear_velocity", &shear_velocity, py::arg("material"),
          "Shear sound velocity sqrt(C44 / rho) in m/s");
    m.def("mode_frequency", &mode_frequency, py::arg("n"), py::arg("v_t"),
          py::arg("geometry"), "Harmonic frequency n * v_t / (2 t)");
    m.def("free_spectral_range", &free_spectral_range, py::arg("v_t"),
          py::arg("geometry"));
    m.def("mode_index_near", &mode_index_near, py::arg("f_target_hz"),
          py::arg("fundamental_hz"), py::arg("parity") = Parity::any);
    m.def("make_mode_table", &make_mode_table, py::arg("v_t"), py::arg("geometry"),
          py::arg("n_min"), py::arg("n_max"), py::arg("parity") = Parity::any);
    m.def("fd_eigenfrequencies", &fd_eigenfrequencies, py::arg("v_t"),
          py::arg("geometry"), py::arg("grid_points"), py::arg("count"),
          "Finite-difference eigenfrequencies of the free-free 1D wave equation");
    m.def("fd_eigenmodes", &fd_eigenmodes, py::arg("v_t"), py::arg("geometry"),
          py::arg("grid_points"), py::arg("count"));

    py::class_<StrainProfile>(m, "StrainProfile")
        .def(py::init<int, double, double>(), py::arg("n"), py::arg("thickness_m"),
             py::arg("amplitude") = 1.0)
        .def_readonly("n", &StrainProfile::n)
        .def_readonly("thickness_m", &StrainProfile::thickness_m)
        .def_readonly("amplitude", &StrainProfile::amplitude)
        .def("value", &StrainProfile::value, py::arg("y_m"))
        .def("wavelength_m", &StrainProfile::wavelength_m);

    py::class_<DriveField>(m, "DriveField")
        .def(py::init<>())
        .def(py::init<double, double>(), py::arg("magnitude"), py::arg("angle_rad"))
        .def_readonly("magnitude", &DriveField::magnitude)
        .def_readonly("angle_rad", &DriveField::angle_rad);

    py::class_<CouplingWeight>(m, "CouplingWeight")
        .def_readonly("n", &CouplingWeight::n)
        .def_readonly("weight", &CouplingWeight::weight);

    py::class_<PhononMode>(m, "PhononMode")
        .def(py::init([](int n, double f, double g, double gamma) {
                 return PhononMode{n, f, g, gamma};
             }),
             py::arg("n"), py::arg("frequency_hz"), py::arg("coupling_hz"),
             py::arg("linewidth_hz"))
        .def_readwrite("n", &PhononMode::n)
        .def_readwrite("frequency_hz", &PhononMode::frequency_hz)
        .def_readwrite("coupling_hz", &PhononMode::coupling_hz)
        .def_readwrite("linewidth_hz", &PhononMode::linewidth_hz);

    py::class_<PhononLadder>(m, "PhononLadder")
        .def(py::init<>())
        .def_readwrite("fundamental_hz", &PhononLadder::fundamental_hz)
        .def_readwrite("modes", &PhononLadder::modes);

    m.def("dipole_projection", &dipole_projection, py::arg("angle_rad"));
    m.def("overlap_integral", &overlap_integral, py::arg("n"), py::arg("thickness_m"));
    m.def("coupling_weight", &coupling_weight, py::arg("n"), py::arg("field"));
    m.def("coupled_mode_ladder", &coupled_mode_ladder, py::arg("band_center_hz"),
          py::arg("band_halfwidth_hz"), py::arg("fundamental_hz"),
          py::arg("g_ref_hz"), py::arg("gamma_hz"), py::arg("field"));

    py::class_<CavityParams>(m, "CavityParams")
        .def(py::init<double, double, double, double>(), py::arg("f_c_hz"),
             py::arg("kappa_total_hz"), py::arg("kappa_in_hz"),
             py::arg("kappa_out_hz"))
        .def_readonly("f_c_hz", &CavityParams::f_c_hz)
        .def_readonly("kappa_total_hz", &CavityParams::kappa_total_hz)
        .def_readonly("kappa_in_hz", &CavityParams::kappa_in_hz)
        .def_readonly("kappa_out_hz", &CavityParams::kappa_out_hz);

    py::class_<QubitParams>(m, "QubitParams")
        .def(py::init<double, double, double, double>(), py::arg("f_max_hz"),
             py::arg("flux"), py::arg("gamma_q_hz"), py::arg("g_hz"))
        .def_readwrite("f_max_hz", &QubitParams::f_max_hz)
        .def_readwrite("flux", &QubitParams::flux)
        .def_readwrite("gamma_q_hz", &QubitParams::gamma_q_hz)
        .def_readwrite("g_hz", &QubitParams::g_hz);

    py::class_<SystemModel>(m, "SystemModel")
        .def(py::init<CavityParams, std::optional<QubitParams>, PhononLadder,
                      DriveField>(),
             py::arg("cavity"), py::arg("qubit"), py::arg("phonons"),
             py::arg("field") = DriveField())
        .def_readonly("cavity", &SystemModel::cavity)
        .def_readonly("qubit", &SystemModel::qubit)
        .def_readonly("phonons", &SystemModel::phonons)
        .def_readonly("field", &SystemModel::field);

    py::class_<Spectrum>(m, "Spectrum")
        .def(py::init<>())
        .def_readwrite("frequencies_hz", &Spectrum::frequencies_hz)
        .def_readwrite("s21", &Spectrum::s21);

    py::class_<Spectrogram>(m, "Spectrogram")
        .def(py::init<>())
        .def_readwrite("flux_axis", &Spectrogram::flux_axis)
        .def_readwrite("freq_axis_hz", &Spectrogram::freq_axis_hz)
        .def_readwrite("magnitude", &Spectrogram::magnitude);

    m.def("qubit_frequency", &qubit_frequency, py::arg("qubit"),
          "f_max * sqrt(|cos(pi * flux)|), exactly periodic in the flux");
    m.def("transmission", &transmission, py::arg("model"), py::arg("f_hz"),
          py::arg("high_power") = false, "Two-port S21 at one frequency");
    m.def("dressed_frequencies", &dressed_frequencies, py::arg("model"),
          "Complex eigenfrequencies of the coupled-mode matrix");
    m.def("compute_spectrum", &compute_spectrum, py::arg("model"),
          py::arg("freq_grid_hz"), py::arg("high_power") = false);
    m.def("sweep_spectrogram", &sweep_spectrogram, py::arg("model"),
          py::arg("flux_grid"), py::arg("freq_grid_hz"),
          py::arg("high_power") = false);
    m.def("add_noise",
          py::overload_cast<const Spectrum&, double, std::uint64_t>(&add_noise),
          py::arg("spectrum"), py::arg("sigma"), py::arg("seed"));
    m.def("add_noise",
          py::overload_cast<const Spectrogram&, double, std::uint64_t>(&add_noise),
          py::arg("spectrogram"), py::arg("sigma"), py::arg("seed"));

    py::class_<Extremum>(m, "Extremum")
        .def_readonly("f_hz", &Extremum::f_hz)
        .def_readonly("value", &Extremum::value);

    py::class_<BranchPoint>(m, "BranchPoint")
        .def(py::init([](double flux, double f, Branch b) {
                 return BranchPoint{flux, f, b};
             }),
             py::arg("flux"), py::arg("f_peak_hz"), py::arg("branch"))
        .def_readwrite("flux", &BranchPoint::flux)
        .def_readwrite("f_peak_hz", &BranchPoint::f_peak_hz)
        .def_readwrite("branch", &BranchPoint::branch);

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("parameters", &FitResult::parameters)
        .def_readonly("uncertainties", &FitResult::uncertainties)
        .def_readonly("residual_norm", &FitResult::residual_norm)
        .def_readonly("converged", &FitResult::converged)
        .def_readonly("iterations", &FitResult::iterations);

    m.def("extract_peaks", &extract_peaks, py::arg("spectrum"), py::arg("kind"),
          py::arg("prominence"));
    m.def("extract_branches", &extract_branches, py::arg("spectrogram"),
          py::arg("prominence"));
    m.def("fit_avoided_crossing", &fit_avoided_crossing, py::arg("points"));
    m.def("fit_notches", &fit_notches, py::arg("spectrum"),
          py::arg("initial_ladder"), py::arg("cavity_guess"));
    m.def("q_factor", &q_factor, py::arg("spectrum"));
    m.def("estimate_phonon_q", &estimate_phonon_q, py::arg("notch_fit"));

    py::class_<PhononBand>(m, "PhononBand")
        .def_readonly("center_hz", &PhononBand::center_hz)
        .def_readonly("halfwidth_hz", &PhononBand::halfwidth_hz)
        .def_readonly("g_ref_hz", &PhononBand::g_ref_hz)
        .def_readonly("gamma_hz", &PhononBand::gamma_hz);

    py::class_<SweepSpec>(m, "SweepSpec")
        .def_readonly("f_min_hz", &SweepSpec::f_min_hz)
        .def_readonly("f_max_hz", &SweepSpec::f_max_hz)
        .def_readonly("f_points", &SweepSpec::f_points)
        .def_readonly("flux_min", &SweepSpec::flux_min)
        .def_readonly("flux_max", &SweepSpec::flux_max)
        .def_readonly("flux_points", &SweepSpec::flux_points)
        .def_readonly("eigen_grid_points", &SweepSpec::eigen_grid_points)
        .def_readonly("eigen_mode_count", &SweepSpec::eigen_mode_count);

    py::class_<NoiseSpec>(m, "NoiseSpec")
        .def_readonly("sigma", &NoiseSpec::sigma)
        .def_readonly("seed", &NoiseSpec::seed);

    py::class_<RunConfig>(m, "RunConfig")
        .def_readonly("material", &RunConfig::material)
        .def_readonly("geometry", &RunConfig::geometry)
        .def_readonly("cavity", &RunConfig::cavity)
        .def_readonly("qubit", &RunConfig::qubit)
        .def_readonly("phonon_band", &RunConfig::phonon_band)
        .def_readonly("sweep", &RunConfig::sweep)
        .def_readonly("noise", &RunConfig::noise);

    m.def("load_config", &load_config, py::arg("path"),
          "Load and validate a JSON run configuration");

#ifdef VERSION_INFO
#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)
    m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
    m.attr("__version__") = "dev";
#endif
}
