#include "hbarsim/acoustics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace hbarsim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = kPi / 2.0;

// Tridiagonal solve with partial pivoting (LAPACK dgtsv scheme, dl reused as
// the second superdiagonal). Exact zero pivots are replaced by pivot_floor so
// the solve survives the near-singular shifts of inverse iteration.
void solve_tridiagonal(std::vector<double> dl, std::vector<double> d,
                       std::vector<double> du, std::vector<double>& b,
                       double pivot_floor) {
    const int n = static_cast<int>(d.size());
    for (int i = 0; i < n - 1; ++i) {
        if (std::fabs(d[i]) >= std::fabs(dl[i])) {
            if (d[i] == 0.0) d[i] = pivot_floor;
            const double fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
            dl[i] = 0.0;  // no fill-in
        } else {
            const double fact = d[i] / dl[i];
            d[i] = dl[i];
            const double temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if (i < n - 2) {
                dl[i] = du[i + 1];  // fill-in element
                du[i + 1] = -fact * dl[i];
            } else {
                dl[i] = 0.0;
            }
            du[i] = temp;
            const double tb = b[i];
            b[i] = b[i + 1];
            b[i + 1] = tb - fact * b[i + 1];
        }
    }
    if (d[n - 1] == 0.0) d[n - 1] = pivot_floor;

    b[n - 1] /= d[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for (int i = n - 3; i >= 0; --i)
        b[i] = (b[i] - du[i] * b[i + 1] - dl[i] * b[i + 2]) / d[i];
}

struct Tridiagonal {
    std::vector<double> diag;
    std::vector<double> off;
};

// Symmetrized free-free Laplacian of -v^2 u'' on a uniform vertex grid.
// Neumann faces give the generalized problem K u = lambda M u with half mass
// at the end nodes; the diagonal similarity transform below makes it a
// symmetric standard problem with the same eigenvalues.
Tridiagonal assemble_free_free(double v_t, double thickness, int grid_points) {
    const double h = thickness / (grid_points - 1);
    const double c = v_t * v_t / (h * h);
    Tridiagonal m;
    m.diag.assign(grid_points, 2.0 * c);
    m.off.assign(grid_points - 1, -c);
    m.off.front() = -std::numbers::sqrt2 * c;
    m.off.back() = -std::numbers::sqrt2 * c;
    return m;
}

Eigen::VectorXd eigenvalues_of(const Tridiagonal& m, int grid_points,
                               double thickness) {
    Eigen::Map<const Eigen::VectorXd> diag(m.diag.data(), grid_points);
    Eigen::Map<const Eigen::VectorXd> off(m.off.data(), grid_points - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "fd eigensolve failed to converge (grid_points=" << grid_points
            << ", h=" << thickness / (grid_points - 1) << ")";
        throw std::runtime_error(msg.str());
    }
    return solver.eigenvalues();
}

// One eigenvector of the symmetric tridiagonal matrix by inverse iteration.
std::vector<double> inverse_iteration(const Tridiagonal& m, double mu) {
    const int n = static_cast<int>(m.diag.size());
    double scale = 0.0;
    for (double v : m.diag) scale = std::max(scale, std::fabs(v));
    for (double v : m.off) scale = std::max(scale, std::fabs(v));
    const double pivot_floor =
        std::numeric_limits<double>::epsilon() * std::max(scale, 1.0);

    std::mt19937_64 rng(0x5eedu);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> x(n);
    for (double& v : x) v = uni(rng);

    std::vector<double> shifted(n);
    for (int i = 0; i < n; ++i) shifted[i] = m.diag[i] - mu;

    for (int pass = 0; pass < 3; ++pass) {
        solve_tridiagonal(m.off, shifted, m.off, x, pivot_floor);
        double norm = 0.0;
        for (double v : x) norm += v * v;
        norm = std::sqrt(norm);
        if (!std::isfinite(norm) || norm == 0.0) {
            for (double& v : x) v = uni(rng);
            continue;
        }
        for (double& v : x) v /= norm;
    }
    // deterministic orientation
    for (double v : x) {
        if (std::fabs(v) > 1e-8) {
            if (v < 0.0)
                for (double& w : x) w = -w;
            break;
        }
    }
    return x;
}

void check_fd_preconditions(double v_t, const SlabGeometry&, int grid_points,
                            int count) {
    if (!(v_t > 0.0))
        throw std::invalid_argument("fd_eigenfrequencies: v_t must be positive");
    if (grid_points < 16)
        throw std::invalid_argument("fd_eigenfrequencies: grid_points must be >= 16");
    if (count < 1)
        throw std::invalid_argument("fd_eigenfrequencies: count must be >= 1");
    if (count >= grid_points / 4)
        throw std::invalid_argument(
            "fd_eigenfrequencies: count must be < grid_points / 4");
}

}  // namespace

MaterialSpec::MaterialSpec(std::string name_, double c44, double density)
    : name(std::move(name_)), c44_pa(c44), density_kg_m3(density) {
    if (!(c44_pa > 0.0))
        throw std::invalid_argument("MaterialSpec: c44_pa must be positive");
    if (!(density_kg_m3 > 0.0))
        throw std::invalid_argument("MaterialSpec: density_kg_m3 must be positive");
}

double fold_dipole_angle(double angle_rad) {
    if (!std::isfinite(angle_rad))
        throw std::invalid_argument("dipole angle must be finite");
    double a = std::fmod(std::fabs(angle_rad), kPi);
    if (a > kHalfPi) a = kPi - a;
    return a;
}

SlabGeometry::SlabGeometry(double thickness, double dipole_angle)
    : thickness_m(thickness), dipole_angle_rad(fold_dipole_angle(dipole_angle)) {
    if (!(thickness_m > 0.0))
        throw std::invalid_argument("SlabGeometry: thickness_m must be positive");
}

double shear_velocity(const MaterialSpec& material) {
    return std::sqrt(material.c44_pa / material.density_kg_m3);
}

double mode_frequency(int n, double v_t, const SlabGeometry& geometry) {
    if (n < 1)
        throw std::domain_error("mode_frequency: harmonic index must be >= 1");
    // n * fundamental, not (n*v)/(2t): keeps the ladder exactly linear in n
    return n * (v_t / (2.0 * geometry.thickness_m));
}

double free_spectral_range(double v_t, const SlabGeometry& geometry) {
    return v_t / (2.0 * geometry.thickness_m);
}

int mode_index_near(double f_target_hz, double fundamental_hz, Parity parity) {
    if (!(f_target_hz > 0.0))
        throw std::invalid_argument("mode_index_near: f_target must be positive");
    if (!(fundamental_hz > 0.0))
        throw std::invalid_argument("mode_index_near: fundamental must be positive");

    const double ratio = f_target_hz / fundamental_hz;
    const long long anchor = std::llround(ratio);

    long long best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (long long n = std::max(1LL, anchor - 3); n <= anchor + 3; ++n) {
        if (parity == Parity::odd && n % 2 == 0) continue;
        const double dist =
            std::fabs(static_cast<double>(n) * fundamental_hz - f_target_hz);
        if (dist < best_dist) {  // strict: ties keep the smaller index
            best_dist = dist;
            best = n;
        }
    }
    return static_cast<int>(best);
}

ModeTable make_mode_table(double v_t, const SlabGeometry& geometry, int n_min,
                          int n_max, Parity parity) {
    if (n_min < 1)
        throw std::invalid_argument("make_mode_table: n_min must be >= 1");
    if (n_max < n_min)
        throw std::invalid_argument("make_mode_table: n_max must be >= n_min");
    ModeTable table;
    table.fundamental_hz = free_spectral_range(v_t, geometry);
    for (int n = n_min; n <= n_max; ++n) {
        if (parity == Parity::odd && n % 2 == 0) continue;
        table.entries.push_back(
            {n, n * table.fundamental_hz, 2.0 * geometry.thickness_m / n});
    }
    return table;
}

// The rigid-body mode is removed by a relative threshold of 1e-6 on the
// eigenvalue against the squared fundamental scale (2 pi v_t / 2t)^2. The
// eigensolver's absolute noise floor on the zero eigenvalue grows like
// eps * v_t^2 / h^2, which sits far above 1e-6 * fsr in frequency units but
// far below the eigenvalue cut for any practical grid.
double zero_mode_cut(double v_t, const SlabGeometry& geometry) {
    const double omega1 = 2.0 * kPi * free_spectral_range(v_t, geometry);
    return 1e-6 * omega1 * omega1;
}

std::vector<double> fd_eigenfrequencies(double v_t, const SlabGeometry& geometry,
                                        int grid_points, int count) {
    check_fd_preconditions(v_t, geometry, grid_points, count);
    const Tridiagonal m = assemble_free_free(v_t, geometry.thickness_m, grid_points);
    const Eigen::VectorXd lambdas = eigenvalues_of(m, grid_points, geometry.thickness_m);

    const double lambda_cut = zero_mode_cut(v_t, geometry);
    std::vector<double> freqs;
    freqs.reserve(count);
    for (int i = 0; i < lambdas.size() && static_cast<int>(freqs.size()) < count; ++i) {
        const double lambda = std::max(lambdas[i], 0.0);
        if (lambda < lambda_cut) continue;  // rigid-body translation
        freqs.push_back(std::sqrt(lambda) / (2.0 * kPi));
    }
    return freqs;
}

FdModes fd_eigenmodes(double v_t, const SlabGeometry& geometry, int grid_points,
                      int count) {
    check_fd_preconditions(v_t, geometry, grid_points, count);
    const Tridiagonal m = assemble_free_free(v_t, geometry.thickness_m, grid_points);
    const Eigen::VectorXd lambdas = eigenvalues_of(m, grid_points, geometry.thickness_m);

    const double lambda_cut = zero_mode_cut(v_t, geometry);
    FdModes modes;
    for (int i = 0; i < lambdas.size() && static_cast<int>(modes.frequencies_hz.size()) < count; ++i) {
        const double lambda = std::max(lambdas[i], 0.0);
        if (lambda < lambda_cut) continue;
        const double f = std::sqrt(lambda) / (2.0 * kPi);

        std::vector<double> shape = inverse_iteration(m, lambdas[i]);
        // undo the mass scaling at the faces to recover displacement
        shape.front() *= std::numbers::sqrt2;
        shape.back() *= std::numbers::sqrt2;
        modes.frequencies_hz.push_back(f);
        modes.shapes.push_back(std::move(shape));
    }
    return modes;
}

}  // namespace hbarsim
