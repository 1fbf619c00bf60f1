#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hbarsim/piezo.hpp"

using namespace hbarsim;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kThickness = 500e-6;

// independent quadrature oracle for the overlap integral; extended-precision
// accumulation keeps the rounding error far below the 1e-9 comparison level
double simpson_overlap(int n, double thickness, int panels) {
    const double h = thickness / panels;
    long double sum = std::sin(0.0) + std::sin(n * kPi);
    for (int i = 1; i < panels; ++i) {
        const double y = i * h;
        sum += (i % 2 == 1 ? 4.0L : 2.0L) * std::sin(n * kPi * y / thickness);
    }
    return static_cast<double>(sum * h / 3.0L);
}

// the Simpson boundary error term grows like n^3 h^4, so the panel count has
// to follow the harmonic index to certify 1e-9 relative accuracy
int panels_for(int n) { return std::max(10000, 400 * n); }

}  // namespace

TEST_CASE("overlap integral closed form") {
    CHECK(overlap_integral(2, kThickness) == 0.0);  // even harmonics: exact zero
    CHECK(overlap_integral(1, kThickness) ==
          doctest::Approx(2.0 * kThickness / kPi).epsilon(1e-15));
    CHECK(overlap_integral(1, kThickness) ==
          doctest::Approx(simpson_overlap(1, kThickness, 10000)).epsilon(1e-10));
    CHECK(overlap_integral(5, kThickness) / overlap_integral(1, kThickness) ==
          doctest::Approx(0.2).epsilon(1e-15));
    CHECK_THROWS_AS(overlap_integral(0, kThickness), std::invalid_argument);
    CHECK_THROWS_AS(overlap_integral(3, 0.0), std::invalid_argument);
}

TEST_CASE("quadrature oracle agrees with the closed form up to n = 201") {
    for (int n = 1; n <= 201; ++n) {
        const double closed = overlap_integral(n, kThickness);
        const double quad = simpson_overlap(n, kThickness, panels_for(n));
        const double scale = 2.0 * kThickness / (n * kPi);
        CHECK(std::fabs(closed - quad) <= 1e-9 * scale);
    }
}

TEST_CASE("strain profile vanishes at both faces") {
    for (int n : {1, 2, 5, 1339}) {
        const StrainProfile s(n, kThickness);
        CHECK(s.value(0.0) == 0.0);
        CHECK(std::fabs(s.value(kThickness)) < 1e-9);
        CHECK(s.wavelength_m() * n == doctest::Approx(2.0 * kThickness).epsilon(1e-15));
    }
    const StrainProfile s5(5, kThickness);
    // antinode of the n=5 strain wave sits a quarter wavelength in
    CHECK(s5.value(s5.wavelength_m() / 4.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("coupling weight selection rule") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ua(0.0, kPi / 2);
    for (int i = 0; i < 100; ++i) {
        const int even_n = 2 * (1 + static_cast<int>(rng() % 600));
        CHECK(coupling_weight(even_n, DriveField(1.0, ua(rng))).weight == 0.0);
    }
    CHECK(coupling_weight(4, DriveField()).weight == 0.0);
}

TEST_CASE("coupling weight orientation law") {
    CHECK(coupling_weight(1, DriveField()).weight == 1.0);  // normalization, exact
    CHECK(coupling_weight(1339, DriveField()).weight ==
          doctest::Approx(1.0 / 1339.0).epsilon(1e-12));
    for (int n : {1, 3, 77, 1339})
        CHECK(coupling_weight(n, DriveField(1.0, kPi / 2)).weight == 0.0);

    // monotone non-increasing on [0, pi/2]
    double previous = coupling_weight(3, DriveField(1.0, 0.0)).weight;
    for (int i = 1; i <= 50; ++i) {
        const double angle = (kPi / 2) * i / 50.0;
        const double w = coupling_weight(3, DriveField(1.0, angle)).weight;
        CHECK(w <= previous);
        previous = w;
    }
}

TEST_CASE("drive field invariants") {
    CHECK_THROWS_AS(DriveField(-0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(StrainProfile(0, kThickness), std::invalid_argument);
}

TEST_CASE("coupled mode ladder around the cavity") {
    const double fund = 3.5784e6;
    const auto ladder =
        coupled_mode_ladder(4.7915e9, 20e6, fund, 3e6, 1.6e6, DriveField());
    REQUIRE(ladder.modes.size() == 5);

    for (std::size_t i = 0; i < ladder.modes.size(); ++i) {
        const auto& mode = ladder.modes[i];
        CHECK(mode.n % 2 == 1);
        CHECK(mode.frequency_hz == mode.n * fund);
        CHECK(mode.linewidth_hz == 1.6e6);
        CHECK(std::fabs(mode.frequency_hz - 4.7915e9) <= 20e6);
        // 1/n coupling rule: spread across the band is below half a percent
        CHECK(std::fabs(mode.coupling_hz / 3e6 - 1.0) < 5e-3);
        if (i > 0) {
            const double spacing = mode.frequency_hz - ladder.modes[i - 1].frequency_hz;
            CHECK(spacing == doctest::Approx(2.0 * fund).epsilon(1e-14));
        }
    }
    // the reference mode carries exactly g_ref
    CHECK(ladder.modes[2].n == 1339);
    CHECK(ladder.modes[2].coupling_hz == doctest::Approx(3e6).epsilon(1e-15));
}

TEST_CASE("ladder orientation scaling and the perpendicular null") {
    const auto parallel =
        coupled_mode_ladder(4.7915e9, 20e6, 3.5784e6, 3e6, 1.6e6, DriveField());
    const auto tilted = coupled_mode_ladder(4.7915e9, 20e6, 3.5784e6, 3e6, 1.6e6,
                                            DriveField(1.0, kPi / 3));
    const auto crossed = coupled_mode_ladder(4.7915e9, 20e6, 3.5784e6, 3e6, 1.6e6,
                                             DriveField(1.0, kPi / 2));
    REQUIRE(parallel.modes.size() == tilted.modes.size());
    for (std::size_t i = 0; i < parallel.modes.size(); ++i) {
        CHECK(tilted.modes[i].coupling_hz ==
              doctest::Approx(0.5 * parallel.modes[i].coupling_hz).epsilon(1e-12));
        CHECK(crossed.modes[i].coupling_hz == 0.0);
    }
}

TEST_CASE("empty band yields an empty ladder") {
    // halfwidth below the fundamental, centered between odd multiples
    const auto ladder =
        coupled_mode_ladder(2.0 * 3.5784e6, 1.0e6, 3.5784e6, 3e6, 1.6e6, DriveField());
    CHECK(ladder.modes.empty());
    CHECK_THROWS_AS(coupled_mode_ladder(4.7e9, 0.0, 3.5784e6, 3e6, 1.6e6, DriveField()),
                    std::invalid_argument);
    CHECK_THROWS_AS(coupled_mode_ladder(4.7e9, 1e6, 3.5784e6, 0.0, 1.6e6, DriveField()),
                    std::invalid_argument);
}

TEST_CASE("dipole projection endpoints are exact") {
    CHECK(dipole_projection(0.0) == 1.0);
    CHECK(dipole_projection(kPi / 2) == 0.0);
    CHECK(dipole_projection(kPi / 3) == doctest::Approx(0.5).epsilon(1e-15));
}
