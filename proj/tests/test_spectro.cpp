#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hbarsim/spectro.hpp"

using namespace hbarsim;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) grid[i] = lo + (hi - lo) * i / (n - 1.0);
    return grid;
}

SystemModel bare_cavity(double f_c = 4.7915e9, double kappa = 3.2e6) {
    return SystemModel(CavityParams(f_c, kappa, kappa / 2, kappa / 2), std::nullopt,
                       PhononLadder{}, DriveField());
}

std::vector<double> refined_peaks(const std::vector<double>& f,
                                  const std::vector<double>& y) {
    std::vector<double> peaks;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (!(y[i] > y[i - 1] && y[i] > y[i + 1])) continue;
        const double denom = y[i - 1] - 2.0 * y[i] + y[i + 1];
        const double shift = denom == 0.0 ? 0.0 : 0.5 * (y[i - 1] - y[i + 1]) / denom;
        peaks.push_back(f[i] + shift * (f[i + 1] - f[i]));
    }
    return peaks;
}

}  // namespace

TEST_CASE("qubit dispersion") {
    CHECK(qubit_frequency(QubitParams(6e9, 0.0, 1e6, 73e6)) == 6e9);
    CHECK(qubit_frequency(QubitParams(6e9, 0.5, 1e6, 73e6)) == 0.0);
    CHECK(qubit_frequency(QubitParams(6e9, 1.0 / 3.0, 1e6, 73e6)) ==
          doctest::Approx(6e9 * std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("qubit dispersion is exactly periodic in the flux") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uf(-3.0, 3.0);
    for (int i = 0; i < 300; ++i) {
        const double flux = uf(rng);
        const QubitParams a(6e9, flux, 1e6, 73e6);
        const QubitParams b(6e9, flux + 1.0, 1e6, 73e6);
        CHECK(qubit_frequency(a) == qubit_frequency(b));  // bitwise
    }
}

TEST_CASE("critically coupled symmetric cavity transmits fully on resonance") {
    const auto model = bare_cavity();
    CHECK(std::abs(transmission(model, model.cavity.f_c_hz)) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("transmission is reciprocal in the port rates") {
    const CavityParams a(4.8e9, 4e6, 1e6, 2.5e6);
    const CavityParams b(4.8e9, 4e6, 2.5e6, 1e6);
    const SystemModel ma(a, std::nullopt, PhononLadder{}, DriveField());
    const SystemModel mb(b, std::nullopt, PhononLadder{}, DriveField());
    for (double f : linspace(4.7e9, 4.9e9, 101))
        CHECK(transmission(ma, f) == transmission(mb, f));  // bitwise
}

TEST_CASE("a resonant phonon notches the transmission") {
    const auto base = bare_cavity();
    PhononLadder ladder;
    ladder.modes.push_back({1339, base.cavity.f_c_hz, 3e6, 1.6e6});
    const SystemModel notched(base.cavity, std::nullopt, ladder, DriveField());
    const double with_phonon = std::abs(transmission(notched, base.cavity.f_c_hz));
    const double without = std::abs(transmission(base, base.cavity.f_c_hz));
    CHECK(with_phonon < 0.5 * without);
}

TEST_CASE("resonant qubit splits the transmission by 2g") {
    const double f_c = 4.7915e9;
    const double g = 73e6;
    // qubit parked at f_q = f_c, losses small against the splitting
    const CavityParams cavity(f_c, 1e5, 5e4, 5e4);
    const QubitParams qubit(f_c, 0.0, 1e4, g);
    const SystemModel model(cavity, qubit, PhononLadder{}, DriveField());

    const auto grid = linspace(f_c - 2.5 * g, f_c + 2.5 * g, 4001);
    const auto spectrum = compute_spectrum(model, grid);
    std::vector<double> mag;
    for (const auto& v : spectrum.s21) mag.push_back(std::abs(v));
    const auto peaks = refined_peaks(grid, mag);
    REQUIRE(peaks.size() == 2);
    CHECK(std::fabs((peaks[1] - peaks[0]) - 2.0 * g) / (2.0 * g) < 0.01);
}

TEST_CASE("dressed frequencies of the two-mode system") {
    const double f_c = 4.7915e9;
    const double g = 73e6;
    SUBCASE("on resonance") {
        const SystemModel model(CavityParams(f_c, 1.0, 0.4, 0.4),
                                QubitParams(f_c, 0.0, 1.0, g), PhononLadder{},
                                DriveField());
        const auto values = dressed_frequencies(model);
        REQUIRE(values.size() == 2);
        CHECK(values[0].real() == doctest::Approx(f_c - g).epsilon(1e-10));
        CHECK(values[1].real() == doctest::Approx(f_c + g).epsilon(1e-10));
    }
    SUBCASE("detuned closed form") {
        const double f_q = f_c + 150e6;
        const SystemModel model(CavityParams(f_c, 1.0, 0.4, 0.4),
                                QubitParams(f_q, 0.0, 1.0, g), PhononLadder{},
                                DriveField());
        const auto values = dressed_frequencies(model);
        const double delta = f_q - f_c;
        const double mean = 0.5 * (f_c + f_q);
        const double half = std::sqrt(g * g + 0.25 * delta * delta);
        REQUIRE(values.size() == 2);
        CHECK(values[0].real() == doctest::Approx(mean - half).epsilon(1e-10));
        CHECK(values[1].real() == doctest::Approx(mean + half).epsilon(1e-10));
    }
    SUBCASE("uncoupled phonons stay at their bare frequencies") {
        PhononLadder ladder;
        for (int i = 0; i < 5; ++i)
            ladder.modes.push_back({1335 + 2 * i, 4.777e9 + 7.1568e6 * i, 0.0, 1.6e6});
        const SystemModel model(CavityParams(f_c, 3.2e6, 1.28e6, 1.28e6), std::nullopt,
                                ladder, DriveField());
        const auto values = dressed_frequencies(model);
        REQUIRE(values.size() == 6);
        // the cavity sorts in between, so match each bare frequency by proximity
        for (const auto& mode : ladder.modes) {
            double best = 1e18;
            for (const auto& v : values)
                best = std::min(best, std::fabs(v.real() - mode.frequency_hz));
            CHECK(best <= 1e-6 * mode.frequency_hz * 1e-3);
        }
    }
}

TEST_CASE("avoided crossing branch separation is symmetric with a 2g minimum") {
    const double f_c = 4.7915e9;
    const double g = 73e6;
    auto separation = [&](double delta) {
        const SystemModel model(CavityParams(f_c, 1.0, 0.4, 0.4),
                                QubitParams(f_c + delta, 0.0, 1.0, g), PhononLadder{},
                                DriveField());
        const auto values = dressed_frequencies(model);
        return values[1].real() - values[0].real();
    };
    double min_sep = 1e18;
    for (double delta : linspace(-200e6, 200e6, 81)) {
        CHECK(separation(delta) == doctest::Approx(separation(-delta)).epsilon(1e-10));
        min_sep = std::min(min_sep, separation(delta));
    }
    CHECK(min_sep == doctest::Approx(2.0 * g).epsilon(1e-10));
}

TEST_CASE("transmission peaks track the dressed frequencies") {
    // low loss, modest coupling: linewidths far below every splitting
    const double f_c = 4.790e9;
    const CavityParams cavity(f_c, 2e4, 1e4, 1e4);
    const QubitParams qubit(f_c + 12e6, 0.0, 1e4, 5e6);
    PhononLadder ladder;
    ladder.modes.push_back({1339, f_c - 9e6, 2e6, 1e4});
    const SystemModel model(cavity, qubit, ladder, DriveField());

    const auto grid = linspace(f_c - 25e6, f_c + 25e6, 20001);
    const auto spectrum = compute_spectrum(model, grid);
    std::vector<double> mag;
    for (const auto& v : spectrum.s21) mag.push_back(std::abs(v));
    const auto peaks = refined_peaks(grid, mag);
    const auto dressed = dressed_frequencies(model);
    REQUIRE(peaks.size() == dressed.size());
    const double step = grid[1] - grid[0];
    for (std::size_t i = 0; i < peaks.size(); ++i)
        CHECK(std::fabs(peaks[i] - dressed[i].real()) <= step);
}

TEST_CASE("passivity holds across randomized parameter sets") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double f_c = 4e9 + 2e9 * u01(rng);
        const double kappa = 1e5 + 1e7 * u01(rng);
        const double in_frac = u01(rng);
        const double out_frac = u01(rng) * (1.0 - in_frac);
        const CavityParams cavity(f_c, kappa, in_frac * kappa, out_frac * kappa);

        std::optional<QubitParams> qubit;
        if (u01(rng) < 0.5)
            qubit.emplace(f_c * (0.8 + 0.4 * u01(rng)), u01(rng), 1e4 + 1e7 * u01(rng),
                          1e8 * u01(rng));

        PhononLadder ladder;
        const int m = static_cast<int>(rng() % 4);
        for (int i = 0; i < m; ++i)
            ladder.modes.push_back({2 * i + 1, f_c + (u01(rng) - 0.5) * 4e7,
                                    1e7 * u01(rng), 1e4 + 1e7 * u01(rng)});
        const SystemModel model(cavity, qubit, ladder, DriveField());
        for (double f : linspace(f_c - 3e8, f_c + 3e8, 101))
            CHECK(std::abs(transmission(model, f)) <= 1.0 + 1e-12);
    }
}

TEST_CASE("high power saturates the qubit") {
    const CavityParams cavity(4.7915e9, 3.2e6, 1.28e6, 1.28e6);
    const QubitParams qubit(6e9, 0.0, 1e6, 73e6);
    PhononLadder ladder;
    for (int i = 0; i < 5; ++i)
        ladder.modes.push_back({1335 + 2 * i, 1335 * 3.5784e6 + 7.1568e6 * i, 3e6, 1.6e6});
    const SystemModel model(cavity, qubit, ladder, DriveField());

    const auto freq = linspace(4.76e9, 4.82e9, 1501);
    const auto flux = linspace(0.0, 1.0, 11);
    const auto gram = sweep_spectrogram(model, flux, freq, true);
    for (std::size_t r = 1; r < gram.magnitude.size(); ++r)
        CHECK(gram.magnitude[r] == gram.magnitude[0]);  // row for row identical

    // one notch per coupled mode, each at the forward model's own minimum
    // (the cavity envelope pulls the |S21| dip slightly off f_m)
    const auto& row = gram.magnitude[0];
    std::vector<double> minima;
    for (std::size_t i = 1; i + 1 < row.size(); ++i)
        if (row[i] < row[i - 1] && row[i] < row[i + 1]) minima.push_back(freq[i]);
    REQUIRE(minima.size() == 5);
    const double step = freq[1] - freq[0];
    for (int i = 0; i < 5; ++i) {
        double truth = ladder.modes[i].frequency_hz;
        double best = 1e30;
        for (double f : linspace(truth - 2e6, truth + 2e6, 8001)) {
            const double v = std::abs(transmission(model, f, true));
            if (v < best) {
                best = v;
                truth = f;
            }
        }
        CHECK(std::fabs(minima[i] - truth) <= step);
    }
    // dip spacing tracks the doubled fundamental up to the envelope pull
    for (int i = 1; i < 5; ++i)
        CHECK(std::fabs((minima[i] - minima[i - 1]) - 7.1568e6) <= 0.5e6);
}

TEST_CASE("spectrogram rows repeat after one flux quantum") {
    const CavityParams cavity(4.7915e9, 3.2e6, 1.28e6, 1.28e6);
    const QubitParams qubit(6e9, 0.0, 1e6, 73e6);
    const SystemModel model(cavity, qubit, PhononLadder{}, DriveField());
    const auto freq = linspace(4.6e9, 5.0e9, 201);

    // dyadic fluxes shift exactly under +1, so the rows repeat bit for bit
    const auto low = sweep_spectrogram(model, {0.125, 0.3125}, freq, false);
    const auto high = sweep_spectrogram(model, {1.125, 1.3125}, freq, false);
    CHECK(low.magnitude == high.magnitude);

    // generic fluxes pick up one rounding from the +1, nothing more
    for (double flux : {0.1, 0.23, 0.47}) {
        const QubitParams a(6e9, flux, 1e6, 73e6);
        const QubitParams b(6e9, flux + 1.0, 1e6, 73e6);
        CHECK(qubit_frequency(a) ==
              doctest::Approx(qubit_frequency(b)).epsilon(1e-9));
    }
}

TEST_CASE("grid validation") {
    const auto model = bare_cavity();
    CHECK_THROWS_AS(compute_spectrum(model, {}), std::invalid_argument);
    CHECK_THROWS_AS(compute_spectrum(model, {2e9, 1e9}), std::invalid_argument);
    CHECK_THROWS_AS(sweep_spectrogram(model, {0.2, 0.1}, {1e9, 2e9}, false),
                    std::invalid_argument);
}

TEST_CASE("model validation") {
    const CavityParams cavity(4.8e9, 3e6, 1e6, 1e6);
    PhononLadder dup;
    dup.modes.push_back({1, 4.8e9, 1e6, 1e6});
    dup.modes.push_back({3, 4.8e9, 1e6, 1e6});
    CHECK_THROWS_AS(SystemModel(cavity, std::nullopt, dup, DriveField()),
                    std::invalid_argument);
    PhononLadder negative;
    negative.modes.push_back({1, -1.0, 1e6, 1e6});
    CHECK_THROWS_AS(SystemModel(cavity, std::nullopt, negative, DriveField()),
                    std::invalid_argument);
    CHECK_THROWS_AS(CavityParams(4.8e9, 3e6, 2e6, 2e6), std::invalid_argument);
    CHECK_THROWS_AS(CavityParams(4.8e9, 0.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(QubitParams(0.0, 0.0, 1e6, 1e6), std::invalid_argument);
}

TEST_CASE("noise is seeded and unbiased") {
    const auto model = bare_cavity();
    const auto grid = linspace(4.6e9, 5.0e9, 50000);
    const auto clean = compute_spectrum(model, grid);

    SUBCASE("sigma zero is the identity") {
        const auto same = add_noise(clean, 0.0, 123);
        CHECK(same.s21 == clean.s21);
    }
    SUBCASE("identical seeds reproduce bit-identical noise") {
        const auto a = add_noise(clean, 0.01, 7);
        const auto b = add_noise(clean, 0.01, 7);
        const auto c = add_noise(clean, 0.01, 8);
        CHECK(a.s21 == b.s21);
        CHECK(a.s21 != c.s21);
    }
    SUBCASE("sample deviation matches sigma") {
        const double sigma = 0.01;
        const auto noisy = add_noise(clean, sigma, 99);
        double ss = 0.0;
        for (std::size_t i = 0; i < clean.s21.size(); ++i) {
            const auto d = noisy.s21[i] - clean.s21[i];
            ss += d.real() * d.real() + d.imag() * d.imag();
        }
        const double sample = std::sqrt(ss / (2.0 * clean.s21.size()));
        CHECK(sample == doctest::Approx(sigma).epsilon(0.02));
    }
    SUBCASE("magnitude noise clips at zero") {
        Spectrogram gram;
        gram.flux_axis = {0.0};
        gram.freq_axis_hz = linspace(1e9, 2e9, 1000);
        gram.magnitude = {std::vector<double>(1000, 0.001)};
        const auto noisy = add_noise(gram, 0.05, 3);
        for (double v : noisy.magnitude[0]) CHECK(v >= 0.0);
    }
}
