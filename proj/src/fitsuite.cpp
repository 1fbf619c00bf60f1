#include "hbarsim/fitsuite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>

#include "hbarsim/errors.hpp"

namespace hbarsim {

namespace {

constexpr double kPi = std::numbers::pi;

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd fd_jacobian(const ResidualFn& residual, const VectorXd& x, int n_res,
                     double rel_step) {
    const int p = static_cast<int>(x.size());
    MatrixXd jac(n_res, p);
    for (int j = 0; j < p; ++j) {
        const double h = rel_step * std::max(1.0, std::fabs(x[j]));
        VectorXd xp = x;
        VectorXd xm = x;
        xp[j] += h;
        xm[j] -= h;
        jac.col(j) = (residual(xp) - residual(xm)) / (2.0 * h);
    }
    return jac;
}

struct RawExtremum {
    int index;
    double f_hz;
    double value;
    double prominence;
};

std::pair<double, double> parabola_vertex(double x1, double y1, double x2,
                                          double y2, double x3, double y3) {
    const double d21 = x2 - x1;
    const double d23 = x2 - x3;
    const double num = d21 * d21 * (y2 - y3) - d23 * d23 * (y2 - y1);
    const double den = d21 * (y2 - y3) - d23 * (y2 - y1);
    if (den == 0.0) return {x2, y2};
    const double xv = x2 - 0.5 * num / den;
    const double l1 = (xv - x2) * (xv - x3) / ((x1 - x2) * (x1 - x3));
    const double l2 = (xv - x1) * (xv - x3) / ((x2 - x1) * (x2 - x3));
    const double l3 = (xv - x1) * (xv - x2) / ((x3 - x1) * (x3 - x2));
    return {xv, y1 * l1 + y2 * l2 + y3 * l3};
}

// Strict local maxima of y with their prominence (height above the higher of
// the two bounding saddles, walked out to the next higher sample or the edge).
std::vector<RawExtremum> find_maxima(const std::vector<double>& f,
                                     const std::vector<double>& y) {
    std::vector<RawExtremum> out;
    const int n = static_cast<int>(y.size());
    for (int i = 1; i + 1 < n; ++i) {
        if (!(y[i] > y[i - 1] && y[i] > y[i + 1])) continue;
        double left_min = y[i];
        for (int j = i - 1; j >= 0; --j) {
            if (y[j] > y[i]) break;
            left_min = std::min(left_min, y[j]);
        }
        double right_min = y[i];
        for (int j = i + 1; j < n; ++j) {
            if (y[j] > y[i]) break;
            right_min = std::min(right_min, y[j]);
        }
        const auto [fv, vv] =
            parabola_vertex(f[i - 1], y[i - 1], f[i], y[i], f[i + 1], y[i + 1]);
        out.push_back({i, fv, vv, y[i] - std::max(left_min, right_min)});
    }
    return out;
}

std::vector<RawExtremum> find_extrema(const std::vector<double>& f,
                                      std::vector<double> y, ExtremumKind kind) {
    if (kind == ExtremumKind::dip)
        for (double& v : y) v = -v;
    auto raw = find_maxima(f, y);
    if (kind == ExtremumKind::dip)
        for (auto& e : raw) e.value = -e.value;
    return raw;
}

std::vector<double> magnitudes(const Spectrum& spectrum) {
    std::vector<double> y;
    y.reserve(spectrum.s21.size());
    for (const auto& v : spectrum.s21) y.push_back(std::abs(v));
    return y;
}

double norm_of(const std::vector<double>& y) {
    double s = 0.0;
    for (double v : y) s += v * v;
    return std::sqrt(s);
}

std::string mode_key(int i, const char* field) {
    return "mode" + std::to_string(i) + "_" + field + "_hz";
}

}  // namespace

LeastSquaresResult least_squares(const ResidualFn& residual, VectorXd x0,
                                 const LeastSquaresOptions& opt) {
    const int p = static_cast<int>(x0.size());
    VectorXd x = std::move(x0);
    VectorXd r = residual(x);
    const int n = static_cast<int>(r.size());
    double ssr = r.squaredNorm();
    if (opt.trace) opt.trace->push_back(std::sqrt(ssr));

    double lambda = 1e-3;
    bool converged = false;
    int iterations = 0;

    for (int iter = 1; iter <= opt.max_iterations; ++iter) {
        iterations = iter;
        if (ssr == 0.0) {
            converged = true;
            break;
        }
        const MatrixXd jac = fd_jacobian(residual, x, n, opt.fd_rel_step);
        const VectorXd grad = jac.transpose() * r;

        // scaled gradient: max cosine between the residual and any Jacobian
        // column, which is scale-free in both parameters and residuals
        const double r_norm = std::sqrt(ssr);
        double grad_cos = 0.0;
        for (int j = 0; j < p; ++j) {
            const double col_norm = jac.col(j).norm();
            if (col_norm > 0.0)
                grad_cos = std::max(grad_cos, std::fabs(grad[j]) / (col_norm * r_norm));
        }
        if (grad_cos <= opt.grad_tol) {
            converged = true;
            break;
        }

        const MatrixXd jtj = jac.transpose() * jac;
        bool accepted = false;
        VectorXd x_new;
        VectorXd r_new;
        double ssr_new = ssr;
        double first_step_rel = std::numeric_limits<double>::infinity();
        for (int tries = 0; tries < 60; ++tries) {
            MatrixXd damped = jtj;
            for (int j = 0; j < p; ++j) {
                double d = jtj(j, j);
                if (!(d > 0.0)) d = 1.0;
                damped(j, j) += lambda * d;
            }
            const VectorXd step = damped.ldlt().solve(-grad);
            if (tries == 0) {
                first_step_rel = 0.0;
                for (int j = 0; j < p; ++j)
                    first_step_rel = std::max(
                        first_step_rel, std::fabs(step[j]) / std::max(1.0, std::fabs(x[j])));
            }
            x_new = x + step;
            r_new = residual(x_new);
            ssr_new = r_new.squaredNorm();
            if (std::isfinite(ssr_new) && ssr_new < ssr) {
                accepted = true;
                lambda = std::max(lambda / 3.0, 1e-14);
                break;
            }
            lambda *= 10.0;
            if (lambda > 1e14) break;
        }
        if (!accepted) {
            // no downhill step exists: at the numerical optimum the proposed
            // Gauss-Newton step is already negligible
            converged = first_step_rel <= opt.rel_tol || grad_cos <= std::sqrt(opt.grad_tol);
            break;
        }

        const double old_norm = std::sqrt(ssr);
        x = std::move(x_new);
        r = std::move(r_new);
        ssr = ssr_new;
        const double new_norm = std::sqrt(ssr);
        if (opt.trace) opt.trace->push_back(new_norm);
        // a stalled residual only counts as convergence when the step was an
        // (almost) undamped Gauss-Newton step; heavily damped steps stall
        // because of the damping, not because the fit is done
        if (lambda <= 1e-6 &&
            old_norm - new_norm <= opt.rel_tol * std::max(old_norm, 1e-300)) {
            converged = true;
            break;
        }
    }

    const MatrixXd jac = fd_jacobian(residual, x, n, opt.fd_rel_step);
    const MatrixXd jtj = jac.transpose() * jac;
    const double sigma2 = ssr / std::max(1, n - p);
    MatrixXd cov;
    Eigen::LDLT<MatrixXd> ldlt(jtj);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive())
        cov = sigma2 * ldlt.solve(MatrixXd::Identity(p, p));
    else
        cov = sigma2 * jtj.completeOrthogonalDecomposition().pseudoInverse();

    return {std::move(x), std::move(cov), std::sqrt(ssr), converged, iterations};
}

std::vector<Extremum> extract_peaks(const Spectrum& spectrum, ExtremumKind kind,
                                    double prominence) {
    if (spectrum.frequencies_hz.size() < 3)
        throw std::invalid_argument("extract_peaks: need at least 3 samples");
    if (spectrum.frequencies_hz.size() != spectrum.s21.size())
        throw std::invalid_argument("extract_peaks: axis/data size mismatch");
    if (!(prominence > 0.0))
        throw std::invalid_argument("extract_peaks: prominence must be positive");

    std::vector<Extremum> out;
    for (const auto& e :
         find_extrema(spectrum.frequencies_hz, magnitudes(spectrum), kind))
        if (e.prominence > prominence) out.push_back({e.f_hz, e.value});
    return out;
}

BranchPoints extract_branches(const Spectrogram& spectrogram, double prominence) {
    if (!(prominence > 0.0))
        throw std::invalid_argument("extract_branches: prominence must be positive");

    BranchPoints points;
    for (std::size_t row = 0; row < spectrogram.flux_axis.size(); ++row) {
        auto raw = find_extrema(spectrogram.freq_axis_hz,
                                spectrogram.magnitude[row], ExtremumKind::peak);
        std::erase_if(raw, [&](const RawExtremum& e) {
            return !(e.prominence > prominence);
        });
        std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) {
            return a.prominence > b.prominence;
        });
        if (raw.size() > 2) raw.resize(2);

        const double flux = spectrogram.flux_axis[row];
        if (raw.size() == 2) {
            if (raw[0].f_hz > raw[1].f_hz) std::swap(raw[0], raw[1]);
            points.push_back({flux, raw[0].f_hz, Branch::lower});
            points.push_back({flux, raw[1].f_hz, Branch::upper});
        } else if (raw.size() == 1) {
            points.push_back({flux, raw[0].f_hz, Branch::upper});
        }
    }
    return points;
}

FitResult fit_avoided_crossing(const BranchPoints& points) {
    if (points.size() < 6)
        throw FitError("fit_avoided_crossing: need at least 6 branch points");
    bool has_upper = false;
    bool has_lower = false;
    for (const auto& pt : points) {
        (pt.branch == Branch::upper ? has_upper : has_lower) = true;
    }
    if (!has_upper || !has_lower)
        throw FitError("fit_avoided_crossing: all points lie on one branch");

    // pair branches per flux to locate the minimum separation
    std::map<double, std::pair<std::optional<double>, std::optional<double>>> by_flux;
    for (const auto& pt : points) {
        auto& entry = by_flux[pt.flux];
        (pt.branch == Branch::upper ? entry.first : entry.second) = pt.f_peak_hz;
    }
    double min_sep = std::numeric_limits<double>::infinity();
    double flux_at_min = points.front().flux;
    double f_c0 = 0.0;
    bool have_pair = false;
    for (const auto& [flux, pair] : by_flux) {
        if (!pair.first || !pair.second) continue;
        const double sep = *pair.first - *pair.second;
        if (sep < min_sep) {
            min_sep = sep;
            flux_at_min = flux;
            f_c0 = 0.5 * (*pair.first + *pair.second);
            have_pair = true;
        }
    }
    if (!have_pair) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& pt : points) {
            lo = std::min(lo, pt.f_peak_hz);
            hi = std::max(hi, pt.f_peak_hz);
        }
        f_c0 = 0.5 * (lo + hi);
        min_sep = 0.5 * (hi - lo);
    }

    const double g0 = std::max(0.5 * min_sep, 1e-6 * f_c0);
    const double f_max0 = 1.25 * f_c0;
    const double cos0 = std::clamp((f_c0 / f_max0) * (f_c0 / f_max0), 0.0, 1.0);
    const double offset0 = flux_at_min - std::acos(cos0) / kPi;

    VectorXd x0(5);
    x0 << f_c0, f_max0, offset0, 1.0, g0;

    std::vector<double> targets;
    targets.reserve(points.size());
    for (const auto& pt : points) targets.push_back(pt.f_peak_hz);

    // a flux with a single point carries no reliable branch label (the visible
    // peak can be either branch depending on the detuning sign), so those
    // points are matched against the closer model branch
    std::map<double, int> flux_count;
    for (const auto& pt : points) ++flux_count[pt.flux];
    std::vector<bool> single(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        single[i] = flux_count[points[i].flux] == 1;

    const ResidualFn residual = [&points, &single](const VectorXd& x) {
        const double f_c = x[0];
        const double f_max = x[1];
        const double offset = x[2];
        const double scale = x[3];
        const double g = x[4];
        VectorXd r(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double fq =
                f_max * std::sqrt(std::fabs(
                            std::cos(kPi * scale * (points[i].flux - offset))));
            const double mean = 0.5 * (f_c + fq);
            const double half = std::hypot(g, 0.5 * (fq - f_c));
            double model;
            if (single[i])
                model = points[i].f_peak_hz >= mean ? mean + half : mean - half;
            else
                model = points[i].branch == Branch::upper ? mean + half : mean - half;
            r[i] = model - points[i].f_peak_hz;
        }
        return r;
    };

    const LeastSquaresResult ls = least_squares(residual, x0);

    FitResult result;
    result.parameters["f_c_hz"] = ls.x[0];
    result.parameters["f_max_hz"] = ls.x[1];
    result.parameters["flux_offset"] = ls.x[2];
    result.parameters["flux_scale"] = ls.x[3];
    result.parameters["g_hz"] = std::fabs(ls.x[4]);
    const char* keys[] = {"f_c_hz", "f_max_hz", "flux_offset", "flux_scale", "g_hz"};
    for (int j = 0; j < 5; ++j)
        result.uncertainties[keys[j]] = std::sqrt(std::max(0.0, ls.covariance(j, j)));
    result.residual_norm = ls.residual_norm / std::max(norm_of(targets), 1e-300);
    result.converged = ls.converged;
    result.iterations = ls.iterations;
    return result;
}

FitResult fit_notches(const Spectrum& spectrum, const PhononLadder& initial_ladder,
                      const CavityParams& cavity_guess) {
    const int n = static_cast<int>(spectrum.frequencies_hz.size());
    const int m = static_cast<int>(initial_ladder.modes.size());
    if (m == 0) throw FitError("fit_notches: initial ladder has no modes");
    const int p = 2 + 3 * m;
    if (n <= p)
        throw FitError("fit_notches: more free parameters than data points");

    const double amp =
        std::sqrt(cavity_guess.kappa_in_hz * cavity_guess.kappa_out_hz);
    if (!(amp > 0.0))
        throw FitError("fit_notches: zero port coupling leaves nothing to fit");

    const std::vector<double> y = magnitudes(spectrum);

    // cavity frequency from the refined global maximum
    int imax = 0;
    for (int i = 1; i < n; ++i)
        if (y[i] > y[imax]) imax = i;
    double f_c0 = cavity_guess.f_c_hz;
    if (imax > 0 && imax + 1 < n)
        f_c0 = parabola_vertex(spectrum.frequencies_hz[imax - 1], y[imax - 1],
                               spectrum.frequencies_hz[imax], y[imax],
                               spectrum.frequencies_hz[imax + 1], y[imax + 1])
                   .first;

    // mode frequencies from the dips when they are unambiguous
    std::vector<double> f_init;
    const double ymax = *std::max_element(y.begin(), y.end());
    auto dips = find_extrema(spectrum.frequencies_hz, y, ExtremumKind::dip);
    std::erase_if(dips,
                  [&](const RawExtremum& e) { return !(e.prominence > 0.1 * ymax); });
    if (static_cast<int>(dips.size()) == m) {
        std::sort(dips.begin(), dips.end(),
                  [](const auto& a, const auto& b) { return a.f_hz < b.f_hz; });
        for (const auto& d : dips) f_init.push_back(d.f_hz);
    } else {
        for (const auto& mode : initial_ladder.modes)
            f_init.push_back(mode.frequency_hz);
    }

    VectorXd x0(p);
    x0[0] = f_c0;
    x0[1] = cavity_guess.kappa_total_hz;
    for (int i = 0; i < m; ++i) {
        x0[2 + 3 * i] = f_init[i];
        x0[3 + 3 * i] = initial_ladder.modes[i].coupling_hz;
        x0[4 + 3 * i] = initial_ladder.modes[i].linewidth_hz;
    }

    // kappa and the per-mode gamma enter through their absolute values: rates
    // are positive, and a sign-symmetric model removes the spurious
    // negative-linewidth minima the raw parameterization has
    const auto& freqs = spectrum.frequencies_hz;
    const ResidualFn residual = [&freqs, &y, amp, m](const VectorXd& x) {
        VectorXd r(freqs.size());
        for (std::size_t k = 0; k < freqs.size(); ++k) {
            std::complex<double> denom(std::fabs(x[1]) / 2.0, x[0] - freqs[k]);
            for (int i = 0; i < m; ++i) {
                const double g = x[3 + 3 * i];
                denom += g * g / std::complex<double>(std::fabs(x[4 + 3 * i]) / 2.0,
                                                      x[2 + 3 * i] - freqs[k]);
            }
            r[k] = amp / std::abs(denom) - y[k];
        }
        return r;
    };

    const LeastSquaresResult ls = least_squares(residual, x0);

    FitResult result;
    result.parameters["f_c_hz"] = ls.x[0];
    result.parameters["kappa_total_hz"] = std::fabs(ls.x[1]);
    result.uncertainties["f_c_hz"] = std::sqrt(std::max(0.0, ls.covariance(0, 0)));
    result.uncertainties["kappa_total_hz"] =
        std::sqrt(std::max(0.0, ls.covariance(1, 1)));

    std::vector<double> fitted_f;
    for (int i = 0; i < m; ++i) {
        const int jf = 2 + 3 * i;
        const int jg = 3 + 3 * i;
        const int jw = 4 + 3 * i;
        result.parameters[mode_key(i + 1, "f")] = ls.x[jf];
        result.parameters[mode_key(i + 1, "g")] = std::fabs(ls.x[jg]);
        result.parameters[mode_key(i + 1, "gamma")] = std::fabs(ls.x[jw]);
        result.uncertainties[mode_key(i + 1, "f")] =
            std::sqrt(std::max(0.0, ls.covariance(jf, jf)));
        result.uncertainties[mode_key(i + 1, "g")] =
            std::sqrt(std::max(0.0, ls.covariance(jg, jg)));
        result.uncertainties[mode_key(i + 1, "gamma")] =
            std::sqrt(std::max(0.0, ls.covariance(jw, jw)));
        fitted_f.push_back(ls.x[jf]);
    }

    if (m >= 2) {
        std::sort(fitted_f.begin(), fitted_f.end());
        std::vector<double> diffs;
        for (int i = 1; i < m; ++i) diffs.push_back(fitted_f[i] - fitted_f[i - 1]);
        const double fsr =
            std::accumulate(diffs.begin(), diffs.end(), 0.0) / diffs.size();
        double se = 0.0;
        if (diffs.size() >= 2) {
            double var = 0.0;
            for (double d : diffs) var += (d - fsr) * (d - fsr);
            var /= static_cast<double>(diffs.size() - 1);
            se = std::sqrt(var / static_cast<double>(diffs.size()));
        } else {
            se = std::sqrt(std::max(0.0, ls.covariance(2, 2)) +
                           std::max(0.0, ls.covariance(2 + 3 * (m - 1), 2 + 3 * (m - 1))));
        }
        result.parameters["fsr_hz"] = fsr;
        result.uncertainties["fsr_hz"] = se;
    }

    result.residual_norm = ls.residual_norm / std::max(norm_of(y), 1e-300);
    result.converged = ls.converged;
    result.iterations = ls.iterations;
    return result;
}

FitResult q_factor(const Spectrum& spectrum) {
    const int n = static_cast<int>(spectrum.frequencies_hz.size());
    if (n < 5) throw FitError("q_factor: too few samples");

    std::vector<double> y = magnitudes(spectrum);
    for (double& v : y) v *= v;  // fit the power Lorentzian

    int imax = 0;
    double ymin = y[0];
    for (int i = 0; i < n; ++i) {
        if (y[i] > y[imax]) imax = i;
        ymin = std::min(ymin, y[i]);
    }
    if (imax == 0 || imax == n - 1 || !(y[imax] - ymin > 0.1 * y[imax]))
        throw FitError("q_factor: no dominant resonance found");

    const auto& f = spectrum.frequencies_hz;
    const auto [f00, a00] = parabola_vertex(f[imax - 1], y[imax - 1], f[imax],
                                            y[imax], f[imax + 1], y[imax + 1]);
    const double a0 = std::max(a00, y[imax]);

    // FWHM seed from the curvature at the peak, half-max scan as fallback
    const double h = 0.5 * (f[imax + 1] - f[imax - 1]);
    const double d2 = (y[imax - 1] - 2.0 * y[imax] + y[imax + 1]) / (h * h);
    double fwhm0 = 0.0;
    if (d2 < 0.0) fwhm0 = std::sqrt(8.0 * a0 / -d2);
    if (!(fwhm0 > 0.0) || !std::isfinite(fwhm0)) {
        int lo = imax;
        int hi = imax;
        while (lo > 0 && y[lo] > 0.5 * a0) --lo;
        while (hi < n - 1 && y[hi] > 0.5 * a0) ++hi;
        fwhm0 = std::max(f[hi] - f[lo], h);
    }

    VectorXd x0(3);
    x0 << a0, f00, fwhm0;

    const ResidualFn residual = [&f, &y](const VectorXd& x) {
        VectorXd r(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double dx = 2.0 * (f[i] - x[1]) / x[2];
            r[i] = x[0] / (1.0 + dx * dx) - y[i];
        }
        return r;
    };

    const LeastSquaresResult ls = least_squares(residual, x0);
    const double f0 = ls.x[1];
    const double fwhm = std::fabs(ls.x[2]);
    const double q = f0 / fwhm;

    FitResult result;
    result.parameters["amplitude"] = ls.x[0];
    result.parameters["f0_hz"] = f0;
    result.parameters["fwhm_hz"] = fwhm;
    result.parameters["q"] = q;
    result.uncertainties["amplitude"] = std::sqrt(std::max(0.0, ls.covariance(0, 0)));
    result.uncertainties["f0_hz"] = std::sqrt(std::max(0.0, ls.covariance(1, 1)));
    result.uncertainties["fwhm_hz"] = std::sqrt(std::max(0.0, ls.covariance(2, 2)));
    const double var_q = ls.covariance(1, 1) / (fwhm * fwhm) +
                         ls.covariance(2, 2) * q * q / (fwhm * fwhm) -
                         2.0 * ls.covariance(1, 2) * q / (fwhm * fwhm);
    result.uncertainties["q"] = std::sqrt(std::max(0.0, var_q));
    result.residual_norm = ls.residual_norm / std::max(norm_of(y), 1e-300);
    result.converged = ls.converged;
    result.iterations = ls.iterations;
    return result;
}

std::vector<double> estimate_phonon_q(const FitResult& notch_fit) {
    std::vector<double> qs;
    for (int i = 1;; ++i) {
        const auto f_it = notch_fit.parameters.find(mode_key(i, "f"));
        const auto g_it = notch_fit.parameters.find(mode_key(i, "gamma"));
        if (f_it == notch_fit.parameters.end() ||
            g_it == notch_fit.parameters.end())
            break;
        if (!(g_it->second > 0.0))
            throw std::domain_error("estimate_phonon_q: linewidth must be positive");
        qs.push_back(f_it->second / g_it->second);
    }
    if (qs.empty())
        throw std::invalid_argument("estimate_phonon_q: no per-mode parameters in fit");
    return qs;
}

}  // namespace hbarsim
