#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>
#include <fftw3.h>

#include "fftw_lock.hpp"
#include "toalab/error.hpp"
#include "toalab/oscillations.hpp"

namespace toalab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kPadFactor = 64;
constexpr double kMinPeakToFloor = 50.0;
constexpr double kMinPeriods = 4.0;
constexpr double kMinSamplesPerPeriod = 16.0;

std::vector<double> power_spectrum(const std::vector<double>& y, std::size_t padded) {
    std::vector<double> in(padded, 0.0);
    std::copy(y.begin(), y.end(), in.begin());
    std::vector<fftw_complex> out(padded / 2 + 1);
    fftw_plan plan;
    {
        std::lock_guard lock(detail::fftw_plan_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(padded), in.data(), out.data(), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(detail::fftw_plan_mutex());
        fftw_destroy_plan(plan);
    }
    std::vector<double> power(out.size());
    for (std::size_t k = 0; k < out.size(); ++k) power[k] = out[k][0] * out[k][0] + out[k][1] * out[k][1];
    return power;
}

// Residual sum of squares of P against cos(kL), sin(kL), 1, L.
double residual(double k, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    Eigen::MatrixXd basis(x.size(), 4);
    basis.col(0) = (k * x.array()).cos().matrix();
    basis.col(1) = (k * x.array()).sin().matrix();
    basis.col(2).setOnes();
    basis.col(3) = x;
    const Eigen::VectorXd c = basis.colPivHouseholderQr().solve(y);
    return (y - basis * c).squaredNorm();
}

}  // namespace

WavenumberFit fit_wavenumber_detailed(std::span<const double> L, std::span<const double> P) {
    if (L.size() != P.size()) throw ValidationError("fit_wavenumber: L and P must have the same length");
    const std::size_t n = L.size();
    if (n < 16) throw ValidationError("fit_wavenumber: at least 16 samples are required");
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(L[i]) || !std::isfinite(P[i])) throw ValidationError("fit_wavenumber: non-finite input");
    }
    const double h = (L[n - 1] - L[0]) / static_cast<double>(n - 1);
    if (!(h > 0.0)) throw ValidationError("fit_wavenumber: L must be increasing");
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(L[i] - L[i - 1] - h) > 1e-9 * h) throw ValidationError("fit_wavenumber: L must be uniformly spaced");
    }

    // Centered coordinates keep the linear detrend and the refinement well conditioned.
    const double mid = 0.5 * (L[0] + L[n - 1]);
    Eigen::VectorXd x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[static_cast<Eigen::Index>(i)] = L[i] - mid;
        y[static_cast<Eigen::Index>(i)] = P[i];
    }
    Eigen::MatrixXd line(n, 2);
    line.col(0).setOnes();
    line.col(1) = x;
    const Eigen::VectorXd trend = line.colPivHouseholderQr().solve(y);
    const Eigen::VectorXd detrended = y - line * trend;
    const double scale = y.cwiseAbs().maxCoeff();
    if (detrended.cwiseAbs().maxCoeff() <= 1e-12 * scale || scale == 0.0) {
        throw NumericalError("oscillations", "fit_wavenumber", "no peak: signal has no oscillating component");
    }

    std::size_t padded = 1;
    while (padded < kPadFactor * n) padded <<= 1;
    const std::vector<double> power =
        power_spectrum(std::vector<double>(detrended.data(), detrended.data() + n), padded);

    // Skip the DC main lobe (one unpadded bin).
    const std::size_t first = padded / n;
    const auto peak_it = std::max_element(power.begin() + static_cast<std::ptrdiff_t>(first), power.end() - 1);
    const auto kp = static_cast<std::size_t>(peak_it - power.begin());
    std::vector<double> sorted(power.begin() + 1, power.end());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
    const double floor = sorted[sorted.size() / 2];

    WavenumberFit fit;
    fit.peak_to_floor = floor > 0.0 ? power[kp] / floor : INFINITY;
    if (fit.peak_to_floor < kMinPeakToFloor) {
        throw NumericalError("oscillations", "fit_wavenumber",
                             "no peak: periodogram peak is only " + std::to_string(fit.peak_to_floor) +
                                 " times the median floor");
    }
    const double a = power[kp - 1], b = power[kp], c = power[kp + 1];
    const double denom = a - 2.0 * b + c;
    const double shift = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;
    fit.periodogram_wavenumber = kTwoPi * (static_cast<double>(kp) + shift) / (static_cast<double>(padded) * h);

    const double bin = kTwoPi / (static_cast<double>(n) * h);
    const double lo = std::max(0.5 * bin, fit.periodogram_wavenumber - bin);
    const double hi = fit.periodogram_wavenumber + bin;
    const auto best = boost::math::tools::brent_find_minima([&](double k) { return residual(k, x, y); }, lo, hi,
                                                            std::numeric_limits<double>::digits / 2);
    fit.wavenumber = best.first;

    const double span = L[n - 1] - L[0];
    fit.periods = fit.wavenumber * span / kTwoPi;
    fit.samples_per_period = kTwoPi / (fit.wavenumber * h);
    if (fit.periods < kMinPeriods) {
        throw ValidationError("fit_wavenumber: sweep covers " + std::to_string(fit.periods) +
                              " periods; at least 4 are required");
    }
    if (fit.samples_per_period < kMinSamplesPerPeriod) {
        throw ValidationError("fit_wavenumber: only " + std::to_string(fit.samples_per_period) +
                              " samples per period; at least 16 are required");
    }
    return fit;
}

double fit_wavenumber(std::span<const double> L, std::span<const double> P) {
    return fit_wavenumber_detailed(L, P).wavenumber;
}

}  // namespace toalab
