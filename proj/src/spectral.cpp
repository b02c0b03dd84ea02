#include "qsync/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace qsync {

Eigen::Index transient_cut(Eigen::Index samples, double transient_fraction)
{
    if (!(transient_fraction >= 0.0) || !(transient_fraction < 1.0))
        throw WindowTooShort("transient fraction must lie in [0, 1)");
    return static_cast<Eigen::Index>(std::floor(transient_fraction * static_cast<double>(samples)));
}

Eigen::VectorXcd sigma_plus_series(const Trajectory& traj, double transient_fraction, int group)
{
    const Eigen::Matrix3Xd& m = traj.group(group);
    const Eigen::Index start = transient_cut(m.cols(), transient_fraction);
    const Eigen::Index n = m.cols() - start;
    Eigen::VectorXcd out(n);
    for (Eigen::Index k = 0; k < n; ++k) out(k) = sigma_plus(m.col(start + k));
    return out;
}

double order_parameter(const Trajectory& traj, double transient_fraction, int group)
{
    const Eigen::Matrix3Xd& m = traj.group(group);
    const Eigen::Index start = transient_cut(m.cols(), transient_fraction);
    const Eigen::Index n = m.cols() - start;
    if (n < kMinOrderSamples)
        throw WindowTooShort("order parameter needs at least " + std::to_string(kMinOrderSamples) +
                             " retained samples, got " + std::to_string(n));
    return 0.5 * m.block(0, start, 2, n).colwise().norm().mean();
}

Spectrum spectrum(const Eigen::VectorXcd& series, double dt, Window window)
{
    const Eigen::Index n = series.size();
    if (n < kMinSpectrumSamples)
        throw WindowTooShort("spectrum needs at least " + std::to_string(kMinSpectrumSamples) +
                             " retained samples, got " + std::to_string(n));
    if (!(dt > 0.0)) throw std::invalid_argument("spectrum: dt must be positive");

    Eigen::Index padded = 1;
    while (padded < n) padded <<= 1;

    std::vector<std::complex<double>> in(static_cast<std::size_t>(padded), {0.0, 0.0});
    for (Eigen::Index k = 0; k < n; ++k) {
        double w = 1.0;
        if (window == Window::hann)
            w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n - 1)));
        in[static_cast<std::size_t>(k)] = w * series(k);
    }

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> out;
    fft.fwd(out, in);

    Spectrum s;
    s.resolution = 2.0 * std::numbers::pi / (static_cast<double>(padded) * dt);
    s.omega.resize(padded);
    s.magnitude.resize(padded);
    const double norm = 1.0 / std::sqrt(static_cast<double>(padded));
    const Eigen::Index half = padded / 2;
    // Reorder bins so that the grid runs from -pi/dt upward.
    for (Eigen::Index i = 0; i < padded; ++i) {
        const Eigen::Index bin = (i + half) % padded;
        const Eigen::Index signed_bin = bin >= half ? bin - padded : bin;
        s.omega(i) = static_cast<double>(signed_bin) * s.resolution;
        s.magnitude(i) = std::abs(out[static_cast<std::size_t>(bin)]) * norm;
    }
    return s;
}

Spectrum spectrum(const Trajectory& traj, double transient_fraction, Window window, int group)
{
    return spectrum(sigma_plus_series(traj, transient_fraction, group), traj.dt_sample, window);
}

double dominant_frequency(const Spectrum& s)
{
    const Eigen::Index n = s.magnitude.size();
    if (n < 3) throw NoDominantLine("spectrum too short");
    Eigen::Index peak = 0;
    const double top = s.magnitude.maxCoeff(&peak);

    std::vector<double> sorted(s.magnitude.data(), s.magnitude.data() + n);
    std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
    const double median = sorted[static_cast<std::size_t>(n / 2)];
    if (!(top > 0.0) || !(top > 10.0 * median))
        throw NoDominantLine("peak " + std::to_string(top) + " not above ten times the median " +
                             std::to_string(median));

    double omega = s.omega(peak);
    if (peak > 0 && peak + 1 < n && s.magnitude(peak - 1) > 0.0 && s.magnitude(peak + 1) > 0.0) {
        const double left = std::log(s.magnitude(peak - 1));
        const double centre = std::log(top);
        const double right = std::log(s.magnitude(peak + 1));
        const double curvature = left - 2.0 * centre + right;
        if (curvature < 0.0) omega += 0.5 * (left - right) / curvature * s.resolution;
    }
    return omega;
}

double default_transient_fraction(const EnsembleParams& p, double t_end)
{
    double transient = 20.0 / p.total_rate();
    if (p.omega0 != 0.0) transient = std::max(transient, 40.0 * std::numbers::pi / std::abs(p.omega0));
    transient = std::max(transient, 0.5 * t_end);
    const double fraction = transient / t_end;
    if (!(fraction < 1.0))
        throw WindowTooShort("run of length " + std::to_string(t_end) + " is shorter than the transient " +
                             std::to_string(transient));
    return fraction;
}

}  // namespace qsync
