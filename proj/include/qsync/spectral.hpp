#pragma once

#include "qsync/trajectory.hpp"
#include "qsync/types.hpp"

#include <Eigen/Core>

#include <stdexcept>

namespace qsync {

class WindowTooShort : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The spectrum has no line standing clearly above its floor.
class NoDominantLine : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Window { rectangular, hann };

/// |DFT| of the complex amplitude <sigma^+>(t) on an increasing angular
/// frequency grid covering [-pi/dt, pi/dt). Magnitudes are unitary-normalized so
/// that sum |X_k|^2 equals the energy of the windowed samples.
struct Spectrum {
    Eigen::VectorXd omega;
    Eigen::VectorXd magnitude;
    double resolution = 0.0;  ///< grid spacing, 2 pi / (padded length * dt)
};

/// Minimum number of post-transient samples for spectrum().
inline constexpr Eigen::Index kMinSpectrumSamples = 256;
/// Minimum number of post-transient samples for order_parameter().
inline constexpr Eigen::Index kMinOrderSamples = 16;
/// Default order-parameter level separating synchronized from unsynchronized runs.
inline constexpr double kSyncThreshold = 1e-3;

/// First sample index kept after discarding transient_fraction of the run.
Eigen::Index transient_cut(Eigen::Index samples, double transient_fraction);

/// Complex series <sigma^+>(t) of one group after the transient cut.
Eigen::VectorXcd sigma_plus_series(const Trajectory& traj, double transient_fraction, int group = 0);

/// Time average of |<sigma^+>| over the retained window.
double order_parameter(const Trajectory& traj, double transient_fraction, int group = 0);

Spectrum spectrum(const Eigen::VectorXcd& series, double dt, Window window = Window::rectangular);
Spectrum spectrum(const Trajectory& traj, double transient_fraction, Window window = Window::rectangular,
                  int group = 0);

/// Peak frequency refined by a three-point parabola through the log-magnitudes.
/// Throws NoDominantLine when the peak is not ten times above the median.
double dominant_frequency(const Spectrum& s);

/// Fraction of a run of length t_end to discard: the larger of
/// max(20 / (g+ + g-), 40 pi / |omega0|) and half the run.
double default_transient_fraction(const EnsembleParams& p, double t_end);

}  // namespace qsync
