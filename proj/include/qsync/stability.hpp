#pragma once

#include "qsync/types.hpp"

#include <array>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

namespace qsync {

/// sin(theta) vanishes: the interaction is a pure rotation and no limit cycle
/// can form at any coupling.
class DegeneratePhase : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// |sin(theta)| at or below this is treated as zero.
inline constexpr double kDegenerateSin = 1e-12;

/// Dissipative fixed point (0, 0, (g+ - g-)/(g+ + g-)).
BlochVectord fixed_point(const EnsembleParams& p);

/// Jacobian of rhs_meanfield at fixed_point(p). The z row decouples:
///   [ a  b  0 ]      a = V m_z^s sin(theta) - (g+ + g-)/2
///   [-b  a  0 ]      b = V m_z^s cos(theta) - omega0
///   [ 0  0  c ]      c = -(g+ + g-)
Matrix3<double> jacobian_at_fixed_point(const EnsembleParams& p);

/// Closed-form eigenvalues {c, a - i b, a + i b} of the matrix above.
std::array<std::complex<double>, 3> jacobian_eigenvalues(const EnsembleParams& p);

/// Largest real part of the Jacobian eigenvalues.
double max_growth_rate(const EnsembleParams& p);

/// True iff the fixed point is linearly unstable (strictly positive growth rate).
bool is_synchronized(const EnsembleParams& p);

/// Stability inequality for the unsynchronized regime, written with the
/// denominators cleared: V m_z^s sin(theta) < (g+ + g-)/2.
bool unsynchronized_by_inequality(const EnsembleParams& p);

/// Critical coupling V_c / (g+ + g-) for the given phase and gain ratio
/// gamma_plus / gamma_minus (+inf allowed). Empty when no coupling synchronizes.
/// Throws DegeneratePhase when sin(theta) == 0.
std::optional<double> synchronization_boundary(double theta, double gain_ratio);

struct LimitCycle {
    double C_z = 0.0;          ///< height of the cycle plane
    double r = 0.0;            ///< transverse radius, 2 |<sigma^+>|
    double omega_sync = 0.0;   ///< rotation rate on the cycle
    double delta_omega = 0.0;  ///< omega0 - omega_sync = cot(theta) (g+ + g-)/2
};

/// Self-consistent limit cycle of the mean-field flow, present exactly when
/// is_synchronized(p). Throws DegeneratePhase when sin(theta) == 0.
std::optional<LimitCycle> analytic_limit_cycle(const EnsembleParams& p);

/// Synchronization frequency omega0 - cot(theta) (g+ + g-)/2.
double synchronization_frequency(const EnsembleParams& p);

struct StabilityReport {
    BlochVectord fixed_point;
    std::array<std::complex<double>, 3> eigenvalues;
    bool synchronized = false;
    std::optional<LimitCycle> limit_cycle;
    std::string note;  ///< set when the phase is degenerate
};

StabilityReport stability_report(const EnsembleParams& p);

}  // namespace qsync
