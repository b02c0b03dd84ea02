#include "qsync/stability.hpp"

#include <cmath>
#include <limits>

namespace qsync {

namespace {

double fixed_point_height(double gamma_plus, double gamma_minus)
{
    return (gamma_plus - gamma_minus) / (gamma_plus + gamma_minus);
}

double transverse_growth(const EnsembleParams& p)
{
    return p.V * fixed_point_height(p.gamma_plus, p.gamma_minus) * std::sin(p.theta) - 0.5 * p.total_rate();
}

void require_phase(double theta)
{
    if (std::abs(std::sin(theta)) <= kDegenerateSin)
        throw DegeneratePhase("sin(theta) = 0: the interaction is a pure rotation");
}

}  // namespace

BlochVectord fixed_point(const EnsembleParams& p)
{
    return {0.0, 0.0, fixed_point_height(p.gamma_plus, p.gamma_minus)};
}

Matrix3<double> jacobian_at_fixed_point(const EnsembleParams& p)
{
    const double mz = fixed_point_height(p.gamma_plus, p.gamma_minus);
    const double a = transverse_growth(p);
    const double b = p.V * mz * std::cos(p.theta) - p.omega0;
    Matrix3<double> j;
    j << a, b, 0.0,
        -b, a, 0.0,
        0.0, 0.0, -p.total_rate();
    return j;
}

std::array<std::complex<double>, 3> jacobian_eigenvalues(const EnsembleParams& p)
{
    const double mz = fixed_point_height(p.gamma_plus, p.gamma_minus);
    const double a = transverse_growth(p);
    const double b = p.V * mz * std::cos(p.theta) - p.omega0;
    return {std::complex<double>(-p.total_rate(), 0.0), std::complex<double>(a, -b), std::complex<double>(a, b)};
}

double max_growth_rate(const EnsembleParams& p)
{
    return std::max(-p.total_rate(), transverse_growth(p));
}

bool is_synchronized(const EnsembleParams& p) { return max_growth_rate(p) > 0.0; }

bool unsynchronized_by_inequality(const EnsembleParams& p)
{
    const double mz = fixed_point_height(p.gamma_plus, p.gamma_minus);
    return p.V * mz * std::sin(p.theta) < 0.5 * p.total_rate();
}

std::optional<double> synchronization_boundary(double theta, double gain_ratio)
{
    require_phase(theta);
    if (!(gain_ratio > 0.0)) throw InvalidParameters("gain ratio must be > 0");
    const double mz = std::isinf(gain_ratio) ? 1.0 : (gain_ratio - 1.0) / (gain_ratio + 1.0);
    const double drive = mz * std::sin(theta);
    if (!(drive > 0.0)) return std::nullopt;
    return 0.5 / drive;
}

double synchronization_frequency(const EnsembleParams& p)
{
    require_phase(p.theta);
    return p.omega0 - 0.5 * p.total_rate() * std::cos(p.theta) / std::sin(p.theta);
}

std::optional<LimitCycle> analytic_limit_cycle(const EnsembleParams& p)
{
    require_phase(p.theta);
    const double growth = transverse_growth(p);
    if (!(growth > 0.0) || !(p.V > 0.0)) return std::nullopt;

    const double s = std::sin(p.theta);
    const double total = p.total_rate();
    LimitCycle cycle;
    cycle.C_z = total / (2.0 * p.V * s);
    // 2 C_z (m_z^s - C_z) rewritten as total * growth / (V sin)^2 so that its
    // sign is the sign of the growth rate exactly.
    const double vs = p.V * s;
    cycle.r = std::sqrt(total * growth / (vs * vs));
    cycle.delta_omega = 0.5 * total * std::cos(p.theta) / s;
    cycle.omega_sync = p.omega0 - cycle.delta_omega;
    return cycle;
}

StabilityReport stability_report(const EnsembleParams& p)
{
    p.validate();
    StabilityReport report;
    report.fixed_point = fixed_point(p);
    report.eigenvalues = jacobian_eigenvalues(p);
    if (std::abs(std::sin(p.theta)) <= kDegenerateSin) {
        report.synchronized = false;
        report.note = "degenerate phase: sin(theta) = 0, interaction is a pure rotation";
        return report;
    }
    report.synchronized = is_synchronized(p);
    report.limit_cycle = analytic_limit_cycle(p);
    return report;
}

}  // namespace qsync
