#include "qsync/types.hpp"

#include <cmath>
#include <numbers>

namespace qsync {

namespace {

void require(bool ok, const std::string& what)
{
    if (!ok) throw InvalidParameters(what);
}

void check_rates(double gp, double gm)
{
    require(std::isfinite(gp) && gp >= 0.0, "gamma_plus must be finite and >= 0");
    require(std::isfinite(gm) && gm >= 0.0, "gamma_minus must be finite and >= 0");
    require(gp + gm > 0.0, "gamma_plus + gamma_minus must be > 0 (closed system)");
}

void check_phase(double theta, const char* name)
{
    require(std::isfinite(theta) && std::abs(theta) <= std::numbers::pi + 1e-12,
            std::string(name) + " must lie in [-pi, pi]");
}

void check_coupling(double v, const char* name)
{
    require(std::isfinite(v) && v >= 0.0, std::string(name) + " must be finite and >= 0");
}

std::pair<double, double> rates_from_ratio(double gain_ratio)
{
    require(gain_ratio >= 0.0 && !std::isnan(gain_ratio), "gain ratio must be >= 0");
    if (std::isinf(gain_ratio)) return {1.0, 0.0};
    return {gain_ratio / (1.0 + gain_ratio), 1.0 / (1.0 + gain_ratio)};
}

}  // namespace

void EnsembleParams::validate() const
{
    require(std::isfinite(omega0), "omega0 must be finite");
    check_coupling(V, "V");
    check_phase(theta, "theta");
    check_rates(gamma_plus, gamma_minus);
}

EnsembleParams EnsembleParams::from_ratios(double coupling_ratio, double gain_ratio, double theta, double omega0)
{
    const auto [gp, gm] = rates_from_ratio(gain_ratio);
    EnsembleParams p{omega0, coupling_ratio, theta, gp, gm};
    p.validate();
    return p;
}

void TwoGroupParams::validate() const
{
    require(std::isfinite(delta), "delta must be finite");
    check_coupling(V_A, "V_A");
    check_coupling(V_B, "V_B");
    check_coupling(V_AB, "V_AB");
    check_phase(theta_A, "theta_A");
    check_phase(theta_B, "theta_B");
    check_phase(theta_AB, "theta_AB");
    check_rates(gamma_plus, gamma_minus);
}

EnsembleParams TwoGroupParams::group(int sign) const
{
    const bool a = sign >= 0;
    return EnsembleParams{a ? 0.5 * delta : -0.5 * delta, a ? V_A : V_B, a ? theta_A : theta_B, gamma_plus,
                          gamma_minus};
}

TwoGroupParams TwoGroupParams::from_gain_units(double delta_per_gain, double coupling_per_gain, double inter_ratio,
                                               double gain_ratio, double theta_A, double theta_B, double theta_AB)
{
    const auto [gp, gm] = rates_from_ratio(gain_ratio);
    require(inter_ratio > 0.0, "V / V_AB must be > 0");
    TwoGroupParams p;
    p.delta = delta_per_gain * gp;
    p.V_A = p.V_B = coupling_per_gain * gp;
    p.V_AB = std::isinf(inter_ratio) ? 0.0 : p.V_A / inter_ratio;
    p.theta_A = theta_A;
    p.theta_B = theta_B;
    p.theta_AB = theta_AB;
    p.gamma_plus = gp;
    p.gamma_minus = gm;
    p.validate();
    return p;
}

}  // namespace qsync
