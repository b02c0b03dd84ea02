#pragma once

#include <Eigen/Core>

#include <complex>
#include <stdexcept>
#include <string>

namespace qsync {

/* State aliases. A Bloch vector is (m_x, m_y, m_z) of one representative
 * two-level system; a pair state stacks the vectors of groups A and B. */
template <typename Scalar> using BlochVector = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar> using PairState = Eigen::Matrix<Scalar, 6, 1>;
template <typename Scalar> using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

using BlochVectord = BlochVector<double>;
using PairStated = PairState<double>;

/// Slack allowed on |m|^2 <= 1 for integrated states.
inline constexpr double kNormSlack = 1e-6;

class InvalidParameters : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Physical parameters of a single all-to-all coupled ensemble.
///
/// Rates and frequencies are expressed in units of gamma_plus + gamma_minus
/// when built through from_ratios(); the flows themselves are unit-agnostic.
struct EnsembleParams {
    double omega0 = 1.0;
    double V = 0.0;
    double theta = 0.0;
    double gamma_plus = 0.5;
    double gamma_minus = 0.5;

    double total_rate() const { return gamma_plus + gamma_minus; }

    /// Throws InvalidParameters on negative rates, negative coupling,
    /// theta outside [-pi, pi] or a closed system (gamma_plus + gamma_minus == 0).
    void validate() const;

    /// coupling_ratio = V / (gamma_plus + gamma_minus), gain_ratio = gamma_plus / gamma_minus
    /// (may be +inf for pure gain). The total rate is normalized to one.
    static EnsembleParams from_ratios(double coupling_ratio, double gain_ratio, double theta,
                                      double omega0 = 1.0);
};

/// How the inter-group coupling phase enters the equation of group B.
enum class InterGroupPhase {
    symmetric,  ///< both groups see the other's amplitude with e^{i theta_AB}
    conjugate,  ///< group B sees e^{-i theta_AB}
};

/// Two coupled ensembles in the frame rotating at their mean natural frequency.
/// Group A precesses at +delta/2 and group B at -delta/2.
struct TwoGroupParams {
    double delta = 0.0;
    double V_A = 0.0;
    double V_B = 0.0;
    double V_AB = 0.0;
    double theta_A = 0.0;
    double theta_B = 0.0;
    double theta_AB = 0.0;
    double gamma_plus = 0.5;
    double gamma_minus = 0.5;
    InterGroupPhase inter_phase = InterGroupPhase::symmetric;

    double total_rate() const { return gamma_plus + gamma_minus; }
    void validate() const;

    /// Single-ensemble parameters of group A (sign = +1) or B (sign = -1) with
    /// the inter-group coupling switched off.
    EnsembleParams group(int sign) const;

    /// Parametrization used for the two-group figures: everything in units of
    /// gamma_plus. Returns parameters normalized to gamma_plus + gamma_minus = 1.
    static TwoGroupParams from_gain_units(double delta_per_gain, double coupling_per_gain,
                                          double inter_ratio, double gain_ratio,
                                          double theta_A, double theta_B, double theta_AB);
};

/// <sigma^+> = (m_x + i m_y) / 2
template <typename Derived>
std::complex<typename Derived::Scalar> sigma_plus(const Eigen::MatrixBase<Derived>& m)
{
    using S = typename Derived::Scalar;
    return std::complex<S>(m(0), m(1)) / S(2);
}

/// Default initial state of single-ensemble runs.
inline BlochVectord default_initial_state() { return {-0.5, 0.4, 0.1}; }

/// Default two-group start; off the exchange-symmetric manifold.
inline PairStated default_pair_initial_state()
{
    PairStated s;
    s << -0.5, 0.4, 0.1, 0.4, -0.5, 0.1;
    return s;
}

}  // namespace qsync
