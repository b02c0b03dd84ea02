#pragma once

#include "qsync/types.hpp"

#include <cmath>

namespace qsync {

// Right-hand sides of the deterministic mean-field flows. All of them are pure
// and templated on the state scalar so they compose with Eigen expressions.

/// Coherent precession about z at angular frequency omega0.
template <typename Derived>
BlochVector<typename Derived::Scalar> rhs_rotation(const Eigen::MatrixBase<Derived>& m, double omega0)
{
    using S = typename Derived::Scalar;
    const S w(omega0);
    return {-w * m(1), w * m(0), S(0)};
}

/// Local gain and damping: contraction of the transverse part at (g+ + g-)/2 and
/// relaxation of m_z toward (g+ - g-)/(g+ + g-).
template <typename Derived>
BlochVector<typename Derived::Scalar> rhs_dissipation(const Eigen::MatrixBase<Derived>& m,
                                                      double gamma_plus, double gamma_minus)
{
    using S = typename Derived::Scalar;
    const S half_total = S(0.5) * (S(gamma_plus) + S(gamma_minus));
    return {-half_total * m(0), -half_total * m(1),
            S(gamma_plus) * (S(1) - m(2)) - S(gamma_minus) * (S(1) + m(2))};
}

/// Non-interacting flow: rotation plus dissipation.
template <typename Derived>
BlochVector<typename Derived::Scalar> rhs_bare(const Eigen::MatrixBase<Derived>& m, const EnsembleParams& p)
{
    return rhs_rotation(m, p.omega0) + rhs_dissipation(m, p.gamma_plus, p.gamma_minus);
}

/// Flow generated by the mean-field interaction alone:
///   x:  V m_z (m_y cos(theta) + m_x sin(theta))
///   y: -V m_z (m_x cos(theta) - m_y sin(theta))
///   z: -V (m_x^2 + m_y^2) sin(theta)
/// At theta = 0 this is a rotation about z at rate V m_z.
template <typename Derived>
BlochVector<typename Derived::Scalar> rhs_interaction(const Eigen::MatrixBase<Derived>& m, double V,
                                                      double theta)
{
    using S = typename Derived::Scalar;
    const S c(std::cos(theta));
    const S s(std::sin(theta));
    const S vz = S(V) * m(2);
    // cos(theta) * (theta = 0 rotation) + sin(theta) * (theta = pi/2 part)
    const S rot_x = vz * m(1), rot_y = -vz * m(0);
    const S rad_x = vz * m(0), rad_y = vz * m(1);
    return {c * rot_x + s * rad_x, c * rot_y + s * rad_y, -S(V) * (m(0) * m(0) + m(1) * m(1)) * s};
}

/// Interaction of a target ensemble with the mean amplitude of a source ensemble.
/// Reduces to rhs_interaction when source == target.
template <typename DerivedT, typename DerivedS>
BlochVector<typename DerivedT::Scalar> rhs_cross_interaction(const Eigen::MatrixBase<DerivedT>& target,
                                                             const Eigen::MatrixBase<DerivedS>& source,
                                                             double V, double theta)
{
    using S = typename DerivedT::Scalar;
    const S c(std::cos(theta));
    const S s(std::sin(theta));
    const S vz = S(V) * target(2);
    const S sx = source(0);
    const S sy = source(1);
    return {vz * (sy * c + sx * s), -vz * (sx * c - sy * s),
            S(V) * (c * (sx * target(1) - sy * target(0)) - s * (sx * target(0) + sy * target(1)))};
}

/// Full nonlinear mean-field flow of one ensemble.
template <typename Derived>
BlochVector<typename Derived::Scalar> rhs_meanfield(const Eigen::MatrixBase<Derived>& m, const EnsembleParams& p)
{
    return rhs_bare(m, p) + rhs_interaction(m, p.V, p.theta);
}

/// Interaction plus dissipation with the precession switched off.
template <typename Derived>
BlochVector<typename Derived::Scalar> rhs_interaction_dissipation(const Eigen::MatrixBase<Derived>& m,
                                                                  const EnsembleParams& p)
{
    return rhs_interaction(m, p.V, p.theta) + rhs_dissipation(m, p.gamma_plus, p.gamma_minus);
}

/// Coupled flow of two groups; the state stacks (m_A, m_B).
template <typename Derived>
PairState<typename Derived::Scalar> rhs_twogroup(const Eigen::MatrixBase<Derived>& state, const TwoGroupParams& p)
{
    using S = typename Derived::Scalar;
    const BlochVector<S> a = state.template head<3>();
    const BlochVector<S> b = state.template tail<3>();
    const double phase_b = p.inter_phase == InterGroupPhase::symmetric ? p.theta_AB : -p.theta_AB;

    PairState<S> out;
    out.template head<3>() = rhs_meanfield(a, p.group(+1)) + rhs_cross_interaction(a, b, p.V_AB, p.theta_AB);
    out.template tail<3>() = rhs_meanfield(b, p.group(-1)) + rhs_cross_interaction(b, a, p.V_AB, phase_b);
    return out;
}

}  // namespace qsync
