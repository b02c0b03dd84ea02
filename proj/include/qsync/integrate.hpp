#pragma once

#include "qsync/trajectory.hpp"
#include "qsync/types.hpp"

#include <boost/numeric/odeint.hpp>
#include <boost/numeric/odeint/external/eigen/eigen.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace qsync {

class StepFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct IntegratorControls {
    double atol = 1e-9;
    double rtol = 1e-9;
    /// > 0 selects classic RK4 with at most this step (bit-reproducible sweeps).
    double fixed_step = 0.0;
    double initial_step = 1e-3;
    double min_step = 1e-12;
    /// Rejected or accepted attempts allowed between two samples.
    long max_attempts_per_sample = 10'000'000;
    /// Verify |m|^2 <= 1 + kNormSlack for Bloch-vector states at every sample.
    bool check_norm = true;
};

namespace detail {

template <typename State>
void check_bloch_norm(const State& x, double t)
{
    if constexpr (State::RowsAtCompileTime == 3 || State::RowsAtCompileTime == 6) {
        for (Eigen::Index g = 0; g < x.size() / 3; ++g) {
            const double n2 = x.template segment<3>(3 * g).squaredNorm();
            if (!(n2 <= 1.0 + kNormSlack))
                throw StepFailure("state left the unit ball at t=" + std::to_string(t) +
                                  " (|m|^2=" + std::to_string(n2) + ")");
        }
    }
}

}  // namespace detail

/// Integrates dx/dt = rhs(x) from t = 0 and calls observe(k, t_k, x(t_k)) at
/// t_k = k * dt_sample for k = 0 .. floor(t_end / dt_sample).
///
/// The adaptive mode uses a Dormand-Prince 4(5) pair and never steps over a
/// sample time, so samples are exact integrator states, not interpolants.
template <typename State, typename Flow, typename Observer>
void integrate_observed(Flow&& rhs, State x, double t_end, double dt_sample, const IntegratorControls& controls,
                        Observer&& observe)
{
    namespace odeint = boost::numeric::odeint;
    if (!(t_end > 0.0) || !(dt_sample > 0.0))
        throw std::invalid_argument("integrate: t_end and dt_sample must be positive");
    if (!x.allFinite())
        throw std::invalid_argument("integrate: non-finite initial state");

    const auto system = [&rhs](const State& s, State& ds, double) { ds = rhs(s); };
    const long n_samples = static_cast<long>(std::floor(t_end / dt_sample + 1e-9));
    const bool bloch = controls.check_norm;

    if (bloch) detail::check_bloch_norm(x, 0.0);
    observe(0L, 0.0, std::as_const(x));

    if (controls.fixed_step > 0.0) {
        odeint::runge_kutta4<State, double, State, double, odeint::vector_space_algebra> stepper;
        const long substeps = std::max(1L, static_cast<long>(std::ceil(dt_sample / controls.fixed_step - 1e-9)));
        const double h = dt_sample / static_cast<double>(substeps);
        for (long k = 1; k <= n_samples; ++k) {
            double t = static_cast<double>(k - 1) * dt_sample;
            for (long j = 0; j < substeps; ++j) {
                stepper.do_step(system, x, t, h);
                t += h;
            }
            if (!x.allFinite()) throw StepFailure("non-finite state in fixed-step integration");
            if (bloch) detail::check_bloch_norm(x, k * dt_sample);
            observe(k, static_cast<double>(k) * dt_sample, std::as_const(x));
        }
        return;
    }

    using Dopri = odeint::runge_kutta_dopri5<State, double, State, double, odeint::vector_space_algebra>;
    auto stepper = odeint::make_controlled<Dopri>(controls.atol, controls.rtol);

    double t = 0.0;
    double dt = std::min(controls.initial_step, dt_sample);
    for (long k = 1; k <= n_samples; ++k) {
        const double target = static_cast<double>(k) * dt_sample;
        long attempts = 0;
        while (target - t > 1e-12 * std::max(1.0, target)) {
            const double remaining = target - t;
            const bool clamped = dt >= remaining;
            double h = clamped ? remaining : dt;
            const double before = dt;
            const auto result = stepper.try_step(system, x, t, h);
            if (result == odeint::success) {
                if (clamped) t = target;
                dt = clamped ? std::max(h, before) : h;
            } else {
                dt = h;
                if (dt < controls.min_step)
                    throw StepFailure("step size fell below " + std::to_string(controls.min_step) +
                                      " at t=" + std::to_string(t));
            }
            if (++attempts > controls.max_attempts_per_sample)
                throw StepFailure("too many step attempts before t=" + std::to_string(target));
        }
        t = target;
        if (!x.allFinite()) throw StepFailure("non-finite state at t=" + std::to_string(t));
        if (bloch) detail::check_bloch_norm(x, t);
        observe(k, t, std::as_const(x));
    }
}

/// Integrates a single-ensemble (3-state) or two-group (6-state) flow and
/// returns the uniformly sampled trajectory.
template <typename Flow, typename Derived>
Trajectory integrate(Flow&& rhs, const Eigen::MatrixBase<Derived>& x0, double t_end, double dt_sample,
                     const IntegratorControls& controls = {})
{
    using State = Eigen::Matrix<double, Derived::RowsAtCompileTime, 1>;
    static_assert(State::RowsAtCompileTime == 3 || State::RowsAtCompileTime == 6,
                  "integrate() samples Bloch states of one or two ensembles");
    constexpr bool two_groups = State::RowsAtCompileTime == 6;

    if (!(t_end > 0.0) || !(dt_sample > 0.0))
        throw std::invalid_argument("integrate: t_end and dt_sample must be positive");
    const State start = x0;
    if (controls.check_norm) detail::check_bloch_norm(start, 0.0);

    const long n = static_cast<long>(std::floor(t_end / dt_sample + 1e-9)) + 1;
    Trajectory traj(dt_sample, n, two_groups);
    integrate_observed<State>(
        std::forward<Flow>(rhs), start, t_end, dt_sample, controls, [&traj](long k, double, const State& x) {
            traj.a.col(k) = x.template head<3>();
            if constexpr (two_groups) traj.b.col(k) = x.template tail<3>();
        });
    return traj;
}

}  // namespace qsync
