#pragma once

#include "qsync/types.hpp"

#include <Eigen/Core>

namespace qsync {

/// Uniformly sampled Bloch-vector history of one ensemble (a) or two groups (a, b).
/// Column k is the state at time t0 + k * dt_sample.
struct Trajectory {
    double t0 = 0.0;
    double dt_sample = 0.0;
    Eigen::Matrix3Xd a;
    Eigen::Matrix3Xd b;  ///< empty unless two groups were integrated

    Trajectory() = default;
    Trajectory(double dt, Eigen::Index samples, bool two_groups)
        : dt_sample(dt), a(3, samples), b(3, two_groups ? samples : 0)
    {
    }

    Eigen::Index size() const { return a.cols(); }
    bool has_two_groups() const { return b.cols() > 0; }
    double time(Eigen::Index k) const { return t0 + static_cast<double>(k) * dt_sample; }
    double duration() const { return size() > 0 ? static_cast<double>(size() - 1) * dt_sample : 0.0; }

    /// Samples of group 0 (a) or group 1 (b).
    const Eigen::Matrix3Xd& group(int g) const { return g == 0 ? a : b; }
    BlochVectord final_state(int g = 0) const { return group(g).col(size() - 1); }
};

}  // namespace qsync
