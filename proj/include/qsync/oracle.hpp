#pragma once

#include "qsync/integrate.hpp"
#include "qsync/trajectory.hpp"
#include "qsync/types.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>
#include <stdexcept>
#include <vector>

namespace qsync {

class DimensionTooLarge : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The smallest eigenvalue of the integrated density matrix went below
/// -positivity_tolerance.
class PositivityBreach : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using DensityMatrix = Eigen::MatrixXcd;
using SparseOperator = Eigen::SparseMatrix<std::complex<double>>;

inline constexpr int kMaxSites = 8;

/// Finite-N many-body model behind the exact evolution.
enum class OracleModel {
    /// Coherent exchange (V cos(theta) / N) sum_{i != j} s+_i s-_j and the collective
    /// jump sqrt(2 V |sin(theta)| / N) sum_i s-_i (s+_i when sin(theta) < 0). Its
    /// mean-field limit is rhs_meanfield for every theta.
    collective,
    /// Pair Hamiltonian (V / N) sum_{i<j} (e^{i theta} s+_i s-_j + h.c.) taken literally.
    /// Not permutation symmetric when sin(theta) != 0.
    pairwise,
};

/// Computational basis: bit i of the index set <=> site i excited (sigma^z = +1).
DensityMatrix product_state(const BlochVectord& m, int sites);

/// Matrix-free Lindblad generator
///   d rho / dt = -i [H, rho] + sum_i (g+ D[s+_i] + g- D[s-_i]) rho + collective part,
/// with D[o] rho = o rho o^dag - {o^dag o, rho} / 2. Only the 2^N x 2^N effective
/// Hamiltonian is stored; local jumps are applied by bit manipulation.
class Liouvillian {
public:
    Liouvillian(const EnsembleParams& p, int sites, OracleModel model = OracleModel::collective);

    /// Assumes rho is Hermitian (the output is then Hermitian and traceless).
    void apply(const Eigen::Ref<const DensityMatrix>& rho, DensityMatrix& out) const;
    DensityMatrix apply(const Eigen::Ref<const DensityMatrix>& rho) const;

    int sites() const { return sites_; }
    Eigen::Index dim() const { return dim_; }
    const SparseOperator& effective_hamiltonian() const { return h_eff_; }

private:
    void apply_collective(const Eigen::Ref<const DensityMatrix>& rho, DensityMatrix& out) const;

    EnsembleParams params_;
    int sites_;
    Eigen::Index dim_;
    SparseOperator h_eff_;
    double collective_rate_ = 0.0;
    bool collective_lowering_ = true;
    mutable DensityMatrix scratch_;
    mutable DensityMatrix collective_;
};

DensityMatrix liouvillian_apply(const DensityMatrix& rho, const EnsembleParams& p, int sites,
                                OracleModel model = OracleModel::collective);

struct OracleOptions {
    OracleModel model = OracleModel::collective;
    IntegratorControls integrator;
    double positivity_tolerance = 1e-8;
    bool monitor_positivity = true;
};

struct ExactSample {
    double t = 0.0;
    Eigen::VectorXcd sigma_plus;  ///< per site
    Eigen::VectorXd sigma_z;      ///< per site
    double trace_error = 0.0;        ///< |Tr rho - 1|
    double hermiticity_error = 0.0;  ///< max |rho - rho^dag|
    double min_eigenvalue = 0.0;

    std::complex<double> mean_sigma_plus() const { return sigma_plus.mean(); }
};

struct ExactSeries {
    double dt_sample = 0.0;
    std::vector<ExactSample> samples;
};

/// Integrates the full master equation and records single-site expectations
/// and state diagnostics at every sample. Throws PositivityBreach (with the time
/// and eigenvalue) when monitoring is on and positivity fails.
ExactSeries evolve_exact(const DensityMatrix& rho0, const EnsembleParams& p, int sites, double t_end,
                         double dt_sample, const OracleOptions& options = {});

/// Mean-field parameters matching the collective model at finite N: coupling
/// V (N-1)/N and the collective jump's on-site part 2 V |sin(theta)| / N added to
/// the local damping (sin > 0) or gain (sin < 0). Equal to p as N -> infinity.
EnsembleParams finite_size_params(const EnsembleParams& p, int sites);

/// sup_k |<sigma^+>_exact(t_k) - <sigma^+>_meanfield(t_k)| over common samples,
/// using the site average of the exact run.
double meanfield_deviation(const ExactSeries& exact, const Trajectory& meanfield);

}  // namespace qsync
