#pragma once

#include "qsync/integrate.hpp"
#include "qsync/spectral.hpp"
#include "qsync/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qsync {

enum class SyncVerdict { full, partial, none };

const char* to_string(SyncVerdict v);

/// full:    both groups oscillate and |omega_A - omega_B| < resolution
/// partial: both groups oscillate at frequencies at least one resolution apart
/// none:    at least one group has no dominant line
struct SyncClassification {
    SyncVerdict verdict = SyncVerdict::none;
    std::optional<double> omega_a;
    std::optional<double> omega_b;
    std::optional<double> delta_omega_ab;
    double order_a = 0.0;
    double order_b = 0.0;
    double resolution = 0.0;
};

struct RunControls {
    double t_end = 2000.0;
    double dt_sample = 0.25;
    double transient_fraction = 0.5;
    Window window = Window::rectangular;
    IntegratorControls integrator;
    double sync_threshold = kSyncThreshold;
    PairStated initial = default_pair_initial_state();
};

/// Integrates the coupled groups and classifies their steady state from the
/// spectra of <sigma^+_A>(t) and <sigma^+_B>(t).
SyncClassification classify(const TwoGroupParams& p, const RunControls& run);

/// Classification plus the trajectory it was computed from.
struct TwoGroupRun {
    Trajectory trajectory;
    SyncClassification classification;
};
TwoGroupRun simulate_two_group(const TwoGroupParams& p, const RunControls& run);

/// One grid point of a scan. A failed run leaves result empty and sets error.
struct ScanCell {
    double delta = 0.0;
    double coupling = 0.0;  ///< V_AB for tongue maps, theta_A for phase-tuning curves
    std::optional<SyncClassification> result;
    std::string error;

    bool is_full() const { return result && result->verdict == SyncVerdict::full; }
    /// omega_A - omega_B, zero when fully locked, NaN when undefined.
    double difference() const;
};

/// Contiguous run of fully synchronized detunings.
struct FullWindow {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
    double center() const { return 0.5 * (lo + hi); }
};

/// Longest contiguous run of full cells along a detuning-ordered curve; ties go
/// to the run closest to zero detuning.
std::optional<FullWindow> full_window(std::span<const ScanCell> curve);

struct TongueMap {
    std::vector<double> deltas;
    std::vector<double> couplings;
    std::vector<ScanCell> cells;  ///< row-major: delta index major, coupling minor

    const ScanCell& at(std::size_t i_delta, std::size_t j_coupling) const
    {
        return cells[i_delta * couplings.size() + j_coupling];
    }
    std::vector<ScanCell> column(std::size_t j_coupling) const;
};

/// omega_A - omega_B over a (delta, V_AB) grid. Cells are independent; the
/// result is identical for any thread count.
TongueMap arnold_tongue(const TwoGroupParams& base, const std::vector<double>& delta_grid,
                        const std::vector<double>& vab_grid, const RunControls& run, unsigned threads = 1);

struct PhaseTuningCurve {
    double theta_A = 0.0;
    std::vector<ScanCell> cells;
    std::optional<FullWindow> window;
};

/// Detuning scans for several intra-group phases of group A.
std::vector<PhaseTuningCurve> phase_tuning_scan(const TwoGroupParams& base, const std::vector<double>& theta_A_values,
                                                const std::vector<double>& delta_grid, const RunControls& run,
                                                unsigned threads = 1);

/// Detuning at which the single-group synchronization frequencies of A and B
/// coincide: (cot(theta_A) - cot(theta_B)) (g+ + g-) / 2.
double predicted_window_center(const TwoGroupParams& p);

}  // namespace qsync
