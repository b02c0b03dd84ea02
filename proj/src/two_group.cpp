#include "qsync/two_group.hpp"

#include "qsync/flows.hpp"
#include "qsync/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qsync {

const char* to_string(SyncVerdict v)
{
    switch (v) {
    case SyncVerdict::full: return "full";
    case SyncVerdict::partial: return "partial";
    case SyncVerdict::none: return "none";
    }
    return "none";
}

namespace {

std::optional<double> group_frequency(const Trajectory& traj, int group, const RunControls& run, double& order,
                                      double& resolution)
{
    order = order_parameter(traj, run.transient_fraction, group);
    const Spectrum s = spectrum(traj, run.transient_fraction, run.window, group);
    resolution = s.resolution;
    if (order < run.sync_threshold) return std::nullopt;
    try {
        return dominant_frequency(s);
    } catch (const NoDominantLine&) {
        return std::nullopt;
    }
}

SyncClassification classify_trajectory(const Trajectory& traj, const RunControls& run)
{
    SyncClassification c;
    c.omega_a = group_frequency(traj, 0, run, c.order_a, c.resolution);
    c.omega_b = group_frequency(traj, 1, run, c.order_b, c.resolution);
    if (!c.omega_a || !c.omega_b) {
        c.verdict = SyncVerdict::none;
        return c;
    }
    c.delta_omega_ab = *c.omega_a - *c.omega_b;
    c.verdict = std::abs(*c.delta_omega_ab) < c.resolution ? SyncVerdict::full : SyncVerdict::partial;
    return c;
}

void require_sorted(const std::vector<double>& grid, const char* name)
{
    if (grid.empty()) throw std::invalid_argument(std::string(name) + " grid is empty");
    if (!std::is_sorted(grid.begin(), grid.end()))
        throw std::invalid_argument(std::string(name) + " grid is not sorted");
}

ScanCell run_cell(const TwoGroupParams& p, double delta, double coupling, const RunControls& run)
{
    ScanCell cell;
    cell.delta = delta;
    cell.coupling = coupling;
    try {
        cell.result = classify(p, run);
    } catch (const std::exception& e) {
        cell.error = e.what();
    }
    return cell;
}

}  // namespace

TwoGroupRun simulate_two_group(const TwoGroupParams& p, const RunControls& run)
{
    p.validate();
    TwoGroupRun out;
    out.trajectory = integrate([&p](const PairStated& s) { return rhs_twogroup(s, p); }, run.initial, run.t_end,
                               run.dt_sample, run.integrator);
    out.classification = classify_trajectory(out.trajectory, run);
    return out;
}

SyncClassification classify(const TwoGroupParams& p, const RunControls& run)
{
    return simulate_two_group(p, run).classification;
}

double ScanCell::difference() const
{
    if (!result || !result->delta_omega_ab) return std::numeric_limits<double>::quiet_NaN();
    return result->verdict == SyncVerdict::full ? 0.0 : *result->delta_omega_ab;
}

std::optional<FullWindow> full_window(std::span<const ScanCell> curve)
{
    std::optional<FullWindow> best;
    std::size_t best_len = 0;
    std::size_t i = 0;
    while (i < curve.size()) {
        if (!curve[i].is_full()) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < curve.size() && curve[j + 1].is_full()) ++j;
        const std::size_t len = j - i + 1;
        const FullWindow w{curve[i].delta, curve[j].delta};
        const auto distance = [](const FullWindow& x) {
            return x.lo <= 0.0 && x.hi >= 0.0 ? 0.0 : std::min(std::abs(x.lo), std::abs(x.hi));
        };
        if (!best || len > best_len || (len == best_len && distance(w) < distance(*best))) {
            best = w;
            best_len = len;
        }
        i = j + 1;
    }
    return best;
}

std::vector<ScanCell> TongueMap::column(std::size_t j_coupling) const
{
    std::vector<ScanCell> out;
    out.reserve(deltas.size());
    for (std::size_t i = 0; i < deltas.size(); ++i) out.push_back(at(i, j_coupling));
    return out;
}

TongueMap arnold_tongue(const TwoGroupParams& base, const std::vector<double>& delta_grid,
                        const std::vector<double>& vab_grid, const RunControls& run, unsigned threads)
{
    require_sorted(delta_grid, "delta");
    require_sorted(vab_grid, "V_AB");
    base.validate();

    TongueMap map;
    map.deltas = delta_grid;
    map.couplings = vab_grid;
    map.cells.resize(delta_grid.size() * vab_grid.size());
    parallel_for(map.cells.size(), threads, [&](std::size_t idx) {
        const double delta = delta_grid[idx / vab_grid.size()];
        const double vab = vab_grid[idx % vab_grid.size()];
        TwoGroupParams p = base;
        p.delta = delta;
        p.V_AB = vab;
        map.cells[idx] = run_cell(p, delta, vab, run);
    });
    return map;
}

std::vector<PhaseTuningCurve> phase_tuning_scan(const TwoGroupParams& base, const std::vector<double>& theta_A_values,
                                                const std::vector<double>& delta_grid, const RunControls& run,
                                                unsigned threads)
{
    require_sorted(delta_grid, "delta");
    if (theta_A_values.empty()) throw std::invalid_argument("theta_A list is empty");
    base.validate();

    std::vector<ScanCell> flat(theta_A_values.size() * delta_grid.size());
    parallel_for(flat.size(), threads, [&](std::size_t idx) {
        const double theta = theta_A_values[idx / delta_grid.size()];
        const double delta = delta_grid[idx % delta_grid.size()];
        TwoGroupParams p = base;
        p.theta_A = theta;
        p.delta = delta;
        flat[idx] = run_cell(p, delta, theta, run);
    });

    std::vector<PhaseTuningCurve> curves;
    for (std::size_t t = 0; t < theta_A_values.size(); ++t) {
        PhaseTuningCurve c;
        c.theta_A = theta_A_values[t];
        c.cells.assign(flat.begin() + static_cast<std::ptrdiff_t>(t * delta_grid.size()),
                       flat.begin() + static_cast<std::ptrdiff_t>((t + 1) * delta_grid.size()));
        c.window = full_window(c.cells);
        curves.push_back(std::move(c));
    }
    return curves;
}

double predicted_window_center(const TwoGroupParams& p)
{
    const auto cot = [](double x) { return std::cos(x) / std::sin(x); };
    return (cot(p.theta_A) - cot(p.theta_B)) * 0.5 * p.total_rate();
}

}  // namespace qsync
