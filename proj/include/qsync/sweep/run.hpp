#pragma once

#include "qsync/sweep/config.hpp"
#include "qsync/two_group.hpp"

#include <exception>
#include <iosfwd>
#include <string>

namespace qsync::sweep {

const char* version();

struct RunOptions {
    bool resume = false;
    std::ostream* log = nullptr;  ///< run summaries; nothing is logged when null
};

/// Executes the configured mode: writes the CSV (and the SVG when asked).
/// Throws ConfigInvalid for configuration problems; other exceptions abort the
/// run. Failures inside a sweep cell end up in that cell's error column.
void run_config(const SweepConfig& cfg, const RunOptions& options = {});

/// Short machine-readable name of a per-cell failure ("step_failure", ...).
std::string error_code(const std::exception& e);

/// Parameters at one sweep point; `point` maps ranged paths to their values.
EnsembleParams ensemble_params(const SweepConfig& cfg, const std::vector<std::pair<std::string, double>>& point = {});
TwoGroupParams two_group_params(const SweepConfig& cfg, const std::vector<std::pair<std::string, double>>& point = {});
RunControls two_group_controls(const SweepConfig& cfg);

}  // namespace qsync::sweep
