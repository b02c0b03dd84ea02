#pragma once

#include "qsync/types.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace qsync::sweep {

/// Invalid configuration; the message starts with the offending field path.
class ConfigInvalid : public std::invalid_argument {
public:
    ConfigInvalid(const std::string& path, const std::string& what);
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

enum class Mode { simulate, flowfield, stability, phase_diagram, freq_shift, two_group, arnold, phase_tuning, oracle };

const char* to_string(Mode m);
Mode mode_from_string(const std::string& s);  ///< accepts "phase_diagram" and "phase-diagram"

/// Sweep axis: {min, max, count, scale} or an explicit {values: [...]}.
struct Range {
    double min = 0.0;
    double max = 0.0;
    long count = 0;
    bool log = false;
    std::vector<double> values;  ///< explicit list; overrides min/max/count when non-empty

    std::vector<double> grid() const;
    bool operator==(const Range&) const = default;
};

/// Parses a number, allowing multiples and fractions of pi ("pi/2", "-3*pi/4",
/// "2pi") and "inf".
std::optional<double> parse_number(const std::string& text);

/// A parsed configuration. Every schema key is present; missing keys hold their
/// defaults. Keys are "block.name" paths, e.g. "ensemble.coupling".
class SweepConfig {
public:
    using Value = std::variant<double, long, std::string, Range, std::vector<double>, std::vector<long>>;

    SweepConfig();

    static SweepConfig from_yaml(const std::string& text);
    static SweepConfig from_file(const std::string& path);
    /// Rebuilds the configuration from the "# key = value" header of an output file.
    static SweepConfig from_header(const std::string& csv_text);

    /// Override one field; value_text is parsed like a YAML value.
    void set(const std::string& path, const std::string& value_text);

    /// Cross-field checks (ranged-parameter count, range shape, mode rules).
    void validate() const;

    Mode mode() const;
    bool has_mode() const;

    double number(const std::string& path) const;  ///< throws if ranged or "auto"
    std::optional<double> number_or_auto(const std::string& path) const;
    long integer(const std::string& path) const;
    const std::string& text(const std::string& path) const;
    BlochVectord vector3(const std::string& path) const;
    std::vector<long> integers(const std::string& path) const;
    bool is_ranged(const std::string& path) const;
    const Range& range(const std::string& path) const;
    /// Ranged keys in schema order.
    std::vector<std::string> ranged_paths() const;
    /// Value as a single-element grid or its range grid.
    std::vector<double> axis(const std::string& path) const;
    unsigned threads() const;

    /// Lines of the config echo, in schema order. Output paths and the thread
    /// hint are left out: they do not affect any number in the output.
    std::vector<std::pair<std::string, std::string>> echo() const;

    bool operator==(const SweepConfig& other) const;

private:
    friend class ConfigParser;
    void store(const std::string& path, Value v, std::string text);
    const Value& get(const std::string& path) const;

    std::map<std::string, Value> values_;
    std::map<std::string, std::string> texts_;  ///< canonical text for the echo
};

/// Keys that may carry a range.
bool is_sweepable(const std::string& path);

}  // namespace qsync::sweep
