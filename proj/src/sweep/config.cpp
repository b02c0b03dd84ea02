#include "qsync/sweep/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>

namespace qsync::sweep {

ConfigInvalid::ConfigInvalid(const std::string& path, const std::string& what)
    : std::invalid_argument(path.empty() ? what : path + ": " + what), path_(path)
{
}

namespace {

enum class Kind { number, number_or_auto, integer, choice, text, vector3, integer_list };

struct Field {
    const char* path;
    Kind kind;
    const char* fallback;
    const char* choices = "";
    bool sweepable = false;
    bool echoed = true;
};

// Schema order is the echo order and the axis order of sweeps.
const std::vector<Field>& schema()
{
    static const std::vector<Field> fields{
        {"mode", Kind::choice, "",
         "simulate,flowfield,stability,phase_diagram,freq_shift,two_group,arnold,phase_tuning,oracle"},
        {"ensemble.omega0", Kind::number, "1", "", true},
        {"ensemble.coupling", Kind::number, "1", "", true},
        {"ensemble.theta", Kind::number, "pi/2", "", true},
        {"ensemble.gain_ratio", Kind::number, "5", "", true},
        {"two_group.units", Kind::choice, "gain", "gain,total"},
        {"two_group.delta", Kind::number, "0.1", "", true},
        {"two_group.coupling_a", Kind::number, "6", "", true},
        {"two_group.coupling_b", Kind::number, "6", "", true},
        {"two_group.coupling_ab", Kind::number, "1", "", true},
        {"two_group.theta_a", Kind::number, "pi/2", "", true},
        {"two_group.theta_b", Kind::number, "pi/2", "", true},
        {"two_group.theta_ab", Kind::number, "pi/2", "", true},
        {"two_group.gain_ratio", Kind::number, "5", "", true},
        {"two_group.inter_phase", Kind::choice, "symmetric", "symmetric,conjugate"},
        {"initial.a", Kind::vector3, "[-0.5, 0.4, 0.1]"},
        {"initial.b", Kind::vector3, "[0.4, -0.5, 0.1]"},
        {"run.t_end", Kind::number_or_auto, "auto"},
        {"run.dt_sample", Kind::number_or_auto, "auto"},
        {"run.transient_fraction", Kind::number_or_auto, "auto"},
        {"run.rtol", Kind::number, "1e-9"},
        {"run.atol", Kind::number, "1e-9"},
        {"run.fixed_step", Kind::number, "0"},
        {"run.window", Kind::choice, "rectangular", "rectangular,hann"},
        {"run.sync_threshold", Kind::number, "1e-3"},
        {"oracle.sites", Kind::integer_list, "[1, 2, 4, 6]"},
        {"oracle.model", Kind::choice, "collective", "collective,pairwise"},
        {"flowfield.flow", Kind::choice, "meanfield", "meanfield,bare,interaction,dissipation,interaction_dissipation"},
        {"flowfield.grid", Kind::integer, "12"},
        {"flowfield.radius", Kind::number, "1"},
        {"output.csv", Kind::text, "-", "", false, false},
        {"output.svg", Kind::text, "", "", false, false},
        {"execution.threads", Kind::integer, "1", "", false, false},
    };
    return fields;
}

const Field* find_field(const std::string& path)
{
    for (const auto& f : schema())
        if (path == f.path) return &f;
    return nullptr;
}

bool block_exists(const std::string& block)
{
    for (const auto& f : schema()) {
        const std::string p = f.path;
        if (p.size() > block.size() && p.compare(0, block.size(), block) == 0 && p[block.size()] == '.') return true;
    }
    return false;
}

std::vector<std::string> split_choices(const char* list)
{
    std::vector<std::string> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

std::string join(const std::vector<std::string>& items)
{
    std::string out;
    for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
    return out;
}

}  // namespace

const char* to_string(Mode m)
{
    switch (m) {
    case Mode::simulate: return "simulate";
    case Mode::flowfield: return "flowfield";
    case Mode::stability: return "stability";
    case Mode::phase_diagram: return "phase_diagram";
    case Mode::freq_shift: return "freq_shift";
    case Mode::two_group: return "two_group";
    case Mode::arnold: return "arnold";
    case Mode::phase_tuning: return "phase_tuning";
    case Mode::oracle: return "oracle";
    }
    return "simulate";
}

Mode mode_from_string(const std::string& s)
{
    std::string key = s;
    std::replace(key.begin(), key.end(), '-', '_');
    for (Mode m : {Mode::simulate, Mode::flowfield, Mode::stability, Mode::phase_diagram, Mode::freq_shift,
                   Mode::two_group, Mode::arnold, Mode::phase_tuning, Mode::oracle})
        if (key == to_string(m)) return m;
    throw ConfigInvalid("mode", "unknown mode '" + s + "'");
}

std::optional<double> parse_number(const std::string& raw)
{
    std::string text;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) text += c;
    if (text.empty()) return std::nullopt;

    static const std::regex pi_form(R"(^([+-]?)(\d*\.?\d*)\*?pi(?:/(\d*\.?\d+))?$)");
    std::smatch m;
    if (std::regex_match(text, m, pi_form)) {
        double v = std::numbers::pi;
        if (m[2].length() > 0) v *= std::stod(m[2].str());
        if (m[3].length() > 0) v /= std::stod(m[3].str());
        return m[1].str() == "-" ? -v : v;
    }
    if (text == "inf" || text == "+inf" || text == ".inf") return std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || std::isnan(v) || std::isinf(v)) return std::nullopt;
        return v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

std::vector<double> Range::grid() const
{
    if (!values.empty()) return values;
    std::vector<double> out(static_cast<std::size_t>(count));
    for (long k = 0; k < count; ++k) {
        const double f = count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(count - 1);
        out[static_cast<std::size_t>(k)] =
            log ? std::exp(std::log(min) + f * (std::log(max) - std::log(min))) : min + f * (max - min);
    }
    if (count > 1) {
        out.front() = min;
        out.back() = max;
    }
    return out;
}

class ConfigParser {
public:
    static void assign(SweepConfig& cfg, const std::string& path, const YAML::Node& node)
    {
        const Field* f = find_field(path);
        if (!f) throw ConfigInvalid(path, "unknown key");
        switch (f->kind) {
        case Kind::number:
        case Kind::number_or_auto:
            if (node.IsMap()) {
                if (!f->sweepable) throw ConfigInvalid(path, "this field cannot be swept");
                auto [range, text] = parse_range(path, node);
                cfg.store(path, range, text);
                return;
            }
            if (f->kind == Kind::number_or_auto && node.IsScalar() && node.Scalar() == "auto") {
                cfg.store(path, std::string("auto"), "auto");
                return;
            }
            cfg.store(path, scalar_number(path, node), node.Scalar());
            return;
        case Kind::integer: {
            const double v = scalar_number(path, node);
            if (v != std::floor(v)) throw ConfigInvalid(path, "expected an integer");
            cfg.store(path, static_cast<long>(v), node.Scalar());
            return;
        }
        case Kind::choice: {
            if (!node.IsScalar()) throw ConfigInvalid(path, "expected one of: " + join(split_choices(f->choices)));
            std::string v = node.Scalar();
            if (path == "mode") std::replace(v.begin(), v.end(), '-', '_');
            const auto options = split_choices(f->choices);
            if (std::find(options.begin(), options.end(), v) == options.end())
                throw ConfigInvalid(path, "'" + v + "' is not one of: " + join(options));
            cfg.store(path, v, v);
            return;
        }
        case Kind::text:
            if (node.IsNull()) {
                cfg.store(path, std::string(), "");
                return;
            }
            if (!node.IsScalar()) throw ConfigInvalid(path, "expected a string");
            cfg.store(path, node.Scalar(), node.Scalar());
            return;
        case Kind::vector3: {
            auto [values, text] = number_list(path, node);
            if (values.size() != 3) throw ConfigInvalid(path, "expected three numbers [m_x, m_y, m_z]");
            cfg.store(path, values, text);
            return;
        }
        case Kind::integer_list: {
            auto [values, text] = number_list(path, node);
            std::vector<long> ints;
            for (double v : values) {
                if (v != std::floor(v)) throw ConfigInvalid(path, "expected integers");
                ints.push_back(static_cast<long>(v));
            }
            cfg.store(path, ints, text);
            return;
        }
        }
    }

private:
    static double scalar_number(const std::string& path, const YAML::Node& node)
    {
        if (!node.IsScalar()) throw ConfigInvalid(path, "expected a number");
        const auto v = parse_number(node.Scalar());
        if (!v) throw ConfigInvalid(path, "'" + node.Scalar() + "' is not a number");
        return *v;
    }

    static std::pair<std::vector<double>, std::string> number_list(const std::string& path, const YAML::Node& node)
    {
        if (!node.IsSequence()) throw ConfigInvalid(path, "expected a list");
        std::vector<double> values;
        std::vector<std::string> texts;
        for (std::size_t i = 0; i < node.size(); ++i) {
            values.push_back(scalar_number(path + "[" + std::to_string(i) + "]", node[i]));
            texts.push_back(node[i].Scalar());
        }
        return {values, "[" + join(texts) + "]"};
    }

    static std::pair<Range, std::string> parse_range(const std::string& path, const YAML::Node& node)
    {
        Range r;
        std::string scale = "linear";
        std::string min_t, max_t, count_t;
        bool has_min = false, has_max = false, has_count = false, has_values = false;
        std::string values_text;
        for (const auto& kv : node) {
            const std::string key = kv.first.as<std::string>();
            const std::string sub = path + "." + key;
            if (key == "min") {
                r.min = scalar_number(sub, kv.second);
                min_t = kv.second.Scalar();
                has_min = true;
            } else if (key == "max") {
                r.max = scalar_number(sub, kv.second);
                max_t = kv.second.Scalar();
                has_max = true;
            } else if (key == "count") {
                const double c = scalar_number(sub, kv.second);
                if (c != std::floor(c)) throw ConfigInvalid(sub, "expected an integer");
                r.count = static_cast<long>(c);
                count_t = kv.second.Scalar();
                has_count = true;
            } else if (key == "scale") {
                scale = kv.second.IsScalar() ? kv.second.Scalar() : "";
                if (scale != "linear" && scale != "log") throw ConfigInvalid(sub, "expected linear or log");
            } else if (key == "values") {
                auto [values, text] = number_list(sub, kv.second);
                r.values = values;
                values_text = text;
                has_values = true;
            } else {
                throw ConfigInvalid(sub, "unknown key (a range takes min, max, count, scale or values)");
            }
        }
        r.log = scale == "log";
        if (has_values) {
            if (has_min || has_max || has_count || r.log)
                throw ConfigInvalid(path, "a range takes either values or min/max/count, not both");
            return {r, "{values: " + values_text + "}"};
        }
        if (!has_min || !has_max || !has_count) throw ConfigInvalid(path, "a range needs min, max and count");
        return {r, "{min: " + min_t + ", max: " + max_t + ", count: " + count_t + ", scale: " + scale + "}"};
    }
};

SweepConfig::SweepConfig()
{
    for (const auto& f : schema()) {
        if (f.kind == Kind::text || (f.kind == Kind::choice && std::string(f.fallback).empty())) {
            store(f.path, std::string(f.fallback), f.fallback);
            continue;
        }
        ConfigParser::assign(*this, f.path, YAML::Load(f.fallback));
    }
}

void SweepConfig::store(const std::string& path, Value v, std::string text)
{
    values_[path] = std::move(v);
    texts_[path] = std::move(text);
}

namespace {

void walk(SweepConfig& cfg, const YAML::Node& root)
{
    if (root.IsNull()) return;
    if (!root.IsMap()) throw ConfigInvalid("", "top level must be a mapping of blocks");
    for (const auto& kv : root) {
        const std::string key = kv.first.as<std::string>();
        if (key == "mode") {
            cfg.set("mode", kv.second.IsScalar() ? kv.second.Scalar() : "");
            continue;
        }
        if (!block_exists(key)) throw ConfigInvalid(key, "unknown block");
        if (!kv.second.IsMap()) throw ConfigInvalid(key, "expected a mapping");
        for (const auto& inner : kv.second) {
            const std::string path = key + "." + inner.first.as<std::string>();
            if (!find_field(path)) throw ConfigInvalid(path, "unknown key");
            YAML::Emitter out;
            out << YAML::Flow << inner.second;
            cfg.set(path, out.c_str());
        }
    }
}

}  // namespace

SweepConfig SweepConfig::from_yaml(const std::string& text)
{
    SweepConfig cfg;
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigInvalid("", std::string("YAML syntax: ") + e.what());
    }
    walk(cfg, root);
    return cfg;
}

SweepConfig SweepConfig::from_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("", "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_yaml(ss.str());
}

SweepConfig SweepConfig::from_header(const std::string& csv_text)
{
    SweepConfig cfg;
    std::istringstream in(csv_text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("#", 0) != 0) break;
        const auto eq = line.find(" = ");
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(2, eq - 2);
        if (!find_field(key)) continue;  // program metadata and column descriptions
        cfg.set(key, line.substr(eq + 3));
    }
    return cfg;
}

void SweepConfig::set(const std::string& path, const std::string& value_text)
{
    const Field* f = find_field(path);
    if (!f) throw ConfigInvalid(path, "unknown key");
    if (f->kind == Kind::text) {
        // paths are taken verbatim ("-" would otherwise read as a YAML list)
        store(path, value_text, value_text);
        return;
    }
    YAML::Node node;
    try {
        node = YAML::Load(value_text);
    } catch (const YAML::Exception& e) {
        throw ConfigInvalid(path, std::string("cannot parse value: ") + e.what());
    }
    ConfigParser::assign(*this, path, node);
}

const SweepConfig::Value& SweepConfig::get(const std::string& path) const
{
    const auto it = values_.find(path);
    if (it == values_.end()) throw ConfigInvalid(path, "unknown key");
    return it->second;
}

bool SweepConfig::has_mode() const { return !std::get<std::string>(get("mode")).empty(); }

Mode SweepConfig::mode() const
{
    if (!has_mode()) throw ConfigInvalid("mode", "no mode given");
    return mode_from_string(std::get<std::string>(get("mode")));
}

double SweepConfig::number(const std::string& path) const
{
    const Value& v = get(path);
    if (const auto* d = std::get_if<double>(&v)) return *d;
    if (std::holds_alternative<Range>(v)) throw ConfigInvalid(path, "a single value is required here, not a range");
    throw ConfigInvalid(path, "a number is required here");
}

std::optional<double> SweepConfig::number_or_auto(const std::string& path) const
{
    const Value& v = get(path);
    if (const auto* s = std::get_if<std::string>(&v); s && *s == "auto") return std::nullopt;
    return number(path);
}

long SweepConfig::integer(const std::string& path) const { return std::get<long>(get(path)); }

const std::string& SweepConfig::text(const std::string& path) const { return std::get<std::string>(get(path)); }

BlochVectord SweepConfig::vector3(const std::string& path) const
{
    const auto& v = std::get<std::vector<double>>(get(path));
    return {v[0], v[1], v[2]};
}

std::vector<long> SweepConfig::integers(const std::string& path) const
{
    return std::get<std::vector<long>>(get(path));
}

bool SweepConfig::is_ranged(const std::string& path) const { return std::holds_alternative<Range>(get(path)); }

const Range& SweepConfig::range(const std::string& path) const
{
    const auto* r = std::get_if<Range>(&get(path));
    if (!r) throw ConfigInvalid(path, "a range is required here");
    return *r;
}

std::vector<std::string> SweepConfig::ranged_paths() const
{
    std::vector<std::string> out;
    for (const auto& f : schema())
        if (is_ranged(f.path)) out.push_back(f.path);
    return out;
}

std::vector<double> SweepConfig::axis(const std::string& path) const
{
    if (is_ranged(path)) return range(path).grid();
    return {number(path)};
}

static unsigned threads_checked(long t)
{
    if (t < 0) throw ConfigInvalid("execution.threads", "must be >= 0");
    return static_cast<unsigned>(t);
}

unsigned SweepConfig::threads() const { return threads_checked(integer("execution.threads")); }

std::vector<std::pair<std::string, std::string>> SweepConfig::echo() const
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& f : schema())
        if (f.echoed) out.emplace_back(f.path, texts_.at(f.path));
    return out;
}

bool SweepConfig::operator==(const SweepConfig& other) const { return values_ == other.values_; }

bool is_sweepable(const std::string& path)
{
    const Field* f = find_field(path);
    return f && f->sweepable;
}

namespace {

void check_range(const std::string& path, const Range& r)
{
    if (!r.values.empty()) {
        if (!std::is_sorted(r.values.begin(), r.values.end()) ||
            std::adjacent_find(r.values.begin(), r.values.end()) != r.values.end())
            throw ConfigInvalid(path, "range values must be strictly increasing");
        return;
    }
    if (r.count < 2) throw ConfigInvalid(path + ".count", "a range needs count >= 2");
    if (!(r.min < r.max)) throw ConfigInvalid(path, "a range needs min < max");
    if (r.log && !(r.min > 0.0)) throw ConfigInvalid(path + ".min", "log scale needs min > 0");
}

void positive(const SweepConfig& c, const std::string& path)
{
    if (!(c.number(path) > 0.0)) throw ConfigInvalid(path, "must be > 0");
}

}  // namespace

void SweepConfig::validate() const
{
    const Mode m = mode();
    const auto ranged = ranged_paths();
    for (const auto& p : ranged) check_range(p, range(p));
    if (ranged.size() > 2) throw ConfigInvalid(ranged[2], "at most two parameters may be ranged");

    for (const char* p : {"run.t_end", "run.dt_sample"})
        if (const auto v = number_or_auto(p); v && !(*v > 0.0)) throw ConfigInvalid(p, "must be > 0");
    if (const auto f = number_or_auto("run.transient_fraction"); f && !(*f >= 0.0 && *f < 1.0))
        throw ConfigInvalid("run.transient_fraction", "must lie in [0, 1)");
    positive(*this, "run.rtol");
    positive(*this, "run.atol");
    if (!(number("run.fixed_step") >= 0.0)) throw ConfigInvalid("run.fixed_step", "must be >= 0");
    if (!(number("run.sync_threshold") >= 0.0)) throw ConfigInvalid("run.sync_threshold", "must be >= 0");
    for (const char* p : {"initial.a", "initial.b"})
        if (vector3(p).squaredNorm() > 1.0) throw ConfigInvalid(p, "initial state must lie inside the unit ball");
    if (integer("flowfield.grid") < 2) throw ConfigInvalid("flowfield.grid", "must be >= 2");
    if (const double r = number("flowfield.radius"); !(r > 0.0 && r <= 1.0))
        throw ConfigInvalid("flowfield.radius", "must lie in (0, 1]");
    const auto sites = integers("oracle.sites");
    if (sites.empty()) throw ConfigInvalid("oracle.sites", "needs at least one entry");
    for (long n : sites)
        if (n < 1 || n > 8) throw ConfigInvalid("oracle.sites", "site counts must lie in [1, 8]");
    threads();

    const auto in_block = [](const std::string& p, const char* block) { return p.rfind(block, 0) == 0; };
    const auto fail_ranged = [&](const std::string& p, const std::string& why) { throw ConfigInvalid(p, why); };
    switch (m) {
    case Mode::simulate:
    case Mode::flowfield:
    case Mode::two_group:
    case Mode::oracle:
        if (!ranged.empty()) fail_ranged(ranged[0], std::string("mode ") + to_string(m) + " takes no ranges");
        break;
    case Mode::stability:
    case Mode::phase_diagram:
    case Mode::freq_shift:
        for (const auto& p : ranged)
            if (!in_block(p, "ensemble.")) fail_ranged(p, std::string("mode ") + to_string(m) + " sweeps ensemble.* only");
        if (m != Mode::stability && ranged.empty())
            throw ConfigInvalid("ensemble", std::string("mode ") + to_string(m) + " needs one or two ranged parameters");
        break;
    case Mode::arnold:
        if (ranged != std::vector<std::string>{"two_group.delta", "two_group.coupling_ab"})
            throw ConfigInvalid("two_group", "arnold needs exactly two_group.delta and two_group.coupling_ab ranged");
        break;
    case Mode::phase_tuning:
        if (!is_ranged("two_group.delta")) throw ConfigInvalid("two_group.delta", "phase_tuning needs a delta range");
        for (const auto& p : ranged)
            if (p != "two_group.delta" && p != "two_group.theta_a")
                fail_ranged(p, "phase_tuning sweeps two_group.delta and two_group.theta_a only");
        break;
    }
}

}  // namespace qsync::sweep
