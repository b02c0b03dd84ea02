#include "qsync/sweep/run.hpp"

#include "qsync/flows.hpp"
#include "qsync/integrate.hpp"
#include "qsync/oracle.hpp"
#include "qsync/parallel.hpp"
#include "qsync/spectral.hpp"
#include "qsync/stability.hpp"
#include "qsync/sweep/csv.hpp"
#include "qsync/sweep/svg.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <algorithm>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#ifndef QSYNC_VERSION
#define QSYNC_VERSION "0.0.0"
#endif

namespace qsync::sweep {

const char* version() { return QSYNC_VERSION; }

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
using Row = std::vector<std::string>;
using Point = std::vector<std::pair<std::string, double>>;

std::string num(double v) { return format_number(v); }
std::string flag(bool b) { return b ? "1" : "0"; }

bool is_two_group(Mode m) { return m == Mode::two_group || m == Mode::arnold || m == Mode::phase_tuning; }

std::string leaf(const std::string& path) { return path.substr(path.find('.') + 1); }

double lookup(const SweepConfig& cfg, const Point& point, const std::string& path)
{
    for (const auto& [k, v] : point)
        if (k == path) return v;
    return cfg.number(path);
}

double t_end_of(const SweepConfig& cfg)
{
    if (const auto v = cfg.number_or_auto("run.t_end")) return *v;
    const Mode m = cfg.mode();
    return m == Mode::oracle ? 5.0 : is_two_group(m) ? 2000.0 : 400.0;
}

double dt_of(const SweepConfig& cfg)
{
    if (const auto v = cfg.number_or_auto("run.dt_sample")) return *v;
    const Mode m = cfg.mode();
    return m == Mode::oracle ? 0.05 : is_two_group(m) ? 0.25 : 0.1;
}

IntegratorControls controls_of(const SweepConfig& cfg)
{
    IntegratorControls c;
    c.atol = cfg.number("run.atol");
    c.rtol = cfg.number("run.rtol");
    c.fixed_step = cfg.number("run.fixed_step");
    return c;
}

Window window_of(const SweepConfig& cfg) { return cfg.text("run.window") == "hann" ? Window::hann : Window::rectangular; }

double transient_of(const SweepConfig& cfg, const EnsembleParams& p, double t_end)
{
    if (const auto v = cfg.number_or_auto("run.transient_fraction")) return *v;
    return default_transient_fraction(p, t_end);
}

double unit_scale(const SweepConfig& cfg)
{
    if (cfg.text("two_group.units") == "total") return 1.0;
    const double ratio = cfg.number("two_group.gain_ratio");
    return std::isinf(ratio) ? 1.0 : ratio / (1.0 + ratio);
}

std::vector<std::pair<std::string, std::string>> header_of(const SweepConfig& cfg, const std::string& units)
{
    std::vector<std::pair<std::string, std::string>> h{
        {"qsync.version", version()},
        {"qsync.format", "CSV, 12 significant digits, nan marks undefined values"},
        {"qsync.units", units},
    };
    for (auto& kv : cfg.echo()) h.push_back(kv);
    return h;
}

const char* kUnitsTotal = "rates, frequencies and times in units of gamma_plus + gamma_minus (= 1)";

// Table read back from a finished CSV, used to draw the quick-look.
struct Table {
    std::vector<std::string> names;
    std::vector<Row> rows;

    std::size_t index(const std::string& name) const
    {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return i;
        throw std::logic_error("no column " + name);
    }
    std::vector<double> column(const std::string& name, const std::function<bool(const Row&)>& keep = {}) const
    {
        const std::size_t i = index(name);
        std::vector<double> out;
        for (const auto& r : rows)
            if (!keep || keep(r)) out.push_back(std::strtod(r[i].c_str(), nullptr));
        return out;
    }
};

Table read_table(const std::string& path)
{
    std::ifstream in(path);
    Table t;
    std::string line;
    bool have_names = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        Row fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (!have_names) {
            t.names = fields;
            have_names = true;
        } else {
            t.rows.push_back(fields);
        }
    }
    return t;
}

std::vector<double> unique_sorted(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

class Runner {
public:
    Runner(const SweepConfig& cfg, const RunOptions& opt) : cfg_(cfg), opt_(opt) {}

    void run()
    {
        svg_ = cfg_.text("output.svg");
        csv_ = cfg_.text("output.csv");
        if (!svg_.empty() && (csv_.empty() || csv_ == "-"))
            throw ConfigInvalid("output.svg", "the quick-look is drawn from the CSV file; set output.csv");
        switch (cfg_.mode()) {
        case Mode::simulate: simulate(); break;
        case Mode::flowfield: flowfield(); break;
        case Mode::stability: ensemble_grid(stability_columns(), [this](auto& p) { return stability_cell(p); }, "growth_rate"); break;
        case Mode::phase_diagram: ensemble_grid(phase_columns(), [this](auto& p) { return phase_cell(p); }, "order_parameter"); break;
        case Mode::freq_shift: ensemble_grid(shift_columns(), [this](auto& p) { return shift_cell(p); }, "delta_omega_over_V"); break;
        case Mode::two_group: two_group(); break;
        case Mode::arnold: arnold(); break;
        case Mode::phase_tuning: phase_tuning(); break;
        case Mode::oracle: oracle(); break;
        }
    }

private:
    void log(const std::string& line)
    {
        if (opt_.log) *opt_.log << line << '\n';
    }

    CsvSink sink(const std::vector<Column>& columns, const std::string& units, std::size_t group = 1)
    {
        return CsvSink(csv_, header_of(cfg_, units), columns, opt_.resume, group);
    }

    bool want_svg() const { return !svg_.empty(); }

    // ---- single ensemble -------------------------------------------------

    Trajectory integrate_meanfield(const EnsembleParams& p, double t_end, double dt)
    {
        return integrate([&p](const BlochVectord& m) { return rhs_meanfield(m, p); }, cfg_.vector3("initial.a"),
                         t_end, dt, controls_of(cfg_));
    }

    void simulate()
    {
        const auto p = ensemble_params(cfg_);
        const double t_end = t_end_of(cfg_), dt = dt_of(cfg_);
        const auto traj = integrate_meanfield(p, t_end, dt);
        std::vector<Column> cols{{"t", "time"},
                                 {"m_x", "Bloch vector component"},
                                 {"m_y", "Bloch vector component"},
                                 {"m_z", "Bloch vector component"},
                                 {"sigma_plus_re", "Re <sigma^+> = m_x / 2"},
                                 {"sigma_plus_im", "Im <sigma^+> = m_y / 2"},
                                 {"sigma_plus_abs", "|<sigma^+>|"}};
        auto out = sink(cols, kUnitsTotal);
        for (Eigen::Index k = static_cast<Eigen::Index>(out.rows_done()); k < traj.size(); ++k) {
            const BlochVectord m = traj.a.col(k);
            const auto sp = sigma_plus(m);
            out.write({num(traj.time(k)), num(m(0)), num(m(1)), num(m(2)), num(sp.real()), num(sp.imag()),
                       num(std::abs(sp))});
        }
        try {
            const double op = order_parameter(traj, transient_of(cfg_, p, t_end));
            log(fmt::format("order_parameter = {}", num(op)));
            log(fmt::format("synchronized (order parameter > threshold) = {}", op > cfg_.number("run.sync_threshold")));
        } catch (const WindowTooShort& e) {
            log(fmt::format("order_parameter not available: {}", e.what()));
        }
        if (std::abs(std::sin(p.theta)) > kDegenerateSin)
            if (const auto c = analytic_limit_cycle(p))
                log(fmt::format("analytic cycle: C_z = {}, r = {}, omega_sync = {}", num(c->C_z), num(c->r),
                                num(c->omega_sync)));
        if (want_svg()) {
            const Table t = read_table(csv_);
            write_lines_svg(svg_, {{"|<sigma^+>|", t.column("t"), t.column("sigma_plus_abs")}},
                            {"mean-field amplitude", "t (1/(g+ + g-))", "|<sigma^+>|"});
        }
    }

    void flowfield()
    {
        const auto p = ensemble_params(cfg_);
        const std::string which = cfg_.text("flowfield.flow");
        const std::function<BlochVectord(const BlochVectord&)> flow = [&p, which](const BlochVectord& m) -> BlochVectord {
            if (which == "bare") return rhs_bare(m, p);
            if (which == "interaction") return rhs_interaction(m, p.V, p.theta);
            if (which == "dissipation") return rhs_dissipation(m, p.gamma_plus, p.gamma_minus);
            if (which == "interaction_dissipation") return rhs_interaction_dissipation(m, p);
            return rhs_meanfield(m, p);
        };
        std::vector<Column> cols{{"kind", "field (grid point on the sphere) or trajectory"},
                                 {"t", "time along the trajectory; nan for field rows"},
                                 {"m_x", ""}, {"m_y", ""}, {"m_z", "Bloch vector"},
                                 {"dm_x", ""}, {"dm_y", ""}, {"dm_z", "time derivative under the chosen flow"}};
        auto out = sink(cols, kUnitsTotal);
        std::vector<Row> rows;
        const long g = cfg_.integer("flowfield.grid");
        const double radius = cfg_.number("flowfield.radius");
        for (long i = 0; i < g; ++i)
            for (long j = 0; j < 2 * g; ++j) {
                const double polar = std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(g);
                const double az = std::numbers::pi * static_cast<double>(j) / static_cast<double>(g);
                const BlochVectord m = radius * BlochVectord(std::sin(polar) * std::cos(az),
                                                             std::sin(polar) * std::sin(az), std::cos(polar));
                const BlochVectord d = flow(m);
                rows.push_back({"field", "nan", num(m(0)), num(m(1)), num(m(2)), num(d(0)), num(d(1)), num(d(2))});
            }
        const auto traj = integrate(flow, cfg_.vector3("initial.a"), t_end_of(cfg_), dt_of(cfg_), controls_of(cfg_));
        for (Eigen::Index k = 0; k < traj.size(); ++k) {
            const BlochVectord m = traj.a.col(k);
            const BlochVectord d = flow(m);
            rows.push_back({"trajectory", num(traj.time(k)), num(m(0)), num(m(1)), num(m(2)), num(d(0)), num(d(1)),
                            num(d(2))});
        }
        for (std::size_t r = out.rows_done(); r < rows.size(); ++r) out.write(rows[r]);
        if (want_svg()) {
            const Table t = read_table(csv_);
            const auto is_traj = [](const Row& r) { return r[0] == "trajectory"; };
            write_lines_svg(svg_, {{"trajectory", t.column("m_x", is_traj), t.column("m_y", is_traj)}},
                            {"flow " + which + ": trajectory projected on the x-y plane", "m_x", "m_y"});
        }
    }

    // One result row of an ensemble sweep cell (without the axis columns).
    using CellFn = std::function<Row(const EnsembleParams&)>;

    std::vector<Column> stability_columns() const
    {
        return {{"fixed_z", "m_z of the dissipative fixed point"},
                {"growth_rate", "largest real part of the Jacobian eigenvalues"},
                {"eigen_imag", "|Im| of the transverse eigenvalue pair"},
                {"synchronized", "1 when the fixed point is unstable"},
                {"critical_coupling", "V_c at this theta and gain ratio; nan when none"},
                {"C_z", "height of the analytic limit cycle; nan when absent"},
                {"r", "radius of the analytic limit cycle (2 |<sigma^+>|)"},
                {"omega_sync", "omega0 - cot(theta) (g+ + g-)/2"},
                {"delta_omega", "omega0 - omega_sync"}};
    }

    Row stability_cell(const EnsembleParams& p)
    {
        const auto rep = stability_report(p);
        const bool degenerate = !rep.note.empty();
        double vc = kNaN;
        double ws = kNaN, dw = kNaN;
        if (!degenerate) {
            const double ratio = p.gamma_minus == 0.0 ? std::numeric_limits<double>::infinity() : p.gamma_plus / p.gamma_minus;
            if (ratio > 0.0)
                if (const auto b = synchronization_boundary(p.theta, ratio)) vc = *b * p.total_rate();
            ws = synchronization_frequency(p);
            dw = p.omega0 - ws;
        }
        const auto& c = rep.limit_cycle;
        return {num(rep.fixed_point(2)),
                num(max_growth_rate(p)),
                num(std::abs(rep.eigenvalues[1].imag())),
                flag(rep.synchronized),
                num(vc),
                num(c ? c->C_z : kNaN),
                num(c ? c->r : kNaN),
                num(ws),
                num(dw),
                degenerate ? "degenerate_phase" : "ok"};
    }

    std::vector<Column> phase_columns() const
    {
        return {{"order_parameter", "time average of |<sigma^+>| after the transient"},
                {"synchronized", "1 when the order parameter exceeds run.sync_threshold"},
                {"predicted", "1 when the closed-form stability condition predicts synchronization"},
                {"critical_coupling", "V_c for this theta and gain ratio; nan when none"}};
    }

    Row phase_cell(const EnsembleParams& p)
    {
        const double t_end = t_end_of(cfg_);
        const auto traj = integrate_meanfield(p, t_end, dt_of(cfg_));
        const double op = order_parameter(traj, transient_of(cfg_, p, t_end));
        bool predicted = false;
        double vc = kNaN;
        if (std::abs(std::sin(p.theta)) > kDegenerateSin) {
            predicted = !unsynchronized_by_inequality(p);
            const double ratio = p.gamma_minus == 0.0 ? std::numeric_limits<double>::infinity() : p.gamma_plus / p.gamma_minus;
            if (ratio > 0.0)
                if (const auto b = synchronization_boundary(p.theta, ratio)) vc = *b * p.total_rate();
        }
        return {num(op), flag(op > cfg_.number("run.sync_threshold")), flag(predicted), num(vc), "ok"};
    }

    std::vector<Column> shift_columns() const
    {
        return {{"synchronized", "1 when the order parameter exceeds run.sync_threshold"},
                {"omega_measured", "dominant frequency of <sigma^+>(t); nan when unsynchronized"},
                {"delta_omega", "omega0 - omega_measured"},
                {"delta_omega_over_V", "delta_omega / V"},
                {"delta_omega_predicted", "cot(theta) (g+ + g-)/2"},
                {"resolution", "spectral grid spacing"}};
    }

    Row shift_cell(const EnsembleParams& p)
    {
        const double t_end = t_end_of(cfg_);
        const auto traj = integrate_meanfield(p, t_end, dt_of(cfg_));
        const double cut = transient_of(cfg_, p, t_end);
        const double op = order_parameter(traj, cut);
        const auto s = spectrum(traj, cut, window_of(cfg_));
        const double predicted =
            std::abs(std::sin(p.theta)) > kDegenerateSin ? p.omega0 - synchronization_frequency(p) : kNaN;
        if (!(op > cfg_.number("run.sync_threshold")))
            return {"0", "nan", "nan", "nan", num(predicted), num(s.resolution), "ok"};
        const double w = dominant_frequency(s);
        const double dw = p.omega0 - w;
        return {"1", num(w), num(dw), num(p.V > 0 ? dw / p.V : kNaN), num(predicted), num(s.resolution), "ok"};
    }

    void ensemble_grid(std::vector<Column> value_cols, const CellFn& cell, const std::string& plotted)
    {
        const auto ranged = cfg_.ranged_paths();
        const std::vector<double> outer = ranged.size() > 0 ? cfg_.axis(ranged[0]) : std::vector<double>{0.0};
        const std::vector<double> inner = ranged.size() > 1 ? cfg_.axis(ranged[1]) : std::vector<double>{0.0};

        std::vector<Column> cols;
        for (const auto& r : ranged) cols.push_back({leaf(r), "swept parameter " + r});
        for (auto& c : value_cols) cols.push_back(c);
        cols.push_back({"error", "ok, or the failure that left this cell's values nan"});
        const std::size_t n_values = value_cols.size();

        auto out = sink(cols, kUnitsTotal, inner.size());
        const std::size_t first_row = out.rows_done() / inner.size();
        for (std::size_t i = first_row; i < outer.size(); ++i) {
            std::vector<Row> row(inner.size());
            parallel_for(inner.size(), cfg_.threads(), [&](std::size_t j) {
                Point point;
                if (ranged.size() > 0) point.emplace_back(ranged[0], outer[i]);
                if (ranged.size() > 1) point.emplace_back(ranged[1], inner[j]);
                Row r;
                for (const auto& [k, v] : point) r.push_back(num(v));
                try {
                    const Row values = cell(ensemble_params(cfg_, point));
                    r.insert(r.end(), values.begin(), values.end());
                } catch (const std::exception& e) {
                    r.insert(r.end(), n_values, "nan");
                    r.push_back(error_code(e));
                }
                row[j] = std::move(r);
            });
            for (const auto& r : row) out.write(r);
        }

        if (!want_svg() || ranged.empty()) return;
        const Table t = read_table(csv_);
        if (ranged.size() == 1) {
            write_lines_svg(svg_, {{plotted, t.column(leaf(ranged[0])), t.column(plotted)}},
                            {plotted, leaf(ranged[0]), plotted});
            return;
        }
        Heatmap map;
        map.x = outer;
        map.y = inner;
        map.values = t.column(plotted);
        if (cfg_.mode() == Mode::phase_diagram && ranged[0] == "ensemble.coupling" &&
            ranged[1] == "ensemble.gain_ratio") {
            const double theta = cfg_.number("ensemble.theta");
            for (double ratio : inner) {
                if (std::abs(std::sin(theta)) <= kDegenerateSin) break;
                const auto vc = synchronization_boundary(theta, ratio);
                if (!vc || *vc > outer.back()) continue;
                map.overlay_x.push_back(*vc);
                map.overlay_y.push_back(ratio);
            }
        }
        write_heatmap_svg(svg_, map, {plotted, leaf(ranged[0]), leaf(ranged[1])});
    }

    // ---- two groups --------------------------------------------------------

    std::string two_group_units() const
    {
        return cfg_.text("two_group.units") == "gain"
                   ? "detunings, couplings and frequencies in units of gamma_plus; time in 1/(gamma_plus + gamma_minus)"
                   : kUnitsTotal;
    }

    void two_group()
    {
        const auto p = two_group_params(cfg_);
        const auto run = two_group_controls(cfg_);
        const auto result = simulate_two_group(p, run);
        const double scale = unit_scale(cfg_);
        const auto& c = result.classification;

        std::vector<Column> cols{{"kind", "series: x = t, a/b = Re<sigma^+>; spectrum: x = omega, a/b = P(omega)"},
                                 {"x", "time or angular frequency"},
                                 {"a", "group A"},
                                 {"b", "group B"}};
        auto out = sink(cols, two_group_units());
        std::vector<Row> rows;
        const auto& traj = result.trajectory;
        for (Eigen::Index k = 0; k < traj.size(); ++k)
            rows.push_back({"series", num(traj.time(k)), num(0.5 * traj.a(0, k)), num(0.5 * traj.b(0, k))});
        const auto sa = spectrum(traj, run.transient_fraction, run.window, 0);
        const auto sb = spectrum(traj, run.transient_fraction, run.window, 1);
        for (Eigen::Index k = 0; k < sa.omega.size(); ++k)
            rows.push_back({"spectrum", num(sa.omega(k) / scale), num(sa.magnitude(k)), num(sb.magnitude(k))});
        for (std::size_t r = out.rows_done(); r < rows.size(); ++r) out.write(rows[r]);

        const auto opt = [scale](const std::optional<double>& v) { return v ? num(*v / scale) : std::string("nan"); };
        log(fmt::format("verdict = {}", to_string(c.verdict)));
        log(fmt::format("omega_a = {}, omega_b = {}, delta_omega = {}, resolution = {}", opt(c.omega_a),
                        opt(c.omega_b), opt(c.delta_omega_ab), num(c.resolution / scale)));
        log(fmt::format("order_a = {}, order_b = {}", num(c.order_a), num(c.order_b)));
        if (want_svg()) {
            const Table t = read_table(csv_);
            const auto is_series = [](const Row& r) { return r[0] == "series"; };
            const auto x = t.column("x", is_series);
            write_lines_svg(svg_, {{"A", x, t.column("a", is_series)}, {"B", x, t.column("b", is_series)}},
                            {std::string("two groups: ") + to_string(c.verdict), "t", "Re <sigma^+>"});
        }
    }

    std::vector<Column> scan_columns(const std::string& second, const std::string& second_desc) const
    {
        return {{"delta", "detuning"}, {second, second_desc}, {"omega_a", "dominant frequency of group A"},
                {"omega_b", "dominant frequency of group B"},
                {"delta_omega", "omega_a - omega_b; 0 when fully synchronized"},
                {"verdict", "full, partial or none"}, {"resolution", "spectral grid spacing"},
                {"error", "ok, or the failure that left this cell empty"}};
    }

    Row scan_row(const ScanCell& cell, double delta_shown, double second_shown)
    {
        const double scale = unit_scale(cfg_);
        if (!cell.result)
            return {num(delta_shown), num(second_shown), "nan", "nan", "nan", "none", "nan", cell.error.empty() ? "error" : cell.error};
        const auto& c = *cell.result;
        const auto opt = [scale](const std::optional<double>& v) { return v ? num(*v / scale) : std::string("nan"); };
        return {num(delta_shown), num(second_shown), opt(c.omega_a), opt(c.omega_b), num(cell.difference() / scale),
                to_string(c.verdict), num(c.resolution / scale), "ok"};
    }

    void arnold()
    {
        const auto deltas = cfg_.axis("two_group.delta");
        const auto vabs = cfg_.axis("two_group.coupling_ab");
        const double scale = unit_scale(cfg_);
        std::vector<double> d_phys, v_phys;
        for (double d : deltas) d_phys.push_back(d * scale);
        for (double v : vabs) v_phys.push_back(v * scale);
        const auto base = two_group_params(cfg_, {{"two_group.delta", deltas.front()}, {"two_group.coupling_ab", vabs.front()}});
        const auto run = two_group_controls(cfg_);

        auto out = sink(scan_columns("coupling_ab", "inter-group coupling V_AB"), two_group_units(), vabs.size());
        for (std::size_t i = out.rows_done() / vabs.size(); i < deltas.size(); ++i) {
            const auto map = arnold_tongue(base, {d_phys[i]}, v_phys, run, cfg_.threads());
            for (std::size_t j = 0; j < vabs.size(); ++j) out.write(scan_row(map.at(0, j), deltas[i], vabs[j]));
        }
        if (want_svg()) {
            const Table t = read_table(csv_);
            write_heatmap_svg(svg_, {deltas, vabs, t.column("delta_omega"), {}, {}},
                              {"omega_A - omega_B", "delta", "V_AB"});
        }
    }

    void phase_tuning()
    {
        const auto deltas = cfg_.axis("two_group.delta");
        const auto thetas = cfg_.axis("two_group.theta_a");
        const double scale = unit_scale(cfg_);
        std::vector<double> d_phys;
        for (double d : deltas) d_phys.push_back(d * scale);
        const auto base = two_group_params(cfg_, {{"two_group.delta", deltas.front()}, {"two_group.theta_a", thetas.front()}});
        const auto run = two_group_controls(cfg_);

        std::vector<Column> cols = scan_columns("theta_a", "intra-group phase of group A (rad)");
        std::swap(cols[0], cols[1]);
        auto out = sink(cols, two_group_units(), deltas.size());
        for (std::size_t i = out.rows_done() / deltas.size(); i < thetas.size(); ++i) {
            const auto curves = phase_tuning_scan(base, {thetas[i]}, d_phys, run, cfg_.threads());
            const auto& curve = curves.front();
            for (std::size_t j = 0; j < deltas.size(); ++j) {
                Row r = scan_row(curve.cells[j], deltas[j], thetas[i]);
                std::swap(r[0], r[1]);
                out.write(r);
            }
            auto p = base;
            p.theta_A = thetas[i];
            std::string center = "nan";
            if (std::abs(std::sin(p.theta_A)) > kDegenerateSin && std::abs(std::sin(p.theta_B)) > kDegenerateSin)
                center = num(predicted_window_center(p) / scale);
            if (curve.window)
                log(fmt::format("theta_a = {}: full window [{}, {}], center {} (predicted {})", num(thetas[i]),
                                num(curve.window->lo / scale), num(curve.window->hi / scale),
                                num(curve.window->center() / scale), center));
            else
                log(fmt::format("theta_a = {}: no full window (predicted center {})", num(thetas[i]), center));
        }
        if (want_svg()) {
            const Table t = read_table(csv_);
            std::vector<Series> series;
            const auto ti = t.index("theta_a");
            for (double th : unique_sorted(t.column("theta_a"))) {
                const auto same = [&](const Row& r) { return std::strtod(r[ti].c_str(), nullptr) == th; };
                series.push_back({"theta_a = " + num(th), t.column("delta", same), t.column("delta_omega", same)});
            }
            write_lines_svg(svg_, series, {"omega_A - omega_B against detuning", "delta", "omega_A - omega_B"});
        }
    }

    // ---- exact oracle ------------------------------------------------------

    void oracle()
    {
        const auto p = ensemble_params(cfg_);
        const double t_end = t_end_of(cfg_), dt = dt_of(cfg_);
        const BlochVectord m0 = cfg_.vector3("initial.a");
        OracleOptions options;
        options.model = cfg_.text("oracle.model") == "pairwise" ? OracleModel::pairwise : OracleModel::collective;
        options.integrator = controls_of(cfg_);
        options.integrator.check_norm = false;

        const auto mf = integrate_meanfield(p, t_end, dt);
        std::vector<Column> cols{{"sites", "N"},
                                 {"t", "time"},
                                 {"sigma_plus_re", "site-averaged <sigma^+>, exact"},
                                 {"sigma_plus_im", ""},
                                 {"sigma_z", "site-averaged <sigma^z>, exact"},
                                 {"meanfield_re", "<sigma^+> of the N -> infinity mean field"},
                                 {"meanfield_im", ""},
                                 {"deviation", "|exact - mean field|"},
                                 {"finite_size_deviation", "|exact - finite-N mean field|"},
                                 {"trace_error", "|Tr rho - 1|"},
                                 {"hermiticity_error", "max |rho - rho^dag|"},
                                 {"min_eigenvalue", "smallest eigenvalue of rho"}};
        const auto sites = cfg_.integers("oracle.sites");
        const std::size_t per_n = static_cast<std::size_t>(mf.size());
        auto out = sink(cols, kUnitsTotal, per_n);
        for (std::size_t s = out.rows_done() / per_n; s < sites.size(); ++s) {
            const int n = static_cast<int>(sites[s]);
            const auto exact = evolve_exact(product_state(m0, n), p, n, t_end, dt, options);
            const auto q = finite_size_params(p, n);
            const auto fs = integrate([&q](const BlochVectord& m) { return rhs_meanfield(m, q); }, m0, t_end, dt,
                                      controls_of(cfg_));
            double worst = 0.0;
            for (std::size_t k = 0; k < exact.samples.size(); ++k) {
                const auto& e = exact.samples[k];
                const auto ex = e.mean_sigma_plus();
                const auto ref = sigma_plus(mf.a.col(static_cast<Eigen::Index>(k)));
                const auto fin = sigma_plus(fs.a.col(static_cast<Eigen::Index>(k)));
                worst = std::max(worst, std::abs(ex - ref));
                out.write({std::to_string(n), num(e.t), num(ex.real()), num(ex.imag()), num(e.sigma_z.mean()),
                           num(ref.real()), num(ref.imag()), num(std::abs(ex - ref)), num(std::abs(ex - fin)),
                           num(e.trace_error), num(e.hermiticity_error), num(e.min_eigenvalue)});
            }
            log(fmt::format("N = {}: sup deviation from the mean field = {}", n, num(worst)));
        }
        if (want_svg()) {
            const Table t = read_table(csv_);
            std::vector<Series> series;
            const auto si = t.index("sites");
            for (double n : unique_sorted(t.column("sites"))) {
                const auto same = [&](const Row& r) { return std::strtod(r[si].c_str(), nullptr) == n; };
                series.push_back({"N = " + num(n), t.column("t", same), t.column("deviation", same)});
            }
            write_lines_svg(svg_, series, {"exact vs mean field", "t", "|<sigma^+>_exact - <sigma^+>_mf|"});
        }
    }

    const SweepConfig& cfg_;
    RunOptions opt_;
    std::string csv_;
    std::string svg_;
};

}  // namespace

std::string error_code(const std::exception& e)
{
    if (dynamic_cast<const StepFailure*>(&e)) return "step_failure";
    if (dynamic_cast<const WindowTooShort*>(&e)) return "window_too_short";
    if (dynamic_cast<const NoDominantLine*>(&e)) return "no_dominant_line";
    if (dynamic_cast<const DegeneratePhase*>(&e)) return "degenerate_phase";
    if (dynamic_cast<const InvalidParameters*>(&e)) return "invalid_parameters";
    if (dynamic_cast<const PositivityBreach*>(&e)) return "positivity_breach";
    return "error";
}

EnsembleParams ensemble_params(const SweepConfig& cfg, const Point& point)
{
    return EnsembleParams::from_ratios(lookup(cfg, point, "ensemble.coupling"), lookup(cfg, point, "ensemble.gain_ratio"),
                                       lookup(cfg, point, "ensemble.theta"), lookup(cfg, point, "ensemble.omega0"));
}

TwoGroupParams two_group_params(const SweepConfig& cfg, const Point& point)
{
    const double ratio = lookup(cfg, point, "two_group.gain_ratio");
    const double gp = std::isinf(ratio) ? 1.0 : ratio / (1.0 + ratio);
    const double scale = cfg.text("two_group.units") == "gain" ? gp : 1.0;
    TwoGroupParams p;
    p.gamma_plus = gp;
    p.gamma_minus = 1.0 - gp;
    p.delta = lookup(cfg, point, "two_group.delta") * scale;
    p.V_A = lookup(cfg, point, "two_group.coupling_a") * scale;
    p.V_B = lookup(cfg, point, "two_group.coupling_b") * scale;
    p.V_AB = lookup(cfg, point, "two_group.coupling_ab") * scale;
    p.theta_A = lookup(cfg, point, "two_group.theta_a");
    p.theta_B = lookup(cfg, point, "two_group.theta_b");
    p.theta_AB = lookup(cfg, point, "two_group.theta_ab");
    p.inter_phase =
        cfg.text("two_group.inter_phase") == "conjugate" ? InterGroupPhase::conjugate : InterGroupPhase::symmetric;
    p.validate();
    return p;
}

RunControls two_group_controls(const SweepConfig& cfg)
{
    RunControls run;
    run.t_end = t_end_of(cfg);
    run.dt_sample = dt_of(cfg);
    run.transient_fraction = cfg.number_or_auto("run.transient_fraction").value_or(0.5);
    run.window = window_of(cfg);
    run.integrator = controls_of(cfg);
    run.sync_threshold = cfg.number("run.sync_threshold");
    run.initial << cfg.vector3("initial.a"), cfg.vector3("initial.b");
    return run;
}

void run_config(const SweepConfig& cfg, const RunOptions& options)
{
    cfg.validate();
    Runner(cfg, options).run();
}

}  // namespace qsync::sweep
