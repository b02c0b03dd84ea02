// qsync: command-line front end for the sweep modes.
//
//   qsync phase-diagram sweep.yaml --out pd.csv --svg pd.svg --threads 4
//   qsync simulate --set ensemble.coupling=2 --set ensemble.theta=pi/4
//   qsync check sweep.yaml
//
// Exit codes: 0 success, 1 usage error, 2 invalid configuration, 3 run failure.

#include "qsync/sweep/config.hpp"
#include "qsync/sweep/run.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <string>
#include <vector>

namespace {

struct Args {
    std::string config;
    std::vector<std::string> sets;
    std::string out;
    std::string svg;
    unsigned threads = 0;
    bool resume = false;
    bool check = false;
};

qsync::sweep::SweepConfig load(const Args& a, const std::string& mode)
{
    using qsync::sweep::ConfigInvalid;
    auto cfg = a.config.empty() ? qsync::sweep::SweepConfig{} : qsync::sweep::SweepConfig::from_file(a.config);
    if (!mode.empty()) {
        if (cfg.has_mode() && cfg.mode() != qsync::sweep::mode_from_string(mode))
            throw ConfigInvalid("mode", "config file says '" + std::string(to_string(cfg.mode())) +
                                            "' but the subcommand is '" + mode + "'");
        cfg.set("mode", mode);
    }
    for (const auto& s : a.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigInvalid(s, "--set expects key=value");
        cfg.set(s.substr(0, eq), s.substr(eq + 1));
    }
    if (!a.out.empty()) cfg.set("output.csv", a.out);
    if (!a.svg.empty()) cfg.set("output.svg", a.svg);
    if (a.threads > 0) cfg.set("execution.threads", std::to_string(a.threads));
    return cfg;
}

void add_common(CLI::App* cmd, Args& a, bool with_config_optional)
{
    auto* opt = cmd->add_option("config", a.config, "YAML configuration file");
    if (!with_config_optional) opt->required();
    cmd->add_option("--set", a.sets, "override one key, e.g. --set ensemble.theta=pi/4")->take_all();
    cmd->add_option("-o,--out", a.out, "CSV output path ('-' for stdout)");
    cmd->add_option("--svg", a.svg, "quick-look SVG path");
    cmd->add_option("-j,--threads", a.threads, "worker threads for sweeps");
    cmd->add_flag("--resume", a.resume, "continue an interrupted sweep in an existing CSV");
    cmd->add_flag("--check", a.check, "validate the configuration and print it, without running");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Mean-field synchronization of spin ensembles: sweeps and checks"};
    app.set_version_flag("--version", qsync::sweep::version());
    app.require_subcommand(1);

    Args args;
    const std::vector<std::pair<std::string, std::string>> modes{
        {"simulate", "integrate one ensemble and write the trajectory"},
        {"flowfield", "vector field on a sphere plus one trajectory"},
        {"stability", "fixed-point stability and analytic cycle over a grid"},
        {"phase-diagram", "simulated order parameter over a grid"},
        {"freq-shift", "measured synchronization frequency shift over a grid"},
        {"two-group", "two coupled groups: time series, spectra and verdict"},
        {"arnold", "two-group frequency difference over (delta, V_AB)"},
        {"phase-tuning", "two-group frequency difference over delta for several theta_A"},
        {"oracle", "exact N-site master equation against the mean field"},
    };
    std::vector<std::pair<CLI::App*, std::string>> commands;
    for (const auto& [name, help] : modes) {
        auto* cmd = app.add_subcommand(name, help);
        add_common(cmd, args, true);
        commands.emplace_back(cmd, name);
    }
    auto* check = app.add_subcommand("check", "validate a configuration file and print its echo");
    add_common(check, args, false);

    CLI11_PARSE(app, argc, argv);

    try {
        std::string mode;
        for (const auto& [cmd, name] : commands)
            if (cmd->parsed()) mode = name;
        const auto cfg = load(args, mode);
        cfg.validate();
        if (check->parsed() || args.check) {
            for (const auto& [k, v] : cfg.echo()) std::cout << k << " = " << v << '\n';
            return 0;
        }
        qsync::sweep::RunOptions options;
        options.resume = args.resume;
        options.log = &std::cerr;
        qsync::sweep::run_config(cfg, options);
        return 0;
    } catch (const qsync::sweep::ConfigInvalid& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
