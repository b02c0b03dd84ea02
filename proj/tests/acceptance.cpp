// Acceptance checks. One line per criterion; exit status is the number of failures.

#include "oracles.hpp"

#include "qsync/flows.hpp"
#include "qsync/integrate.hpp"
#include "qsync/oracle.hpp"
#include "qsync/parallel.hpp"
#include "qsync/spectral.hpp"
#include "qsync/stability.hpp"
#include "qsync/sweep/config.hpp"
#include "qsync/sweep/run.hpp"
#include "qsync/two_group.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

using namespace qsync;
using std::numbers::pi;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double limit_s, const std::function<Verdict()>& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < limit_s;
    const bool pass = v.pass && in_time;
    if (!pass) ++failures;
    fmt::print("{} #{:<2} {}: {} [{:.2f} s, limit {:g} s{}]\n", pass ? "PASS" : "FAIL", id, name, v.detail, secs,
               limit_s, in_time ? "" : ", TOO SLOW");
    std::fflush(stdout);
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Relative ratio gamma_plus / gamma_minus = 5 in gain units.
constexpr double kGainPlus = 5.0 / 6.0;

TwoGroupParams tongue_params(double vab_over_gain)
{
    TwoGroupParams p;
    p.gamma_plus = kGainPlus;
    p.gamma_minus = 1.0 - kGainPlus;
    p.V_A = p.V_B = 6.0 * kGainPlus;
    p.V_AB = vab_over_gain * kGainPlus;
    p.theta_A = p.theta_B = p.theta_AB = pi / 2;
    return p;
}

std::vector<double> linspace(double lo, double hi, int n)
{
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    return v;
}

Verdict fixed_point_reproduction()
{
    const auto p = EnsembleParams::from_ratios(0.0, 0.2, 0.0);
    const auto traj =
        integrate([&p](const BlochVectord& m) { return rhs_bare(m, p); }, default_initial_state(), 60.0, 1.0);
    const double err = (traj.final_state() - BlochVectord(0, 0, -2.0 / 3.0)).norm();
    return {err < 1e-6, fmt::format("|m(60) - (0,0,-2/3)| = {:.2e} (tol 1e-6)", err)};
}

Verdict boundary_agreement()
{
    const int n = 40;
    const auto couplings = linspace(0.0, 3.0, n);
    std::vector<double> ratios(n);
    for (int j = 0; j < n; ++j) ratios[static_cast<std::size_t>(j)] = std::pow(10.0, -1.0 + 3.0 * j / (n - 1));

    std::vector<int> simulated(n * n), predicted(n * n);
    RunControls run;
    run.t_end = 2000.0;
    run.dt_sample = 0.25;
    parallel_for(static_cast<std::size_t>(n * n), 1, [&](std::size_t k) {
        const auto p = EnsembleParams::from_ratios(couplings[k / n], ratios[k % n], pi / 2);
        const auto traj = integrate([&p](const BlochVectord& m) { return rhs_meanfield(m, p); },
                                    default_initial_state(), run.t_end, run.dt_sample);
        simulated[k] = order_parameter(traj, 0.5) > kSyncThreshold;
        predicted[k] = !unsynchronized_by_inequality(p);
    });
    int disagree = 0, off_boundary = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int k = i * n + j;
            if (simulated[k] == predicted[k]) continue;
            ++disagree;
            bool adjacent = false;
            for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
                const int a = i + di, b = j + dj;
                if (a >= 0 && a < n && b >= 0 && b < n && predicted[a * n + b] != predicted[k]) adjacent = true;
            }
            off_boundary += !adjacent;
        }
    return {off_boundary == 0,
            fmt::format("{} of 1600 cells disagree, {} of them away from the boundary layer", disagree, off_boundary)};
}

Verdict limit_cycle()
{
    const auto p = EnsembleParams::from_ratios(1.0, 5.0, pi / 2);
    const auto traj = integrate([&p](const BlochVectord& m) { return rhs_meanfield(m, p); },
                                default_initial_state(), 600.0, 0.1);
    double dz = 0.0, dr = 0.0;
    for (Eigen::Index k = traj.size() / 2; k < traj.size(); ++k) {
        dz = std::max(dz, std::abs(traj.a(2, k) - 0.5));
        dr = std::max(dr, std::abs(2.0 * std::abs(sigma_plus(traj.a.col(k))) - 0.40825));
    }
    return {dz < 1e-4 && dr < 1e-3,
            fmt::format("max |m_z - 0.5| = {:.2e} (tol 1e-4), max |2|s+| - 0.40825| = {:.2e} (tol 1e-3)", dz, dr)};
}

Verdict frequency_law()
{
    const double V = 5.0;
    int synced = 0, bad = 0;
    double worst = 0.0, res = 0.0;
    for (int k = 0; k < 20; ++k) {
        const double theta = pi * (k + 0.5) / 20.0;
        const auto p = EnsembleParams::from_ratios(V, 5.0, theta, 1.0);
        const double t_end = 800.0;
        const auto traj = integrate([&p](const BlochVectord& m) { return rhs_meanfield(m, p); },
                                    default_initial_state(), t_end, 0.05);
        const double cut = default_transient_fraction(p, t_end);
        if (!(order_parameter(traj, cut) > kSyncThreshold)) continue;
        ++synced;
        const auto s = spectrum(traj, cut);
        res = s.resolution;
        const double w = dominant_frequency(s);
        const double expected = 1.0 - std::cos(theta) / std::sin(theta) / 2.0;
        const double dw = 1.0 - w;
        worst = std::max(worst, std::abs(w - expected) / s.resolution);
        if (std::abs(w - expected) > s.resolution || std::abs(dw) > V) ++bad;
    }
    return {bad == 0 && synced > 0,
            fmt::format("{} of 20 points synchronized; worst |omega - predicted| = {:.2f} resolutions "
                        "(resolution {:.4f}); {} failures",
                        synced, worst, res, bad)};
}

Verdict decomposition()
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
        BlochVectord x;
        do x = BlochVectord(2 * u(rng) - 1, 2 * u(rng) - 1, 2 * u(rng) - 1);
        while (x.norm() > 1.0);
        const double v = 5.0 * u(rng);
        const double th = pi * (2.0 * u(rng) - 1.0);
        const BlochVectord f0 = rhs_interaction(x, v, 0.0);
        const BlochVectord f1 = rhs_interaction(x, v, pi / 2);
        const BlochVectord diff = rhs_interaction(x, v, th) - (std::cos(th) * f0 + std::sin(th) * f1);
        const double scale =
            (std::abs(std::cos(th)) * f0.cwiseAbs() + std::abs(std::sin(th)) * f1.cwiseAbs()).maxCoeff();
        if (scale > 0.0)
            worst = std::max(worst, diff.cwiseAbs().maxCoeff() / (scale * std::numeric_limits<double>::epsilon()));
    }
    return {worst <= 8.0, fmt::format("worst {:.2f} ulp of the vector magnitude over 10^4 draws (tol 8)", worst)};
}

Verdict jacobian_eigenvalues_check()
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        EnsembleParams p;
        p.omega0 = 4.0 * u(rng) - 2.0;
        p.V = 5.0 * u(rng);
        p.theta = pi * (2.0 * u(rng) - 1.0);
        p.gamma_plus = 2.0 * u(rng) + 1e-3;
        p.gamma_minus = 2.0 * u(rng) + 1e-3;
        const oracle::Rates r{p.omega0, p.V, p.theta, p.gamma_plus, p.gamma_minus};
        const BlochVectord ms = fixed_point(p);
        const Eigen::Matrix3d fd =
            oracle::fd_jacobian([&r](const oracle::Vec3& m) { return oracle::meanfield(m, r); }, {ms(0), ms(1), ms(2)});
        const Eigen::Vector3cd ref = Eigen::EigenSolver<Eigen::Matrix3d>(fd).eigenvalues();
        std::vector<bool> used(3, false);
        for (const auto& g : jacobian_eigenvalues(p)) {
            int best = -1;
            for (int i = 0; i < 3; ++i)
                if (!used[i] && (best < 0 || std::abs(ref(i) - g) < std::abs(ref(best) - g))) best = i;
            used[best] = true;
            worst = std::max(worst, std::abs(ref(best) - g));
        }
    }
    return {worst < 1e-5, fmt::format("worst eigenvalue mismatch {:.2e} over 10^3 draws (tol 1e-5)", worst)};
}

Verdict arnold_tongue_check()
{
    RunControls run;  // t_end 2000, dt 0.25, second half analysed
    const auto fine = linspace(-0.4, 0.4, 81);
    std::vector<double> deltas;
    for (double d : fine) deltas.push_back(d * kGainPlus);
    const auto map = arnold_tongue(tongue_params(1.0), deltas, {kGainPlus}, run, 1);
    const auto w = full_window(map.column(0));
    if (!w) return {false, "no full-sync window at V_AB = V/6"};
    const double lo = w->lo / kGainPlus, hi = w->hi / kGainPlus;
    const bool edge_ok = std::abs(hi - 0.2) <= 0.05 && std::abs(-lo - 0.2) <= 0.05;

    const auto vabs = linspace(0.25, 2.0, 8);
    std::vector<double> coarse;
    for (double d : linspace(-0.6, 0.6, 61)) coarse.push_back(d * kGainPlus);
    std::vector<double> vab_phys;
    for (double v : vabs) vab_phys.push_back(v * kGainPlus);
    const auto widths_map = arnold_tongue(tongue_params(1.0), coarse, vab_phys, run, 1);
    std::vector<double> widths;
    bool monotone = true;
    for (std::size_t j = 0; j < vabs.size(); ++j) {
        const auto wj = full_window(widths_map.column(j));
        widths.push_back(wj ? wj->width() / kGainPlus : 0.0);
        if (j > 0 && widths[j] < widths[j - 1]) monotone = false;
    }
    return {edge_ok && monotone,
            fmt::format("window [{:.2f}, {:.2f}] gamma_+ (edge 0.2 +- 0.05); widths over V_AB/gamma_+ = 0.25..2: {:.2f}{}",
                        lo, hi, fmt::join(widths, ", "), monotone ? " (non-decreasing)" : " (NOT monotone)")};
}

Verdict phase_tuned()
{
    auto p = tongue_params(2.0);  // V / V_AB = 3
    p.delta = kGainPlus;
    RunControls run;
    const auto before = classify(p, run).verdict;
    p.theta_A = -pi / 2;
    const auto after = classify(p, run).verdict;
    return {before == SyncVerdict::partial && after == SyncVerdict::full,
            fmt::format("theta_A = pi/2: {}, theta_A = -pi/2: {}", to_string(before), to_string(after))};
}

Verdict oracle_validity()
{
    const auto p = EnsembleParams::from_ratios(1.0, 5.0, pi / 2);
    const double t_end = 5.0, dt = 0.05;
    IntegratorControls tight;
    tight.atol = tight.rtol = 1e-10;
    const auto mf = integrate([&p](const BlochVectord& m) { return rhs_meanfield(m, p); }, default_initial_state(),
                              t_end, dt, tight);
    OracleOptions options;
    options.integrator = tight;
    options.integrator.check_norm = false;

    double trace = 0.0, herm = 0.0, min_eig = std::numeric_limits<double>::infinity(), n1 = 0.0;
    std::vector<double> deviation;
    for (int n : {1, 2, 4, 6}) {
        const auto exact = evolve_exact(product_state(default_initial_state(), n), p, n, t_end, dt, options);
        for (const auto& s : exact.samples) {
            trace = std::max(trace, s.trace_error);
            herm = std::max(herm, s.hermiticity_error);
            min_eig = std::min(min_eig, s.min_eigenvalue);
        }
        deviation.push_back(meanfield_deviation(exact, mf));
        if (n == 1) {
            const auto q = finite_size_params(p, 1);
            const auto ref = integrate([&q](const BlochVectord& m) { return rhs_meanfield(m, q); },
                                       default_initial_state(), t_end, dt, tight);
            n1 = meanfield_deviation(exact, ref);
        }
    }
    const bool monotone = std::is_sorted(deviation.rbegin(), deviation.rend()) &&
                          std::adjacent_find(deviation.begin(), deviation.end()) == deviation.end();
    const bool ok = trace < 1e-9 && herm < 1e-10 && min_eig > -1e-8 && n1 < 1e-7 && monotone;
    return {ok, fmt::format("trace {:.1e}, hermiticity {:.1e}, min eigenvalue {:.1e}; N=1 vs finite-N mean field "
                            "{:.1e} (tol 1e-7); deviation N=1,2,4,6: {:.4f}{}",
                            trace, herm, min_eig, n1, fmt::join(deviation, ", "),
                            monotone ? " (decreasing)" : " (NOT decreasing)")};
}

Verdict determinism()
{
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "qsync_acceptance";
    fs::create_directories(dir);
    const std::vector<std::string> configs{
        R"(
mode: phase_diagram
ensemble:
  coupling: {min: 0, max: 3, count: 6}
  gain_ratio: {min: 0.1, max: 100, count: 5, scale: log}
run: {t_end: 300, fixed_step: 0.05}
)",
        R"(
mode: arnold
two_group:
  delta: {min: -0.3, max: 0.3, count: 5}
  coupling_ab: {values: [0.5, 1, 2]}
run: {t_end: 400, fixed_step: 0.05}
)",
        R"(
mode: oracle
oracle: {sites: [1, 3]}
run: {fixed_step: 0.01}
)"};
    int identical = 0, total = 0;
    for (std::size_t c = 0; c < configs.size(); ++c) {
        std::string first;
        for (unsigned threads : {1u, 2u, 4u}) {
            auto cfg = sweep::SweepConfig::from_yaml(configs[c]);
            const fs::path out = dir / fmt::format("run{}_{}.csv", c, threads);
            fs::remove(out);
            cfg.set("output.csv", out.string());
            cfg.set("execution.threads", std::to_string(threads));
            sweep::run_config(cfg);
            const std::string text = slurp(out);
            if (threads == 1) first = text;
            else {
                ++total;
                identical += text == first && !text.empty();
            }
        }
    }
    return {identical == total, fmt::format("{} of {} reruns with 2 or 4 threads byte-identical to 1 thread "
                                            "(phase_diagram, arnold, oracle)",
                                            identical, total)};
}

}  // namespace

int main()
{
    criterion(1, "fixed-point reproduction", 1, fixed_point_reproduction);
    criterion(2, "boundary agreement on the 40x40 grid", 300, boundary_agreement);
    criterion(3, "limit-cycle height and radius", 10, limit_cycle);
    criterion(4, "synchronization frequency law", 120, frequency_law);
    criterion(5, "decomposition identity", 1, decomposition);
    criterion(6, "Jacobian eigenvalues", 10, jacobian_eigenvalues_check);
    criterion(7, "Arnold tongue", 900, arnold_tongue_check);
    criterion(8, "phase-tuned full synchronization", 120, phase_tuned);
    criterion(9, "exact oracle validity", 300, oracle_validity);
    criterion(10, "determinism across thread counts", 600, determinism);
    fmt::print("{} of 10 criteria passed\n", 10 - failures);
    return failures == 0 ? 0 : 1;
}
