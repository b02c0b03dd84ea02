#include "qsync/flows.hpp"
#include "qsync/integrate.hpp"
#include "qsync/spectral.hpp"
#include "qsync/stability.hpp"

#include <doctest.h>

#include <numbers>

using namespace qsync;
using std::numbers::pi;

namespace {

Eigen::VectorXcd tone(double omega, double dt, Eigen::Index n, double amplitude = 0.2)
{
    Eigen::VectorXcd s(n);
    for (Eigen::Index k = 0; k < n; ++k) s(k) = std::polar(amplitude, omega * dt * static_cast<double>(k));
    return s;
}

Trajectory run(const EnsembleParams& p, double t_end, double dt)
{
    return integrate([&p](const BlochVectord& m) { return rhs_meanfield(m, p); }, default_initial_state(), t_end, dt);
}

}  // namespace

TEST_CASE("pure tone on a bin")
{
    const double dt = 0.1;
    const Eigen::Index n = 1024;
    const double res = 2 * pi / (n * dt);
    const auto s = spectrum(tone(37 * res, dt, n), dt);
    CHECK(s.resolution == doctest::Approx(res));
    CHECK(dominant_frequency(s) == doctest::Approx(37 * res));
    const auto neg = spectrum(tone(-12 * res, dt, n), dt);
    CHECK(dominant_frequency(neg) == doctest::Approx(-12 * res));
}

TEST_CASE("spectrum grid")
{
    const auto s = spectrum(tone(1.0, 0.05, 700), 0.05);
    CHECK(s.omega.size() == 1024);
    CHECK(s.omega(0) == doctest::Approx(-pi / 0.05));
    for (Eigen::Index i = 1; i < s.omega.size(); ++i) CHECK(s.omega(i) - s.omega(i - 1) == doctest::Approx(s.resolution));
    CHECK(s.magnitude.minCoeff() >= 0.0);
    CHECK(s.omega(512) == 0.0);
}

TEST_CASE("Parseval")
{
    for (auto w : {Window::rectangular, Window::hann}) {
        Eigen::VectorXcd x = tone(0.8, 0.1, 900) + 0.3 * tone(-2.1, 0.1, 900, 0.5);
        for (Eigen::Index k = 0; k < x.size(); ++k) x(k) += 0.01 * std::sin(0.37 * k * k);
        const auto s = spectrum(x, 0.1, w);
        double energy = 0.0;
        for (Eigen::Index k = 0; k < x.size(); ++k) {
            const double win = w == Window::hann ? 0.5 * (1 - std::cos(2 * pi * k / (x.size() - 1.0))) : 1.0;
            energy += std::norm(win * x(k));
        }
        CHECK(std::abs(s.magnitude.squaredNorm() - energy) <= 1e-8 * energy);
    }
}

TEST_CASE("off-bin frequency recovery with a perturbation")
{
    const double dt = 0.1;
    const Eigen::Index n = 2048;
    const double res = 2 * pi / (n * dt);
    // log-parabola refinement is exact for Gaussian lobes; Hann is close
    // enough, the rectangular sinc lobe is not (about 0.17 bin worst case)
    for (auto [w, bound] : {std::pair{Window::hann, 0.1}, std::pair{Window::rectangular, 0.2}}) {
        CAPTURE(static_cast<int>(w));
        double worst = 0.0;
        for (int k = 0; k < 200; ++k) {
            const double omega = (-80.0 + 0.8 * k + 0.137) * res;
            Eigen::VectorXcd x = tone(omega, dt, n, 1.0);
            for (Eigen::Index j = 0; j < n; ++j) x(j) += 0.01 * std::polar(1.0, 1.7 * static_cast<double>((j * j) % 101));
            worst = std::max(worst, std::abs(dominant_frequency(spectrum(x, dt, w)) - omega) / res);
        }
        CHECK(worst < bound);
    }
}

TEST_CASE("no dominant line in a flat spectrum")
{
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(512);
    x(0) = 1.0;
    CHECK_THROWS_AS(dominant_frequency(spectrum(x, 0.1)), NoDominantLine);
    CHECK_THROWS_AS(dominant_frequency(spectrum(Eigen::VectorXcd::Zero(512), 0.1)), NoDominantLine);
}

TEST_CASE("short windows are rejected")
{
    CHECK_THROWS_AS(spectrum(tone(1.0, 0.1, 100), 0.1), WindowTooShort);
    Trajectory t(0.1, 10, false);
    t.a.setZero();
    CHECK_THROWS_AS(order_parameter(t, 0.5), WindowTooShort);
    CHECK_THROWS_AS(transient_cut(100, 1.0), WindowTooShort);
}

TEST_CASE("order parameter")
{
    Trajectory still(0.1, 100, false);
    still.a.colwise() = BlochVectord(0, 0, 2.0 / 3.0);
    CHECK(order_parameter(still, 0.5) == 0.0);

    const auto sync = EnsembleParams::from_ratios(1.0, 5.0, pi / 2);
    const double r = analytic_limit_cycle(sync)->r;
    CHECK(std::abs(order_parameter(run(sync, 400.0, 0.1), 0.5) - r / 2) < 1e-3);

    const auto weak = EnsembleParams::from_ratios(0.375, 5.0, pi / 2);
    CHECK(order_parameter(run(weak, 400.0, 0.1), 0.5) < 1e-4);
}

TEST_CASE("order parameter through the critical coupling")
{
    // r^2 = m_z^s / V - 1 / (2 V^2) rises from zero at V_c and peaks at 2 V_c
    const double vc = *synchronization_boundary(pi / 2, 5.0);
    double last = 0.0;
    for (double f : {0.5, 0.8, 0.95, 1.05, 1.2, 1.5, 1.8, 2.0, 2.5, 3.0}) {
        const auto p = EnsembleParams::from_ratios(f * vc, 5.0, pi / 2);
        const double op = order_parameter(run(p, 800.0, 0.1), 0.5);
        CAPTURE(f);
        if (f < 1.0) {
            CHECK(op < 1e-4);
            continue;
        }
        CHECK(std::abs(op - analytic_limit_cycle(p)->r / 2) < 1e-3);
        if (f <= 2.0) CHECK(op > last);
        else CHECK(op < last);
        last = op;
    }
}

TEST_CASE("synchronization frequency shows up in the spectrum")
{
    auto p = EnsembleParams::from_ratios(5.0, 5.0, pi / 4);
    const double t_end = 400.0;
    const auto traj = run(p, t_end, 0.1);
    const auto s = spectrum(traj, default_transient_fraction(p, t_end));
    CHECK(std::abs(dominant_frequency(s) - synchronization_frequency(p)) < s.resolution);
    CHECK(synchronization_frequency(p) == doctest::Approx(0.5));
}

TEST_CASE("default transient")
{
    EnsembleParams p;
    CHECK(default_transient_fraction(p, 1000.0) == doctest::Approx(0.5));
    CHECK(default_transient_fraction(p, 150.0) == doctest::Approx(40 * pi / 150.0));
    CHECK_THROWS_AS(default_transient_fraction(p, 100.0), WindowTooShort);
}
