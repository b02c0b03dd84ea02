#include "oracles.hpp"

#include "qsync/flows.hpp"
#include "qsync/integrate.hpp"
#include "qsync/spectral.hpp"
#include "qsync/stability.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numbers>
#include <random>

using namespace qsync;
using std::numbers::pi;

namespace {

oracle::Rates rates(const EnsembleParams& p) { return {p.omega0, p.V, p.theta, p.gamma_plus, p.gamma_minus}; }

EnsembleParams random_params(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    EnsembleParams p;
    p.omega0 = 4.0 * u(rng) - 2.0;
    p.V = 5.0 * u(rng);
    p.theta = pi * (2.0 * u(rng) - 1.0);
    p.gamma_plus = 2.0 * u(rng) + 1e-3;
    p.gamma_minus = 2.0 * u(rng) + 1e-3;
    return p;
}

// Bisection on the closed-form growth rate, used as an independent check of
// the boundary formula.
double bisect_boundary(double theta, double ratio)
{
    double lo = 0.0, hi = 1e3;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (is_synchronized(EnsembleParams::from_ratios(mid, ratio, theta)) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("fixed points")
{
    EnsembleParams p;
    p.gamma_plus = p.gamma_minus = 0.3;
    CHECK(fixed_point(p) == BlochVectord(0, 0, 0));
    p.gamma_minus = 0.0;
    CHECK(fixed_point(p) == BlochVectord(0, 0, 1));
    CHECK(fixed_point(EnsembleParams::from_ratios(0.0, 5.0, 0.0))(2) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("fixed point agrees with long-time bare integration")
{
    const auto p = EnsembleParams::from_ratios(0.0, 5.0, 0.0);
    const auto traj =
        integrate([&p](const BlochVectord& m) { return rhs_bare(m, p); }, default_initial_state(), 40.0, 1.0);
    CHECK((traj.final_state() - fixed_point(p)).norm() < 1e-8);
}

TEST_CASE("Jacobian matches central differences of the oracle flow")
{
    std::mt19937_64 rng(31);
    for (int k = 0; k < 1000; ++k) {
        const auto p = random_params(rng);
        const auto r = rates(p);
        const BlochVectord ms = fixed_point(p);
        const Eigen::Matrix3d fd =
            oracle::fd_jacobian([&r](const oracle::Vec3& m) { return oracle::meanfield(m, r); }, {ms(0), ms(1), ms(2)});
        CHECK((jacobian_at_fixed_point(p) - fd).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("closed-form eigenvalues match a general eigensolver")
{
    std::mt19937_64 rng(37);
    for (int k = 0; k < 200; ++k) {
        const auto p = random_params(rng);
        Eigen::EigenSolver<Eigen::Matrix3d> es(jacobian_at_fixed_point(p));
        auto got = jacobian_eigenvalues(p);
        std::vector<std::complex<double>> want(es.eigenvalues().data(), es.eigenvalues().data() + 3);
        for (const auto& g : got) {
            const auto it = std::min_element(want.begin(), want.end(), [&](auto a, auto b) {
                return std::abs(a - g) < std::abs(b - g);
            });
            CHECK(std::abs(*it - g) < 1e-10);
        }
    }
}

TEST_CASE("eigenvalues without interaction")
{
    EnsembleParams p;
    p.omega0 = 1.3;
    p.gamma_plus = 0.4;
    p.gamma_minus = 0.8;
    const auto ev = jacobian_eigenvalues(p);
    CHECK(ev[0].real() == doctest::Approx(-1.2));
    CHECK(ev[1].real() == doctest::Approx(-0.6));
    CHECK(std::abs(ev[1].imag()) == doctest::Approx(1.3));
    CHECK(ev[2] == std::conj(ev[1]));
}

TEST_CASE("growth rate above the boundary")
{
    const auto p = EnsembleParams::from_ratios(1.0, 5.0, pi / 2);
    CHECK(jacobian_eigenvalues(p)[1].real() == doctest::Approx(1.0 / 6.0));
    CHECK(is_synchronized(p));
}

TEST_CASE("synchronization boundary")
{
    CHECK(*synchronization_boundary(pi / 2, 5.0) == doctest::Approx(0.75));
    CHECK(*synchronization_boundary(pi / 2, 5.0) == doctest::Approx(bisect_boundary(pi / 2, 5.0)).epsilon(1e-9));
    CHECK(*synchronization_boundary(pi / 3, 20.0) == doctest::Approx(bisect_boundary(pi / 3, 20.0)).epsilon(1e-9));
    CHECK(*synchronization_boundary(-pi / 2, 0.1) == doctest::Approx(bisect_boundary(-pi / 2, 0.1)).epsilon(1e-9));
    CHECK_FALSE(synchronization_boundary(-pi / 2, 5.0).has_value());
    CHECK_FALSE(synchronization_boundary(pi / 2, 1.0).has_value());
    CHECK_THROWS_AS(synchronization_boundary(0.0, 5.0), DegeneratePhase);
    CHECK_THROWS_AS(synchronization_boundary(pi, 5.0), DegeneratePhase);
}

TEST_CASE("closed-form inequality agrees with the eigenvalues on a grid")
{
    for (double theta : {pi / 2, -pi / 2}) {
        int checked = 0;
        for (int i = 0; i < 50; ++i)
            for (int j = 0; j < 50; ++j) {
                const double v = 3.0 * i / 49.0;
                const double ratio = std::pow(10.0, -1.0 + 3.0 * j / 49.0);
                const auto p = EnsembleParams::from_ratios(v, ratio, theta);
                if (std::abs(max_growth_rate(p)) < 1e-12) continue;
                CHECK(is_synchronized(p) == !unsynchronized_by_inequality(p));
                ++checked;
            }
        CHECK(checked > 2400);
    }
}

TEST_CASE("verdict flips across the boundary")
{
    for (double ratio : {1.5, 5.0, 50.0}) {
        const double vc = *synchronization_boundary(pi / 2, ratio);
        CHECK_FALSE(stability_report(EnsembleParams::from_ratios(vc * (1 - 1e-3), ratio, pi / 2)).synchronized);
        CHECK(stability_report(EnsembleParams::from_ratios(vc * (1 + 1e-3), ratio, pi / 2)).synchronized);
    }
}

TEST_CASE("mirror symmetry theta -> -theta, ratio -> 1/ratio")
{
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
        const double v = 4.0 * u(rng);
        const double ratio = std::pow(10.0, 4.0 * u(rng) - 2.0);
        const double theta = pi * (2.0 * u(rng) - 1.0);
        CHECK(is_synchronized(EnsembleParams::from_ratios(v, ratio, theta)) ==
              is_synchronized(EnsembleParams::from_ratios(v, 1.0 / ratio, -theta)));
    }
}

TEST_CASE("analytic limit cycle")
{
    const auto cycle = analytic_limit_cycle(EnsembleParams::from_ratios(1.0, 5.0, pi / 2));
    REQUIRE(cycle);
    CHECK(cycle->C_z == doctest::Approx(0.5));
    CHECK(cycle->r == doctest::Approx(std::sqrt(2 * 0.5 * (2.0 / 3.0 - 0.5))));
    CHECK(cycle->r == doctest::Approx(0.40825).epsilon(1e-5));
    CHECK(cycle->delta_omega == doctest::Approx(0.0).scale(1));
    CHECK(cycle->omega_sync == doctest::Approx(1.0));

    EnsembleParams p;
    p.omega0 = 1.0;
    p.V = 4.0;
    p.theta = pi / 4;
    p.gamma_plus = 1.8;
    p.gamma_minus = 0.2;
    const auto c2 = analytic_limit_cycle(p);
    REQUIRE(c2);
    CHECK(c2->delta_omega == doctest::Approx(1.0));
    CHECK(std::abs(c2->delta_omega) <= p.V);

    CHECK_FALSE(analytic_limit_cycle(EnsembleParams::from_ratios(0.5, 5.0, pi / 2)));
    CHECK_THROWS_AS(analytic_limit_cycle(EnsembleParams::from_ratios(1.0, 5.0, 0.0)), DegeneratePhase);
}

TEST_CASE("cycle presence agrees with the eigenvalue verdict")
{
    std::mt19937_64 rng(43);
    for (int k = 0; k < 10000; ++k) {
        const auto p = random_params(rng);
        if (std::abs(std::sin(p.theta)) < 1e-9) continue;
        const auto c = analytic_limit_cycle(p);
        CHECK(c.has_value() == is_synchronized(p));
        if (c) {
            CHECK(c->r > 0.0);
            CHECK(std::abs(c->C_z) < 1.0);
            CHECK(c->C_z * c->C_z + c->r * c->r <= 1.0 + kNormSlack);
        }
    }
}

TEST_CASE("analytic cycle is an orbit of the oracle flow")
{
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> u(0.0, 2 * pi);
    int found = 0;
    while (found < 1000) {
        const auto p = random_params(rng);
        if (std::abs(std::sin(p.theta)) < 1e-3) continue;
        const auto c = analytic_limit_cycle(p);
        if (!c) continue;
        ++found;
        const double phi = u(rng);
        const oracle::Vec3 m{c->r * std::cos(phi), c->r * std::sin(phi), c->C_z};
        const auto f = oracle::meanfield(m, rates(p));
        const double speed = std::hypot(f[0], f[1]);
        const double scale = p.V + p.total_rate() + std::abs(p.omega0);
        CHECK(std::abs(f[2]) <= 1e-10 * scale);
        // pure rotation at omega_sync: f_perp = omega_sync * (-m_y, m_x)
        CHECK(std::abs(f[0] + c->omega_sync * m[1]) <= 1e-10 * scale * c->r);
        CHECK(std::abs(f[1] - c->omega_sync * m[0]) <= 1e-10 * scale * c->r);
        CHECK(std::abs(speed - std::abs(c->omega_sync) * c->r) <= 1e-10 * scale * c->r);
    }
}

TEST_CASE("long-time integration lands on the analytic cycle")
{
    const auto p = EnsembleParams::from_ratios(1.0, 5.0, pi / 2);
    const auto traj = integrate([&p](const BlochVectord& m) { return rhs_meanfield(m, p); }, default_initial_state(),
                                400.0, 0.1);
    const auto c = analytic_limit_cycle(p);
    const Eigen::Index start = transient_cut(traj.size(), 0.5);
    const Eigen::Matrix3Xd tail = traj.a.rightCols(traj.size() - start);
    CHECK((tail.row(2).array() - c->C_z).abs().maxCoeff() < 1e-4);
    CHECK((tail.topRows(2).colwise().norm().array() - c->r).abs().maxCoeff() < 1e-3);
}

TEST_CASE("stability report")
{
    const auto sync = stability_report(EnsembleParams::from_ratios(1.0, 5.0, pi / 2));
    CHECK(sync.synchronized);
    CHECK(sync.limit_cycle);
    CHECK(sync.note.empty());

    const auto off = stability_report(EnsembleParams::from_ratios(0.0, 5.0, pi / 2));
    CHECK_FALSE(off.synchronized);
    CHECK_FALSE(off.limit_cycle);
    CHECK(off.fixed_point(2) == doctest::Approx(2.0 / 3.0));

    const auto degenerate = stability_report(EnsembleParams::from_ratios(2.0, 5.0, 0.0));
    CHECK_FALSE(degenerate.synchronized);
    CHECK_FALSE(degenerate.limit_cycle);
    CHECK_FALSE(degenerate.note.empty());
}
