#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fdlab/exact.hpp"
#include "fdlab/solver.hpp"

using namespace fdlab;

TEST_CASE("vss residual vanishes to second order (d=4, m=0.25)") {
    FdeParams p{0.25, 4, EquationForm::WithInverseM};
    auto sol = vss(p, 1.0);
    // supremum scale on the test annulus so the ratio is meaningful
    std::vector<double> times{0.1, 0.3, 0.5};
    auto coarse = RadialGrid::uniform(4, 1.0, 200);
    auto fine = RadialGrid::uniform(4, 1.0, 400);
    auto rc = pde_residual(sol.evaluate, p, coarse, times, 0.2, 1.0);
    auto rf = pde_residual(sol.evaluate, p, fine, times, 0.2, 1.0);
    CHECK(rc.max_residual > 0);
    const double ratio = rc.max_residual / rf.max_residual;
    CHECK(ratio > 3.2);
    CHECK(ratio < 4.8);
}

TEST_CASE("vss extinction and range errors") {
    FdeParams good{0.2, 5, EquationForm::WithInverseM};
    auto sol = vss(good, 2.0);
    CHECK(sol.evaluate(2.0, 0.5) == 0.0);
    CHECK(sol.evaluate(2.5, 0.5) == 0.0);
    CHECK(sol.evaluate(1.0, 0.5) > 0.0);

    FdeParams border{0.5, 3, EquationForm::WithInverseM};  // m = m_c exactly
    CHECK_THROWS_AS(vss(border, 1.0), std::invalid_argument);
}

TEST_CASE("vss decays like (T-t)^{1/(1-m)} at fixed radius") {
    FdeParams p{0.25, 4, EquationForm::WithInverseM};
    auto sol = vss(p, 1.0);
    const double a = 1.0 / (1.0 - p.m);
    const double u1 = sol.evaluate(0.2, 0.7);
    const double u2 = sol.evaluate(0.6, 0.7);
    CHECK(u2 / u1 == Catch::Approx(std::pow(0.8 / 0.4, -a)).epsilon(1e-12));
    // t^{-1/(1-m)} u is nonincreasing in t at fixed r
    double prev = std::numeric_limits<double>::infinity();
    for (double t : {0.1, 0.2, 0.4, 0.8}) {
        const double g = std::pow(t, -a) * sol.evaluate(t, 0.5);
        CHECK(g <= prev * (1 + 1e-12));
        prev = g;
    }
}

TEST_CASE("separable profile: shape, boundary, symmetry") {
    FdeParams p{0.5, 3, EquationForm::WithoutInverseM};
    auto prof = separable_profile(p, 1.0, 2048);
    CHECK(prof.shooting_residual < 1e-10);
    // strictly decreasing in r on (0, R0)
    double prev = prof.S(0.0);
    for (double r : {0.1, 0.25, 0.4, 0.55, 0.7, 0.85, 0.97}) {
        const double s = prof.S(r);
        CHECK(s < prev);
        prev = s;
    }
    CHECK(prof.S(1.0) == Catch::Approx(0.0).margin(1e-8));
    // (S^m)'(0) = 0 by symmetry
    CHECK(std::abs(prof.dG.front()) < 1e-12);
    // qualitative boundary behavior: G = S^m roughly linear in R0 - r
    const double g1 = prof.eval_G(0.98);
    const double g2 = prof.eval_G(0.99);
    CHECK(g1 / g2 == Catch::Approx(2.0).epsilon(0.15));
}

TEST_CASE("separable profile scaling between balls") {
    FdeParams p{0.5, 3, EquationForm::WithoutInverseM};
    auto p1 = separable_profile(p, 1.0, 2048);
    const double lambda = 1.7;
    auto pl = separable_profile(p, lambda, 2048);
    const double mu = std::pow(lambda, -2.0 / (1.0 - p.m));
    for (double r : {0.2, 0.6, 1.1, 1.5}) {
        const double expect = mu * p1.S(r / lambda);
        CHECK(pl.S(r) == Catch::Approx(expect).epsilon(1e-4));
    }
}

TEST_CASE("separable solution has second-order pde residual (d=3, m=0.5)") {
    FdeParams p{0.5, 3, EquationForm::WithoutInverseM};
    auto prof = separable_profile(p, 1.0, 8192);
    auto sol = prof.build_solution(1.0);
    std::vector<double> times{0.2, 0.5};
    auto coarse = RadialGrid::uniform(3, 1.0, 200);
    auto fine = RadialGrid::uniform(3, 1.0, 400);
    auto rc = pde_residual(sol.evaluate, p, coarse, times, 0.02, 0.9);
    auto rf = pde_residual(sol.evaluate, p, fine, times, 0.02, 0.9);
    const double ratio = rc.max_residual / rf.max_residual;
    CHECK(ratio > 3.2);
    CHECK(ratio < 4.8);
}

TEST_CASE("rescale_to_unit maps and inverts exactly") {
    FdeParams p{0.25, 4, EquationForm::WithoutInverseM};
    auto id = rescale_to_unit(1.0, 1.0, p);
    CHECK(id.tau == Catch::Approx(1.0));
    CHECK(id.to_unit_time(0.37) == Catch::Approx(0.37));

    // m = m_c: tau independent of R
    FdeParams pc{0.5, 4, EquationForm::WithoutInverseM};
    auto s1 = rescale_to_unit(2.0, 1.0, pc);
    auto s2 = rescale_to_unit(2.0, 5.0, pc);
    CHECK(s1.tau == Catch::Approx(s2.tau).epsilon(1e-14));
    CHECK(s1.tau == Catch::Approx(std::pow(2.0, 0.5)).epsilon(1e-14));

    // round trip on a sampled trajectory
    Trajectory traj;
    traj.params = p;
    traj.grid = RadialGrid::uniform(4, 2.0, 60);
    for (int j = 0; j < 4; ++j) {
        Snapshot s;
        s.t = 0.05 * j;
        s.values.resize(traj.grid.nodes());
        for (std::size_t i = 0; i < traj.grid.nodes(); ++i)
            s.values[i] = std::exp(-traj.grid.radii[i] - s.t);
        traj.snapshots.push_back(s);
    }
    traj.extinction = ExtinctionRecord{0.9, 1e-4};
    auto map = rescale_to_unit(3.1, 2.0, p);
    auto round = map.from_unit(map.to_unit(traj));
    for (std::size_t j = 0; j < traj.snapshots.size(); ++j) {
        CHECK(round.snapshots[j].t == Catch::Approx(traj.snapshots[j].t).margin(1e-14));
        for (std::size_t i = 0; i < traj.grid.nodes(); ++i)
            CHECK(round.snapshots[j].values[i] ==
                  Catch::Approx(traj.snapshots[j].values[i]).epsilon(1e-12));
    }
    CHECK(round.extinction->T_est == Catch::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("dirac family: identity at k=1 and extinction scaling") {
    FdeParams p{0.25, 4, EquationForm::WithoutInverseM};
    Trajectory base;
    base.params = p;
    base.grid = RadialGrid::uniform(4, 4.0, 80);
    for (int j = 0; j <= 10; ++j) {
        Snapshot s;
        s.t = 0.01 * j;
        s.values.resize(base.grid.nodes());
        for (std::size_t i = 0; i < base.grid.nodes(); ++i)
            s.values[i] = std::max(0.0, (1.0 - s.t / 0.1)) * std::exp(-base.grid.radii[i]);
        base.snapshots.push_back(s);
    }
    base.extinction = ExtinctionRecord{0.1, 1e-5};

    auto fam1 = dirac_family(base, 1.0);
    CHECK(fam1.evaluate(0.05, 0.5) == Catch::Approx(base.interpolate(0.05, 0.5)).epsilon(1e-12));
    CHECK(fam1.T == Catch::Approx(0.1));

    const double sigma = p.sigma();
    auto fam4 = dirac_family(base, 4.0);
    CHECK(fam4.T == Catch::Approx(0.1 * std::pow(4.0, sigma)).epsilon(1e-12));

    FdeParams bad{0.9, 3, EquationForm::WithoutInverseM};  // sigma < 0
    Trajectory b2 = base;
    b2.params = bad;
    CHECK_THROWS_AS(dirac_family(b2, 2.0), std::invalid_argument);
}
