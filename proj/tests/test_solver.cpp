#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "fdlab/exact.hpp"
#include "fdlab/solver.hpp"

using namespace fdlab;

namespace {

double bump(double r, double R, double h) {
    const double s = r / R;
    return s < 1.0 ? h * std::pow(1.0 - s * s, 3) : 0.0;
}

SolverOptions quick_opts(int n) {
    SolverOptions o;
    o.n_cells = n;
    o.dt_init = 1e-7;
    o.dt_max = 1e-3;
    o.t_end = 10.0;
    return o;
}

}  // namespace

TEST_CASE("zero data with zero boundary stays identically zero") {
    FdeParams p{0.5, 3, EquationForm::WithoutInverseM};
    auto opts = quick_opts(64);
    auto traj = solve_radial_dirichlet(p, [](double) { return 0.0; }, 1.0, opts);
    for (const auto& s : traj.snapshots)
        for (double v : s.values) CHECK(v == 0.0);
    REQUIRE(traj.extinction.has_value());
    CHECK(traj.extinction->T_est == 0.0);
}

TEST_CASE("constant positive field has zero pde residual") {
    FdeParams p{0.5, 3, EquationForm::WithoutInverseM};
    auto g = RadialGrid::uniform(3, 1.0, 100);
    auto stats = pde_residual([](double, double) { return 2.5; }, p, g, {0.1, 0.2});
    CHECK(stats.max_residual < 1e-9);
}

TEST_CASE("separable-data run tracks the exact solution (d=3, m=0.5)") {
    FdeParams p{0.5, 3, EquationForm::WithoutInverseM};
    auto prof = separable_profile(p, 1.0, 4096);
    const double T1 = 1.0;
    auto exact = prof.build_solution(T1);

    auto opts = quick_opts(200);
    opts.dt_max = 5e-4;
    auto traj = solve_radial_dirichlet(
        p, [&](double r) { return exact.evaluate(0.0, r); }, 1.0, opts);

    REQUIRE(traj.extinction.has_value());
    CHECK(traj.extinction->T_est == Catch::Approx(T1).epsilon(0.04));
    CHECK(traj.extinction->fit_quality < 5e-3);  // < 1e-3 at the n = 400 acceptance resolution

    // pointwise agreement up to 0.9 T1
    double worst = 0;
    for (const auto& s : traj.snapshots) {
        if (s.t > 0.9 * T1) break;
        double sup_exact = 0;
        for (std::size_t i = 0; i < traj.grid.nodes(); ++i)
            sup_exact = std::max(sup_exact, exact.evaluate(s.t, traj.grid.radii[i]));
        for (std::size_t i = 0; i < traj.grid.nodes(); ++i) {
            const double ue = exact.evaluate(s.t, traj.grid.radii[i]);
            if (ue < 0.05 * sup_exact) continue;
            worst = std::max(worst, std::abs(s.values[i] - ue) / ue);
        }
    }
    CHECK(worst < 0.02);  // 2% at this coarse resolution; acceptance tightens at n=400

    // L^1 contraction at every stored step
    double prev_mass = std::numeric_limits<double>::infinity();
    for (const auto& s : traj.snapshots) {
        const double mass = lp_norm_ball(s, traj.grid, 1.0, traj.grid.R_dom());
        CHECK(mass <= prev_mass * (1 + 1e-8));
        prev_mass = mass;
    }

    // nonnegativity of stored values
    for (const auto& s : traj.snapshots)
        for (double v : s.values) CHECK(v >= 0.0);

    // Benilan-Crandall monotonicity
    auto bc = benilan_crandall_margin(traj);
    CHECK(bc.worst_decrease > -1e-6);
}

TEST_CASE("comparison principle: ordered data give ordered solutions") {
    FdeParams p{0.5, 3, EquationForm::WithoutInverseM};
    SolverOptions o = quick_opts(100);
    o.dt_max = 2e-4;
    o.t_end = 2e-2;
    o.snapshot_every_steps = 10;
    auto hi = solve_radial_dirichlet(p, [](double r) { return bump(r, 1.0, 1.0); }, 3.0, o);
    // replay the accepted step sequence so stored times coincide
    o.dt_schedule = hi.step_sizes;
    auto lo = solve_radial_dirichlet(p, [](double r) { return bump(r, 1.0, 0.6); }, 3.0, o);
    REQUIRE(lo.snapshots.size() == hi.snapshots.size());
    for (std::size_t j = 0; j < lo.snapshots.size(); ++j) {
        REQUIRE(lo.snapshots[j].t == Catch::Approx(hi.snapshots[j].t));
        for (std::size_t i = 0; i < lo.grid.nodes(); ++i) {
            const double scale = std::max({lo.snapshots[j].values[i], hi.snapshots[j].values[i], 1e-12});
            CHECK((hi.snapshots[j].values[i] - lo.snapshots[j].values[i]) / scale >= -1e-6);
        }
    }
}

TEST_CASE("radially nonincreasing data stay radially nonincreasing") {
    FdeParams p{0.25, 4, EquationForm::WithoutInverseM};
    auto o = quick_opts(120);
    o.t_end = 0.05;
    auto traj = solve_radial_dirichlet(p, [](double r) { return bump(r, 1.0, 1.0); }, 3.0, o);
    for (const auto& s : traj.snapshots) {
        for (std::size_t i = 0; i + 1 < s.values.size(); ++i) {
            const double scale = std::max({s.values[i], s.values[i + 1], 1e-12});
            CHECK((s.values[i] - s.values[i + 1]) / scale >= -1e-6);
        }
    }
}

TEST_CASE("benilan-crandall detects a corrupted trajectory") {
    FdeParams p{0.5, 3, EquationForm::WithoutInverseM};
    auto o = quick_opts(80);
    o.t_end = 0.02;
    auto traj = solve_radial_dirichlet(p, [](double r) { return bump(r, 1.0, 1.0); }, 3.0, o);
    REQUIRE(traj.snapshots.size() >= 3);
    // inflate a late snapshot
    auto corrupted = traj;
    for (double& v : corrupted.snapshots.back().values) v *= 4.0;
    auto bc = benilan_crandall_margin(corrupted);
    CHECK(bc.worst_decrease < 0.0);
}

TEST_CASE("vss sampled as trajectory satisfies the monotonicity exactly") {
    FdeParams p{0.25, 4, EquationForm::WithInverseM};
    auto sol = vss(p, 1.0);
    Trajectory traj;
    traj.params = p;
    traj.grid = RadialGrid::uniform(4, 1.0, 100);
    for (double t : {0.05, 0.1, 0.2, 0.4, 0.6, 0.8}) {
        Snapshot s;
        s.t = t;
        s.values.resize(traj.grid.nodes());
        for (std::size_t i = 0; i < traj.grid.nodes(); ++i) {
            const double r = std::max(traj.grid.radii[i], 0.5 * traj.grid.faces[1]);
            s.values[i] = sol.evaluate(t, r);
        }
        traj.snapshots.push_back(s);
    }
    auto bc = benilan_crandall_margin(traj);
    CHECK(bc.worst_decrease >= -1e-12);
}

TEST_CASE("positive-boundary run for m = -0.5 stays positive and bounded") {
    FdeParams p{-0.5, 3, EquationForm::WithInverseM};
    SolverOptions o = quick_opts(100);
    o.boundary = Boundary::positive(0.2);
    o.t_end = 0.01;
    auto traj = solve_radial_dirichlet(
        p, [](double r) { return 0.2 + bump(r, 1.0, 0.8); }, 3.0, o);
    for (const auto& s : traj.snapshots) {
        for (double v : s.values) {
            CHECK(v >= 0.0);
            CHECK(std::isfinite(v));
        }
    }
    CHECK(traj.snapshots.back().t == Catch::Approx(0.01));
    // zero-Dirichlet for m <= 0 must be rejected
    SolverOptions bad = quick_opts(64);
    CHECK_THROWS_AS(
        solve_radial_dirichlet(p, [](double r) { return bump(r, 1.0, 1.0); }, 3.0, bad),
        std::invalid_argument);
}

TEST_CASE("mass balance: ball mass change equals boundary flux to tolerance") {
    // discrete conservation: total mass is nonincreasing and the per-step
    // defect is at Newton tolerance
    FdeParams p{0.5, 3, EquationForm::WithoutInverseM};
    auto o = quick_opts(100);
    o.t_end = 0.05;
    auto traj = solve_radial_dirichlet(p, [](double r) { return bump(r, 1.0, 1.0); }, 3.0, o);
    for (std::size_t j = 0; j + 1 < traj.snapshots.size(); ++j) {
        const double m0 = lp_norm_ball(traj.snapshots[j], traj.grid, 1.0, 3.0);
        const double m1 = lp_norm_ball(traj.snapshots[j + 1], traj.grid, 1.0, 3.0);
        CHECK(m1 <= m0 * (1 + 1e-8));
    }
}

TEST_CASE("trajectory csv export round-trips header and metadata") {
    FdeParams p{0.5, 3, EquationForm::WithoutInverseM};
    auto o = quick_opts(32);
    o.t_end = 1e-3;
    auto traj = solve_radial_dirichlet(p, [](double r) { return bump(r, 1.0, 1.0); }, 2.0, o);
    const auto dir = std::filesystem::temp_directory_path() / "fdlab_test_export";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "traj.csv").string();
    export_trajectory_csv(traj, path);
    std::ifstream is(path);
    std::string header;
    std::getline(is, header);
    CHECK(header == "t,r,u");
    std::ifstream meta(path + ".meta");
    std::string line;
    bool saw_m = false, saw_boundary = false;
    while (std::getline(meta, line)) {
        if (line.rfind("m=", 0) == 0) saw_m = true;
        if (line.rfind("boundary=zero", 0) == 0) saw_boundary = true;
    }
    CHECK(saw_m);
    CHECK(saw_boundary);
}
