#pragma once

// Implicit finite-volume solver for the radial fast diffusion equation with
// Dirichlet boundary data, plus the trajectory diagnostics built on it:
// manufactured-solution residuals, the Benilan-Crandall monotonicity margin
// and the extinction-time extrapolation.
//
// Discretization: cell-centered finite volume in r. The face flux between
// nodes i and i+1 is
//     Q = -A(face) * H(D_i, D_{i+1}) * (u_{i+1} - u_i) / (r_{i+1} - r_i)
// with D(u) = flux_factor * max(u, floor)^{m-1} and H the harmonic mean, the
// conservative form of Laplacian(u^m)/m (resp. Laplacian(u^m)). Time stepping
// is implicit Euler with a damped Newton iteration on the tridiagonal system;
// the step size adapts to the Newton iteration count.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdlab/core.hpp"

namespace fdlab {

struct SolverOptions {
    int n_cells = 200;
    double dt_init = 1e-7;
    double dt_min = 1e-14;
    double dt_max = 1e-3;
    double t_end = 1e9;              // horizon; extinction usually ends the run first
    double newton_tol = 1e-11;       // relative residual / update tolerance
    int newton_max_iters = 30;
    double value_floor = 1e-12;      // positivity floor as a fraction of sup u0
    double extinction_threshold = 1e-4;  // stop when sup u falls below this fraction
    int snapshot_every_steps = 1;    // store every k-th accepted step
    double snapshot_every_time = 0;  // additionally store when this much time elapsed (0 = off)
    Boundary boundary = Boundary::zero();
    std::vector<double> dt_schedule;  // nonempty: replay this exact step sequence
                                      // (paired comparison runs share stored times)

    void validate() const {
        if (n_cells < 8) throw std::invalid_argument("SolverOptions: n_cells >= 8 required");
        if (!(dt_min > 0 && dt_min <= dt_init && dt_init <= dt_max))
            throw std::invalid_argument("SolverOptions: need 0 < dt_min <= dt_init <= dt_max");
        if (!(value_floor > 0)) throw std::invalid_argument("SolverOptions: value_floor > 0");
        if (!(extinction_threshold > value_floor))
            throw std::invalid_argument("SolverOptions: extinction_threshold must exceed floor");
        if (snapshot_every_steps < 1)
            throw std::invalid_argument("SolverOptions: snapshot cadence >= 1");
    }
};

struct ResidualStats {
    double max_residual = 0.0;
    double l2_residual = 0.0;
    double h = 0.0;                // grid spacing the stats belong to
    std::vector<double> times;     // times sampled
    std::size_t nodes_used = 0;
};

namespace detail {

inline void thomas_solve(std::vector<double>& lower, std::vector<double>& diag,
                         std::vector<double>& upper, std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

// Everything the implicit step needs that is fixed over a run.
struct StepWorkspace {
    int d = 3;
    double m = 0.5;
    double flux_factor = 1.0;
    double floor_abs = 0.0;  // absolute positivity floor inside flux coefficients
    std::vector<double> area_over_dr;  // A(face_{i+1}) / (r_{i+1} - r_i), per pair (i, i+1)
    std::vector<double> vol;           // cell volumes (unknown cells only, 0..N-1)

    double diffusivity(double u) const {
        return flux_factor * std::pow(std::max(u, floor_abs), m - 1.0);
    }
    double diffusivity_deriv(double u) const {
        if (u <= floor_abs) return 0.0;
        return flux_factor * (m - 1.0) * std::pow(u, m - 2.0);
    }
};

// Residual of the implicit Euler step; u has N+1 entries with u[N] the
// boundary value, F has N entries.
inline void step_residual(const StepWorkspace& ws, const std::vector<double>& uprev,
                          const std::vector<double>& u, double dt, std::vector<double>& F) {
    const std::size_t N = ws.vol.size();
    std::vector<double> D(N + 1);
    for (std::size_t i = 0; i <= N; ++i) D[i] = ws.diffusivity(u[i]);
    std::vector<double> c(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double hmean = 2.0 * D[i] * D[i + 1] / (D[i] + D[i + 1]);
        c[i] = ws.area_over_dr[i] * hmean;
    }
    for (std::size_t i = 0; i < N; ++i) {
        double net = c[i] * (u[i + 1] - u[i]);
        if (i > 0) net += c[i - 1] * (u[i - 1] - u[i]);
        F[i] = ws.vol[i] * (u[i] - uprev[i]) - dt * net;
    }
}

inline double inf_norm(const std::vector<double>& v) {
    double n = 0;
    for (double x : v) n = std::max(n, std::abs(x));
    return n;
}

// One implicit Euler step by damped Newton. Returns the iteration count on
// success, -1 if the iteration failed to converge.
inline int implicit_step(const StepWorkspace& ws, const std::vector<double>& uprev,
                         std::vector<double>& u, double dt, double newton_tol, int max_iters) {
    const std::size_t N = ws.vol.size();
    double uref = ws.floor_abs;
    for (double v : uprev) uref = std::max(uref, v);
    double vol_max = 0;
    for (double v : ws.vol) vol_max = std::max(vol_max, v);
    const double f_tol = newton_tol * vol_max * uref;

    u = uprev;
    std::vector<double> F(N), Ftrial(N), lower(N), diag(N), upper(N), rhs(N), utrial(N + 1);
    utrial[N] = u[N];
    step_residual(ws, uprev, u, dt, F);
    double fnorm = inf_norm(F);

    std::vector<double> D(N + 1), Dp(N + 1);
    for (int it = 1; it <= max_iters; ++it) {
        if (fnorm <= f_tol) return it - 1;

        for (std::size_t i = 0; i <= N; ++i) {
            D[i] = ws.diffusivity(u[i]);
            Dp[i] = ws.diffusivity_deriv(u[i]);
        }
        // assemble tridiagonal Jacobian
        for (std::size_t i = 0; i < N; ++i) {
            double dii = ws.vol[i];
            double dlo = 0.0, dup = 0.0;
            // pair (i, i+1)
            {
                const double sum = D[i] + D[i + 1];
                const double h = 2.0 * D[i] * D[i + 1] / sum;
                const double c = ws.area_over_dr[i] * h;
                const double dc_di = ws.area_over_dr[i] * 2.0 * D[i + 1] * D[i + 1] / (sum * sum) * Dp[i];
                const double dc_dn = ws.area_over_dr[i] * 2.0 * D[i] * D[i] / (sum * sum) * Dp[i + 1];
                const double gap = u[i + 1] - u[i];
                dii -= dt * (dc_di * gap - c);
                if (i + 1 < N) dup = -dt * (dc_dn * gap + c);
            }
            // pair (i-1, i)
            if (i > 0) {
                const double sum = D[i - 1] + D[i];
                const double h = 2.0 * D[i - 1] * D[i] / sum;
                const double c = ws.area_over_dr[i - 1] * h;
                const double dc_di = ws.area_over_dr[i - 1] * 2.0 * D[i - 1] * D[i - 1] / (sum * sum) * Dp[i];
                const double dc_dp = ws.area_over_dr[i - 1] * 2.0 * D[i] * D[i] / (sum * sum) * Dp[i - 1];
                const double gap = u[i - 1] - u[i];
                dii -= dt * (dc_di * gap - c);
                dlo = -dt * (dc_dp * gap + c);
            }
            lower[i] = dlo;
            diag[i] = dii;
            upper[i] = dup;
            rhs[i] = -F[i];
        }
        thomas_solve(lower, diag, upper, rhs);

        // line search on the residual norm
        double lambda = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 9; ++ls) {
            for (std::size_t i = 0; i < N; ++i) utrial[i] = u[i] + lambda * rhs[i];
            step_residual(ws, uprev, utrial, dt, Ftrial);
            const double ftrial = inf_norm(Ftrial);
            if (ftrial < fnorm * (1.0 - 1e-4 * lambda) || ftrial <= f_tol) {
                for (std::size_t i = 0; i < N; ++i) u[i] = utrial[i];
                F = Ftrial;
                fnorm = ftrial;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) return -1;

        double dmax = 0;
        for (std::size_t i = 0; i < N; ++i) dmax = std::max(dmax, std::abs(lambda * rhs[i]));
        if (dmax <= newton_tol * uref && fnorm <= 1e3 * f_tol) return it;
    }
    return fnorm <= f_tol ? max_iters : -1;
}

}  // namespace detail

/// Least-squares extinction fit: (sup u)^{1-m} is affine in t for separable
/// decay, so fit y = a - b t on the final decade of stored sup values and
/// extrapolate T = a/b. Returns nullopt when the data has not decayed enough.
inline std::optional<ExtinctionRecord> extinction_estimate(const Trajectory& traj,
                                                           double decay_fraction = 1e-3) {
    if (traj.snapshots.size() < 4) return std::nullopt;
    if (!(traj.params.m > 0 && traj.params.m < 1)) return std::nullopt;
    if (traj.boundary.kind != BoundaryKind::ZeroDirichlet) return std::nullopt;

    std::vector<double> sups(traj.snapshots.size());
    for (std::size_t j = 0; j < traj.snapshots.size(); ++j) sups[j] = traj.sup(j);
    const double s0 = sups.front();
    double s_end = 0;
    for (std::size_t j = sups.size(); j-- > 0;) {
        if (sups[j] > 0) { s_end = sups[j]; break; }
    }
    if (!(s_end > 0) || s_end > decay_fraction * s0) return std::nullopt;

    const double one_minus_m = 1.0 - traj.params.m;
    for (double window = 10.0; window <= 1e4; window *= 10.0) {
        std::vector<double> ts, ys;
        for (std::size_t j = 0; j < sups.size(); ++j) {
            if (sups[j] > 0 && sups[j] <= window * s_end) {
                ts.push_back(traj.snapshots[j].t);
                ys.push_back(std::pow(sups[j], one_minus_m));
            }
        }
        if (ts.size() < 5) continue;
        double st = 0, sy = 0, stt = 0, sty = 0;
        const double n = double(ts.size());
        for (std::size_t j = 0; j < ts.size(); ++j) {
            st += ts[j];
            sy += ys[j];
            stt += ts[j] * ts[j];
            sty += ts[j] * ys[j];
        }
        const double det = n * stt - st * st;
        if (std::abs(det) < 1e-300) continue;
        const double slope = (n * sty - st * sy) / det;     // = -b
        const double intercept = (sy * stt - st * sty) / det;  // = a
        if (!(slope < 0)) continue;
        const double T_est = -intercept / slope;
        double ymin = ys[0], ymax = ys[0], dev = 0;
        for (std::size_t j = 0; j < ts.size(); ++j) {
            ymin = std::min(ymin, ys[j]);
            ymax = std::max(ymax, ys[j]);
            dev = std::max(dev, std::abs(ys[j] - (intercept + slope * ts[j])));
        }
        const double range = std::max(ymax - ymin, 1e-300);
        return ExtinctionRecord{T_est, dev / range};
    }
    return std::nullopt;
}

/// Solve the radial Dirichlet problem for initial data u0(r) on B_{R_dom}.
/// The run ends at opts.t_end or when extinction is detected (zero-Dirichlet
/// runs with 0 < m < 1), whichever comes first.
inline Trajectory solve_radial_dirichlet(const FdeParams& params,
                                         const std::function<double(double)>& u0, double R_dom,
                                         const SolverOptions& opts) {
    params.validate();
    opts.validate();
    if (params.m <= 0 && opts.boundary.kind != BoundaryKind::PositiveDirichlet)
        throw std::invalid_argument(
            "solve_radial_dirichlet: m <= 0 requires positive Dirichlet data (zero-Dirichlet has "
            "no solution in that range)");

    Trajectory traj;
    traj.params = params;
    traj.grid = RadialGrid::uniform(params.d, R_dom, opts.n_cells);
    traj.boundary = opts.boundary;
    const std::size_t nodes = traj.grid.nodes();
    const std::size_t N = nodes - 1;  // unknowns; node N carries the boundary value

    std::vector<double> u(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        u[i] = u0(traj.grid.radii[i]);
        if (!(u[i] >= 0) || !std::isfinite(u[i]))
            throw std::invalid_argument("solve_radial_dirichlet: data must be nonnegative/finite");
    }
    const double bval = opts.boundary.kind == BoundaryKind::PositiveDirichlet ? opts.boundary.value : 0.0;
    u[N] = bval;

    double sup0 = bval;
    for (double v : u) sup0 = std::max(sup0, v);

    traj.snapshots.push_back({0.0, u});
    if (sup0 == 0.0) {  // identically zero stays zero
        traj.snapshots.push_back({std::min(opts.t_end, 1.0), u});
        traj.extinction = ExtinctionRecord{0.0, 0.0};
        return traj;
    }

    detail::StepWorkspace ws;
    ws.d = params.d;
    ws.m = params.m;
    ws.flux_factor = params.flux_factor();
    ws.floor_abs = opts.value_floor * sup0;
    ws.vol.assign(traj.grid.shell_volumes.begin(), traj.grid.shell_volumes.end() - 1);
    ws.area_over_dr.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double face_r = traj.grid.faces[i + 1];
        ws.area_over_dr[i] =
            sphere_area(params.d, face_r) / (traj.grid.radii[i + 1] - traj.grid.radii[i]);
    }

    const double ext_abs = opts.extinction_threshold * sup0;
    const bool can_extinguish =
        opts.boundary.kind == BoundaryKind::ZeroDirichlet && params.m > 0 && params.m < 1;

    double t = 0.0, dt = opts.dt_init;
    double t_last_store = 0.0;
    long step = 0;
    std::vector<double> unext(nodes);
    std::vector<double> uprev = u;
    // decay tracking: y = (sup u)^{1-m} is asymptotically affine in t, so the
    // remaining life is ~ y / |dy/dt|; resolving it keeps the extinction fit
    // well conditioned
    double y_prev = std::pow(sup0, 1.0 - params.m);
    double decay_slope = 0.0;

    const bool replay = !opts.dt_schedule.empty();
    while (t < opts.t_end) {
        if (replay) {
            if (step >= long(opts.dt_schedule.size())) break;
            dt = opts.dt_schedule[step];
        } else {
            dt = std::min(dt, opts.t_end - t);
            if (can_extinguish && decay_slope > 0 && y_prev > 0)
                dt = std::max(std::min(dt, 0.08 * y_prev / decay_slope), opts.dt_min);
        }
        const int iters =
            detail::implicit_step(ws, uprev, unext, dt, opts.newton_tol, opts.newton_max_iters);
        if (iters < 0) {
            if (!replay && dt > opts.dt_min * (1 + 1e-12)) {
                dt = std::max(0.5 * dt, opts.dt_min);
                continue;
            }
            std::ostringstream os;
            os << "solve_radial_dirichlet: Newton diverged at dt_min (t = " << t << ", dt = " << dt
               << ", step = " << step << ", sup = " << traj.sup(traj.snapshots.size() - 1) << ")";
            throw std::runtime_error(os.str());
        }

        double umin = 0, usup = 0;
        for (std::size_t i = 0; i < N; ++i) {
            umin = std::min(umin, unext[i]);
            usup = std::max(usup, unext[i]);
        }
        double uref = ws.floor_abs;
        for (double v : uprev) uref = std::max(uref, v);
        if (umin < -1e3 * opts.newton_tol * uref) {
            std::ostringstream os;
            os << "solve_radial_dirichlet: nonnegativity violated (min = " << umin
               << " at t = " << t + dt << ")";
            throw std::runtime_error(os.str());
        }
        for (std::size_t i = 0; i < N; ++i) unext[i] = std::max(unext[i], 0.0);

        t += dt;
        ++step;
        traj.step_sizes.push_back(dt);
        uprev = unext;
        if (can_extinguish) {
            const double y = usup > 0 ? std::pow(usup, 1.0 - params.m) : 0.0;
            decay_slope = (y_prev - y) / dt;
            y_prev = y;
        }

        const bool extinct = can_extinguish && usup <= ext_abs;
        const bool cadence_hit = (step % opts.snapshot_every_steps == 0) ||
                                 (opts.snapshot_every_time > 0 &&
                                  t - t_last_store >= opts.snapshot_every_time);
        if (cadence_hit || extinct || t >= opts.t_end) {
            traj.snapshots.push_back({t, uprev});
            t_last_store = t;
        }
        if (extinct) break;

        if (iters <= 4) dt = std::min(dt * 1.4, opts.dt_max);
        else if (iters >= opts.newton_max_iters * 4 / 5) dt = std::max(dt * 0.7, opts.dt_min);
    }

    if (traj.snapshots.back().t < t) traj.snapshots.push_back({t, uprev});
    if (can_extinguish)
        traj.extinction = extinction_estimate(traj, opts.extinction_threshold * 10.0);
    return traj;
}

/// Manufactured-solution residual: centered time difference of the evaluator
/// minus the discrete flux divergence, sampled at interior nodes whose radius
/// lies in [r_min, r_max]. Nodes whose stencil touches a nonpositive value are
/// skipped (the coefficient u^{m-1} is singular there); negative evaluator
/// values are a domain error.
inline ResidualStats pde_residual(const std::function<double(double, double)>& evaluator,
                                  const FdeParams& params, const RadialGrid& grid,
                                  const std::vector<double>& times, double r_min = 0.0,
                                  double r_max = std::numeric_limits<double>::infinity(),
                                  double dt_fd = 1e-6) {
    params.validate();
    if (times.empty()) throw std::invalid_argument("pde_residual: no times given");
    const std::size_t n = grid.nodes();
    const double factor = params.flux_factor();

    ResidualStats stats;
    stats.h = grid.spacing();
    stats.times = times;
    double sum_sq = 0.0;

    std::vector<double> vals(n), up(n), dn(n);
    for (double t : times) {
        for (std::size_t i = 0; i < n; ++i) {
            vals[i] = evaluator(t, grid.radii[i]);
            up[i] = evaluator(t + dt_fd, grid.radii[i]);
            dn[i] = evaluator(t - dt_fd, grid.radii[i]);
            if (vals[i] < 0) throw std::domain_error("pde_residual: evaluator returned a negative");
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double r = grid.radii[i];
            if (r < r_min || r > r_max) continue;
            if (!(vals[i - 1] > 0) || !(vals[i] > 0) || !(vals[i + 1] > 0)) continue;
            auto D = [&](double v) { return factor * std::pow(v, params.m - 1.0); };
            const double Dm = 2.0 * D(vals[i - 1]) * D(vals[i]) / (D(vals[i - 1]) + D(vals[i]));
            const double Dp = 2.0 * D(vals[i]) * D(vals[i + 1]) / (D(vals[i]) + D(vals[i + 1]));
            const double c_lo = sphere_area(params.d, grid.faces[i]) * Dm /
                                (grid.radii[i] - grid.radii[i - 1]);
            const double c_hi = sphere_area(params.d, grid.faces[i + 1]) * Dp /
                                (grid.radii[i + 1] - grid.radii[i]);
            const double net = c_lo * (vals[i - 1] - vals[i]) + c_hi * (vals[i + 1] - vals[i]);
            const double lap = net / grid.shell_volumes[i];
            const double dudt = (up[i] - dn[i]) / (2.0 * dt_fd);
            const double res = dudt - lap;
            stats.max_residual = std::max(stats.max_residual, std::abs(res));
            sum_sq += res * res;
            ++stats.nodes_used;
        }
    }
    stats.l2_residual = stats.nodes_used ? std::sqrt(sum_sq / stats.nodes_used) : 0.0;
    return stats;
}

struct MonotonicityMargin {
    double worst_decrease = 0.0;  // min relative decrease of t^{-1/(1-m)} u; negative = violation
    double t = 0.0;
    double r = 0.0;
};

/// Benilan-Crandall check: t^{-1/(1-m)} u(t, r) must be nonincreasing in t.
/// Returns the worst (most negative) relative decrease between consecutive
/// stored snapshots and where it occurred.
inline MonotonicityMargin benilan_crandall_margin(const Trajectory& traj) {
    if (!(traj.params.m > 0 && traj.params.m < 1))
        throw std::invalid_argument("benilan_crandall_margin: 0 < m < 1 required");
    if (traj.boundary.kind != BoundaryKind::ZeroDirichlet)
        throw std::invalid_argument("benilan_crandall_margin: zero-Dirichlet run required");
    const double a = 1.0 / (1.0 - traj.params.m);

    double gmax = 0.0;
    for (const auto& s : traj.snapshots) {
        if (!(s.t > 0)) continue;
        const double w = std::pow(s.t, -a);
        for (double v : s.values) gmax = std::max(gmax, w * v);
    }
    MonotonicityMargin out;
    out.worst_decrease = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j + 1 < traj.snapshots.size(); ++j) {
        const auto& s1 = traj.snapshots[j];
        const auto& s2 = traj.snapshots[j + 1];
        if (!(s1.t > 0)) continue;
        const double w1 = std::pow(s1.t, -a);
        const double w2 = std::pow(s2.t, -a);
        for (std::size_t i = 0; i < s1.values.size(); ++i) {
            const double g1 = w1 * s1.values[i];
            const double g2 = w2 * s2.values[i];
            const double norm = std::max({g1, g2, 1e-9 * gmax});
            if (!(norm > 0)) continue;
            const double rel = (g1 - g2) / norm;
            if (rel < out.worst_decrease) {
                out.worst_decrease = rel;
                out.t = s2.t;
                out.r = traj.grid.radii[i];
            }
        }
    }
    if (!std::isfinite(out.worst_decrease)) out.worst_decrease = 0.0;
    return out;
}

/// CSV export (header t,r,u; one row per stored node) plus a key=value sidecar
/// at path + ".meta".
inline void export_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("export_trajectory_csv: cannot open " + path);
    os.precision(17);
    os << "t,r,u\n";
    for (const auto& s : traj.snapshots)
        for (std::size_t i = 0; i < s.values.size(); ++i)
            os << s.t << ',' << traj.grid.radii[i] << ',' << s.values[i] << '\n';

    std::ofstream meta(path + ".meta");
    if (!meta) throw std::runtime_error("export_trajectory_csv: cannot open " + path + ".meta");
    meta.precision(17);
    meta << "m=" << traj.params.m << '\n'
         << "d=" << traj.params.d << '\n'
         << "equation_form=" << to_string(traj.params.form) << '\n'
         << "R_dom=" << traj.grid.R_dom() << '\n'
         << "n_cells=" << traj.grid.nodes() - 1 << '\n'
         << "boundary=" << to_string(traj.boundary) << '\n'
         << "T_est=" << (traj.extinction ? traj.extinction->T_est : -1.0) << '\n';
}

}  // namespace fdlab
