#pragma once

// Core types for the radial fast-diffusion laboratory: problem parameters,
// derived exponents, radial grids, solution snapshots/trajectories and the
// ball/annulus functionals everything else consumes.
//
// Conventions:
//  * All solutions are spherically symmetric about the origin; a ball B_R(x0)
//    is represented by its radius with x0 at the grid origin.
//  * A grid carries nodes 0 = r_0 < r_1 < ... < r_N = R_dom together with the
//    exact d-dimensional shell volume of the Voronoi cell around each node.
//  * Quadrature is the midpoint shell rule; partial cells at ball boundaries
//    are split proportionally by volume.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdlab {

inline constexpr double pi = 3.14159265358979323846;

/// Which form of the equation a run uses: du/dt = div(u^{m-1} grad u) (the
/// 1/m-normalized flux, mandatory for m <= 0) or du/dt = div(m u^{m-1} grad u).
enum class EquationForm { WithInverseM, WithoutInverseM };

inline std::string to_string(EquationForm f) {
    return f == EquationForm::WithInverseM ? "with-inverse-m" : "without-inverse-m";
}

struct FdeParams {
    double m = 0.5;
    int d = 3;
    EquationForm form = EquationForm::WithoutInverseM;

    void validate() const {
        if (!(m < 1.0)) throw std::invalid_argument("FdeParams: m must satisfy m < 1");
        if (d < 1) throw std::invalid_argument("FdeParams: dimension must be >= 1");
        if (m <= 0.0 && form != EquationForm::WithInverseM)
            throw std::invalid_argument(
                "FdeParams: m <= 0 requires the with-inverse-m form (the 1/m factor is essential)");
    }

    double m_c() const { return double(d - 2) / double(d); }
    double p_c() const { return d * (1.0 - m) / 2.0; }
    double sigma() const { return d * (1.0 - m) - 2.0; }
    bool good_range() const { return m > m_c() && m < 1.0; }
    bool subcritical() const { return m < m_c(); }
    /// Multiplier turning u^{m-1} into the flux coefficient of this form.
    double flux_factor() const { return form == EquationForm::WithoutInverseM ? m : 1.0; }
};

struct Exponents {
    double m_c = 0.0;
    double p_c = 0.0;
    std::optional<double> theta_p;  // 1/(2p - d(1-m)); absent at p = p_c
    double sigma = 0.0;             // d(1-m) - 2
    double q = 0.0;                 // d/2 for d >= 3, else 2
    double sigma_star = 0.0;        // 2*/2
    double two_star = 0.0;          // 2d/(d-2) for d >= 3, else 4
};

inline Exponents derive_exponents(const FdeParams& params, std::optional<double> p = {}) {
    params.validate();
    if (p && !(*p >= 1.0)) throw std::invalid_argument("derive_exponents: p must be >= 1");
    Exponents e;
    e.m_c = params.m_c();
    e.p_c = params.p_c();
    e.sigma = params.sigma();
    e.two_star = params.d >= 3 ? 2.0 * params.d / (params.d - 2.0) : 4.0;
    e.sigma_star = e.two_star / 2.0;
    e.q = params.d >= 3 ? params.d / 2.0 : 2.0;
    if (p) {
        const double denom = 2.0 * *p - params.d * (1.0 - params.m);
        if (std::abs(denom) > 1e-12 * std::max(1.0, std::abs(*p)))
            e.theta_p = 1.0 / denom;
    }
    return e;
}

/// Volume of the unit ball in R^d.
inline double unit_ball_volume(int d) {
    return std::pow(pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

/// Surface area of the sphere of radius r in R^d.
inline double sphere_area(int d, double r) {
    return d * unit_ball_volume(d) * std::pow(r, d - 1);
}

struct RadialGrid {
    int dim = 3;
    std::vector<double> radii;          // nodes, radii.front() == 0, radii.back() == R_dom
    std::vector<double> faces;          // cell faces, size nodes()+1
    std::vector<double> shell_volumes;  // exact cell volumes, one per node

    static RadialGrid uniform(int d, double R_dom, int n_cells) {
        if (d < 1 || n_cells < 2 || !(R_dom > 0))
            throw std::invalid_argument("RadialGrid::uniform: bad arguments");
        RadialGrid g;
        g.dim = d;
        g.radii.resize(n_cells + 1);
        const double h = R_dom / n_cells;
        for (int i = 0; i <= n_cells; ++i) g.radii[i] = (i == n_cells) ? R_dom : i * h;
        g.build_cells();
        return g;
    }

    static RadialGrid from_radii(int d, std::vector<double> r) {
        if (r.size() < 3 || r.front() != 0.0)
            throw std::invalid_argument("RadialGrid::from_radii: need r0 = 0 and >= 3 nodes");
        for (std::size_t i = 1; i < r.size(); ++i)
            if (!(r[i] > r[i - 1])) throw std::invalid_argument("RadialGrid: radii must increase");
        RadialGrid g;
        g.dim = d;
        g.radii = std::move(r);
        g.build_cells();
        return g;
    }

    std::size_t nodes() const { return radii.size(); }
    double R_dom() const { return radii.back(); }
    double spacing() const {
        double h = 0;
        for (std::size_t i = 1; i < radii.size(); ++i) h = std::max(h, radii[i] - radii[i - 1]);
        return h;
    }

    /// Volume of cell i inside the ball of radius R (proportional split).
    double cell_volume_within(std::size_t i, double R) const {
        const double a = std::min(faces[i], R);
        const double b = std::min(faces[i + 1], R);
        if (b <= a) return 0.0;
        return unit_ball_volume(dim) * (std::pow(b, dim) - std::pow(a, dim));
    }

    /// Volume of cell i inside the shell R_in <= |x| <= R_out.
    double cell_volume_within_shell(std::size_t i, double R_in, double R_out) const {
        const double a = std::clamp(faces[i], R_in, R_out);
        const double b = std::clamp(faces[i + 1], R_in, R_out);
        if (b <= a) return 0.0;
        return unit_ball_volume(dim) * (std::pow(b, dim) - std::pow(a, dim));
    }

private:
    void build_cells() {
        const std::size_t n = radii.size();
        faces.resize(n + 1);
        faces[0] = 0.0;
        for (std::size_t i = 1; i < n; ++i) faces[i] = 0.5 * (radii[i - 1] + radii[i]);
        faces[n] = radii.back();
        shell_volumes.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            shell_volumes[i] =
                unit_ball_volume(dim) * (std::pow(faces[i + 1], dim) - std::pow(faces[i], dim));
    }
};

struct Snapshot {
    double t = 0.0;
    std::vector<double> values;  // one per grid node, nonnegative and finite
};

enum class BoundaryKind { ZeroDirichlet, PositiveDirichlet };

struct Boundary {
    BoundaryKind kind = BoundaryKind::ZeroDirichlet;
    double value = 0.0;

    static Boundary zero() { return {BoundaryKind::ZeroDirichlet, 0.0}; }
    static Boundary positive(double v) {
        if (!(v > 0)) throw std::invalid_argument("Boundary::positive: value must be > 0");
        return {BoundaryKind::PositiveDirichlet, v};
    }
};

inline std::string to_string(const Boundary& b) {
    return b.kind == BoundaryKind::ZeroDirichlet ? "zero"
                                                 : "positive(" + std::to_string(b.value) + ")";
}

struct ExtinctionRecord {
    double T_est = 0.0;      // extrapolated extinction time
    double fit_quality = 0;  // max affine deviation of (sup u)^{1-m} over its range
};

struct Trajectory {
    FdeParams params;
    RadialGrid grid;
    std::vector<Snapshot> snapshots;  // strictly increasing times
    std::optional<ExtinctionRecord> extinction;
    Boundary boundary;
    std::vector<double> step_sizes;  // accepted dt sequence (replayable for paired runs)

    const Snapshot& front() const { return snapshots.front(); }
    const Snapshot& back() const { return snapshots.back(); }
    double t_begin() const { return snapshots.front().t; }
    double t_end() const { return snapshots.back().t; }

    std::size_t index_nearest(double t) const {
        if (snapshots.empty()) throw std::domain_error("Trajectory: empty");
        std::size_t best = 0;
        double err = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < snapshots.size(); ++j) {
            const double e = std::abs(snapshots[j].t - t);
            if (e < err) { err = e; best = j; }
        }
        return best;
    }
    const Snapshot& nearest(double t) const { return snapshots[index_nearest(t)]; }

    double sup(std::size_t j) const {
        double s = 0;
        for (double v : snapshots[j].values) s = std::max(s, v);
        return s;
    }

    /// Piecewise-bilinear evaluation in (t, r); clamped to the stored range in
    /// time, zero after the last snapshot of an extinct run.
    double interpolate(double t, double r) const;
};

struct Cylinder {
    double t1 = 0.0;
    double t2 = 0.0;
    double rho = 0.0;

    void validate(const RadialGrid& grid) const {
        if (!(t1 <= t2)) throw std::invalid_argument("Cylinder: t1 <= t2 required");
        if (!(rho > 0) || rho > grid.R_dom() * (1 + 1e-12))
            throw std::invalid_argument("Cylinder: 0 < rho <= R_dom required");
    }
};

// ---------------------------------------------------------------------------
// Functionals

/// Integral of u^p over the ball B_R (shell quadrature, partial cells split by
/// volume). Returns the integral, not its p-th root.
inline double lp_norm_ball(const Snapshot& snap, const RadialGrid& grid, double p, double R) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm_ball: p >= 1 required");
    if (R > grid.R_dom() * (1 + 1e-12)) throw std::domain_error("lp_norm_ball: R exceeds domain");
    if (snap.values.size() != grid.nodes())
        throw std::invalid_argument("lp_norm_ball: snapshot/grid size mismatch");
    double acc = 0;
    for (std::size_t i = 0; i < grid.nodes(); ++i) {
        const double w = grid.cell_volume_within(i, R);
        if (w > 0) acc += w * std::pow(snap.values[i], p);
    }
    return acc;
}

/// L^p norm on B_R, i.e. the p-th root of lp_norm_ball.
inline double lp_norm(const Snapshot& snap, const RadialGrid& grid, double p, double R) {
    return std::pow(lp_norm_ball(snap, grid, p, R), 1.0 / p);
}

/// Integral of u^p over the shell B_{R_out} \ B_{R_in}.
inline double lp_norm_shell(const Snapshot& snap, const RadialGrid& grid, double p, double R_in,
                            double R_out) {
    if (!(R_in >= 0) || !(R_out > R_in)) throw std::domain_error("lp_norm_shell: bad shell");
    double acc = 0;
    for (std::size_t i = 0; i < grid.nodes(); ++i) {
        const double w = grid.cell_volume_within_shell(i, R_in, R_out);
        if (w > 0) acc += w * std::pow(snap.values[i], p);
    }
    return acc;
}

/// Volume-weighted mean of u over the shell B_{R_out} \ B_{R_in}.
inline double annulus_average(const Snapshot& snap, const RadialGrid& grid, double R_in,
                              double R_out) {
    if (!(R_in >= 0) || !(R_in < R_out) || R_out > grid.R_dom() * (1 + 1e-12))
        throw std::domain_error("annulus_average: need 0 <= R_in < R_out <= R_dom");
    double acc = 0, vol = 0;
    for (std::size_t i = 0; i < grid.nodes(); ++i) {
        const double w = grid.cell_volume_within_shell(i, R_in, R_out);
        acc += w * snap.values[i];
        vol += w;
    }
    if (!(vol > 0)) throw std::domain_error("annulus_average: degenerate shell");
    return acc / vol;
}

enum class ExtremumKind { Sup, Inf };

struct CylinderExtremum {
    double value = 0.0;
    double t = 0.0;  // attained at
    double r = 0.0;
};

/// Discrete extremum over stored snapshots with t in [t1, t2] and nodes with
/// r <= rho. Reports where it was attained.
inline CylinderExtremum extremum_on_cylinder(const Trajectory& traj, const Cylinder& cyl,
                                             ExtremumKind kind) {
    cyl.validate(traj.grid);
    const double t_tol = 1e-12 * std::max(1.0, std::abs(cyl.t2));
    CylinderExtremum ext;
    bool found = false;
    for (const Snapshot& s : traj.snapshots) {
        if (s.t < cyl.t1 - t_tol || s.t > cyl.t2 + t_tol) continue;
        for (std::size_t i = 0; i < traj.grid.nodes(); ++i) {
            const double r = traj.grid.radii[i];
            if (r > cyl.rho * (1 + 1e-12)) break;
            const double v = s.values[i];
            const bool better = !found || (kind == ExtremumKind::Sup ? v > ext.value : v < ext.value);
            if (better) { ext = {v, s.t, r}; found = true; }
        }
    }
    if (!found) throw std::domain_error("extremum_on_cylinder: cylinder misses all stored data");
    return ext;
}

inline double Trajectory::interpolate(double t, double r) const {
    if (snapshots.empty()) throw std::domain_error("Trajectory::interpolate: empty");
    const auto& rs = grid.radii;
    const double rc = std::clamp(r, rs.front(), rs.back());
    const auto itr = std::upper_bound(rs.begin(), rs.end(), rc);
    std::size_t i1 = std::min<std::size_t>(rs.size() - 1, itr - rs.begin());
    std::size_t i0 = i1 == 0 ? 0 : i1 - 1;
    const double dr = rs[i1] - rs[i0];
    const double wr = dr > 0 ? (rc - rs[i0]) / dr : 0.0;

    if (t <= snapshots.front().t) {
        const auto& v = snapshots.front().values;
        return (1 - wr) * v[i0] + wr * v[i1];
    }
    if (t >= snapshots.back().t) {
        // past the stored horizon: an extinct run is identically zero there
        if (extinction) return 0.0;
        const auto& v = snapshots.back().values;
        return (1 - wr) * v[i0] + wr * v[i1];
    }
    const auto itt = std::lower_bound(snapshots.begin(), snapshots.end(), t,
                                      [](const Snapshot& s, double tt) { return s.t < tt; });
    const std::size_t hi = std::max<std::size_t>(1, itt - snapshots.begin());
    const std::size_t lo = hi - 1;
    const double dt = snapshots[hi].t - snapshots[lo].t;
    const double wt = dt > 0 ? (t - snapshots[lo].t) / dt : 0.0;
    const auto& a = snapshots[lo].values;
    const auto& b = snapshots[hi].values;
    const double va = (1 - wr) * a[i0] + wr * a[i1];
    const double vb = (1 - wr) * b[i0] + wr * b[i1];
    return (1 - wt) * va + wt * vb;
}

namespace detail {

/// 16-point Gauss-Legendre on [a, b], composited over n subintervals.
template <class F>
double gauss_legendre(F&& f, double a, double b, int n = 64) {
    static const double xs[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                 0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                 0.9445750230732326, 0.9894009349916499};
    static const double ws[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                 0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                 0.0622535239386479, 0.0271524594117541};
    double total = 0;
    const double h = (b - a) / n;
    for (int k = 0; k < n; ++k) {
        const double c = a + (k + 0.5) * h;
        double acc = 0;
        for (int j = 0; j < 8; ++j)
            acc += ws[j] * (f(c + 0.5 * h * xs[j]) + f(c - 0.5 * h * xs[j]));
        total += 0.5 * h * acc;
    }
    return total;
}

}  // namespace detail

}  // namespace fdlab
