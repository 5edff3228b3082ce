#pragma once

// Closed-form and semi-analytic reference solutions: the singular separable
// solution on the whole space, the separable Dirichlet solution built from the
// stationary profile by shooting, the mass/radius rescaling to the unit
// problem, and the Dirac-approximation scaling family.

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdlab/core.hpp"

namespace fdlab {

enum class ExactKind { Vss, Separable, Rescaled, DiracFamily };

struct ExactSolution {
    ExactKind kind = ExactKind::Vss;
    FdeParams params;
    double T = 0.0;  // extinction time where meaningful
    std::map<std::string, double> constants;
    std::function<double(double, double)> evaluate;  // (t, r) -> value
};

/// Singular separable solution U(t,r) = c (T-t)^{1/(1-m)} r^{-2/(1-m)} on the
/// whole space, subcritical range. The constant is fixed by requiring the PDE
/// residual of the chosen equation form to vanish identically.
inline ExactSolution vss(const FdeParams& params, double T) {
    params.validate();
    if (!(params.sigma() > 0))
        throw std::invalid_argument("vss: subcritical range required (d(1-m) - 2 > 0)");
    if (params.form != EquationForm::WithInverseM)
        throw std::invalid_argument("vss: defined for the with-inverse-m form");
    if (!(T > 0)) throw std::invalid_argument("vss: T > 0 required");
    const double m = params.m;
    const double a = 1.0 / (1.0 - m);
    const double c = std::pow(2.0 * params.sigma() / (1.0 - m), a);
    ExactSolution sol;
    sol.kind = ExactKind::Vss;
    sol.params = params;
    sol.T = T;
    sol.constants = {{"c", c}, {"T", T}};
    sol.evaluate = [c, a, m, T](double t, double r) -> double {
        if (t >= T) return 0.0;
        if (!(r > 0)) return std::numeric_limits<double>::infinity();
        return c * std::pow(T - t, a) * std::pow(r, -2.0 * a);
    };
    return sol;
}

/// Radial stationary profile S with Laplacian(S^m) + S/(1-m) = 0 on B_{R0},
/// S(R0) = 0, S'(0) = 0, found by shooting on the central value of G = S^m.
/// Stores G and G' on a fine mesh; evaluation is cubic Hermite.
struct SeparableProfile {
    FdeParams params;
    double R0 = 1.0;
    std::vector<double> r;   // uniform mesh 0..R0
    std::vector<double> G;   // S^m at mesh points (clamped at 0)
    std::vector<double> dG;  // d(S^m)/dr
    double shooting_residual = 0.0;  // |G(R0)| / G(0)

    double S0() const { return std::pow(G.front(), 1.0 / params.m); }

    double eval_G(double rr) const {
        if (rr <= 0) return G.front();
        if (rr >= R0) return 0.0;
        const double h = r[1] - r[0];
        const std::size_t i = std::min<std::size_t>(G.size() - 2, std::size_t(rr / h));
        const double s = (rr - r[i]) / h;
        const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
        const double h10 = s * (1 - s) * (1 - s);
        const double h01 = s * s * (3 - 2 * s);
        const double h11 = s * s * (s - 1);
        const double g = h00 * G[i] + h10 * h * dG[i] + h01 * G[i + 1] + h11 * h * dG[i + 1];
        return std::max(g, 0.0);
    }

    double S(double rr) const { return std::pow(eval_G(rr), 1.0 / params.m); }

    /// Separable Dirichlet solution S(r) (T1-t)^{1/(1-m)} with extinction T1.
    ExactSolution build_solution(double T1) const {
        if (!(T1 > 0)) throw std::invalid_argument("build_solution: T1 > 0 required");
        ExactSolution sol;
        sol.kind = ExactKind::Separable;
        sol.params = params;
        sol.T = T1;
        sol.constants = {{"S0", S0()}, {"T1", T1}, {"R0", R0}};
        const double a = 1.0 / (1.0 - params.m);
        auto self = *this;
        sol.evaluate = [self, T1, a](double t, double rr) -> double {
            if (t >= T1) return 0.0;
            return self.S(rr) * std::pow(T1 - t, a);
        };
        return sol;
    }
};

namespace detail {

// One shot of the profile ODE in G = S^m:
//   G'' + (d-1)/r G' + G_+^{1/m}/(1-m) = 0,  G(0) = g0, G'(0) = 0.
// G is continued harmonically once it crosses zero so the end value has a
// definite sign for bisection. Optionally records the mesh.
inline double shoot_profile(const FdeParams& p, double R0, double g0, int n_steps,
                            std::vector<double>* G_out = nullptr,
                            std::vector<double>* dG_out = nullptr) {
    const double m = p.m;
    const double inv_m = 1.0 / m;
    const double fac = 1.0 / (1.0 - m);
    const int d = p.d;
    const double h = R0 / n_steps;
    auto rhs = [&](double rr, double G, double P, double& dG, double& dP) {
        dG = P;
        const double src = G > 0 ? std::pow(G, inv_m) * fac : 0.0;
        if (rr <= 0) {
            dP = -src / d;  // symmetric limit of P' + (d-1)P/r
        } else {
            dP = -(d - 1) * P / rr - src;
        }
    };
    double G = g0, P = 0.0;
    if (G_out) { G_out->assign(1, G); dG_out->assign(1, P); }
    for (int i = 0; i < n_steps; ++i) {
        const double rr = i * h;
        double k1G, k1P, k2G, k2P, k3G, k3P, k4G, k4P;
        rhs(rr, G, P, k1G, k1P);
        rhs(rr + 0.5 * h, G + 0.5 * h * k1G, P + 0.5 * h * k1P, k2G, k2P);
        rhs(rr + 0.5 * h, G + 0.5 * h * k2G, P + 0.5 * h * k2P, k3G, k3P);
        rhs(rr + h, G + h * k3G, P + h * k3P, k4G, k4P);
        G += h / 6.0 * (k1G + 2 * k2G + 2 * k3G + k4G);
        P += h / 6.0 * (k1P + 2 * k2P + 2 * k3P + k4P);
        if (G_out) { G_out->push_back(G); dG_out->push_back(P); }
    }
    return G;
}

}  // namespace detail

/// Shooting solve of the stationary profile on B_{R0}. mesh_n is the number of
/// RK4 steps (and stored mesh cells).
inline SeparableProfile separable_profile(const FdeParams& params, double R0, int mesh_n = 4096) {
    params.validate();
    if (!(params.m > 0 && params.m < 1))
        throw std::invalid_argument("separable_profile: 0 < m < 1 required");
    if (params.form != EquationForm::WithoutInverseM)
        throw std::invalid_argument("separable_profile: defined for the without-inverse-m form");
    if (!(R0 > 0) || mesh_n < 64) throw std::invalid_argument("separable_profile: bad arguments");

    // Bracket the central value: G(R0) is positive for small g0 (no crossing
    // before R0) and negative for large g0 (crossing moves inward).
    const double guess = std::pow(R0, 2.0 * params.m / (1.0 - params.m));
    double lo = guess, hi = guess;
    double flo = detail::shoot_profile(params, R0, lo, mesh_n);
    double fhi = flo;
    for (int i = 0; i < 200 && flo <= 0; ++i) { lo *= 0.5; flo = detail::shoot_profile(params, R0, lo, mesh_n); }
    for (int i = 0; i < 200 && fhi > 0; ++i) { hi *= 2.0; fhi = detail::shoot_profile(params, R0, hi, mesh_n); }
    if (!(flo > 0 && fhi <= 0))
        throw std::runtime_error("separable_profile: shooting failed to bracket (R0 = " +
                                 std::to_string(R0) + ", m = " + std::to_string(params.m) + ")");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (detail::shoot_profile(params, R0, mid, mesh_n) > 0) lo = mid; else hi = mid;
        if (hi - lo < 1e-15 * hi) break;
    }
    const double g0 = 0.5 * (lo + hi);

    SeparableProfile prof;
    prof.params = params;
    prof.R0 = R0;
    const double gend = detail::shoot_profile(params, R0, g0, mesh_n, &prof.G, &prof.dG);
    prof.shooting_residual = std::abs(gend) / g0;
    prof.r.resize(mesh_n + 1);
    for (int i = 0; i <= mesh_n; ++i) prof.r[i] = R0 * i / mesh_n;
    for (double& g : prof.G) g = std::max(g, 0.0);
    return prof;
}

/// The two-parameter rescaling between a solution with mass M on B_R and the
/// unit-mass unit-ball problem: u(t,x) = (M/R^d) uhat(t/tau, x/R) with
/// tau = R^{2-d(1-m)} M^{1-m}. Extinction times map as T = tau * That.
struct ScalingMap {
    double M = 1.0, R = 1.0, tau = 1.0;
    int d = 3;

    double to_unit_time(double t) const { return t / tau; }
    double from_unit_time(double th) const { return th * tau; }
    double to_unit_radius(double r) const { return r / R; }
    double from_unit_radius(double rh) const { return rh * R; }
    double to_unit_value(double u) const { return u * std::pow(R, d) / M; }
    double from_unit_value(double uh) const { return uh * M / std::pow(R, d); }

    Trajectory to_unit(const Trajectory& traj) const {
        Trajectory out = traj;
        std::vector<double> radii = traj.grid.radii;
        for (double& r : radii) r /= R;
        out.grid = RadialGrid::from_radii(traj.grid.dim, std::move(radii));
        for (std::size_t j = 0; j < out.snapshots.size(); ++j) {
            out.snapshots[j].t = traj.snapshots[j].t / tau;
            for (double& v : out.snapshots[j].values) v = to_unit_value(v);
        }
        if (traj.extinction)
            out.extinction = ExtinctionRecord{traj.extinction->T_est / tau,
                                              traj.extinction->fit_quality};
        if (out.boundary.kind == BoundaryKind::PositiveDirichlet)
            out.boundary.value = to_unit_value(traj.boundary.value);
        return out;
    }

    Trajectory from_unit(const Trajectory& traj) const {
        ScalingMap inv;
        inv.M = 1.0 / M;
        inv.R = 1.0 / R;
        inv.tau = 1.0 / tau;
        inv.d = d;
        return inv.to_unit(traj);
    }
};

inline ScalingMap rescale_to_unit(double M, double R, const FdeParams& params) {
    params.validate();
    if (!(M > 0) || !(R > 0)) throw std::invalid_argument("rescale_to_unit: M, R > 0 required");
    ScalingMap s;
    s.M = M;
    s.R = R;
    s.d = params.d;
    s.tau = std::pow(R, 2.0 - params.d * (1.0 - params.m)) * std::pow(M, 1.0 - params.m);
    return s;
}

/// Scaling family u_k(t,r) = k^d u(k^{-sigma} t, k r) over a base trajectory,
/// the Dirac-approximation obstruction family. Extinction times scale as
/// T_k = T_1 k^{sigma}.
inline ExactSolution dirac_family(const Trajectory& base, double k) {
    base.params.validate();
    const double sigma = base.params.sigma();
    if (!(base.params.m > 0) || !(sigma > 0))
        throw std::invalid_argument("dirac_family: requires 0 < m < m_c (sigma > 0)");
    if (!(k >= 1.0)) throw std::invalid_argument("dirac_family: k >= 1 required");
    ExactSolution sol;
    sol.kind = ExactKind::DiracFamily;
    sol.params = base.params;
    const double kd = std::pow(k, base.params.d);
    const double ks = std::pow(k, -sigma);
    const double R_dom = base.grid.R_dom();
    if (base.extinction) sol.T = base.extinction->T_est * std::pow(k, sigma);
    sol.constants = {{"k", k}, {"sigma", sigma}, {"T_k", sol.T}};
    const Trajectory* basep = &base;
    sol.evaluate = [basep, kd, ks, k, R_dom](double t, double r) -> double {
        const double rb = k * r;
        if (rb > R_dom) return 0.0;  // zero-Dirichlet exterior
        return kd * basep->interpolate(ks * t, rb);
    };
    return sol;
}

}  // namespace fdlab
