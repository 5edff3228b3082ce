#pragma once

// Constructive evaluation of every explicit constant used by the estimate
// checks: the flux-transfer cutoff constant k0, optimal Sobolev and Poincare
// constants, extinction-time constants, the local L^p evolution constant, the
// Moser-iteration constant chain, the critical time t_*, and the good-range
// comparison machinery (Barenblatt-type extinction upper bound).
//
// Conventions on the equation form: the flux/positivity constants (k0, t_*,
// c1', AC constants) are derived for du/dt = Laplacian(u^m); the L^p norm
// evolution and smoothing constants for du/dt = Laplacian(u^m)/m. The exact
// time dilation u(t) = v(t/m) converts between the two; checks convert
// trajectory times accordingly (see time_to_with_form / time_to_without_form).

#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fdlab/bessel.hpp"
#include "fdlab/core.hpp"
#include "fdlab/exact.hpp"

namespace fdlab {

// ---------------------------------------------------------------------------
// Equation-form time conversion (exact dilation u_with(t) = v_without(t/m)).

inline double time_to_with_form(const FdeParams& p, double t) {
    if (p.form == EquationForm::WithInverseM) return t;
    return p.m * t;  // without-form only exists for m > 0
}

inline double time_to_without_form(const FdeParams& p, double t) {
    if (p.form == EquationForm::WithoutInverseM) return t;
    if (!(p.m > 0))
        throw std::invalid_argument("time_to_without_form: requires m > 0");
    return t / p.m;
}

// ---------------------------------------------------------------------------
// Quintic transition polynomial w: [0,1] -> [1,0] with C^2 flat ends.

namespace detail {
inline double quintic(double s) { return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s); }
inline double quintic_d1(double s) { return -30.0 * s * s * (1.0 - s) * (1.0 - s); }
inline double quintic_d2(double s) { return -60.0 * s * (1.0 - s) * (1.0 - 2.0 * s); }
inline constexpr double quintic_d1_max = 1.875;            // sup |w'|
inline const double quintic_d2_max = 10.0 / std::sqrt(3);  // sup |w''|
}  // namespace detail

/// Radial C^2 cutoff: 1 on B_{2R} (here r_inner), quintic transition, 0 at
/// and beyond r_outer.
struct CutoffProfile {
    int degree = 5;
    double r_inner = 0.0;  // phi = 1 up to here
    double r_outer = 0.0;  // phi = 0 from here on
    double sup_abs_d1 = 0.0;
    double sup_abs_d2 = 0.0;
    double sup_abs_laplacian = 0.0;  // over the transition annulus, for the ambient dimension
    int dim = 3;

    double width() const { return r_outer - r_inner; }
    double phi(double r) const {
        if (r <= r_inner) return 1.0;
        if (r >= r_outer) return 0.0;
        return detail::quintic((r - r_inner) / width());
    }
    double dphi(double r) const {
        if (r <= r_inner || r >= r_outer) return 0.0;
        return detail::quintic_d1((r - r_inner) / width()) / width();
    }
    double d2phi(double r) const {
        if (r <= r_inner || r >= r_outer) return 0.0;
        return detail::quintic_d2((r - r_inner) / width()) / (width() * width());
    }
    double laplacian(double r) const {
        if (r <= r_inner || r >= r_outer) return 0.0;
        return d2phi(r) + (dim - 1) / r * dphi(r);
    }
};

struct CutoffConstant {
    double k0 = 0.0;
    CutoffProfile profile;
};

/// Flux-transfer constant: quintic cutoff equal to 1 on B_{2R}, 0 outside
/// B_{R0}, and k0 = (R0-2R)^{-2} / sup |Laplacian(phi)| by dense sampling.
inline CutoffConstant cutoff_k0(int d, double R, double R0, int samples = 20001) {
    if (!(R > 0) || !(R0 > 2.0 * R)) throw std::invalid_argument("cutoff_k0: need R0 > 2R > 0");
    CutoffProfile prof;
    prof.dim = d;
    prof.r_inner = 2.0 * R;
    prof.r_outer = R0;
    double lap_max = 0.0, d1_max = 0.0, d2_max = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double r = prof.r_inner + prof.width() * i / samples;
        d1_max = std::max(d1_max, std::abs(prof.dphi(r)));
        d2_max = std::max(d2_max, std::abs(prof.d2phi(r)));
        lap_max = std::max(lap_max, std::abs(prof.laplacian(r)));
    }
    prof.sup_abs_d1 = d1_max;
    prof.sup_abs_d2 = d2_max;
    prof.sup_abs_laplacian = lap_max;
    CutoffConstant out;
    out.profile = prof;
    out.k0 = 1.0 / (prof.width() * prof.width() * lap_max);
    return out;
}

namespace detail {
inline std::mutex& const_cache_mutex() {
    static std::mutex mu;
    return mu;
}
}  // namespace detail

/// Optimal whole-space Sobolev constant, ||f||_{2*} <= S2 ||grad f||_2, via
/// the Talenti closed form. Cached.
inline double sobolev_constant(int d) {
    if (d < 3) throw std::invalid_argument("sobolev_constant: d >= 3 required");
    static std::map<int, double> cache;
    std::lock_guard<std::mutex> lk(detail::const_cache_mutex());
    auto it = cache.find(d);
    if (it != cache.end()) return it->second;
    const double v = std::exp((std::lgamma(double(d)) - std::lgamma(0.5 * d)) / d) /
                     std::sqrt(pi * d * (d - 2.0));
    cache[d] = v;
    return v;
}

/// Independent oracle: Sobolev quotient of the extremal bubble
/// (1+r^2)^{-(d-2)/2}, by radial quadrature in the angle variable.
inline double sobolev_bubble_quotient(int d) {
    if (d < 3) throw std::invalid_argument("sobolev_bubble_quotient: d >= 3 required");
    const double area = d * unit_ball_volume(d);
    // r = tan(theta): ||f||_{2*}^{2*} = area * int cos^{d-1} sin^{d-1},
    // ||grad f||_2^2 = area (d-2)^2 int sin^{d+1} cos^{d-3}.
    const double num = area * detail::gauss_legendre(
                                  [d](double th) {
                                      return std::pow(std::cos(th), d - 1.0) *
                                             std::pow(std::sin(th), d - 1.0);
                                  },
                                  0.0, 0.5 * pi, 200);
    const double den =
        area * (d - 2.0) * (d - 2.0) *
        detail::gauss_legendre(
            [d](double th) {
                return std::pow(std::sin(th), d + 1.0) * std::pow(std::cos(th), d - 3.0);
            },
            0.0, 0.5 * pi, 200);
    const double two_star = 2.0 * d / (d - 2.0);
    return std::pow(num, 1.0 / two_star) / std::sqrt(den);
}

/// Poincare constant of the unit ball: ||f||_2 <= P ||grad f||_2 with
/// P = 1 / j_{d/2-1,1}. Cached.
inline double poincare_constant(int d) {
    if (d < 1) throw std::invalid_argument("poincare_constant: d >= 1 required");
    static std::map<int, double> cache;
    std::lock_guard<std::mutex> lk(detail::const_cache_mutex());
    auto it = cache.find(d);
    if (it != cache.end()) return it->second;
    const double v = 1.0 / bessel_first_zero(0.5 * d - 1.0);
    cache[d] = v;
    return v;
}

/// Independent oracle: Rayleigh quotient ||f||_2 / ||grad f||_2 of the first
/// Dirichlet eigenfunction f(r) = r^{1-d/2} J_{d/2-1}(j r) on the unit ball.
inline double poincare_rayleigh_quotient(int d) {
    const double nu = 0.5 * d - 1.0;
    const double j = bessel_first_zero(nu);
    auto f = [&](double r) { return std::pow(r, -nu) * bessel_j(nu, j * r); };
    auto fp = [&](double r) { return -j * std::pow(r, -nu) * bessel_j(nu + 1.0, j * r); };
    const double num = detail::gauss_legendre(
        [&](double r) { return f(r) * f(r) * std::pow(r, d - 1.0); }, 1e-9, 1.0, 200);
    const double den = detail::gauss_legendre(
        [&](double r) { return fp(r) * fp(r) * std::pow(r, d - 1.0); }, 1e-9, 1.0, 200);
    return std::sqrt(num / den);
}

// ---------------------------------------------------------------------------
// Extinction-time constants (with-inverse-m form).

struct ExtinctionConstants {
    std::optional<double> K_pc;  // universal constant at p = p_c (m < m_c)
    double K_p = 0.0;            // Dirichlet constant for p > max(p_c, 1), domain radius alphaR
};

/// Universal L^{p_c} decay constant (subcritical range), as displayed.
inline double k_pc_constant(const FdeParams& params) {
    if (params.d < 3) throw std::invalid_argument("k_pc_constant: d >= 3 required");
    if (!(params.sigma() > 0)) throw std::invalid_argument("k_pc_constant: m < m_c required");
    const double S2 = sobolev_constant(params.d);
    return 8.0 * params.sigma() * S2 * S2 /
           ((params.d - 2.0) * (params.d - 2.0) * (1.0 - params.m));
}

/// K_p for the Dirichlet problem on the ball of radius alphaR:
/// ||u(t)||_p^{1-m} - ||u(s)||_p^{1-m} <= -K_p (t - s).
inline ExtinctionConstants extinction_constants(const FdeParams& params, double p, double alphaR) {
    if (params.d < 3) throw std::invalid_argument("extinction_constants: d >= 3 required");
    const double pc = params.p_c();
    if (!(p > std::max(pc, 1.0)))
        throw std::invalid_argument("extinction_constants: p > max(p_c, 1) required");
    if (!(alphaR > 0)) throw std::invalid_argument("extinction_constants: alphaR > 0 required");
    const double m = params.m;
    const double S2 = sobolev_constant(params.d);
    const double P = poincare_constant(params.d);
    ExtinctionConstants out;
    out.K_p = 4.0 * (1.0 - m) * (p - 1.0) / ((p + m - 1.0) * (p + m - 1.0)) *
              std::pow(P * alphaR, -2.0 * (1.0 - pc / p)) * std::pow(S2, -2.0 * pc / p);
    if (params.sigma() > 0) out.K_pc = k_pc_constant(params);
    return out;
}

// ---------------------------------------------------------------------------
// Local L^p norm evolution constant (with-inverse-m form).

struct LpEvolutionConstant {
    double K = 0.0;     // [int_{B_R} u(t)^p]^{(1-m)/p} <= [int_{B_{R0}} u(s)^p]^{(1-m)/p} + K (t-s)
    double c_md = 0.0;  // K written as p c_md (R0-R)^{-2} Vol(annulus)^{(1-m)/p}
};

namespace detail {
// sup over the transition annulus of |grad phi|^2 + |Laplacian phi| for the
// quintic cutoff phi(x) = w((|x|/R - 1)/(lambda - 1)), in units of 1/R^2.
inline double cutoff_gradlap_bound(int d, double lambda, int samples = 4001) {
    const double L = lambda - 1.0;
    double sup = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double s = 1.0 + L * i / samples;
        const double x = (s - 1.0) / L;
        const double d1 = std::abs(quintic_d1(x)) / L;
        const double d2 = std::abs(quintic_d2(x)) / (L * L);
        sup = std::max(sup, d1 * d1 + d2 + (d - 1.0) * d1 / s);
    }
    return sup;
}
}  // namespace detail

inline LpEvolutionConstant lp_evolution_constant(const FdeParams& params, double p, double R,
                                                 double R0) {
    if (!(p >= 1.0) || !(p > 1.0 - params.m))
        throw std::invalid_argument("lp_evolution_constant: need p >= 1 and p > 1-m");
    if (!(0 < R && R < R0)) throw std::invalid_argument("lp_evolution_constant: need 0 < R < R0");
    const double m = params.m;
    const double lambda = R0 / R;
    const double b = 3.0 * p / (1.0 - m);
    const double G = detail::cutoff_gradlap_bound(params.d, lambda);
    const double vol = unit_ball_volume(params.d) * (std::pow(R0, params.d) - std::pow(R, params.d));
    LpEvolutionConstant out;
    out.K = (1.0 - m) / std::abs(p + m - 1.0) * b * (b - 1.0) * G / (R * R) *
            std::pow(vol, (1.0 - m) / p);
    out.c_md = out.K * (R0 - R) * (R0 - R) / (p * std::pow(vol, (1.0 - m) / p));
    return out;
}

// ---------------------------------------------------------------------------
// Moser iteration constant chain (with-inverse-m form, d >= 3).

struct MoserConstants {
    double q = 0.0;
    double theta_tilde = 0.0;    // 1/(p - q(1-m)) = 2 theta_p
    double C_m = 0.0;            // lower bound for the Step-1 structural constant
    double C_energy = 0.0;       // energy-inequality multiplier 2 c_psi^2 / C_m
    double J0 = 0.0;             // (2 S2)^2
    double J1 = 0.0;             // 2 (rho^{-2} + tau^{-1}) C_energy on the unit cylinder
    double series_c1 = 0.0;      // 1 / sum k^{-2} = 6/pi^2
    double series_c2 = 0.0;      // 1 / sum k^{-4} = 90/pi^4
    double product_bound = 0.0;  // limit of the iteration product, exponent 4
    double C_loc = 0.0;          // space-time integral -> sup constant
    double S0 = 0.0;             // 2^{p/(1-m)-1}
    double K_mdp = 0.0;          // collar-integral constant in the epsilon expansion
    double Cbar1 = 0.0, Cbar2 = 0.0;  // cylinder-form constants at the given epsilon
    double C1 = 0.0, C2 = 0.0;        // point-form constants (epsilon -> 1)
};

/// Exponent recursion p_{k+1} = p_k (1 + 1/q) + m - 1 in closed form:
/// p_k = (p0 - q(1-m)) (1+1/q)^k + q(1-m).
inline double moser_exponent(double p0, double q, double m, int k) {
    return (p0 - q * (1.0 - m)) * std::pow(1.0 + 1.0 / q, k) + q * (1.0 - m);
}

inline MoserConstants moser_constants(const FdeParams& params, double p, double epsilon,
                                      double alpha = 0.5) {
    if (params.d < 3)
        throw std::invalid_argument("moser_constants: d >= 3 required (q = d/2 normalization)");
    const double m = params.m;
    const double pc = params.p_c();
    if (m <= params.m_c() && !(p > pc))
        throw std::invalid_argument("moser_constants: p > p_c required for m <= m_c");
    if (!(p > 1.0))
        throw std::invalid_argument("moser_constants: p > 1 required (energy constant vanishes at p = 1)");
    if (m < 0 && !(p >= (1.0 + alpha) * (1.0 - m)))
        throw std::invalid_argument("moser_constants: m < 0 requires p >= (1+alpha)(1-m)");
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("moser_constants: epsilon in (0, 1] required");

    MoserConstants mc;
    mc.q = 0.5 * params.d;
    const double q = mc.q;
    const double gap = p - q * (1.0 - m);  // = p - p_c
    if (!(gap > 0)) throw std::invalid_argument("moser_constants: p <= p_c");
    mc.theta_tilde = 1.0 / gap;

    if (m < 0) {
        const double r = -m / (1.0 - m);
        const double other = 2.0 * std::pow(1.0 + (-m) / (alpha * (1.0 - m)), 2.0);
        mc.C_m = std::min(r, other);
    } else {
        mc.C_m = (p - 1.0) / p;
    }
    const double c_psi = detail::quintic_d1_max;  // concrete space-time cutoff slope bound
    mc.C_energy = 2.0 * c_psi * c_psi / mc.C_m;

    const double S2 = sobolev_constant(params.d);
    mc.J0 = 4.0 * S2 * S2;
    mc.series_c1 = 6.0 / (pi * pi);
    mc.series_c2 = 90.0 / (pi * pi * pi * pi);
    const double rho_inv2 = 1.0 / (mc.series_c1 * mc.series_c1);
    const double tau_inv = 1.0 / mc.series_c2;
    mc.J1 = 2.0 * (rho_inv2 + tau_inv) * mc.C_energy;

    // limit of prod_j j^{4 (1+1/q)^{k-j} / p_{k+1}} as k -> infinity
    double series = 0.0;
    const double ratio = 1.0 / (1.0 + 1.0 / q);
    double w = ratio * ratio;  // (1+1/q)^{-j-1} at j = 1
    for (int j = 1; j < 400; ++j) {
        series += w * std::log(double(j));
        w *= ratio;
        if (w < 1e-20) break;
    }
    mc.product_bound = std::exp(4.0 * mc.theta_tilde * series);

    const double geom = 2.0 * std::max(rho_inv2, tau_inv) * mc.C_energy;
    mc.C_loc = std::pow(mc.J0, q * mc.theta_tilde) *
               std::pow(geom, (q + 1.0) * mc.theta_tilde) * mc.product_bound;

    mc.S0 = std::pow(2.0, p / (1.0 - m) - 1.0);
    // collar constant: K_{eps,p} <= p c'_{m,d} eps^{(1-m)/p - 2} with the
    // quintic bound on B_{1+eps} \ B_1
    const double b = 3.0 * p / (1.0 - m);
    const double Ghat = detail::quintic_d1_max * detail::quintic_d1_max + detail::quintic_d2_max +
                        (params.d - 1.0) * detail::quintic_d1_max;
    const double c_prime =
        (1.0 - m) * b * (b - 1.0) * Ghat / ((p + m - 1.0) * p) *
        std::pow(unit_ball_volume(params.d) * (std::pow(2.0, params.d) - 1.0), (1.0 - m) / p);
    mc.K_mdp = mc.S0 / (p / (1.0 - m) + 1.0) * std::pow(p * c_prime, p / (1.0 - m));

    const double kappa = std::max(1.0, std::pow(2.0, mc.theta_tilde - 1.0));
    const double wd = unit_ball_volume(params.d);
    auto cbar = [&](double eps, double& cb1, double& cb2) {
        const double epow = std::pow(eps, -2.0 * (q + 1.0) * mc.theta_tilde);
        cb1 = kappa * std::pow(mc.S0, mc.theta_tilde) * mc.C_loc * epow;
        cb2 = kappa * mc.C_loc * epow *
              std::pow(mc.K_mdp * std::pow(eps, -(2.0 * p / (1.0 - m) - 1.0)) + wd,
                       mc.theta_tilde) *
              std::pow(1.0 + eps, 2.0 / (1.0 - m));
    };
    cbar(epsilon, mc.Cbar1, mc.Cbar2);
    cbar(1.0, mc.C1, mc.C2);
    return mc;
}

// ---------------------------------------------------------------------------
// Critical time t_* (without-inverse-m form).

struct CriticalTime {
    double t_star = 0.0;
    double c0_prime = 0.0;  // t_* = c0' R^{2-d(1-m)} M^{1-m} at this lambda
    double k0 = 0.0;
};

/// t_* = (k0/2) (R0-2R)^2 [M / Vol(B_{R0} \ B_{2R})]^{1-m} with R0 = 2 lambda R.
inline CriticalTime critical_time(const FdeParams& params, double R, double lambda, double M) {
    if (!(lambda > 1.0)) throw std::invalid_argument("critical_time: lambda > 1 required");
    if (!(M > 0) || !(R > 0)) throw std::invalid_argument("critical_time: M, R > 0 required");
    const double R0 = 2.0 * lambda * R;
    const auto cut = cutoff_k0(params.d, R, R0);
    const double volA =
        unit_ball_volume(params.d) * (std::pow(R0, params.d) - std::pow(2.0 * R, params.d));
    CriticalTime out;
    out.k0 = cut.k0;
    out.t_star = 0.5 * cut.k0 * (R0 - 2.0 * R) * (R0 - 2.0 * R) *
                 std::pow(M / volA, 1.0 - params.m);
    out.c0_prime = out.t_star / (std::pow(R, 2.0 - params.d * (1.0 - params.m)) *
                                 std::pow(M, 1.0 - params.m));
    return out;
}

/// Positivity constant c1' of the center lower bound, assembled from
/// k2 = k0/2 and the annulus geometry at lambda = R0/R > 2:
/// u^m(t, 0) >= c1' R^{2-d} ||u0||_1 T^{-1/(1-m)} t^{m/(1-m)}.
inline double positivity_c1_prime(int d, double lambda_over_R /*R0/R*/) {
    if (!(lambda_over_R > 2.0))
        throw std::invalid_argument("positivity_c1_prime: R0/R > 2 required");
    const double l = lambda_over_R;
    const auto cut = cutoff_k0(d, 1.0, l);
    const double k2 = 0.5 * cut.k0;
    return k2 * (l - 2.0) * (l - 2.0) /
           (unit_ball_volume(d) * (std::pow(l, d) - std::pow(2.0, d)));
}

// ---------------------------------------------------------------------------
// Good-range machinery (m_c < m < 1): constructive L^1 -> sup bound and the
// Barenblatt-comparison extinction upper bound.

/// Constructive sup bound for a radially nonincreasing zero-Dirichlet solution
/// on the unit ball whose L^1 norm never exceeds M_bound:
///     sup_{B_1} u(t0) <= good_range_supbound(params, t0, M_bound).
/// Bootstraps the p = 1 case through p1 = m + 2/d (> 1 exactly in the good
/// range) with a nested-cylinder iteration; all constants explicit.
inline double good_range_supbound(const FdeParams& params, double t0, double M_bound) {
    if (!(params.good_range()) || params.d < 3)
        throw std::invalid_argument("good_range_supbound: good range and d >= 3 required");
    if (!(t0 > 0) || !(M_bound > 0))
        throw std::invalid_argument("good_range_supbound: t0, M_bound > 0 required");
    const double m = params.m;
    const double d = params.d;
    const double q = 0.5 * d;
    const double p1 = m + 2.0 / d;          // first Moser exponent from p0 = 1
    const double pc = params.p_c();
    const double tt = 1.0 / (p1 - pc);      // theta_tilde at p1
    const double a = (p1 - 1.0) * tt;       // < 1 in the good range
    if (!(a < 1.0)) throw std::logic_error("good_range_supbound: interpolation exponent >= 1");

    const double s0 = time_to_with_form(params, t0);
    const auto mc = moser_constants(params, p1, 1.0);
    const double wd = unit_ball_volume(params.d);

    const double Bhat = 16.0 * (1.0 + 1.0 / (2.0 * s0));
    const double Chat = mc.C_loc * std::pow(Bhat, (q + 1.0) * tt);
    const double Xhat = 0.5 * s0 * (M_bound + 2.0 * wd);
    const double G = std::pow(4.0, (q + 1.0) * tt);
    const double Gamma = std::pow(G, 1.0 / (1.0 - a));
    const double theta = std::min(0.5, 0.5 / Gamma);
    const double young = (1.0 - a) * std::pow(theta / a, -a / (1.0 - a));
    const double A = young * std::pow(Chat * std::pow(Xhat, tt), 1.0 / (1.0 - a));
    return 2.0 * A + 1.0;  // +1 accounts for v = max(u, 1)
}

/// Barenblatt-comparison coefficient tau(m,d): any radially nonincreasing
/// zero-Dirichlet solution on B_R with ||u0||_{L^1(B_R)} = M (without-form)
/// extinguishes by tau R^{2-d(1-m)} M^{1-m}. Cached per (m, d).
inline double good_range_extinction_upper_coeff(const FdeParams& params) {
    if (!params.good_range() || params.d < 3)
        throw std::invalid_argument("good_range_extinction_upper_coeff: good range, d >= 3");
    static std::map<std::pair<int, double>, double> cache;
    {
        std::lock_guard<std::mutex> lk(detail::const_cache_mutex());
        auto it = cache.find({params.d, params.m});
        if (it != cache.end()) return it->second;
    }
    FdeParams pw = params;
    pw.form = EquationForm::WithoutInverseM;
    double best = std::numeric_limits<double>::infinity();
    const double one_minus_m = 1.0 - params.m;
    for (double r : {1.05, 1.1, 1.25, 1.5, 2.0, 3.0}) {
        const auto prof = separable_profile(pw, r, 2048);
        const double S1 = prof.S(1.0);
        if (!(S1 > 0)) continue;
        for (double t0 : {1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3, 1.0, 3.0}) {
            const double cs = good_range_supbound(pw, t0, 1.0);
            const double T1 = std::pow(cs / S1, one_minus_m) + t0;
            best = std::min(best, T1);
        }
    }
    {
        std::lock_guard<std::mutex> lk(detail::const_cache_mutex());
        cache[{params.d, params.m}] = best;
    }
    return best;
}

/// Good-range center lower bound coefficient: on the minimal problem
/// (supp u0 in B_R, domain B_{3R}), u(t, 0) >= c (t/R^2)^{1/(1-m)} for
/// 0 < t <= t_* (without-form times).
inline double good_range_center_lower_coeff(const FdeParams& params) {
    if (!params.good_range() || params.d < 3)
        throw std::invalid_argument("good_range_center_lower_coeff: good range, d >= 3");
    const double m = params.m;
    const double c1p = positivity_c1_prime(params.d, 3.0);
    const double tau = good_range_extinction_upper_coeff(params);
    // T <= tau (3R)^{2-d(1-m)} M^{1-m} substituted into the positivity bound;
    // the mass and radius powers cancel.
    const double e = (2.0 - params.d * (1.0 - m)) / (1.0 - m);
    const double c_m = c1p * std::pow(tau, -1.0 / (1.0 - m)) * std::pow(3.0, -e);
    return std::pow(c_m, 1.0 / m);
}

// ---------------------------------------------------------------------------
// Named constant set for the CLI.

struct ConstantEntry {
    std::string name;
    double value = 0.0;
    std::string formula_tag;
};

using ConstantSet = std::vector<ConstantEntry>;

inline ConstantSet constant_set(const FdeParams& params, double p, double R, double lambda,
                                double epsilon) {
    params.validate();
    ConstantSet cs;
    auto add = [&](const std::string& n, double v, const std::string& f) {
        cs.push_back({n, v, f});
    };
    const double R0 = 2.0 * lambda * R;
    const auto cut = cutoff_k0(params.d, R, R0);
    add("k0", cut.k0, "quintic cutoff, k0 = (R0-2R)^{-2}/sup|Lap phi|");
    add("k2", 0.5 * cut.k0, "k2 = k0/2");
    const auto ct = critical_time(params, R, lambda, 1.0);
    add("c0_prime", ct.c0_prime, "t_* = c0' R^{2-d(1-m)} M^{1-m}");
    add("c1_prime", positivity_c1_prime(params.d, 2.0 * lambda),
        "center positivity, c1' = k2 (l-2)^2 / (w_d (l^d - 2^d)), l = R0/R");
    if (params.d >= 3) {
        const double S2 = sobolev_constant(params.d);
        add("S2", S2, "Talenti optimal Sobolev constant");
        add("P", poincare_constant(params.d), "1 / first Bessel zero j_{d/2-1,1}");
        if (params.sigma() > 0) add("K_pc", k_pc_constant(params), "universal L^{p_c} decay slope");
        if (p > std::max(params.p_c(), 1.0)) {
            const auto ec = extinction_constants(params, p, 3.0 * R);
            add("K_p", ec.K_p, "L^p decay slope, Dirichlet domain radius 3R");
        }
        if (p >= 1.0 && p > 1.0 - params.m) {
            const auto lp = lp_evolution_constant(params, p, R, R0);
            add("K_R_R0_p", lp.K, "local L^p evolution constant on (R, R0)");
            add("c_md", lp.c_md, "K = p c_md (R0-R)^{-2} Vol^{(1-m)/p}");
        }
        const bool moser_ok =
            p > 1.0 && (params.m > params.m_c() ? true : p > params.p_c()) &&
            (params.m >= 0 || p >= 1.5 * (1.0 - params.m));
        if (moser_ok) {
            const auto mc = moser_constants(params, p, epsilon);
            add("C_m", mc.C_m, "Step-1 structural constant lower bound");
            add("J0", mc.J0, "(2 S2)^2");
            add("J1", mc.J1, "2 (rho^{-2} + tau^{-1}) C_energy, unit cylinder");
            add("series_c1", mc.series_c1, "1 / sum_{k>=1} k^{-2}");
            add("series_c2", mc.series_c2, "1 / sum_{k>=1} k^{-4}");
            add("product_bound", mc.product_bound, "iteration product limit, exponent 4");
            add("C_loc", mc.C_loc, "space-time L^p -> sup constant");
            add("Cbar1", mc.Cbar1, "cylinder smoothing constant at epsilon");
            add("Cbar2", mc.Cbar2, "cylinder boundary-term constant at epsilon");
            add("C1", mc.C1, "point smoothing constant (epsilon -> 1)");
            add("C2", mc.C2, "point boundary-term constant (epsilon -> 1)");
        }
        if (params.good_range()) {
            add("tau_md", good_range_extinction_upper_coeff(params),
                "extinction upper coefficient, comparison with separable solution");
            add("c_gr", good_range_center_lower_coeff(params),
                "good-range lower Harnack coefficient");
        }
    }
    return cs;
}

}  // namespace fdlab
