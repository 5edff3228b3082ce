#pragma once

// Bessel functions of the first kind by power series, plus the first positive
// zero j_{nu,1}. Only small arguments are needed here (first Dirichlet
// eigenvalue of the unit ball), where the alternating series is well behaved.

#include <cmath>
#include <stdexcept>

namespace fdlab {

/// J_nu(x) via the ascending series, accurate for moderate x (x ~< 30).
inline double bessel_j(double nu, double x) {
    if (!(x > 0)) throw std::invalid_argument("bessel_j: x > 0 required");
    const double lx = std::log(0.5 * x);
    double sum = 0.0;
    for (int k = 0; k < 200; ++k) {
        // (-1)^k / (k! Gamma(k+nu+1)) (x/2)^{2k+nu}
        const double lt = (2.0 * k + nu) * lx - std::lgamma(k + 1.0) - std::lgamma(k + nu + 1.0);
        const double term = std::exp(lt);
        sum += (k % 2 == 0) ? term : -term;
        if (k > 4 && term < 1e-18 * std::abs(sum) + 1e-300) break;
    }
    return sum;
}

/// First positive zero of J_nu, nu > -1, by scan + bisection.
inline double bessel_first_zero(double nu) {
    if (!(nu > -1.0)) throw std::invalid_argument("bessel_first_zero: nu > -1 required");
    // J_nu > 0 just right of the origin; scan outward for the sign change.
    double a = 1e-3;
    double fa = bessel_j(nu, a);
    const double step = 0.05;
    double b = a;
    double fb = fa;
    for (int i = 0; i < 100000; ++i) {
        b += step;
        fb = bessel_j(nu, b);
        if (fa > 0 && fb <= 0) break;
        a = b;
        fa = fb;
    }
    if (!(fa > 0 && fb <= 0)) throw std::runtime_error("bessel_first_zero: bracket not found");
    for (int it = 0; it < 200; ++it) {
        const double c = 0.5 * (a + b);
        const double fc = bessel_j(nu, c);
        if (fc > 0) a = c; else b = c;
        if (b - a < 1e-14 * b) break;
    }
    return 0.5 * (a + b);
}

}  // namespace fdlab
