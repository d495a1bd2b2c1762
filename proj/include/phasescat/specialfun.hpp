#pragma once

#include <complex>

// Cylindrical Bessel and Hankel functions of orders 0 and 1 for real
// nonnegative arguments. All functions are pure and thread-safe.
namespace phasescat::specialfun {

/// Boundary between the backward-recurrence region and the
/// Hankel asymptotic region.
inline constexpr double kAsymptoticThreshold = 25.0;

/// Below this argument the leading terms of the ascending series are used.
inline constexpr double kTinyArgument = 1e-5;

/// J0, J1, Y0, Y1 evaluated together (they share one recurrence).
struct BesselJY01 {
    double j0;
    double j1;
    double y0;
    double y1;
};

/// All four functions at x > 0.
BesselJY01 bessel_jy01(double x);

/// J_order(x), order in {0, 1}, x >= 0.
double bessel_j(int order, double x);

/// Y_order(x), order in {0, 1}, x > 0. Throws DomainError at x <= 0.
double bessel_y(int order, double x);

/// H^(1)_order(x) = J_order(x) + i Y_order(x), x > 0.
std::complex<double> hankel1(int order, double x);

/// H0^(1)(x) and H1^(1)(x) together.
struct Hankel01 {
    std::complex<double> h0;
    std::complex<double> h1;
};
Hankel01 hankel01(double x);

}  // namespace phasescat::specialfun
