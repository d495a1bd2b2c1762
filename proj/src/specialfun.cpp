#include "phasescat/specialfun.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "phasescat/errors.hpp"

namespace phasescat::specialfun {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = std::numbers::egamma;

void check_order(int order) {
    if (order != 0 && order != 1) {
        throw DomainError("Bessel order must be 0 or 1, got " + std::to_string(order));
    }
}

// Leading terms of the ascending series; only used for x < kTinyArgument.
BesselJY01 tiny_series(double x) {
    const double q = 0.25 * x * x;
    const double lg = std::log(0.5 * x) + kEulerGamma;
    BesselJY01 r{};
    r.j0 = 1.0 - q + 0.25 * q * q;
    r.j1 = 0.5 * x * (1.0 - 0.5 * q + q * q / 12.0);
    r.y0 = (2.0 / kPi) * (lg * r.j0 + q - 0.375 * q * q);
    r.y1 = -2.0 / (kPi * x) + (2.0 / kPi) * std::log(0.5 * x) * r.j1 -
           (x / (2.0 * kPi)) * (1.0 - 2.0 * kEulerGamma) +
           (x * x * x / (16.0 * kPi)) * (2.5 - 2.0 * kEulerGamma);
    return r;
}

// Miller backward recurrence normalised by J0 + 2 sum J_2k = 1, with Y0 and
// Y1 from their Neumann series in J_n:
//   Y0 = (2/pi)(ln(x/2)+g) J0 - (4/pi) sum_k (-1)^k J_2k / k
//   Y1 = -2 J0/(pi x) + (2/pi)(ln(x/2)+g-1) J1
//        + (2/pi) sum_k (-1)^(k+1) (2k+1)/(k(k+1)) J_2k+1
BesselJY01 miller(double x) {
    const int start = 2 * static_cast<int>(std::ceil(0.5 * (x + 30.0 + 4.0 * std::cbrt(x))));
    constexpr double kBig = 1e250;
    constexpr double kRescale = 1e-250;

    double f_next = 0.0;    // f_{n+1}
    double f = 1e-30;       // f_n, n = start
    double norm = 0.0;      // f0 + 2 sum f_2k (k >= 1)
    double s_even = 0.0;    // sum (-1)^k f_2k / k
    double s_odd = 0.0;     // sum (-1)^(k+1) (2k+1)/(k(k+1)) f_2k+1

    auto accumulate = [&](int n, double fn) {
        if (n == 0) {
            norm += fn;
        } else if (n % 2 == 0) {
            const int k = n / 2;
            norm += 2.0 * fn;
            s_even += ((k % 2 == 0) ? 1.0 : -1.0) * fn / k;
        } else if (n >= 3) {
            const int k = (n - 1) / 2;
            s_odd += ((k % 2 == 0) ? -1.0 : 1.0) * (2.0 * k + 1.0) / (k * (k + 1.0)) * fn;
        }
    };

    accumulate(start, f);

    for (int n = start; n >= 1; --n) {
        const double f_prev = (2.0 * n / x) * f - f_next;  // f_{n-1}
        f_next = f;
        f = f_prev;
        if (std::abs(f) > kBig) {
            f *= kRescale;
            f_next *= kRescale;
            norm *= kRescale;
            s_even *= kRescale;
            s_odd *= kRescale;
        }
        accumulate(n - 1, f);
    }
    const double f1 = f_next;

    const double j0 = f / norm;
    const double j1 = f1 / norm;
    const double lg = std::log(0.5 * x) + kEulerGamma;
    BesselJY01 r{};
    r.j0 = j0;
    r.j1 = j1;
    r.y0 = (2.0 / kPi) * lg * j0 - (4.0 / kPi) * (s_even / norm);
    r.y1 = -2.0 * j0 / (kPi * x) + (2.0 / kPi) * (lg - 1.0) * j1 + (2.0 / kPi) * (s_odd / norm);
    return r;
}

// Hankel asymptotic expansion for one order: returns (P, Q).
void asymptotic_pq(int order, double x, double& p, double& q) {
    const double mu = 4.0 * order * order;
    p = 1.0;
    q = 0.0;
    double term = 1.0;  // a_k / x^k with alternating signs folded in below
    double last = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (mu - odd * odd) / (8.0 * k * x);
        const double mag = std::abs(term);
        if (mag > last) break;  // asymptotic series started to diverge
        last = mag;
        // k odd -> Q with sign (-1)^((k-1)/2); k even -> P with sign (-1)^(k/2)
        if (k % 2 == 1) {
            q += (((k - 1) / 2) % 2 == 0 ? 1.0 : -1.0) * term;
        } else {
            p += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
        }
        if (mag < 1e-18) break;
    }
}

BesselJY01 asymptotic(double x) {
    const double amp = std::sqrt(2.0 / (kPi * x));
    const double c = std::cos(x);
    const double s = std::sin(x);
    const double r2 = std::numbers::sqrt2 / 2.0;
    // chi0 = x - pi/4, chi1 = x - 3pi/4
    const double cos0 = r2 * (c + s);
    const double sin0 = r2 * (s - c);
    const double cos1 = r2 * (s - c);
    const double sin1 = -r2 * (c + s);
    double p0, q0, p1, q1;
    asymptotic_pq(0, x, p0, q0);
    asymptotic_pq(1, x, p1, q1);
    BesselJY01 r{};
    r.j0 = amp * (p0 * cos0 - q0 * sin0);
    r.y0 = amp * (p0 * sin0 + q0 * cos0);
    r.j1 = amp * (p1 * cos1 - q1 * sin1);
    r.y1 = amp * (p1 * sin1 + q1 * cos1);
    return r;
}

}  // namespace

BesselJY01 bessel_jy01(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError("Bessel Y/H require a finite argument x > 0, got " + std::to_string(x));
    }
    if (x < kTinyArgument) return tiny_series(x);
    if (x <= kAsymptoticThreshold) return miller(x);
    return asymptotic(x);
}

double bessel_j(int order, double x) {
    check_order(order);
    if (x < 0.0 || !std::isfinite(x)) {
        throw DomainError("Bessel J requires a finite argument x >= 0");
    }
    if (x == 0.0) return order == 0 ? 1.0 : 0.0;
    const auto v = bessel_jy01(x);
    return order == 0 ? v.j0 : v.j1;
}

double bessel_y(int order, double x) {
    check_order(order);
    const auto v = bessel_jy01(x);
    return order == 0 ? v.y0 : v.y1;
}

std::complex<double> hankel1(int order, double x) {
    check_order(order);
    const auto v = bessel_jy01(x);
    return order == 0 ? std::complex<double>(v.j0, v.y0) : std::complex<double>(v.j1, v.y1);
}

Hankel01 hankel01(double x) {
    const auto v = bessel_jy01(x);
    return {{v.j0, v.y0}, {v.j1, v.y1}};
}

}  // namespace phasescat::specialfun
