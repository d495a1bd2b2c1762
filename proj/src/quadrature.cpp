#include "phasescat/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace phasescat::quadrature {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence, n >= 1.
void legendre_pair(int n, double x, double& pn, double& dpn) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    pn = p1;
    dpn = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

void gauss_legendre(int n, double* nodes, double* weights) {
    for (int i = 0; i < n; ++i) {
        double x = -std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pn = 0.0, dpn = 1.0;
        for (int it = 0; it < 100; ++it) {
            legendre_pair(n, x, pn, dpn);
            const double dx = pn / dpn;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        legendre_pair(n, x, pn, dpn);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dpn * dpn);
    }
}

const GaussRule& gauss16() {
    static const GaussRule rule = [] {
        GaussRule r{};
        gauss_legendre(kPanelOrder, r.nodes.data(), r.weights.data());
        for (int j = 0; j < kPanelOrder; ++j) {
            double prod = 1.0;
            for (int m = 0; m < kPanelOrder; ++m) {
                if (m != j) prod *= (r.nodes[j] - r.nodes[m]);
            }
            r.bary[j] = 1.0 / prod;
        }
        return r;
    }();
    return rule;
}

Real16 lagrange_basis(double u) {
    const auto& g = gauss16();
    Real16 out{};
    for (int j = 0; j < kPanelOrder; ++j) {
        if (u == g.nodes[j]) {
            out[j] = 1.0;
            return out;
        }
    }
    double denom = 0.0;
    for (int j = 0; j < kPanelOrder; ++j) {
        out[j] = g.bary[j] / (u - g.nodes[j]);
        denom += out[j];
    }
    for (auto& v : out) v /= denom;
    return out;
}

namespace {

// x ln x with the limit 0 at x = 0.
double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace

double legendre_log_moment(int m, double s) {
    if (m == 0) return xlogx(1.0 + s) + xlogx(1.0 - s) - 2.0;
    if (std::abs(s) == 1.0) {
        // int P_m(u) ln(1 - u) du = -2 / (m (m + 1)); P_m(-u) = (-1)^m P_m(u).
        const double v = -2.0 / (m * (m + 1.0));
        return (s < 0.0 && m % 2 == 1) ? -v : v;
    }
    // int P_m ln|u-s| = 2/(2m+1) (Q_{m+1}(s) - Q_{m-1}(s)) on the cut |s| < 1.
    const double q0 = 0.5 * std::log((1.0 + s) / (1.0 - s));
    std::vector<double> q(static_cast<std::size_t>(m) + 2);
    q[0] = q0;
    q[1] = s * q0 - 1.0;
    for (int n = 1; n <= m; ++n) {
        q[n + 1] = ((2.0 * n + 1.0) * s * q[n] - n * q[n - 1]) / (n + 1.0);
    }
    return 2.0 / (2.0 * m + 1.0) * (q[m + 1] - q[m - 1]);
}

Real16 log_weights(double s) {
    const auto& g = gauss16();
    // Legendre values P_m(u_j)
    std::array<Real16, kPanelOrder> pm{};
    for (int j = 0; j < kPanelOrder; ++j) {
        const double x = g.nodes[j];
        double p0 = 1.0, p1 = x;
        pm[0][j] = 1.0;
        if (kPanelOrder > 1) pm[1][j] = x;
        for (int m = 2; m < kPanelOrder; ++m) {
            const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
            p0 = p1;
            p1 = p2;
            pm[m][j] = p2;
        }
    }
    Real16 moments{};
    for (int m = 0; m < kPanelOrder; ++m) moments[m] = legendre_log_moment(m, s);
    Real16 w{};
    for (int j = 0; j < kPanelOrder; ++j) {
        double acc = 0.0;
        for (int m = 0; m < kPanelOrder; ++m) {
            acc += (2.0 * m + 1.0) / 2.0 * pm[m][j] * moments[m];
        }
        w[j] = g.weights[j] * acc;
    }
    return w;
}

namespace {

Complex16 gauss_on(const std::function<std::complex<double>(double)>& g, double lo, double hi) {
    const auto& rule = gauss16();
    Complex16 acc{};
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (int q = 0; q < kPanelOrder; ++q) {
        const double u = mid + half * rule.nodes[q];
        const std::complex<double> gv = g(u) * (half * rule.weights[q]);
        const Real16 l = lagrange_basis(u);
        for (int j = 0; j < kPanelOrder; ++j) acc[j] += gv * l[j];
    }
    return acc;
}

double max_diff(const Complex16& a, const Complex16& b) {
    double m = 0.0;
    for (int j = 0; j < kPanelOrder; ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

Complex16 recurse(const std::function<std::complex<double>(double)>& g, double lo, double hi,
                  const Complex16& whole, double tol, double floor, int depth) {
    const double mid = 0.5 * (lo + hi);
    const Complex16 left = gauss_on(g, lo, mid);
    const Complex16 right = gauss_on(g, mid, hi);
    Complex16 sum{};
    for (int j = 0; j < kPanelOrder; ++j) sum[j] = left[j] + right[j];
    if (depth <= 0 || max_diff(sum, whole) <= std::max(tol, floor)) return sum;
    const Complex16 a = recurse(g, lo, mid, left, 0.5 * tol, floor, depth - 1);
    const Complex16 b = recurse(g, mid, hi, right, 0.5 * tol, floor, depth - 1);
    for (int j = 0; j < kPanelOrder; ++j) sum[j] = a[j] + b[j];
    return sum;
}

}  // namespace

Complex16 adaptive_basis_integral(const std::function<std::complex<double>(double)>& g, double lo,
                                  double hi, double abs_tol, int max_depth) {
    const Complex16 whole = gauss_on(g, lo, hi);
    // Rounding floor: refinement cannot resolve differences below a few ulps of the total.
    double scale = 0.0;
    for (const auto& v : whole) scale = std::max(scale, std::abs(v));
    return recurse(g, lo, hi, whole, abs_tol, 1e-15 * scale, max_depth);
}

}  // namespace phasescat::quadrature
