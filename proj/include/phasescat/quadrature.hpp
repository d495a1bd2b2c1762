#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>

// Panel quadrature primitives: Gauss-Legendre rules, Lagrange bases on the
// Gauss nodes, logarithmic product-integration weights and adaptive
// integration of basis-weighted kernels.
namespace phasescat::quadrature {

inline constexpr int kPanelOrder = 16;

using Real16 = std::array<double, kPanelOrder>;
using Complex16 = std::array<std::complex<double>, kPanelOrder>;

struct GaussRule {
    Real16 nodes;    // ascending in (-1, 1)
    Real16 weights;
    Real16 bary;     // barycentric weights of the nodes
};

/// The 16-point Gauss-Legendre rule on [-1, 1] (computed once).
const GaussRule& gauss16();

/// Gauss-Legendre nodes and weights of arbitrary order on [-1, 1].
void gauss_legendre(int n, double* nodes, double* weights);

/// Values of the Lagrange basis on the 16 Gauss nodes at u in [-1, 1].
Real16 lagrange_basis(double u);

/// W_j(s) = int_{-1}^{1} l_j(u) ln|u - s| du for s in [-1, 1].
Real16 log_weights(double s);

/// int_{-1}^{1} P_m(u) ln|u - s| du, m >= 0, |s| <= 1.
double legendre_log_moment(int m, double s);

/// Adaptive integral of g(u) * l_j(u) over [lo, hi] within [-1, 1], for all j.
/// g is complex scalar; recursion bisects until two-level Gauss estimates agree.
Complex16 adaptive_basis_integral(const std::function<std::complex<double>(double)>& g, double lo,
                                  double hi, double abs_tol, int max_depth = 50);

}  // namespace phasescat::quadrature
