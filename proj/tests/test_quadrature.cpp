#include <doctest.h>

#include <cmath>
#include <complex>

#include "phasescat/quadrature.hpp"
#include "support/oracles.hpp"

using namespace phasescat;
using quadrature::kPanelOrder;

TEST_CASE("gauss16 integrates polynomials of degree 31 exactly") {
    const auto& g = quadrature::gauss16();
    for (int p = 0; p <= 31; ++p) {
        double sum = 0.0;
        for (int j = 0; j < kPanelOrder; ++j) sum += g.weights[j] * std::pow(g.nodes[j], p);
        const double exact = (p % 2 == 1) ? 0.0 : 2.0 / (p + 1);
        CHECK(std::abs(sum - exact) <= 1e-14);
    }
    for (int j = 1; j < kPanelOrder; ++j) CHECK(g.nodes[j] > g.nodes[j - 1]);
}

TEST_CASE("general gauss_legendre matches gauss16 and integrates exp") {
    double x[16], w[16];
    quadrature::gauss_legendre(16, x, w);
    for (int j = 0; j < 16; ++j) {
        CHECK(x[j] == doctest::Approx(quadrature::gauss16().nodes[j]).epsilon(1e-15));
        CHECK(w[j] == doctest::Approx(quadrature::gauss16().weights[j]).epsilon(1e-14));
    }
    double xs[9], ws[9];
    quadrature::gauss_legendre(9, xs, ws);
    double sum = 0.0;
    for (int j = 0; j < 9; ++j) sum += ws[j] * std::exp(xs[j]);
    CHECK(sum == doctest::Approx(std::exp(1.0) - std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("property: Lagrange basis is a partition of unity and reproduces u^15") {
    for (double u : {-1.0, -0.913, -0.2, 0.0, 0.37, 0.999, 1.0}) {
        const auto l = quadrature::lagrange_basis(u);
        double sum = 0.0, poly = 0.0;
        for (int j = 0; j < kPanelOrder; ++j) {
            sum += l[j];
            poly += l[j] * std::pow(quadrature::gauss16().nodes[j], 15);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(poly == doctest::Approx(std::pow(u, 15)).epsilon(1e-12).scale(1.0));
    }
    const auto at_node = quadrature::lagrange_basis(quadrature::gauss16().nodes[4]);
    for (int j = 0; j < kPanelOrder; ++j) CHECK(at_node[j] == doctest::Approx(j == 4 ? 1.0 : 0.0).scale(1.0));
}

TEST_CASE("Legendre log moments match brute-force quadrature") {
    for (double s : {-1.0, -0.71, 0.0, 0.2, 0.93, 1.0}) {
        for (int m : {0, 1, 2, 5, 15}) {
            const double ref = static_cast<double>(
                testsupport::log_integral([m](long double u) { return testsupport::legendre(m, u); }, s));
            CHECK(std::abs(quadrature::legendre_log_moment(m, s) - ref) <= 1e-13);
        }
    }
}

TEST_CASE("log weights match brute-force quadrature of each basis function") {
    const auto& g = quadrature::gauss16();
    for (double s : {-1.0, g.nodes[0], -0.5, g.nodes[7], 0.31, 1.0}) {
        const auto w = quadrature::log_weights(s);
        for (int j = 0; j < kPanelOrder; ++j) {
            auto basis = [&](long double u) {
                long double v = 1.0L;
                for (int i = 0; i < kPanelOrder; ++i) {
                    if (i != j) v *= (u - g.nodes[i]) / (g.nodes[j] - g.nodes[i]);
                }
                return v;
            };
            const double ref = static_cast<double>(testsupport::log_integral(basis, s));
            CHECK(std::abs(w[j] - ref) <= 1e-12);
        }
    }
}

TEST_CASE("property: log weights integrate degree-15 polynomials times ln|u - s| exactly") {
    const double s = 0.137;
    const auto w = quadrature::log_weights(s);
    double approx = 0.0;
    for (int j = 0; j < kPanelOrder; ++j) {
        const double u = quadrature::gauss16().nodes[j];
        approx += w[j] * (std::pow(u, 15) - 0.3 * std::pow(u, 7) + 2.0);
    }
    const double ref = static_cast<double>(
        testsupport::log_integral([](long double u) { return std::pow(u, 15) - 0.3L * std::pow(u, 7) + 2.0L; }, s));
    CHECK(std::abs(approx - ref) <= 1e-13);
}

TEST_CASE("adaptive basis integral resolves a near-singular kernel") {
    const double d = 1e-3;
    auto g = [d](double u) { return std::complex<double>(1.0 / ((u - 0.2) * (u - 0.2) + d * d), 0.0); };
    const auto w = quadrature::adaptive_basis_integral(g, -1.0, 1.0, 1e-13);
    std::complex<double> sum = 0.0;
    for (const auto& v : w) sum += v;  // partition of unity: int g
    const double exact = (std::atan(0.8 / d) + std::atan(1.2 / d)) / d;
    CHECK(std::abs(sum.real() - exact) <= 1e-10 * exact);
}
