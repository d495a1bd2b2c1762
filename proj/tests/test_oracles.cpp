#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "phasescat/errors.hpp"
#include "phasescat/oracles.hpp"
#include "phasescat/specialfun.hpp"
#include "support/oracles.hpp"

using namespace phasescat;
using namespace phasescat::oracles;
using geometry::Vec2;

namespace {

constexpr double kPi = std::numbers::pi;

// J_n(z) = (1/2pi) int cos(n t - z sin t) dt, valid for complex z.
complex j_trapezoid(int n, complex z) {
    const int m = 96 + 2 * static_cast<int>(std::ceil(std::abs(z) + n));
    complex sum = 0.0;
    for (int j = 0; j < m; ++j) {
        const double t = 2 * kPi * j / m;
        sum += std::cos(static_cast<double>(n) * t - z * std::sin(t));
    }
    return sum / static_cast<double>(m);
}

Vec2 polar(const Vec2& c, double r, double th) { return c + r * Vec2{std::cos(th), std::sin(th)}; }

std::vector<IncidentField> incidents(double k) {
    return {IncidentField::plane({std::cos(0.3), std::sin(0.3)}, k), IncidentField::point({4.0, -1.5}, k)};
}

}  // namespace

TEST_CASE("Bessel J sequences match the trapezoid integral for real and complex arguments") {
    for (complex z : {complex(0.5, 0), complex(7.0, 0), complex(3.0, 0.8), complex(11.0, 2.0)}) {
        const auto seq = bessel_j_sequence(30, z);
        for (int n : {0, 1, 2, 7, 15, 30}) {
            const complex ref = j_trapezoid(n, z);
            CHECK(std::abs(seq[n] - ref) <= 1e-13 * std::max(1.0, std::abs(ref)));
        }
    }
    const auto small = bessel_j_sequence(5, complex(1e-3, 0));
    for (int n : {0, 1}) {
        CHECK(small[n].real() == doctest::Approx(static_cast<double>(testsupport::bessel_j_series(n, 1e-3))).epsilon(1e-15));
    }
    CHECK(small[5].real() == doctest::Approx(std::pow(5e-4, 5) / 120.0).epsilon(1e-6));
}

TEST_CASE("property: Wronskians of the J and Y sequences") {
    for (double x : {0.2, 1.0, 4.5, 13.0, 40.0}) {
        const auto j = bessel_j_sequence(25, complex(x, 0));
        const auto y = bessel_y_sequence(25, x);
        CHECK(y[0] == doctest::Approx(specialfun::bessel_y(0, x)).epsilon(1e-14));
        CHECK(y[1] == doctest::Approx(specialfun::bessel_y(1, x)).epsilon(1e-14));
        for (int n = 0; n < 25; ++n) {
            const double w = j[n + 1].real() * y[n] - j[n].real() * y[n + 1];
            CHECK(w * kPi * x / 2.0 == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
    CHECK_THROWS_AS(bessel_y_sequence(3, 0.0), DomainError);
}

TEST_CASE("mode cutoff") {
    CHECK(min_modes(1.0, 1.0) == 21);
    CHECK(min_modes(10.0, 1.5) == 35);
}

TEST_CASE("property: soft disk total field vanishes on the boundary") {
    const auto spec = DiskSpec::soft({0.4, -0.3}, 1.2);
    for (double k : {0.5, 2.0, 8.0}) {
        for (const auto& inc : incidents(k)) {
            for (double th = 0.0; th < 2 * kPi; th += 0.37) {
                CHECK(std::abs(disk_total(spec, inc, polar(spec.center, spec.radius, th))) <= 1e-12);
            }
        }
    }
}

TEST_CASE("property: impedance disk satisfies du/dr + i k lambda u = 0") {
    const auto spec = DiskSpec::impedance({0, 0}, 1.0, 0.7);
    const double k = 1.5;
    for (const auto& inc : incidents(k)) {
        for (double th = 0.1; th < 2 * kPi; th += 0.5) {
            const Vec2 x = polar(spec.center, spec.radius, th);
            const complex u = disk_total(spec, inc, x);
            const complex du = disk_total_dr(spec, inc, x, false);
            CHECK(std::abs(du + complex(0, k * spec.lambda) * u) <= 1e-11);
            // The series derivative agrees with a finite difference from outside.
            const complex fd = testsupport::derivative(
                [&](double r) { return disk_total(spec, inc, polar(spec.center, r, th)); }, 1.01, 1e-3);
            const complex dr_out = disk_total_dr(spec, inc, polar(spec.center, 1.01, th), false);
            CHECK(std::abs(fd - dr_out) <= 1e-8);
        }
    }
}

TEST_CASE("property: medium disk fields and fluxes are continuous across the interface") {
    for (complex n : {complex(2.0, 0.0), complex(1.3, 0.2)}) {
        const auto spec = DiskSpec::medium({1, 1}, 0.8, n);
        const double k = 2.0;
        for (const auto& inc : incidents(k)) {
            for (double th = 0.2; th < 2 * kPi; th += 0.6) {
                const Vec2 x = polar(spec.center, spec.radius, th);
                const complex out = incident_eval(inc, x) + disk_scattered(spec, inc, x);
                const complex in = disk_interior(spec, inc, x);
                CHECK(std::abs(out - in) <= 1e-11 * std::max(1.0, std::abs(in)));
                CHECK(std::abs(disk_total_dr(spec, inc, x, false) - disk_total_dr(spec, inc, x, true)) <= 1e-10);
            }
        }
    }
    const auto unit = DiskSpec::medium({0, 0}, 1.0, complex(1.0, 0.0));
    const auto inc = IncidentField::plane({1, 0}, 1.0);
    CHECK(std::abs(disk_scattered(unit, inc, {2.0, 0.5})) <= 1e-14);
}

TEST_CASE("property: scattered field solves Helmholtz outside the disk") {
    const auto spec = DiskSpec::impedance({0, 0}, 1.0, 0.3);
    const double k = 3.0, h = 1e-3;
    const auto inc = IncidentField::plane({0, 1}, k);
    const Vec2 x{1.7, -0.9};
    auto u = [&](double dx, double dy) { return disk_scattered(spec, inc, x + Vec2{dx, dy}); };
    const complex lap = (u(h, 0) + u(-h, 0) + u(0, h) + u(0, -h) - 4.0 * u(0, 0)) / (h * h);
    CHECK(std::abs(lap + k * k * u(0, 0)) <= 1e-5);
}

TEST_CASE("disk far field is the limit of the near field") {
    const auto spec = DiskSpec::soft({0.3, 0.2}, 1.0);
    const double k = 2.0;
    const auto inc = IncidentField::plane({1, 0}, k);
    const double r = 1e7;
    for (double th : {0.0, 1.0, 2.5, 4.0}) {
        const Vec2 xhat{std::cos(th), std::sin(th)};
        const complex near = disk_scattered(spec, inc, r * xhat);
        const complex limit = near * std::sqrt(r) * std::exp(complex(0, -k * r));
        CHECK(std::abs(limit - disk_far(spec, inc, xhat)) <= 1e-6);
    }
    const auto pattern = disk_series_far(spec, inc, {{1, 0}, {0, -1}});
    CHECK(pattern.values[1] == disk_far(spec, inc, {0, -1}));
}

TEST_CASE("flat half-plane image solution") {
    const double k = 1.3;
    const Vec2 z{0.4, 2.0};
    CHECK(std::abs(flat_halfplane_exact(k, z, {3.0, 0.0})) == 0.0);
    CHECK(flat_halfplane_exact(k, z, {1.0, 1.0}) == solver::fundamental_2d(k, {1, 1}, z) -
                                                         solver::fundamental_2d(k, {1, 1}, {0.4, -2.0}));
    CHECK_THROWS_AS(flat_halfplane_exact(k, {0, -1}, {1, 1}), DomainError);
}

TEST_CASE("oracle argument checks") {
    const auto inc = IncidentField::plane({1, 0}, 1.0);
    CHECK_THROWS_AS(disk_scattered(DiskSpec::soft({0, 0}, 1.0), inc, {0.5, 0}), DomainError);
    CHECK_THROWS_AS(disk_interior(DiskSpec::soft({0, 0}, 1.0), inc, {0.5, 0}), DomainError);
    CHECK_THROWS_AS(disk_scattered(DiskSpec::medium({0, 0}, 1.0, complex(-1, 0)), inc, {2, 0}), ConfigError);
    CHECK_THROWS_AS(disk_scattered(DiskSpec::soft({0, 0}, 1.0), IncidentField::point({0.2, 0}, 1.0), {2, 0}),
                    DomainError);
}
