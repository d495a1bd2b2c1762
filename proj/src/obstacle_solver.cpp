#include <cmath>
#include <numbers>
#include <sstream>

#include "phasescat/errors.hpp"
#include "phasescat/solver.hpp"
#include "phasescat/specialfun.hpp"

namespace phasescat::solver {
namespace {

constexpr double kPi = std::numbers::pi;
const complex kI{0.0, 1.0};

// Kress's weights for int_0^{2pi} ln(4 sin^2((t - tau)/2)) f(tau) dtau.
double log_weight(int n, double s) {
    double acc = 0.0;
    for (int m = 1; m < n; ++m) acc += std::cos(m * s) / m;
    return -2.0 * kPi / n * acc - kPi / (static_cast<double>(n) * n) * std::cos(n * s);
}

// Split kernels at (t, x(t)) against node tau_j:
//   K = (L + i eta M) = K1 ln(4 sin^2((t - tau)/2)) + K2.
struct SplitKernel {
    complex k1;
    complex k2;
};

SplitKernel split_kernel(const ObstacleDiscretization& d, double t, const Vec2& xt, const Vec2& dxt,
                         const Vec2& ddxt, int j) {
    const double k = d.k;
    const Vec2 diff = d.x[j] - xt;
    const double r = geometry::norm(diff);
    const Vec2& dy = d.dx[j];
    const double speed = geometry::norm(dy);
    const double s = t - d.t[j];
    const double sin_half = std::sin(0.5 * s);
    constexpr double kEuler = std::numbers::egamma;

    if (r < 1e-12 * speed) {
        const double speed_t = geometry::norm(dxt);
        const double l2 = (dxt.x * ddxt.y - dxt.y * ddxt.x) / (2.0 * kPi * speed_t * speed_t);
        const complex m2 = (kI * 0.5 - kEuler / kPi - std::log(0.5 * k * speed_t) / kPi) * speed_t;
        const double m1 = -speed_t / (2.0 * kPi);
        return {kI * d.eta * m1, l2 + kI * d.eta * m2};
    }
    const auto jy = specialfun::bessel_jy01(k * r);
    const complex h0(jy.j0, jy.y0), h1(jy.j1, jy.y1);
    const double ndiff = dy.y * diff.x - dy.x * diff.y;  // n(tau) . (x(tau) - x(t)), n = (x2', -x1')
    const complex l = kI * (0.5 * k) * ndiff * h1 / r;
    const double l1 = -k / (2.0 * kPi) * ndiff * jy.j1 / r;
    const complex m = kI * 0.5 * h0 * speed;
    const double m1 = -jy.j0 * speed / (2.0 * kPi);
    const double lg = std::log(4.0 * sin_half * sin_half);
    return {l1 + kI * d.eta * m1, (l - l1 * lg) + kI * d.eta * (m - m1 * lg)};
}

}  // namespace

SoftObstacleSolver::SoftObstacleSolver(const geometry::BoundaryCurve& curve, double k) {
    if (!(k > 0.0)) throw ConfigError("wavenumber must be positive");
    auto disc = std::make_shared<ObstacleDiscretization>(ObstacleDiscretization{curve, k, k, {}, {}, {}, {}});
    disc->t = curve.node_params();
    for (double t : disc->t) {
        disc->x.push_back(curve.point(t));
        disc->dx.push_back(curve.d1(t));
        disc->ddx.push_back(curve.d2(t));
    }
    const int size = curve.nodes();
    const int n = size / 2;
    std::vector<double> rw(size);
    for (int m = 0; m < size; ++m) rw[m] = log_weight(n, kPi * m / n);

    Eigen::MatrixXcd a(size, size);
    for (int i = 0; i < size; ++i) {
        for (int j = 0; j < size; ++j) {
            const auto sk = split_kernel(*disc, disc->t[i], disc->x[i], disc->dx[i], disc->ddx[i], j);
            const int lag = (i - j + size) % size;
            a(i, j) = (i == j ? 1.0 : 0.0) - (rw[lag] * sk.k1 + (kPi / n) * sk.k2);
        }
    }
    lu_.compute(a);
    rcond_ = lu_.rcond();
    if (!(rcond_ > 1e-14)) {
        std::ostringstream os;
        os << "Nystrom matrix singular to working precision (rcond = " << rcond_ << ")";
        throw SolverError(os.str(), rcond_);
    }
    disc_ = std::move(disc);
}

ObstacleDensity SoftObstacleSolver::solve(const IncidentField& inc) const {
    if (inc.k != disc_->k) throw ConfigError("incident wavenumber differs from the solver wavenumber");
    auto check_source = [&](const Vec2& z) {
        if (disc_->curve.contains(z) || disc_->curve.distance_to(z) < 1e-12) {
            throw DomainError("point source lies on or inside the obstacle");
        }
    };
    if (inc.kind != IncidentKind::plane) check_source(inc.z1);
    if (inc.kind == IncidentKind::superposition) check_source(inc.z2);
    const int size = static_cast<int>(disc_->x.size());
    Eigen::VectorXcd rhs(size);
    for (int i = 0; i < size; ++i) rhs(i) = -2.0 * incident_eval(inc, disc_->x[i]);
    const Eigen::VectorXcd psi = lu_.solve(rhs);
    ObstacleDensity out{disc_, std::vector<complex>(psi.data(), psi.data() + size)};
    return out;
}

ObstacleDensity solve_soft_obstacle(const geometry::BoundaryCurve& curve, const IncidentField& inc) {
    return SoftObstacleSolver(curve, inc.k).solve(inc);
}

complex scattered_near(const ObstacleDensity& density, const Vec2& x) {
    const auto& d = *density.disc;
    const double dist = d.curve.distance_to(x);
    if (d.curve.contains(x) || dist < 1e-12) {
        throw DomainError("scattered field requested on or inside the obstacle boundary");
    }
    const int size = static_cast<int>(d.x.size());
    const double h = 2.0 * kPi / size;
    complex acc{};
    for (int j = 0; j < size; ++j) {
        const Vec2 diff = d.x[j] - x;
        const double r = geometry::norm(diff);
        const auto jy = specialfun::bessel_jy01(d.k * r);
        const complex h0(jy.j0, jy.y0), h1(jy.j1, jy.y1);
        const Vec2& dy = d.dx[j];
        const double ndiff = dy.y * diff.x - dy.x * diff.y;
        const complex dl = -kI * (0.25 * d.k) * h1 * ndiff / r;
        const complex sl = kI * 0.25 * h0 * geometry::norm(dy);
        acc += (dl - kI * d.eta * sl) * density.psi[j];
    }
    return h * acc;
}

complex scattered_far(const ObstacleDensity& density, const Vec2& xhat) {
    if (std::abs(geometry::norm(xhat) - 1.0) > 1e-12) throw DomainError("far-field direction must be a unit vector");
    const auto& d = *density.disc;
    const int size = static_cast<int>(d.x.size());
    complex acc{};
    for (int j = 0; j < size; ++j) {
        const Vec2& dy = d.dx[j];
        const double n_dot = dy.y * xhat.x - dy.x * xhat.y;
        const complex weight = -kI * d.k * n_dot - kI * d.eta * geometry::norm(dy);
        acc += weight * std::polar(1.0, -d.k * geometry::dot(xhat, d.x[j])) * density.psi[j];
    }
    return far_field_constant(d.k) * (2.0 * kPi / size) * acc;
}

complex boundary_scattered(const ObstacleDensity& density, double t) {
    const auto& d = *density.disc;
    const int size = static_cast<int>(d.x.size());
    const int n = size / 2;
    // Trigonometric interpolant of psi at t.
    complex psi_t{};
    for (int j = 0; j < size; ++j) {
        const double s = t - d.t[j];
        double kernel = 1.0 + std::cos(n * s);
        for (int m = 1; m < n; ++m) kernel += 2.0 * std::cos(m * s);
        psi_t += kernel / size * density.psi[j];
    }
    const Vec2 xt = d.curve.point(t), dxt = d.curve.d1(t), ddxt = d.curve.d2(t);
    complex integral{};
    for (int j = 0; j < size; ++j) {
        const auto sk = split_kernel(d, t, xt, dxt, ddxt, j);
        integral += (log_weight(n, t - d.t[j]) * sk.k1 + (kPi / n) * sk.k2) * density.psi[j];
    }
    return 0.5 * (psi_t - integral);
}

}  // namespace phasescat::solver
