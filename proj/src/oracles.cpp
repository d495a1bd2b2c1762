#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "phasescat/errors.hpp"
#include "phasescat/oracles.hpp"
#include "phasescat/specialfun.hpp"

namespace phasescat::oracles {
namespace {

constexpr double kPi = std::numbers::pi;
const complex kI{0.0, 1.0};
constexpr double kTailTol = 1e-13;

complex i_pow(int n) {
    switch (((n % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

// Derivatives from the sequence: C_0' = -C_1, C_n' = C_{n-1} - (n/z) C_n.
template <class T, class Z>
std::vector<T> derivatives(const std::vector<T>& c, Z z) {
    std::vector<T> d(c.size() - 1);
    d[0] = -c[1];
    for (std::size_t n = 1; n < d.size(); ++n) d[n] = c[n - 1] - (static_cast<double>(n) / z) * c[n];
    return d;
}

std::vector<complex> hankel_sequence(int nmax, double x) {
    if (x > nmax + 1.0) {
        // Every order is oscillatory here, so the upward recurrence is stable
        // and avoids a backward J recurrence of length O(x) at far receivers.
        const auto h01 = specialfun::hankel01(x);
        std::vector<complex> h(nmax + 1);
        h[0] = h01.h0;
        if (nmax >= 1) h[1] = h01.h1;
        for (int n = 1; n < nmax; ++n) h[n + 1] = (2.0 * n / x) * h[n] - h[n - 1];
        return h;
    }
    const auto j = bessel_j_sequence(nmax, complex(x, 0.0));
    const auto y = bessel_y_sequence(nmax, x);
    std::vector<complex> h(nmax + 1);
    for (int n = 0; n <= nmax; ++n) h[n] = complex(j[n].real(), y[n]);
    return h;
}

struct Polar {
    double r;
    double theta;
};

Polar to_polar(const Vec2& v) { return {geometry::norm(v), std::atan2(v.y, v.x)}; }

void check_spec(const DiskSpec& spec, double k) {
    if (!(spec.radius > 0.0)) throw ConfigError("disk radius must be positive");
    if (!(k > 0.0)) throw ConfigError("wavenumber must be positive");
    if (spec.bc == DiskBc::medium && !(spec.index.real() > 0.0 && spec.index.imag() >= 0.0)) {
        throw ConfigError("refractive index needs Re n > 0 and Im n >= 0");
    }
}

// Incident coefficients c_n (n = -nmax..nmax) about the disk center with
// u^i = sum c_n J_|n|(k r) e^{i n theta}.
std::vector<complex> incident_coefficients(const DiskSpec& spec, const IncidentField& inc, int nmax) {
    std::vector<complex> c(2 * nmax + 1);
    auto add_point = [&](const Vec2& z) {
        const auto pz = to_polar(z - spec.center);
        if (!(pz.r > spec.radius)) throw DomainError("point source must lie outside the disk");
        const auto h = hankel_sequence(nmax, inc.k * pz.r);
        for (int n = -nmax; n <= nmax; ++n) {
            c[n + nmax] += 0.25 * kI * h[std::abs(n)] * std::polar(1.0, -n * pz.theta);
        }
    };
    switch (inc.kind) {
        case IncidentKind::plane: {
            const double theta_d = std::atan2(inc.direction.y, inc.direction.x);
            const complex shift = std::polar(1.0, inc.k * geometry::dot(inc.direction, spec.center));
            for (int n = -nmax; n <= nmax; ++n) c[n + nmax] = shift * i_pow(std::abs(n)) * std::polar(1.0, -n * theta_d);
            break;
        }
        case IncidentKind::point:
            add_point(inc.z1);
            break;
        case IncidentKind::superposition:
            add_point(inc.z1);
            add_point(inc.z2);
            break;
    }
    return c;
}

// Per-order data at the boundary: scattered coefficient a_n = s_n c_n / H_n(ka)
// and interior coefficient b_n = q_n c_n / H_n(ka) (medium only).
struct ModalData {
    std::vector<complex> s;
    std::vector<complex> q;
    std::vector<complex> h_ka;
    complex kappa;
};

ModalData modal_data(const DiskSpec& spec, double k, int nmax) {
    const double ka = k * spec.radius;
    ModalData m;
    m.h_ka = hankel_sequence(nmax + 1, ka);
    const auto j = bessel_j_sequence(nmax + 1, complex(ka, 0.0));
    const auto dj = derivatives(j, ka);
    const auto dh = derivatives(m.h_ka, ka);
    m.s.resize(nmax + 1);
    m.q.resize(nmax + 1);
    m.kappa = k * std::sqrt(spec.index);
    std::vector<complex> jk, djk;
    if (spec.bc == DiskBc::medium) {
        jk = bessel_j_sequence(nmax + 1, m.kappa * spec.radius);
        djk = derivatives(jk, m.kappa * spec.radius);
    }
    for (int n = 0; n <= nmax; ++n) {
        switch (spec.bc) {
            case DiskBc::soft:
                m.s[n] = -j[n];
                break;
            case DiskBc::impedance: {
                const complex lam = kI * spec.lambda;
                m.s[n] = -(dj[n] + lam * j[n]) * m.h_ka[n] / (dh[n] + lam * m.h_ka[n]);
                break;
            }
            case DiskBc::medium: {
                // Continuity of u and du/dr at r = a, scaled by H_n(ka).
                const complex ratio = dh[n] / m.h_ka[n];
                const complex det = m.kappa * djk[n] - k * jk[n] * ratio;
                m.s[n] = (k * jk[n] * dj[n] - m.kappa * djk[n] * j[n]) / det;
                m.q[n] = complex(0.0, -2.0 / (kPi * spec.radius)) / det;
                break;
            }
        }
    }
    return m;
}

struct Evaluation {
    complex value;
    complex dr;
};

// Exterior or interior modal sum at polar point (r, theta).
struct ModalSum {
    const DiskSpec& spec;
    const IncidentField& inc;
    Polar at;
    bool inside;
    Evaluation tail{};

    Evaluation operator()(int nmax) {
        const double k = inc.k;
        const auto c = incident_coefficients(spec, inc, nmax);
        const auto m = modal_data(spec, k, nmax);
        std::vector<complex> radial, dradial;
        complex scale;
        if (inside) {
            const complex z = m.kappa * at.r;
            radial = bessel_j_sequence(nmax + 1, z);
            if (at.r > 0.0) {
                dradial = derivatives(radial, z);
            } else {
                dradial.assign(nmax + 1, complex{});
                dradial[1] = 0.5;
            }
            scale = m.kappa;
        } else {
            radial = hankel_sequence(nmax + 1, k * at.r);
            dradial = derivatives(radial, k * at.r);
            scale = k;
        }
        Evaluation e{};
        tail = {};
        for (int n = -nmax; n <= nmax; ++n) {
            const int an = std::abs(n);
            const complex coef = (inside ? m.q[an] : m.s[an]) * (c[n + nmax] / m.h_ka[an]);
            // The ratio radial/H(ka) keeps exterior terms bounded for large orders.
            const complex ang = std::polar(1.0, n * at.theta);
            const complex v = coef * radial[an] * ang;
            const complex dv = coef * scale * dradial[an] * ang;
            e.value += v;
            e.dr += dv;
            if (an == nmax) {
                tail.value += v;
                tail.dr += dv;
            }
        }
        return e;
    }
};

Evaluation evaluate(const DiskSpec& spec, const IncidentField& inc, const Vec2& x, bool inside) {
    check_spec(spec, inc.k);
    const Polar p = to_polar(x - spec.center);
    if (inside) {
        if (spec.bc != DiskBc::medium) throw DomainError("interior field exists only for a medium disk");
        if (p.r > spec.radius * (1.0 + 1e-12)) throw DomainError("point lies outside the disk");
    } else if (p.r < spec.radius * (1.0 - 1e-12)) {
        throw DomainError("scattered field requested inside the disk");
    }
    ModalSum sum{spec, inc, p, inside};
    int nmax = min_modes(inc.k, spec.radius);
    while (true) {
        const int cap = std::min(nmax, kMaxModes);
        const Evaluation e = sum(cap);
        const bool finite = std::isfinite(std::abs(e.value)) && std::isfinite(std::abs(e.dr)) &&
                            std::isfinite(std::abs(sum.tail.value)) && std::isfinite(std::abs(sum.tail.dr));
        if (finite && std::abs(sum.tail.value) <= kTailTol * std::abs(e.value) &&
            std::abs(sum.tail.dr) <= kTailTol * std::abs(e.dr)) {
            return e;
        }
        if (cap == kMaxModes) {
            std::ostringstream os;
            os << "disk series did not converge within " << kMaxModes << " modes";
            throw TruncationError(os.str());
        }
        nmax += 20;
    }
}

complex incident_dr(const IncidentField& inc, const DiskSpec& spec, const Vec2& x) {
    const Vec2 rhat = (1.0 / geometry::norm(x - spec.center)) * (x - spec.center);
    auto point_dr = [&](const Vec2& z) {
        const Vec2 diff = x - z;
        const double r = geometry::norm(diff);
        return -kI * (0.25 * inc.k) * specialfun::hankel1(1, inc.k * r) * geometry::dot(diff, rhat) / r;
    };
    switch (inc.kind) {
        case IncidentKind::plane:
            return kI * inc.k * geometry::dot(inc.direction, rhat) * solver::incident_eval(inc, x);
        case IncidentKind::point:
            return point_dr(inc.z1);
        case IncidentKind::superposition:
            return point_dr(inc.z1) + point_dr(inc.z2);
    }
    return {};
}

}  // namespace

DiskSpec DiskSpec::soft(const Vec2& center, double radius) {
    DiskSpec s;
    s.center = center;
    s.radius = radius;
    return s;
}

DiskSpec DiskSpec::impedance(const Vec2& center, double radius, double lambda) {
    DiskSpec s = soft(center, radius);
    s.bc = DiskBc::impedance;
    s.lambda = lambda;
    return s;
}

DiskSpec DiskSpec::medium(const Vec2& center, double radius, complex index) {
    DiskSpec s = soft(center, radius);
    s.bc = DiskBc::medium;
    s.index = index;
    return s;
}

int min_modes(double k, double radius) { return static_cast<int>(std::ceil(k * radius)) + 20; }

std::vector<complex> bessel_j_sequence(int nmax, complex z) {
    if (nmax < 0) throw DomainError("sequence length must be nonnegative");
    std::vector<complex> out(nmax + 1);
    const double az = std::abs(z);
    if (az == 0.0) {
        out[0] = 1.0;
        return out;
    }
    int start = static_cast<int>(std::max<double>(nmax, az) + 30.0 + 4.0 * std::cbrt(az) + az);
    start += start % 2;
    std::vector<complex> f(start + 2);
    f[start + 1] = 0.0;
    f[start] = 1e-30;
    complex norm_sum{};
    for (int n = start; n >= 1; --n) {
        f[n - 1] = (2.0 * n / z) * f[n] - f[n + 1];
        if (std::abs(f[n - 1]) > 1e250) {
            for (int m = n - 1; m <= start + 1; ++m) f[m] *= 1e-250;
            norm_sum *= 1e-250;
        }
        if ((n - 1) % 2 == 0 && n - 1 > 0) norm_sum += 2.0 * f[n - 1];
    }
    norm_sum += f[0];
    for (int n = 0; n <= nmax; ++n) out[n] = f[n] / norm_sum;
    return out;
}

std::vector<double> bessel_y_sequence(int nmax, double x) {
    if (nmax < 0) throw DomainError("sequence length must be nonnegative");
    if (!(x > 0.0)) throw DomainError("Y_n requires a positive argument");
    const auto jy = specialfun::bessel_jy01(x);
    std::vector<double> y(nmax + 1);
    y[0] = jy.y0;
    if (nmax >= 1) y[1] = jy.y1;
    for (int n = 1; n < nmax; ++n) y[n + 1] = (2.0 * n / x) * y[n] - y[n - 1];
    return y;
}

std::vector<complex> disk_coefficients(const DiskSpec& spec, const IncidentField& inc, int nmax) {
    check_spec(spec, inc.k);
    const auto c = incident_coefficients(spec, inc, nmax);
    const auto m = modal_data(spec, inc.k, nmax);
    std::vector<complex> a(2 * nmax + 1);
    for (int n = -nmax; n <= nmax; ++n) a[n + nmax] = m.s[std::abs(n)] * c[n + nmax] / m.h_ka[std::abs(n)];
    return a;
}

complex disk_scattered(const DiskSpec& spec, const IncidentField& inc, const Vec2& x) {
    return evaluate(spec, inc, x, false).value;
}

complex disk_interior(const DiskSpec& spec, const IncidentField& inc, const Vec2& x) {
    return evaluate(spec, inc, x, true).value;
}

complex disk_series_field(const DiskSpec& spec, const IncidentField& inc, const Vec2& x) {
    const bool inside = spec.bc == DiskBc::medium && geometry::distance(x, spec.center) < spec.radius;
    return evaluate(spec, inc, x, inside).value;
}

complex disk_total(const DiskSpec& spec, const IncidentField& inc, const Vec2& x) {
    const bool inside = spec.bc == DiskBc::medium && geometry::distance(x, spec.center) < spec.radius;
    if (inside) return evaluate(spec, inc, x, true).value;
    return solver::incident_eval(inc, x) + evaluate(spec, inc, x, false).value;
}

complex disk_total_dr(const DiskSpec& spec, const IncidentField& inc, const Vec2& x, bool inside) {
    if (inside) return evaluate(spec, inc, x, true).dr;
    return incident_dr(inc, spec, x) + evaluate(spec, inc, x, false).dr;
}

complex disk_far(const DiskSpec& spec, const IncidentField& inc, const Vec2& xhat) {
    check_spec(spec, inc.k);
    if (std::abs(geometry::norm(xhat) - 1.0) > 1e-12) throw DomainError("far-field direction must be a unit vector");
    const double k = inc.k;
    const double theta = std::atan2(xhat.y, xhat.x);
    // H_n(kr) ~ sqrt(2/(pi k r)) e^{i(kr - n pi/2 - pi/4)}; the center shift adds e^{-ik xhat.c}.
    const complex prefactor = std::sqrt(2.0 / (kPi * k)) * std::polar(1.0, -kPi / 4.0) *
                              std::polar(1.0, -k * geometry::dot(xhat, spec.center));
    int nmax = min_modes(k, spec.radius);
    while (true) {
        const int cap = std::min(nmax, kMaxModes);
        const auto c = incident_coefficients(spec, inc, cap);
        const auto m = modal_data(spec, k, cap);
        complex sum{}, tail{};
        for (int n = -cap; n <= cap; ++n) {
            const int an = std::abs(n);
            const complex v = m.s[an] * (c[n + cap] / m.h_ka[an]) * i_pow(-an) * std::polar(1.0, n * theta);
            sum += v;
            if (an == cap) tail += v;
        }
        if (std::isfinite(std::abs(sum)) && std::isfinite(std::abs(tail)) && std::abs(tail) <= kTailTol * std::abs(sum)) {
            return prefactor * sum;
        }
        if (cap == kMaxModes) {
            std::ostringstream os;
            os << "disk far-field series did not converge within " << kMaxModes << " modes";
            throw TruncationError(os.str());
        }
        nmax += 20;
    }
}

FarFieldPattern disk_series_far(const DiskSpec& spec, const IncidentField& inc, const std::vector<Vec2>& directions) {
    FarFieldPattern out;
    out.directions = directions;
    out.values.reserve(directions.size());
    for (const auto& d : directions) out.values.push_back(disk_far(spec, inc, d));
    return out;
}

complex flat_halfplane_exact(double k, const Vec2& z, const Vec2& x) {
    if (!(z.y > 0.0) || x.y < 0.0) throw DomainError("half-plane solution needs z2 > 0 and x2 >= 0");
    const auto h = [&](const Vec2& a, const Vec2& b) {
        const double r = std::hypot(a.x - b.x, a.y - b.y);
        if (r == 0.0) throw DomainError("field requested at the source point");
        return complex(0.0, 0.25) * complex(specialfun::bessel_j(0, k * r), specialfun::bessel_y(0, k * r));
    };
    return h(x, z) - h(x, Vec2{z.x, -z.y});
}

}  // namespace phasescat::oracles
