#include <cmath>
#include <numbers>

#include "phasescat/errors.hpp"
#include "phasescat/solver.hpp"
#include "phasescat/specialfun.hpp"

namespace phasescat::solver {

complex far_field_constant(double k) {
    return std::polar(1.0, std::numbers::pi / 4.0) / std::sqrt(8.0 * std::numbers::pi * k);
}

complex fundamental_2d(double k, const Vec2& x, const Vec2& z) {
    const double r = geometry::distance(x, z);
    if (r == 0.0) throw DomainError("fundamental solution is singular at x = z");
    return complex(0.0, 0.25) * specialfun::hankel1(0, k * r);
}

complex fundamental_far(double k, const Vec2& xhat, const Vec2& z) {
    return far_field_constant(k) * std::polar(1.0, -k * geometry::dot(xhat, z));
}

complex halfplane_green(double k, const Vec2& x, const Vec2& z) {
    const Vec2 zi{z.x, -z.y};
    return fundamental_2d(k, x, z) - fundamental_2d(k, x, zi);
}

IncidentField IncidentField::plane(const Vec2& d, double k) {
    const double len = geometry::norm(d);
    if (std::abs(len - 1.0) > 1e-12) throw ConfigError("plane-wave direction must be a unit vector");
    IncidentField f;
    f.kind = IncidentKind::plane;
    f.direction = d;
    f.k = k;
    return f;
}

IncidentField IncidentField::point(const Vec2& z, double k) {
    IncidentField f;
    f.kind = IncidentKind::point;
    f.z1 = z;
    f.k = k;
    return f;
}

IncidentField IncidentField::superposition(const Vec2& z1, const Vec2& z2, double k) {
    IncidentField f;
    f.kind = IncidentKind::superposition;
    f.z1 = z1;
    f.z2 = z2;
    f.k = k;
    return f;
}

complex incident_eval(const IncidentField& inc, const Vec2& x) {
    switch (inc.kind) {
        case IncidentKind::plane:
            return std::polar(1.0, inc.k * geometry::dot(x, inc.direction));
        case IncidentKind::point:
            return fundamental_2d(inc.k, x, inc.z1);
        case IncidentKind::superposition:
            return fundamental_2d(inc.k, x, inc.z1) + fundamental_2d(inc.k, x, inc.z2);
    }
    return {};
}

}  // namespace phasescat::solver
