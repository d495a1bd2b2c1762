#include "phasescat/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <sstream>

#include "phasescat/errors.hpp"

namespace phasescat::geometry {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kOutlineSamples = 2048;

double wrap_to_two_pi(double t) {
    t = std::fmod(t, kTwoPi);
    return t < 0.0 ? t + kTwoPi : t;
}

}  // namespace

std::string to_string(CurveKind kind) {
    switch (kind) {
        case CurveKind::circle: return "circle";
        case CurveKind::ellipse: return "ellipse";
        case CurveKind::kite: return "kite";
    }
    return "unknown";
}

CurveKind curve_kind_from_string(const std::string& name) {
    if (name == "circle") return CurveKind::circle;
    if (name == "ellipse") return CurveKind::ellipse;
    if (name == "kite") return CurveKind::kite;
    throw ConfigError("unknown curve kind '" + name + "'");
}

BoundaryCurve::BoundaryCurve(CurveKind kind, CurveParams params, int nodes)
    : kind_(kind), params_(params), nodes_(nodes) {
    if (nodes < 16 || nodes % 2 != 0) {
        throw ConfigError("curve node count must be even and >= 16, got " + std::to_string(nodes));
    }
    switch (kind) {
        case CurveKind::circle:
            if (!(params.radius_x > 0.0)) throw ConfigError("circle radius must be positive");
            break;
        case CurveKind::ellipse:
            if (!(params.radius_x > 0.0) || !(params.radius_y > 0.0)) {
                throw ConfigError("ellipse semi-axes must be positive");
            }
            break;
        case CurveKind::kite:
            if (!(params.scale > 0.0)) throw ConfigError("kite scale must be positive");
            break;
    }
    outline_.reserve(kOutlineSamples);
    for (int i = 0; i < kOutlineSamples; ++i) {
        outline_.push_back(point(kTwoPi * i / kOutlineSamples));
    }
}

Vec2 BoundaryCurve::point(double t) const {
    const double c = std::cos(t), s = std::sin(t);
    switch (kind_) {
        case CurveKind::circle:
            return params_.center + Vec2{params_.radius_x * c, params_.radius_x * s};
        case CurveKind::ellipse:
            return params_.center + Vec2{params_.radius_x * c, params_.radius_y * s};
        case CurveKind::kite:
            return params_.center +
                   params_.scale * Vec2{c + 0.65 * std::cos(2.0 * t) - 0.65, 1.5 * s};
    }
    return {};
}

Vec2 BoundaryCurve::d1(double t) const {
    const double c = std::cos(t), s = std::sin(t);
    switch (kind_) {
        case CurveKind::circle: return {-params_.radius_x * s, params_.radius_x * c};
        case CurveKind::ellipse: return {-params_.radius_x * s, params_.radius_y * c};
        case CurveKind::kite:
            return params_.scale * Vec2{-s - 1.3 * std::sin(2.0 * t), 1.5 * c};
    }
    return {};
}

Vec2 BoundaryCurve::d2(double t) const {
    const double c = std::cos(t), s = std::sin(t);
    switch (kind_) {
        case CurveKind::circle: return {-params_.radius_x * c, -params_.radius_x * s};
        case CurveKind::ellipse: return {-params_.radius_x * c, -params_.radius_y * s};
        case CurveKind::kite:
            return params_.scale * Vec2{-c - 2.6 * std::cos(2.0 * t), -1.5 * s};
    }
    return {};
}

Vec2 BoundaryCurve::normal(double t) const {
    const Vec2 d = d1(t);
    const double len = norm(d);
    return {d.y / len, -d.x / len};
}

std::vector<double> BoundaryCurve::node_params() const {
    std::vector<double> t(nodes_);
    for (int j = 0; j < nodes_; ++j) t[j] = kTwoPi * j / nodes_;
    return t;
}

bool BoundaryCurve::contains(const Vec2& x) const {
    // Winding number of the dense outline polygon around x.
    int winding = 0;
    const std::size_t n = outline_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = outline_[i];
        const Vec2& q = outline_[(i + 1) % n];
        const double cross = (q.x - p.x) * (x.y - p.y) - (x.x - p.x) * (q.y - p.y);
        if (p.y <= x.y) {
            if (q.y > x.y && cross > 0.0) ++winding;
        } else {
            if (q.y <= x.y && cross < 0.0) --winding;
        }
    }
    return winding != 0 && distance_to(x) > 0.0;
}

double BoundaryCurve::distance_to(const Vec2& x) const {
    const std::size_t n = outline_.size();
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double d = distance(outline_[i], x);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    // Golden-section refinement of |p(t) - x| around the closest sample.
    const double h = kTwoPi / static_cast<double>(n);
    double lo = kTwoPi * static_cast<double>(best) / static_cast<double>(n) - h;
    double hi = lo + 2.0 * h;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
    double f1 = distance(point(m1), x), f2 = distance(point(m2), x);
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) {
            hi = m2; m2 = m1; f2 = f1;
            m1 = hi - g * (hi - lo); f1 = distance(point(m1), x);
        } else {
            lo = m1; m1 = m2; f1 = f2;
            m2 = lo + g * (hi - lo); f2 = distance(point(m2), x);
        }
    }
    return std::min({best_d, f1, f2});
}

BoundaryCurve BoundaryCurve::translated(const Vec2& shift) const {
    CurveParams p = params_;
    p.center += shift;
    return BoundaryCurve(kind_, p, nodes_);
}

BoundaryCurve BoundaryCurve::with_nodes(int nodes) const {
    return BoundaryCurve(kind_, params_, nodes);
}

BoundaryCurve make_curve(CurveKind kind, const CurveParams& params, int nodes) {
    return BoundaryCurve(kind, params, nodes);
}

AdmissibleArc::AdmissibleArc(Vec2 center, double radius, double theta0, double theta1,
                             int n_points, double k)
    : center_(center), radius_(radius), theta0_(theta0), theta1_(theta1), n_points_(n_points), k_(k) {
    if (!(radius > 0.0)) throw ConfigError("arc radius must be positive");
    if (n_points < 2) throw ConfigError("arc needs at least 2 sample points");
    if (!(theta1 > theta0)) throw ConfigError("arc aperture must have positive measure (theta1 > theta0)");
    if (!(k > 0.0)) throw ConfigError("wavenumber must be positive");
    if (!(k * radius < kDirichletDiskBound)) {
        std::ostringstream os;
        os << "arc disk not admissible: k*radius = " << k * radius << " >= " << kDirichletDiskBound
           << " (k^2 may be a Dirichlet eigenvalue of -Laplace on the disk; radius must be < 2.4048/k)";
        throw AdmissibilityError(os.str());
    }
    points_.reserve(n_points);
    for (int i = 0; i < n_points; ++i) {
        const double th = theta0 + (theta1 - theta0) * i / (n_points - 1);
        points_.push_back(center + radius * Vec2{std::cos(th), std::sin(th)});
    }
}

Vec2 AdmissibleArc::point(int i) const { return points_.at(static_cast<std::size_t>(i)); }

double AdmissibleArc::distance_to(const Vec2& x) const {
    const Vec2 d = x - center_;
    const double r = norm(d);
    double th = std::atan2(d.y, d.x);
    // Is the angular projection inside the aperture (mod 2 pi)?
    const double rel = wrap_to_two_pi(th - theta0_);
    if (rel <= theta1_ - theta0_ || theta1_ - theta0_ >= kTwoPi) {
        return std::abs(r - radius_);
    }
    const Vec2 e0 = center_ + radius_ * Vec2{std::cos(theta0_), std::sin(theta0_)};
    const Vec2 e1 = center_ + radius_ * Vec2{std::cos(theta1_), std::sin(theta1_)};
    return std::min(distance(x, e0), distance(x, e1));
}

AdmissibleArc make_admissible_arc(Vec2 center, double radius, double theta0, double theta1,
                                  int n_points, double k) {
    return AdmissibleArc(center, radius, theta0, theta1, n_points, k);
}

SurfaceProfile::SurfaceProfile(double a, double b, double h) : a_(a), b_(b), h_(h) {
    if (!(a < b)) throw ConfigError("surface support requires a < b");
    if (!std::isfinite(h)) throw ConfigError("surface amplitude must be finite");
}

double SurfaceProfile::f(double x1) const {
    if (x1 <= a_ || x1 >= b_) return 0.0;
    const double s = (2.0 * x1 - a_ - b_) / (b_ - a_);
    const double w = 1.0 - s * s;
    return h_ * w * w * w;
}

double SurfaceProfile::df(double x1) const {
    if (x1 <= a_ || x1 >= b_) return 0.0;
    const double s = (2.0 * x1 - a_ - b_) / (b_ - a_);
    const double w = 1.0 - s * s;
    return -6.0 * h_ * s * w * w * (2.0 / (b_ - a_));
}

double SurfaceProfile::d2f(double x1) const {
    if (x1 <= a_ || x1 >= b_) return 0.0;
    const double s = (2.0 * x1 - a_ - b_) / (b_ - a_);
    const double w = 1.0 - s * s;
    const double ds = 2.0 / (b_ - a_);
    return -6.0 * h_ * w * (1.0 - 5.0 * s * s) * ds * ds;
}

double SurfaceProfile::slope(double s, double t) const {
    if (s == t) return df(s);
    const bool in_s = s > a_ && s < b_, in_t = t > a_ && t < b_;
    if (!in_s && !in_t) return 0.0;
    if (!in_s || !in_t) return (f(s) - f(t)) / (s - t);
    const double c = 2.0 / (b_ - a_);
    const double ss = (2.0 * s - a_ - b_) / (b_ - a_), st = (2.0 * t - a_ - b_) / (b_ - a_);
    const double ws = 1.0 - ss * ss, wt = 1.0 - st * st;
    // w^3 differences factor through w_s - w_t = -(s_s - s_t)(s_s + s_t).
    return -h_ * c * (ss + st) * (ws * ws + ws * wt + wt * wt);
}

Vec2 SurfaceProfile::normal(double x1) const {
    const double fp = df(x1);
    const double len = std::sqrt(1.0 + fp * fp);
    return {-fp / len, 1.0 / len};
}

SurfaceProfile make_profile(double a, double b, double h) { return SurfaceProfile(a, b, h); }

Vec2 default_reference_source(const AdmissibleArc& gamma, const AdmissibleArc& sigma, double k) {
    const Vec2 mid = 0.5 * (gamma.center() + sigma.center());
    Vec2 dir = sigma.center() - gamma.center();
    const double len = norm(dir);
    if (len == 0.0) throw ConfigError("arc centers coincide; reference source undefined");
    const double wavelength = 2.0 * std::numbers::pi / k;
    return mid + (wavelength / len) * perp(dir);
}

bool ValidationReport::has(const std::string& code) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.code == code; });
}

std::string ValidationReport::summary() const {
    if (ok()) return "pass";
    std::string out;
    for (const auto& v : violations) {
        if (!out.empty()) out += "; ";
        out += v.code + ": " + v.message;
    }
    return out;
}

namespace {

// Minimum separation of the closed disk (center, radius) from the scatterer;
// negative or zero means the closed disk touches or enters it.
double disk_clearance(const Vec2& center, double radius, const ScattererShape& shape) {
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, BoundaryCurve>) {
                if (s.contains(center)) return -radius - s.distance_to(center);
                return s.distance_to(center) - radius;
            } else if constexpr (std::is_same_v<T, DiskShape>) {
                return distance(center, s.center) - s.radius - radius;
            } else {
                // Disk must sit strictly above the graph.
                double worst = std::numeric_limits<double>::infinity();
                constexpr int kSamples = 1024;
                for (int i = 0; i <= kSamples; ++i) {
                    const double th = std::numbers::pi * (1.0 + static_cast<double>(i) / kSamples);
                    const Vec2 p = center + radius * Vec2{std::cos(th), std::sin(th)};
                    worst = std::min(worst, s.clearance(p));
                }
                return worst;
            }
        },
        shape);
}

// Signed clearance of a point from the scatterer (> 0 outside / above).
double point_clearance(const Vec2& x, const ScattererShape& shape) {
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, BoundaryCurve>) {
                const double d = s.distance_to(x);
                return s.contains(x) ? -d : d;
            } else if constexpr (std::is_same_v<T, DiskShape>) {
                return distance(x, s.center) - s.radius;
            } else {
                return s.clearance(x);
            }
        },
        shape);
}

}  // namespace

ValidationReport validate_layout(const SourceReceiverLayout& layout, const ScattererShape& scatterer) {
    ValidationReport report;
    auto add = [&](std::string code, std::string msg) {
        report.violations.push_back({std::move(code), std::move(msg)});
    };
    const auto& g = layout.gamma;
    const auto& s = layout.sigma;
    const double k = layout.k;
    const double min_sep = 1e-8 * 2.0 * std::numbers::pi / k;

    if (!(k > 0.0)) add("wavenumber", "wavenumber must be positive");
    if (g.wavenumber() != k || s.wavenumber() != k) {
        add("wavenumber_mismatch", "arc wavenumbers differ from the layout wavenumber");
    }
    for (const auto* arc : {&g, &s}) {
        if (!(k * arc->radius() < kDirichletDiskBound)) {
            add("admissibility", "k*radius = " + std::to_string(k * arc->radius()) +
                                     " is not below 2.4048 (Dirichlet eigenvalue risk)");
        }
    }
    if (!(distance(g.center(), s.center()) > g.radius() + s.radius())) {
        add("disk_overlap", "hypothesis Ω̄ ∩ Ḡ = ∅ violated: source and receiver disks intersect");
    }
    if (!(disk_clearance(g.center(), g.radius(), scatterer) > 0.0)) {
        add("source_disk_clearance",
            "source disk Ω̄ must lie in the exterior of the scatterer (Ω̄ ⊂⊂ D₀ for surfaces)");
    }
    if (!(disk_clearance(s.center(), s.radius(), scatterer) > 0.0)) {
        add("receiver_disk_clearance",
            "receiver disk Ḡ must lie in the exterior of the scatterer (Ḡ ⊂⊂ D₀ for surfaces)");
    }
    if (!(point_clearance(layout.z0, scatterer) > min_sep)) {
        add("z0_placement", "z₀ placement: reference source lies on or inside the scatterer");
    }
    // Stricter than z0 not on the arcs: z0 must avoid the closed disks, so that
    // shrinking an arc never creates a new violation.
    if (!(distance(layout.z0, g.center()) > g.radius() + min_sep) ||
        !(distance(layout.z0, s.center()) > s.radius() + min_sep)) {
        add("z0_placement", "z₀ placement: reference source lies in a closed measurement disk");
    }
    for (const auto* arc : {&g, &s}) {
        for (const auto& p : arc->points()) {
            if (!(point_clearance(p, scatterer) > min_sep)) {
                add("arc_clearance", "measurement point inside or on the scatterer");
                break;
            }
        }
    }
    return report;
}

}  // namespace phasescat::geometry
