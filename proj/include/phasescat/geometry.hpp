#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

namespace phasescat::geometry {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
    friend Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
    friend Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
    friend Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return a *= s; }
    friend Vec2 operator*(Vec2 a, double s) { return a *= s; }
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
inline double distance(const Vec2& a, const Vec2& b) { return norm(a - b); }
/// Counter-clockwise rotation by 90 degrees.
inline Vec2 perp(const Vec2& a) { return {-a.y, a.x}; }

/// First zero of J0, truncated as in the disk admissibility criterion k*R < 2.4048.
inline constexpr double kDirichletDiskBound = 2.4048;

enum class CurveKind { circle, ellipse, kite };

std::string to_string(CurveKind kind);
CurveKind curve_kind_from_string(const std::string& name);

/// Shape parameters. circle: radius_x is the radius. ellipse: semi-axes
/// radius_x, radius_y. kite: scale multiplies the benchmark kite
/// (cos t + 0.65 cos 2t - 0.65, 1.5 sin t).
struct CurveParams {
    Vec2 center{};
    double radius_x = 1.0;
    double radius_y = 1.0;
    double scale = 1.0;
};

/// Smooth closed 2pi-periodic curve traversed counter-clockwise.
class BoundaryCurve {
public:
    BoundaryCurve(CurveKind kind, CurveParams params, int nodes);

    CurveKind kind() const { return kind_; }
    const CurveParams& params() const { return params_; }
    int nodes() const { return nodes_; }

    Vec2 point(double t) const;
    Vec2 d1(double t) const;
    Vec2 d2(double t) const;
    double speed(double t) const { return norm(d1(t)); }
    /// Outward unit normal.
    Vec2 normal(double t) const;

    /// Equispaced quadrature parameters t_j = 2 pi j / N.
    std::vector<double> node_params() const;

    /// True when x lies strictly inside the region bounded by the curve.
    bool contains(const Vec2& x) const;
    /// Euclidean distance from x to the curve.
    double distance_to(const Vec2& x) const;

    /// Same shape with its center moved by `shift`.
    BoundaryCurve translated(const Vec2& shift) const;
    /// Same shape discretized with a different node count.
    BoundaryCurve with_nodes(int nodes) const;

private:
    CurveKind kind_;
    CurveParams params_;
    int nodes_;
    std::vector<Vec2> outline_;  // dense polygon for inside/distance queries
};

BoundaryCurve make_curve(CurveKind kind, const CurveParams& params, int nodes);

/// Circular measurement arc of an admissible disk.
class AdmissibleArc {
public:
    AdmissibleArc(Vec2 center, double radius, double theta0, double theta1, int n_points, double k);

    const Vec2& center() const { return center_; }
    double radius() const { return radius_; }
    double theta0() const { return theta0_; }
    double theta1() const { return theta1_; }
    int n_points() const { return n_points_; }
    double wavenumber() const { return k_; }
    /// Recorded value of k*R, checked against kDirichletDiskBound.
    double k_radius() const { return k_ * radius_; }

    Vec2 point(int i) const;
    const std::vector<Vec2>& points() const { return points_; }
    /// Distance from x to the arc itself (not the full circle).
    double distance_to(const Vec2& x) const;

private:
    Vec2 center_;
    double radius_;
    double theta0_;
    double theta1_;
    int n_points_;
    double k_;
    std::vector<Vec2> points_;
};

AdmissibleArc make_admissible_arc(Vec2 center, double radius, double theta0, double theta1,
                                  int n_points, double k);

/// Locally rough surface x2 = f(x1) with the C^2 bump
/// f = h (1 - s^2)^3, s = (2 x1 - a - b)/(b - a), on [a, b] and 0 elsewhere.
class SurfaceProfile {
public:
    SurfaceProfile(double a, double b, double h);

    double a() const { return a_; }
    double b() const { return b_; }
    double amplitude() const { return h_; }

    double f(double x1) const;
    double df(double x1) const;
    double d2f(double x1) const;
    /// Divided difference (f(s) - f(t)) / (s - t) without cancellation; f'(s) at s == t.
    double slope(double s, double t) const;

    Vec2 point(double x1) const { return {x1, f(x1)}; }
    /// Unit normal pointing into the region above the surface.
    Vec2 normal(double x1) const;

    /// Signed height of x above the surface, x2 - f(x1).
    double clearance(const Vec2& x) const { return x.y - f(x.x); }

private:
    double a_;
    double b_;
    double h_;
};

SurfaceProfile make_profile(double a, double b, double h);

/// Disk-shaped scatterer described by center and radius (used by series oracles).
struct DiskShape {
    Vec2 center{};
    double radius = 1.0;
};

using ScattererShape = std::variant<BoundaryCurve, DiskShape, SurfaceProfile>;

struct SourceReceiverLayout {
    Vec2 z0;
    AdmissibleArc gamma;  // source arc
    AdmissibleArc sigma;  // receiver arc
    double k;
};

/// Midpoint of the arc centers displaced one wavelength along the
/// counter-clockwise perpendicular of the center-to-center direction.
Vec2 default_reference_source(const AdmissibleArc& gamma, const AdmissibleArc& sigma, double k);

struct Violation {
    std::string code;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    bool has(const std::string& code) const;
    std::string summary() const;
};

ValidationReport validate_layout(const SourceReceiverLayout& layout, const ScattererShape& scatterer);

}  // namespace phasescat::geometry
