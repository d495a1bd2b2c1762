#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phasescat/geometry.hpp"

// Forward scattering for sound-soft obstacles and sound-soft locally rough
// surfaces in two dimensions.
namespace phasescat::solver {

using complex = std::complex<double>;
using geometry::Vec2;

/// 2D far-field constant: Phi(x, z) ~ gamma2 * e^{ik|x|}/sqrt(|x|) * e^{-ik xhat.z}.
complex far_field_constant(double k);

/// Phi(x, z) = (i/4) H0^(1)(k |x - z|). Throws DomainError when x == z.
complex fundamental_2d(double k, const Vec2& x, const Vec2& z);

/// Far field of Phi(., z) in direction xhat.
complex fundamental_far(double k, const Vec2& xhat, const Vec2& z);

/// Phi(x, z) - Phi(x, z') with z' the mirror image of z in x2 = 0.
complex halfplane_green(double k, const Vec2& x, const Vec2& z);

enum class IncidentKind { plane, point, superposition };

struct IncidentField {
    IncidentKind kind = IncidentKind::plane;
    Vec2 direction{1.0, 0.0};  // plane
    Vec2 z1{};                 // point / superposition
    Vec2 z2{};                 // superposition
    double k = 1.0;

    static IncidentField plane(const Vec2& d, double k);
    static IncidentField point(const Vec2& z, double k);
    static IncidentField superposition(const Vec2& z1, const Vec2& z2, double k);
};

complex incident_eval(const IncidentField& inc, const Vec2& x);

/// Nystrom discretization of the combined-field equation on a closed curve.
struct ObstacleDiscretization {
    geometry::BoundaryCurve curve;
    double k;
    double eta;
    std::vector<double> t;        // node parameters
    std::vector<Vec2> x;          // node points
    std::vector<Vec2> dx;         // x'(t)
    std::vector<Vec2> ddx;        // x''(t)
};

/// Density psi(t_j) of u^s = int (dPhi/dnu(y) - i eta Phi) phi ds.
struct ObstacleDensity {
    std::shared_ptr<const ObstacleDiscretization> disc;
    std::vector<complex> psi;
};

/// Factors the Nystrom matrix once; each solve is a back-substitution.
class SoftObstacleSolver {
public:
    SoftObstacleSolver(const geometry::BoundaryCurve& curve, double k);

    ObstacleDensity solve(const IncidentField& inc) const;
    /// Reciprocal condition estimate of the factored matrix.
    double rcond() const { return rcond_; }
    const ObstacleDiscretization& discretization() const { return *disc_; }

private:
    std::shared_ptr<const ObstacleDiscretization> disc_;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
    double rcond_ = 0.0;
};

ObstacleDensity solve_soft_obstacle(const geometry::BoundaryCurve& curve, const IncidentField& inc);

/// Scattered field at an exterior point. Throws DomainError on or inside the curve.
complex scattered_near(const ObstacleDensity& density, const Vec2& x);
/// Far-field pattern u^inf(xhat); |xhat| must be 1.
complex scattered_far(const ObstacleDensity& density, const Vec2& xhat);
/// Exterior trace of u^s at curve parameter t, from the trigonometric
/// interpolant of the density and the Nystrom quadrature at t.
complex boundary_scattered(const ObstacleDensity& density, double t);

struct SurfaceOptions {
    double margin_wavelengths = 8.0;  // truncation margin M on each side of the bump
    double taper_wavelengths = 2.0;   // C^2 density taper over the outer part of the margin
    double panels_per_wavelength = 6.0;
    int grading_levels = 6;           // dyadic panel refinement towards the bump ends
};

struct SurfacePanel {
    double lo;
    double hi;
    bool flat;
};

struct SurfaceDiscretization {
    geometry::SurfaceProfile profile;
    double k;
    double eta;
    SurfaceOptions options;
    std::vector<SurfacePanel> panels;
    std::vector<double> t;        // node abscissae x1
    std::vector<Vec2> x;          // node points
    std::vector<double> weight;   // Gauss weights in x1
    std::vector<double> taper;    // density multiplier (1 inside, C^2 to 0 at the ends)
};

struct SurfaceDensity {
    std::shared_ptr<const SurfaceDiscretization> disc;
    std::vector<complex> phi;
    IncidentField incident;
};

/// Sound-soft locally rough surface: the scattered part is a combined
/// layer potential with the half-plane Green's function on the truncated
/// surface, so the flat part outside the truncation is exact.
class SoftSurfaceSolver {
public:
    SoftSurfaceSolver(const geometry::SurfaceProfile& profile, double k, SurfaceOptions options = {});

    SurfaceDensity solve(const IncidentField& inc) const;
    double rcond() const { return rcond_; }
    const SurfaceDiscretization& discretization() const { return *disc_; }

private:
    std::shared_ptr<const SurfaceDiscretization> disc_;
    std::vector<int> bump_nodes_;
    std::vector<int> flat_nodes_;
    Eigen::MatrixXcd coupling_;  // bump rows, flat columns
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
    double rcond_ = 0.0;
};

/// Field of the incident wave reflected by the flat plane x2 = 0 (incident minus mirror image).
complex flat_reference_field(const IncidentField& inc, const Vec2& x);

SurfaceDensity solve_rough_soft(const geometry::SurfaceProfile& profile, double k,
                                const IncidentField& inc, SurfaceOptions options = {});

/// Total field u = G(., z) + layer potential above the surface.
complex total_near(const SurfaceDensity& density, const Vec2& x);
/// u - Phi(., z): the scattered field relative to the free-space incident wave.
complex scattered_near(const SurfaceDensity& density, const Vec2& x);
/// Total field on the surface at abscissa x1 (limit from above).
complex boundary_total(const SurfaceDensity& density, double x1);

}  // namespace phasescat::solver
