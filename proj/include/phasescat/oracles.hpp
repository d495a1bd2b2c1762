#pragma once

#include <complex>
#include <vector>

#include "phasescat/geometry.hpp"
#include "phasescat/solver.hpp"

// Closed-form separation-of-variables solutions for disks and the image
// solution of the flat sound-soft half-plane. Used as ground truth.
namespace phasescat::oracles {

using complex = std::complex<double>;
using geometry::Vec2;
using solver::IncidentField;
using solver::IncidentKind;

enum class DiskBc { soft, impedance, medium };

struct DiskSpec {
    double radius = 1.0;
    Vec2 center{};
    DiskBc bc = DiskBc::soft;
    double lambda = 0.0;          // impedance: du/dnu + i k lambda u = 0
    complex index{1.0, 0.0};      // medium: refractive index n, Re n > 0, Im n >= 0

    static DiskSpec soft(const Vec2& center, double radius);
    static DiskSpec impedance(const Vec2& center, double radius, double lambda);
    static DiskSpec medium(const Vec2& center, double radius, complex index);

    geometry::DiskShape shape() const { return {center, radius}; }
};

/// Minimum mode cutoff ceil(k a) + 20; the series grows beyond it until converged.
int min_modes(double k, double radius);
/// Hard cap on the number of retained modes per side.
inline constexpr int kMaxModes = 120;

/// J_0..J_nmax at complex z by normalised backward recurrence.
std::vector<complex> bessel_j_sequence(int nmax, complex z);
/// Y_0..Y_nmax at real x > 0 by upward recurrence.
std::vector<double> bessel_y_sequence(int nmax, double x);

/// Scattered-field modal coefficients a_n (n = -nmax..nmax, index n + nmax),
/// u^s = sum a_n H_|n|(k r) e^{i n theta} about the disk center.
std::vector<complex> disk_coefficients(const DiskSpec& spec, const IncidentField& inc, int nmax);

/// Scattered field outside the disk; for a medium disk and x inside, the interior total field.
complex disk_series_field(const DiskSpec& spec, const IncidentField& inc, const Vec2& x);
/// Scattered field at |x - center| >= radius.
complex disk_scattered(const DiskSpec& spec, const IncidentField& inc, const Vec2& x);
/// Interior total field of a medium disk, |x - center| <= radius.
complex disk_interior(const DiskSpec& spec, const IncidentField& inc, const Vec2& x);
/// Total field (incident + scattered outside, modal interior field inside a medium).
complex disk_total(const DiskSpec& spec, const IncidentField& inc, const Vec2& x);
/// Radial derivative of the total field about the disk center, evaluated from the
/// exterior (inside = false) or interior (inside = true, medium only) expansion.
complex disk_total_dr(const DiskSpec& spec, const IncidentField& inc, const Vec2& x, bool inside);

struct FarFieldPattern {
    std::vector<Vec2> directions;
    std::vector<complex> values;
};

complex disk_far(const DiskSpec& spec, const IncidentField& inc, const Vec2& xhat);
FarFieldPattern disk_series_far(const DiskSpec& spec, const IncidentField& inc,
                                const std::vector<Vec2>& directions);

/// Image solution G(x, z) = Phi(x, z) - Phi(x, z') above the flat sound-soft plane.
complex flat_halfplane_exact(double k, const Vec2& z, const Vec2& x);

}  // namespace phasescat::oracles
