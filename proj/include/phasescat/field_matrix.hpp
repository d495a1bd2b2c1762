#pragma once

#include <complex>
#include <iosfwd>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "phasescat/geometry.hpp"
#include "phasescat/oracles.hpp"
#include "phasescat/solver.hpp"

// Field samples over receiver x source grids for any supported scatterer.
namespace phasescat::solver {

struct SoftObstacle {
    geometry::BoundaryCurve curve;
};

struct SoftSurface {
    geometry::SurfaceProfile profile;
    SurfaceOptions options{};
};

/// Obstacles are solved by the Nystrom CFIE, disks (soft, impedance, medium)
/// by their modal series, surfaces by the half-plane panel BIE.
using Scatterer = std::variant<SoftObstacle, oracles::DiskSpec, SoftSurface>;

geometry::ScattererShape shape_of(const Scatterer& s);
std::string describe(const Scatterer& s);

enum class Semantics { total, scattered, incident };
std::string to_string(Semantics s);
Semantics semantics_from_string(const std::string& name);

/// Scatterer prepared for repeated evaluation at one wavenumber (matrices
/// are factored once). Immutable after construction.
class FieldEvaluator {
public:
    FieldEvaluator(const Scatterer& scatterer, double k);

    double k() const { return k_; }
    const Scatterer& scatterer() const { return scatterer_; }

    /// Field at each receiver for one incident wave.
    std::vector<complex> column(const IncidentField& inc, const std::vector<Vec2>& receivers,
                                Semantics semantics) const;
    complex value(const IncidentField& inc, const Vec2& x, Semantics semantics) const;
    /// Scattered far field; not defined for surfaces (DomainError).
    complex far(const IncidentField& inc, const Vec2& xhat) const;
    /// Largest relative boundary residual |u| / max|u^i| over `samples` boundary checkpoints
    /// (midpoints for obstacles, abscissae over the support for surfaces).
    double boundary_residual(const IncidentField& inc, int samples) const;

private:
    Scatterer scatterer_;
    double k_;
    std::shared_ptr<const SoftObstacleSolver> obstacle_;
    std::shared_ptr<const SoftSurfaceSolver> surface_;
};

struct FieldMatrix {
    std::vector<Vec2> receivers;
    std::vector<Vec2> sources;    // the last column is z0 for layout matrices
    Eigen::MatrixXcd values;      // receivers x sources
    Semantics semantics = Semantics::total;
    std::string provenance;
};

/// v(x, z) for x on sigma and z on gamma followed by z0. Validates the layout first.
FieldMatrix field_matrix(const Scatterer& scatterer, const geometry::SourceReceiverLayout& layout,
                         Semantics semantics);
/// Arbitrary receiver and point-source lists; receivers closer than 1e-8
/// wavelengths to a source are rejected.
FieldMatrix field_matrix(const FieldEvaluator& evaluator, const std::vector<Vec2>& receivers,
                         const std::vector<Vec2>& sources, Semantics semantics);

void write_field_csv(std::ostream& os, const FieldMatrix& m);
/// Reads values and semantics; receiver/source coordinates are not part of the format.
FieldMatrix read_field_csv(std::istream& is);

}  // namespace phasescat::solver
