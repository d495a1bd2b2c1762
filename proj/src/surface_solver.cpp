#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "phasescat/errors.hpp"
#include "phasescat/quadrature.hpp"
#include "phasescat/solver.hpp"
#include "phasescat/specialfun.hpp"

namespace phasescat::solver {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEuler = std::numbers::egamma;
constexpr int kOrder = quadrature::kPanelOrder;
constexpr double kAdaptiveTol = 1e-13;
const complex kI{0.0, 1.0};

struct SourcePoint {
    double s;
    double f;
    double fp;
};

SourcePoint source_at(const geometry::SurfaceProfile& p, double s) { return {s, p.f(s), p.df(s)}; }

// Evaluation point. Targets on the surface carry their abscissa so that
// n.(y - x) can be formed from a divided difference instead of by cancellation.
struct Target {
    Vec2 x;
    bool on_surface = false;
    double t = 0.0;
};

struct Offset {
    Vec2 diff;      // y - x
    double ndiff;   // n(y) . (y - x), n = (-f', 1)
};

Offset offset(const geometry::SurfaceProfile& p, const Target& x, const SourcePoint& y) {
    if (x.on_surface) {
        const double ds = y.s - x.t;
        const double m = p.slope(y.s, x.t);
        return {{ds, ds * m}, ds * (m - y.fp)};
    }
    const Vec2 diff{y.s - x.x.x, y.f - x.x.y};
    return {diff, -y.fp * diff.x + diff.y};
}

// Kernels below are taken with respect to dy1, so they carry the factor |y'|.
complex direct_kernel(const SurfaceDiscretization& d, const Target& x, const SourcePoint& y) {
    const auto o = offset(d.profile, x, y);
    const double r = geometry::norm(o.diff);
    // A quadrature node can land on the (integrable) singularity when the
    // target sits on a panel end; that single node carries no weight.
    if (r == 0.0) return {};
    const auto h = specialfun::hankel01(d.k * r);
    const double speed = std::sqrt(1.0 + y.fp * y.fp);
    return -kI * (0.25 * d.k) * h.h1 * o.ndiff / r - kI * d.eta * (kI * 0.25) * h.h0 * speed;
}

complex image_kernel(const SurfaceDiscretization& d, const Target& x, const SourcePoint& y) {
    const Vec2 m{y.s - x.x.x, y.f + x.x.y};
    const double r = geometry::norm(m);
    const auto h = specialfun::hankel01(d.k * r);
    const double nm = -y.fp * m.x + m.y;
    const double speed = std::sqrt(1.0 + y.fp * y.fp);
    return kI * (0.25 * d.k) * h.h1 * nm / r + kI * d.eta * (kI * 0.25) * h.h0 * speed;
}

// direct_kernel = A ln|t - s| + B for a target on the surface.
struct LogSplit {
    complex a;
    complex b;
};

LogSplit split_direct(const SurfaceDiscretization& d, const Target& x, const SourcePoint& y, double tiny) {
    const double speed = std::sqrt(1.0 + y.fp * y.fp);
    const double gap = std::abs(y.s - x.t);
    if (gap < tiny) {
        const double fp = d.profile.df(x.t);
        const double dl = d.profile.d2f(x.t) / (4.0 * kPi * (1.0 + fp * fp));
        const complex sl =
            -kI * d.eta * (kI * 0.25 - (std::log(0.5 * d.k * speed) + kEuler) / (2.0 * kPi)) * speed;
        return {kI * d.eta / (2.0 * kPi) * speed, dl + sl};
    }
    const auto o = offset(d.profile, x, y);
    const double r = geometry::norm(o.diff);
    const auto jy = specialfun::bessel_jy01(d.k * r);
    const complex a = d.k / (2.0 * kPi) * jy.j1 * o.ndiff / r + kI * d.eta / (2.0 * kPi) * jy.j0 * speed;
    return {a, direct_kernel(d, x, y) - a * std::log(gap)};
}

double min_distance(const geometry::SurfaceProfile& p, const SurfacePanel& panel, const Vec2& x, bool image) {
    const auto& rule = quadrature::gauss16();
    const double h = 0.5 * (panel.hi - panel.lo), c = 0.5 * (panel.hi + panel.lo);
    const double sign = image ? -1.0 : 1.0;
    auto dist = [&](double s) { return geometry::distance(x, Vec2{s, sign * p.f(s)}); };
    double d = std::min(dist(panel.lo), dist(panel.hi));
    for (int q = 0; q < kOrder; ++q) d = std::min(d, dist(c + h * rule.nodes[q]));
    return d;
}

enum class Part { direct, image, both };

// Integrals over one panel of kernel * l_j, j = 0..15, in the x1 measure.
quadrature::Complex16 panel_weights(const SurfaceDiscretization& d, const SurfacePanel& panel, const Target& x,
                                    Part part, bool adaptive) {
    const auto& rule = quadrature::gauss16();
    const double h = 0.5 * (panel.hi - panel.lo), c = 0.5 * (panel.hi + panel.lo);
    auto kernel = [&](double s) {
        const SourcePoint y = source_at(d.profile, s);
        complex v{};
        if (part != Part::image) v += direct_kernel(d, x, y);
        if (part != Part::direct) v += image_kernel(d, x, y);
        return v;
    };
    quadrature::Complex16 w{};
    if (adaptive) {
        w = quadrature::adaptive_basis_integral([&](double u) { return kernel(c + h * u); }, -1.0, 1.0,
                                                kAdaptiveTol / h);
        for (auto& v : w) v *= h;
    } else {
        for (int j = 0; j < kOrder; ++j) w[j] = h * rule.weights[j] * kernel(c + h * rule.nodes[j]);
    }
    return w;
}

void accumulate(std::vector<complex>& row, int panel, const quadrature::Complex16& w) {
    for (int j = 0; j < kOrder; ++j) row[panel * kOrder + j] += w[j];
}

// Coefficients c_j with (K phi)(t) = sum_j c_j phi_j for t on panel `own`.
std::vector<complex> boundary_row(const SurfaceDiscretization& d, double t, int own) {
    const auto& rule = quadrature::gauss16();
    const Target x{d.profile.point(t), true, t};
    std::vector<complex> row(d.t.size());
    for (int p = 0; p < static_cast<int>(d.panels.size()); ++p) {
        const auto& panel = d.panels[p];
        const double len = panel.hi - panel.lo;
        const bool near_image = min_distance(d.profile, panel, x.x, true) < len;
        if (p == own) {
            const double h = 0.5 * len, c = 0.5 * (panel.hi + panel.lo);
            const double ut = std::clamp((t - c) / h, -1.0, 1.0);
            const auto lw = quadrature::log_weights(ut);
            const double log_h = std::log(h);
            quadrature::Complex16 w{};
            for (int j = 0; j < kOrder; ++j) {
                const auto y = source_at(d.profile, c + h * rule.nodes[j]);
                const auto split = split_direct(d, x, y, 1e-10 * h);
                w[j] = h * (split.a * (rule.weights[j] * log_h + lw[j]) + rule.weights[j] * split.b);
            }
            accumulate(row, p, w);
            accumulate(row, p, panel_weights(d, panel, x, Part::image, near_image));
            continue;
        }
        const bool near_direct = min_distance(d.profile, panel, x.x, false) < len;
        if (near_direct == near_image) {
            accumulate(row, p, panel_weights(d, panel, x, Part::both, near_direct));
        } else {
            accumulate(row, p, panel_weights(d, panel, x, Part::direct, near_direct));
            accumulate(row, p, panel_weights(d, panel, x, Part::image, near_image));
        }
    }
    return row;
}

double smoothstep(double xi) { return xi * xi * xi * (10.0 - 15.0 * xi + 6.0 * xi * xi); }

void validate(const geometry::SurfaceProfile& profile, double k, const SurfaceOptions& o) {
    if (!(k > 0.0)) throw ConfigError("wavenumber must be positive");
    if (profile.amplitude() < 0.0) {
        throw ConfigError("surface amplitude must be nonnegative (the profile may not dip below x2 = 0)");
    }
    if (!(o.margin_wavelengths >= 0.0)) throw ConfigError("margin_wavelengths must be nonnegative");
    if (!(o.taper_wavelengths >= 0.0) || o.taper_wavelengths > o.margin_wavelengths) {
        throw ConfigError("taper_wavelengths must lie in [0, margin_wavelengths]");
    }
    if (!(o.panels_per_wavelength > 0.0)) throw ConfigError("panels_per_wavelength must be positive");
    if (o.grading_levels < 0 || o.grading_levels > 40) throw ConfigError("grading_levels must lie in [0, 40]");
}

std::vector<SurfacePanel> build_panels(const geometry::SurfaceProfile& p, double k, const SurfaceOptions& o) {
    const double wavelength = 2.0 * kPi / k;
    const double target = wavelength / o.panels_per_wavelength;
    const double a = p.a(), b = p.b();
    const int base = std::max(2, static_cast<int>(std::ceil((b - a) / target)));
    const double size = (b - a) / base;

    std::vector<double> edges;  // bump edges, graded at both ends
    edges.push_back(a);
    for (int l = o.grading_levels; l >= 1; --l) edges.push_back(a + size * std::ldexp(1.0, -l));
    for (int i = 1; i < base; ++i) edges.push_back(a + i * size);
    for (int l = 1; l <= o.grading_levels; ++l) edges.push_back(b - size * std::ldexp(1.0, -l));
    edges.push_back(b);
    const double smallest = size * std::ldexp(1.0, -o.grading_levels);

    auto margin = [&](double sign) {
        std::vector<double> out;  // distances from the bump end
        const double total = o.margin_wavelengths * wavelength;
        double pos = 0.0, step = smallest;
        while (total - pos > 1e-12 * wavelength) {
            double sz = std::min(step, total - pos);
            if (total - pos - sz < 0.5 * sz) sz = total - pos;
            pos += sz;
            out.push_back(sign * pos);
            step = std::min(2.0 * step, target);
        }
        return out;
    };

    std::vector<SurfacePanel> panels;
    const auto left = margin(-1.0);
    for (int i = static_cast<int>(left.size()) - 1; i >= 0; --i) {
        const double hi = i == 0 ? a : a + left[i - 1];
        panels.push_back({a + left[i], hi, true});
    }
    const bool level = p.amplitude() == 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) panels.push_back({edges[i], edges[i + 1], level});
    const auto right = margin(1.0);
    for (std::size_t i = 0; i < right.size(); ++i) {
        const double lo = i == 0 ? b : b + right[i - 1];
        panels.push_back({lo, b + right[i], true});
    }
    return panels;
}

int locate_panel(const SurfaceDiscretization& d, double x1) {
    const auto& panels = d.panels;
    auto it = std::upper_bound(panels.begin(), panels.end(), x1,
                               [](double v, const SurfacePanel& p) { return v < p.hi; });
    if (it == panels.end()) return x1 == panels.back().hi ? static_cast<int>(panels.size()) - 1 : -1;
    if (x1 < it->lo) return -1;
    return static_cast<int>(it - panels.begin());
}

}  // namespace

complex flat_reference_field(const IncidentField& inc, const Vec2& x) {
    switch (inc.kind) {
        case IncidentKind::plane: {
            const Vec2 mirrored{inc.direction.x, -inc.direction.y};
            return std::polar(1.0, inc.k * geometry::dot(x, inc.direction)) -
                   std::polar(1.0, inc.k * geometry::dot(x, mirrored));
        }
        case IncidentKind::point:
            return halfplane_green(inc.k, x, inc.z1);
        case IncidentKind::superposition:
            return halfplane_green(inc.k, x, inc.z1) + halfplane_green(inc.k, x, inc.z2);
    }
    return {};
}

SoftSurfaceSolver::SoftSurfaceSolver(const geometry::SurfaceProfile& profile, double k, SurfaceOptions options) {
    validate(profile, k, options);
    auto disc = std::make_shared<SurfaceDiscretization>(
        SurfaceDiscretization{profile, k, k, options, build_panels(profile, k, options), {}, {}, {}, {}});
    const auto& rule = quadrature::gauss16();
    const double wavelength = 2.0 * kPi / k;
    const double lo = disc->panels.front().lo, hi = disc->panels.back().hi;
    const double taper_width = options.taper_wavelengths * wavelength;
    for (std::size_t p = 0; p < disc->panels.size(); ++p) {
        const auto& panel = disc->panels[p];
        const double h = 0.5 * (panel.hi - panel.lo), c = 0.5 * (panel.hi + panel.lo);
        for (int q = 0; q < kOrder; ++q) {
            const double s = c + h * rule.nodes[q];
            disc->t.push_back(s);
            disc->x.push_back(profile.point(s));
            disc->weight.push_back(h * rule.weights[q]);
            const double edge = std::min(s - lo, hi - s);
            disc->taper.push_back(taper_width > 0.0 && edge < taper_width ? smoothstep(edge / taper_width) : 1.0);
            (panel.flat ? flat_nodes_ : bump_nodes_).push_back(static_cast<int>(disc->t.size()) - 1);
        }
    }

    // Rows at flat nodes reduce to phi/2 = rhs exactly (the half-plane kernel
    // vanishes there), so only the bump block needs factoring.
    const int nb = static_cast<int>(bump_nodes_.size());
    const int nf = static_cast<int>(flat_nodes_.size());
    Eigen::MatrixXcd a(nb, nb);
    coupling_.resize(nb, nf);
    for (int i = 0; i < nb; ++i) {
        const int node = bump_nodes_[i];
        const auto row = boundary_row(*disc, disc->t[node], node / kOrder);
        for (int j = 0; j < nb; ++j) {
            const int col = bump_nodes_[j];
            a(i, j) = (i == j ? 0.5 : 0.0) + row[col] * disc->taper[col];
        }
        for (int j = 0; j < nf; ++j) coupling_(i, j) = row[flat_nodes_[j]] * disc->taper[flat_nodes_[j]];
    }
    lu_.compute(a);
    rcond_ = lu_.rcond();
    if (!(rcond_ > 1e-14)) {
        std::ostringstream os;
        os << "surface matrix singular to working precision (rcond = " << rcond_ << ")";
        throw SolverError(os.str(), rcond_);
    }
    disc_ = std::move(disc);
}

SurfaceDensity SoftSurfaceSolver::solve(const IncidentField& inc) const {
    if (inc.k != disc_->k) throw ConfigError("incident wavenumber differs from the solver wavenumber");
    auto check_source = [&](const Vec2& z) {
        if (!(disc_->profile.clearance(z) > 0.0)) throw DomainError("point source must lie strictly above the surface");
    };
    if (inc.kind != IncidentKind::plane) check_source(inc.z1);
    if (inc.kind == IncidentKind::superposition) check_source(inc.z2);

    const int nb = static_cast<int>(bump_nodes_.size());
    const int nf = static_cast<int>(flat_nodes_.size());
    std::vector<complex> phi(disc_->t.size());
    Eigen::VectorXcd phi_flat(nf);
    for (int j = 0; j < nf; ++j) {
        phi_flat(j) = -2.0 * flat_reference_field(inc, disc_->x[flat_nodes_[j]]);
        phi[flat_nodes_[j]] = phi_flat(j);
    }
    Eigen::VectorXcd rhs(nb);
    for (int i = 0; i < nb; ++i) rhs(i) = -flat_reference_field(inc, disc_->x[bump_nodes_[i]]);
    if (nf > 0) rhs -= coupling_ * phi_flat;
    const Eigen::VectorXcd sol = lu_.solve(rhs);
    for (int i = 0; i < nb; ++i) phi[bump_nodes_[i]] = sol(i);
    return SurfaceDensity{disc_, std::move(phi), inc};
}

SurfaceDensity solve_rough_soft(const geometry::SurfaceProfile& profile, double k, const IncidentField& inc,
                                SurfaceOptions options) {
    return SoftSurfaceSolver(profile, k, options).solve(inc);
}

complex total_near(const SurfaceDensity& density, const Vec2& x) {
    const auto& d = *density.disc;
    if (!(d.profile.clearance(x) > 1e-12)) throw DomainError("field requested on or below the surface");
    complex u = flat_reference_field(density.incident, x);
    for (std::size_t p = 0; p < d.panels.size(); ++p) {
        const auto& panel = d.panels[p];
        const int first = static_cast<int>(p) * kOrder;
        bool zero = true;
        for (int j = 0; j < kOrder && zero; ++j) zero = density.phi[first + j] == complex{} || d.taper[first + j] == 0.0;
        if (zero) continue;
        const double len = panel.hi - panel.lo;
        const bool near_direct = min_distance(d.profile, panel, x, false) < len;
        const bool near_image = min_distance(d.profile, panel, x, true) < len;
        const Target target{x};
        quadrature::Complex16 w{};
        if (near_direct == near_image) {
            w = panel_weights(d, panel, target, Part::both, near_direct);
        } else {
            const auto wd = panel_weights(d, panel, target, Part::direct, near_direct);
            const auto wi = panel_weights(d, panel, target, Part::image, near_image);
            for (int j = 0; j < kOrder; ++j) w[j] = wd[j] + wi[j];
        }
        for (int j = 0; j < kOrder; ++j) u += w[j] * d.taper[first + j] * density.phi[first + j];
    }
    return u;
}

complex scattered_near(const SurfaceDensity& density, const Vec2& x) {
    return total_near(density, x) - incident_eval(density.incident, x);
}

complex boundary_total(const SurfaceDensity& density, double x1) {
    const auto& d = *density.disc;
    const Vec2 x = d.profile.point(x1);
    const int own = locate_panel(d, x1);
    if (own < 0) return flat_reference_field(density.incident, x);
    const auto& panel = d.panels[own];
    const double h = 0.5 * (panel.hi - panel.lo), c = 0.5 * (panel.hi + panel.lo);
    const auto basis = quadrature::lagrange_basis(std::clamp((x1 - c) / h, -1.0, 1.0));
    complex phi_t{};
    for (int j = 0; j < kOrder; ++j) {
        const int node = own * kOrder + j;
        phi_t += basis[j] * d.taper[node] * density.phi[node];
    }
    // The half-plane kernel vanishes identically for targets on x2 = 0.
    if (panel.flat) return flat_reference_field(density.incident, x) + 0.5 * phi_t;
    const auto row = boundary_row(d, x1, own);
    complex integral{};
    for (std::size_t j = 0; j < row.size(); ++j) integral += row[j] * d.taper[j] * density.phi[j];
    return flat_reference_field(density.incident, x) + 0.5 * phi_t + integral;
}

}  // namespace phasescat::solver
