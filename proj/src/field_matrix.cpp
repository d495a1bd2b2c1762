#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "phasescat/csv.hpp"
#include "phasescat/errors.hpp"
#include "phasescat/field_matrix.hpp"

namespace phasescat::solver {
namespace {

constexpr double kPi = std::numbers::pi;

template <class... F>
struct Overloaded : F... {
    using F::operator()...;
};
template <class... F>
Overloaded(F...) -> Overloaded<F...>;

}  // namespace

geometry::ScattererShape shape_of(const Scatterer& s) {
    return std::visit(Overloaded{
                          [](const SoftObstacle& o) -> geometry::ScattererShape { return o.curve; },
                          [](const oracles::DiskSpec& d) -> geometry::ScattererShape { return d.shape(); },
                          [](const SoftSurface& f) -> geometry::ScattererShape { return f.profile; },
                      },
                      s);
}

std::string describe(const Scatterer& s) {
    std::ostringstream os;
    std::visit(Overloaded{
                   [&](const SoftObstacle& o) {
                       const auto& p = o.curve.params();
                       os << "soft " << geometry::to_string(o.curve.kind()) << " at (" << p.center.x << ", "
                          << p.center.y << "), N = " << o.curve.nodes();
                   },
                   [&](const oracles::DiskSpec& d) {
                       os << "disk radius " << d.radius << " at (" << d.center.x << ", " << d.center.y << "), ";
                       switch (d.bc) {
                           case oracles::DiskBc::soft: os << "soft"; break;
                           case oracles::DiskBc::impedance: os << "impedance lambda = " << d.lambda; break;
                           case oracles::DiskBc::medium:
                               os << "medium n = " << d.index.real() << (d.index.imag() < 0 ? "" : "+") << d.index.imag()
                                  << "i";
                               break;
                       }
                   },
                   [&](const SoftSurface& f) {
                       os << "soft surface bump h = " << f.profile.amplitude() << " on [" << f.profile.a() << ", "
                          << f.profile.b() << "], margin " << f.options.margin_wavelengths << " wavelengths";
                   },
               },
               s);
    return os.str();
}

std::string to_string(Semantics s) {
    switch (s) {
        case Semantics::total: return "total";
        case Semantics::scattered: return "scattered";
        case Semantics::incident: return "incident";
    }
    return "total";
}

Semantics semantics_from_string(const std::string& name) {
    if (name == "total") return Semantics::total;
    if (name == "scattered") return Semantics::scattered;
    if (name == "incident") return Semantics::incident;
    throw ConfigError("unknown field semantics '" + name + "'");
}

FieldEvaluator::FieldEvaluator(const Scatterer& scatterer, double k) : scatterer_(scatterer), k_(k) {
    if (!(k > 0.0)) throw ConfigError("wavenumber must be positive");
    if (const auto* o = std::get_if<SoftObstacle>(&scatterer_)) {
        obstacle_ = std::make_shared<const SoftObstacleSolver>(o->curve, k);
    } else if (const auto* f = std::get_if<SoftSurface>(&scatterer_)) {
        surface_ = std::make_shared<const SoftSurfaceSolver>(f->profile, k, f->options);
    }
}

std::vector<complex> FieldEvaluator::column(const IncidentField& inc, const std::vector<Vec2>& receivers,
                                            Semantics semantics) const {
    std::vector<complex> out;
    out.reserve(receivers.size());
    if (semantics == Semantics::incident) {
        for (const auto& x : receivers) out.push_back(incident_eval(inc, x));
        return out;
    }
    const bool total = semantics == Semantics::total;
    if (obstacle_) {
        const auto density = obstacle_->solve(inc);
        for (const auto& x : receivers) {
            const complex us = scattered_near(density, x);
            out.push_back(total ? us + incident_eval(inc, x) : us);
        }
    } else if (surface_) {
        const auto density = surface_->solve(inc);
        for (const auto& x : receivers) out.push_back(total ? total_near(density, x) : scattered_near(density, x));
    } else {
        const auto& disk = std::get<oracles::DiskSpec>(scatterer_);
        for (const auto& x : receivers) {
            const complex us = oracles::disk_scattered(disk, inc, x);
            out.push_back(total ? us + incident_eval(inc, x) : us);
        }
    }
    return out;
}

complex FieldEvaluator::value(const IncidentField& inc, const Vec2& x, Semantics semantics) const {
    return column(inc, {x}, semantics).front();
}

complex FieldEvaluator::far(const IncidentField& inc, const Vec2& xhat) const {
    if (obstacle_) return scattered_far(obstacle_->solve(inc), xhat);
    if (surface_) throw DomainError("far-field pattern is not defined for a surface scatterer");
    return oracles::disk_far(std::get<oracles::DiskSpec>(scatterer_), inc, xhat);
}

double FieldEvaluator::boundary_residual(const IncidentField& inc, int samples) const {
    if (samples < 1) throw ConfigError("boundary residual needs at least one sample");
    double worst = 0.0, scale = 0.0;
    if (obstacle_) {
        const auto density = obstacle_->solve(inc);
        const auto& curve = obstacle_->discretization().curve;
        for (int m = 0; m < samples; ++m) {
            const double t = 2.0 * kPi * (m + 0.5) / samples;
            const complex ui = incident_eval(inc, curve.point(t));
            scale = std::max(scale, std::abs(ui));
            worst = std::max(worst, std::abs(boundary_scattered(density, t) + ui));
        }
    } else if (surface_) {
        const auto density = surface_->solve(inc);
        const auto& profile = surface_->discretization().profile;
        for (int m = 0; m < samples; ++m) {
            const double x1 = profile.a() + (profile.b() - profile.a()) * (m + 0.5) / samples;
            scale = std::max(scale, std::abs(incident_eval(inc, profile.point(x1))));
            worst = std::max(worst, std::abs(boundary_total(density, x1)));
        }
    } else {
        const auto& disk = std::get<oracles::DiskSpec>(scatterer_);
        for (int m = 0; m < samples; ++m) {
            const double th = 2.0 * kPi * (m + 0.5) / samples;
            const Vec2 x = disk.center + disk.radius * Vec2{std::cos(th), std::sin(th)};
            scale = std::max(scale, std::abs(incident_eval(inc, x)));
            const complex u = incident_eval(inc, x) + oracles::disk_scattered(disk, inc, x);
            const complex du = oracles::disk_total_dr(disk, inc, x, false);
            double r = 0.0;
            switch (disk.bc) {
                case oracles::DiskBc::soft: r = std::abs(u); break;
                case oracles::DiskBc::impedance: r = std::abs(du + complex(0.0, k_ * disk.lambda) * u) / k_; break;
                case oracles::DiskBc::medium: {
                    const complex ui = oracles::disk_interior(disk, inc, x);
                    const complex dui = oracles::disk_total_dr(disk, inc, x, true);
                    r = std::max(std::abs(u - ui), std::abs(du - dui) / k_);
                    break;
                }
            }
            worst = std::max(worst, r);
        }
    }
    return worst / scale;
}

FieldMatrix field_matrix(const FieldEvaluator& evaluator, const std::vector<Vec2>& receivers,
                         const std::vector<Vec2>& sources, Semantics semantics) {
    const double guard = 1e-8 * 2.0 * kPi / evaluator.k();
    for (std::size_t j = 0; j < sources.size(); ++j) {
        for (std::size_t i = 0; i < receivers.size(); ++i) {
            if (geometry::distance(receivers[i], sources[j]) < guard) {
                std::ostringstream os;
                os << "receiver " << i << " coincides with source " << j << " (separation below 1e-8 wavelengths)";
                throw DomainError(os.str());
            }
        }
    }
    FieldMatrix m;
    m.receivers = receivers;
    m.sources = sources;
    m.semantics = semantics;
    m.provenance = describe(evaluator.scatterer());
    m.values.resize(static_cast<Eigen::Index>(receivers.size()), static_cast<Eigen::Index>(sources.size()));
    for (std::size_t j = 0; j < sources.size(); ++j) {
        std::vector<complex> col;
        try {
            col = evaluator.column(IncidentField::point(sources[j], evaluator.k()), receivers, semantics);
        } catch (const SolverError& e) {
            throw SolverError("source " + std::to_string(j) + ": " + e.what(), e.rcond());
        } catch (const TruncationError& e) {
            throw TruncationError("source " + std::to_string(j) + ": " + e.what());
        } catch (const DomainError& e) {
            throw DomainError("source " + std::to_string(j) + ": " + e.what());
        }
        for (std::size_t i = 0; i < receivers.size(); ++i) m.values(i, j) = col[i];
    }
    return m;
}

FieldMatrix field_matrix(const Scatterer& scatterer, const geometry::SourceReceiverLayout& layout,
                         Semantics semantics) {
    const auto report = geometry::validate_layout(layout, shape_of(scatterer));
    if (!report.ok()) {
        if (report.has("admissibility")) throw AdmissibilityError(report.summary());
        throw ConfigError(report.summary());
    }
    std::vector<Vec2> sources = layout.gamma.points();
    sources.push_back(layout.z0);
    return field_matrix(FieldEvaluator(scatterer, layout.k), layout.sigma.points(), sources, semantics);
}

void write_field_csv(std::ostream& os, const FieldMatrix& m) {
    os << "receiver_ix,source_ix,re,im,semantics\n";
    const std::string sem = to_string(m.semantics);
    for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.values.cols(); ++j) {
            os << i << ',' << j << ',' << csv::format_double(m.values(i, j).real()) << ','
               << csv::format_double(m.values(i, j).imag()) << ',' << sem << '\n';
        }
    }
}

FieldMatrix read_field_csv(std::istream& is) {
    const auto table = csv::read_table(is, {"receiver_ix", "source_ix", "re", "im", "semantics"});
    FieldMatrix m;
    Eigen::Index rows = 0, cols = 0;
    for (const auto& row : table) {
        rows = std::max<Eigen::Index>(rows, csv::parse_index(row[0]) + 1);
        cols = std::max<Eigen::Index>(cols, csv::parse_index(row[1]) + 1);
    }
    m.values = Eigen::MatrixXcd::Constant(rows, cols, complex(std::nan(""), std::nan("")));
    for (std::size_t n = 0; n < table.size(); ++n) {
        const auto& row = table[n];
        const Semantics sem = semantics_from_string(row[4]);
        if (n == 0) m.semantics = sem;
        if (sem != m.semantics) throw DataError("mixed semantics in field matrix CSV");
        m.values(csv::parse_index(row[0]), csv::parse_index(row[1])) =
            complex(csv::parse_double(row[2]), csv::parse_double(row[3]));
    }
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            if (std::isnan(m.values(i, j).real())) throw DataError("field matrix CSV has missing entries");
        }
    }
    return m;
}

}  // namespace phasescat::solver
