#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "phasescat/cli.hpp"
#include "phasescat/errors.hpp"
#include "phasescat/oracles.hpp"

namespace phasescat::cli {
namespace {

using ojson = nlohmann::ordered_json;
using solver::complex;
using solver::IncidentField;
using solver::Semantics;
using Clock = std::chrono::steady_clock;
constexpr double kPi = std::numbers::pi;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

CheckRow make_row(std::string name, double measured, double tolerance, std::string comparator, std::string detail = {}) {
    bool ok = false;
    if (comparator == "<=") ok = measured <= tolerance;
    else if (comparator == ">") ok = measured > tolerance;
    else if (comparator == ">=") ok = measured >= tolerance;
    else if (comparator == "==") ok = measured == tolerance;
    return {std::move(name), ok ? CheckStatus::pass : CheckStatus::fail, measured, tolerance, std::move(comparator),
            std::move(detail)};
}

CheckRow guarded(const std::string& name, const std::function<CheckRow()>& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        return {name, CheckStatus::error, 0.0, 0.0, "", e.what()};
    }
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string fnv1a_hex(const std::string& s) {
    const std::uint64_t h = fnv1a(s);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

solver::SoftObstacle reference_obstacle(const ExperimentConfig& cfg) {
    if (const auto* o = std::get_if<solver::SoftObstacle>(&cfg.scatterer)) return *o;
    return {geometry::make_curve(geometry::CurveKind::kite, {}, 64)};
}

solver::SoftSurface reference_surface(const ExperimentConfig& cfg, bool need_bump) {
    if (const auto* s = std::get_if<solver::SoftSurface>(&cfg.scatterer)) {
        if (!need_bump || s->profile.amplitude() > 0.0) return *s;
        return {geometry::make_profile(s->profile.a(), s->profile.b(), 0.3), s->options};
    }
    return {geometry::make_profile(-1.0, 1.0, 0.3), {}};
}

// Radius of a circle around the curve center that clears the obstacle.
double clear_radius(const geometry::BoundaryCurve& c) {
    double r = 0.0;
    for (double t : c.node_params()) r = std::max(r, geometry::distance(c.point(t), c.params().center));
    return 2.0 * r + 1.0;
}

Vec2 unit(double th) { return {std::cos(th), std::sin(th)}; }

double rel(complex a, complex b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

void validate_or_throw(const geometry::SourceReceiverLayout& layout, const solver::Scatterer& s) {
    const auto report = geometry::validate_layout(layout, solver::shape_of(s));
    if (report.ok()) return;
    if (report.has("admissibility")) throw AdmissibilityError(report.summary());
    throw ConfigError(report.summary());
}

phaseless::PhasePrior prior_for(const solver::Scatterer& s) {
    return std::holds_alternative<solver::SoftSurface>(s) ? phaseless::PhasePrior::half_plane
                                                          : phaseless::PhasePrior::free_space;
}

// Config-dependent state shared between suite rows.
struct SuiteContext {
    const ExperimentConfig& cfg;
    std::mt19937_64 rng;
    std::optional<solver::FieldMatrix> fm;

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

    const solver::FieldMatrix& field_matrix() {
        if (!fm) fm = solver::field_matrix(cfg.scatterer, build_layout(cfg), Semantics::total);
        return *fm;
    }
};

double boundary_residual_of(const solver::Scatterer& s, double k, const Vec2& z0) {
    const solver::FieldEvaluator ev(s, k);
    double worst = ev.boundary_residual(IncidentField::point(z0, k), 128);
    if (!std::holds_alternative<solver::SoftSurface>(s)) {
        worst = std::max(worst, ev.boundary_residual(IncidentField::plane(unit(0.3), k), 128));
    }
    return worst;
}

CheckRow cross_term_row(const solver::FieldMatrix& fm) {
    const Eigen::Index n = fm.values.cols() - 1;
    const Eigen::VectorXcd v0 = fm.values.col(n);
    const Eigen::MatrixXcd v = fm.values.leftCols(n);
    const auto triple = phaseless::triple_from_fields(v0, v);
    const Eigen::MatrixXd cross = phaseless::cross_term(triple);
    double err = 0.0, scale = 0.0;
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        for (Eigen::Index j = 0; j < v.cols(); ++j) {
            err = std::max(err, std::abs(cross(i, j) - (v0(i) * std::conj(v(i, j))).real()));
            scale = std::max(scale, std::abs(v0(i)) * std::abs(v(i, j)));
        }
    }
    return make_row("cross_term_identity", err / scale, 1e-12, "<=");
}

CheckRow branch_row(const solver::FieldMatrix& fm, const geometry::SourceReceiverLayout& layout,
                    phaseless::PhasePrior prior, double tau_rel, phaseless::RecoveredField* keep = nullptr) {
    const Eigen::Index n = fm.values.cols() - 1;
    const Eigen::VectorXcd v0 = fm.values.col(n);
    const Eigen::MatrixXcd v = fm.values.leftCols(n);
    auto triple = phaseless::triple_from_fields(v0, v);
    triple.layout = layout;
    auto rec = phaseless::resolve_branch(phaseless::branch_candidates(triple, tau_rel), triple, prior);
    const auto spread = phaseless::phase_spread(rec, v);
    const double worst = spread.empty() ? 0.0 : *std::max_element(spread.begin(), spread.end());

    auto adversarial = phaseless::triple_from_fields(v0, v.conjugate());
    adversarial.layout = layout;
    const auto adv = phaseless::resolve_branch(phaseless::branch_candidates(adversarial, tau_rel), adversarial, prior);

    std::ostringstream d;
    d << "block " << rec.block.rows() << "x" << rec.block.cols() << "; consistency " << fmt(rec.consistency)
      << " (conjugate " << fmt(rec.conjugate_score) << "); adversarial consistency " << fmt(adv.consistency)
      << (adv.branch_conflict ? " flagged" : " NOT flagged");
    auto row = make_row("branch_recovery", worst, 1e-6, "<=", d.str());
    if (rec.branch_conflict || !adv.branch_conflict || rec.indeterminate) row.status = CheckStatus::fail;
    if (keep) *keep = std::move(rec);
    return row;
}

using RowFn = std::function<CheckRow(SuiteContext&, Baselines&, bool)>;

const std::vector<std::pair<std::string, RowFn>>& suite_rows() {
    static const std::vector<std::pair<std::string, RowFn>> rows = {
        {"solver_vs_oracle_disk",
         [](SuiteContext& c, Baselines&, bool) {
             const double k = c.cfg.k;
             const auto t0 = Clock::now();
             const solver::SoftObstacleSolver solver(geometry::make_curve(geometry::CurveKind::circle, {}, 64), k);
             const auto inc = IncidentField::plane({1.0, 0.0}, k);
             const auto density = solver.solve(inc);
             const auto disk = oracles::DiskSpec::soft({0.0, 0.0}, 1.0);
             double err = 0.0, scale = 0.0;
             for (int m = 0; m < 64; ++m) {
                 const Vec2 xh = unit(2.0 * kPi * m / 64);
                 const complex ref = oracles::disk_far(disk, inc, xh);
                 err = std::max(err, std::abs(solver::scattered_far(density, xh) - ref));
                 scale = std::max(scale, std::abs(ref));
             }
             const double elapsed = seconds_since(t0);
             auto row = make_row("solver_vs_oracle_disk", err / scale, 1e-8, "<=",
                                 "unit soft disk; N = 64; runtime " + fmt(elapsed) + " s");
             if (elapsed >= 1.0) row.status = CheckStatus::fail;
             return row;
         }},
        {"boundary_residual",
         [](SuiteContext& c, Baselines&, bool) {
             const auto layout = build_layout(c.cfg);
             const double r = boundary_residual_of(c.cfg.scatterer, c.cfg.k, layout.z0);
             return make_row("boundary_residual", r, 1e-8, "<=", solver::describe(c.cfg.scatterer));
         }},
        {"reciprocity_obstacle",
         [](SuiteContext& c, Baselines&, bool) {
             const auto ob = reference_obstacle(c.cfg);
             const solver::FieldEvaluator ev(ob, c.cfg.k);
             const double rho = clear_radius(ob.curve);
             const Vec2 center = ob.curve.params().center;
             double worst = 0.0;
             for (int p = 0; p < 6; ++p) {
                 const Vec2 x = center + rho * unit(c.uniform(0.0, 2.0 * kPi));
                 const Vec2 z = center + rho * unit(c.uniform(0.0, 2.0 * kPi));
                 const complex a = ev.value(IncidentField::point(z, c.cfg.k), x, Semantics::total);
                 const complex b = ev.value(IncidentField::point(x, c.cfg.k), z, Semantics::total);
                 worst = std::max(worst, rel(a, b));
             }
             return make_row("reciprocity_obstacle", worst, 1e-7, "<=", solver::describe(ob) + "; 6 random pairs");
         }},
        {"reciprocity_surface",
         [](SuiteContext& c, Baselines&, bool) {
             const auto surf = reference_surface(c.cfg, false);
             const solver::FieldEvaluator ev(surf, c.cfg.k);
             const double a = surf.profile.a() - 3.0, b = surf.profile.b() + 3.0;
             auto sample = [&] {
                 const double x1 = c.uniform(a, b);
                 return Vec2{x1, surf.profile.f(x1) + c.uniform(0.5, 3.0)};
             };
             double worst = 0.0;
             for (int p = 0; p < 6; ++p) {
                 const Vec2 x = sample(), z = sample();
                 const complex u1 = ev.value(IncidentField::point(z, c.cfg.k), x, Semantics::total);
                 const complex u2 = ev.value(IncidentField::point(x, c.cfg.k), z, Semantics::total);
                 worst = std::max(worst, rel(u1, u2));
             }
             return make_row("reciprocity_surface", worst, 1e-6, "<=", solver::describe(surf) + "; 6 random pairs");
         }},
        {"mixed_reciprocity",
         [](SuiteContext& c, Baselines&, bool) {
             const double k = c.cfg.k;
             const complex g2 = solver::far_field_constant(k);
             const auto ob = reference_obstacle(c.cfg);
             const double rho = clear_radius(ob.curve);
             double worst = 0.0;
             for (const solver::Scatterer& s :
                  {solver::Scatterer(ob), solver::Scatterer(oracles::DiskSpec::soft(ob.curve.params().center, 1.0))}) {
                 const solver::FieldEvaluator ev(s, k);
                 for (int p = 0; p < 4; ++p) {
                     const Vec2 z = ob.curve.params().center + rho * unit(c.uniform(0.0, 2.0 * kPi));
                     const Vec2 xh = unit(c.uniform(0.0, 2.0 * kPi));
                     const complex far = ev.far(IncidentField::point(z, k), xh);
                     const complex near = g2 * ev.value(IncidentField::plane(-1.0 * xh, k), z, Semantics::scattered);
                     worst = std::max(worst, std::abs(far - near) / std::abs(far));
                 }
             }
             return make_row("mixed_reciprocity", worst, 1e-6, "<=", solver::describe(ob) + " and the soft disk");
         }},
        {"far_field_limit",
         [](SuiteContext& c, Baselines&, bool) {
             const double k = c.cfg.k;
             const auto ob = reference_obstacle(c.cfg);
             const solver::FieldEvaluator ev(ob, k);
             const auto inc = IncidentField::plane({1.0, 0.0}, k);
             const double R = 1e7 / k;
             double err = 0.0, scale = 0.0;
             for (int p = 0; p < 8; ++p) {
                 const Vec2 xh = unit(c.uniform(0.0, 2.0 * kPi));
                 const complex far = ev.far(inc, xh);
                 const complex near = ev.value(inc, ob.curve.params().center + R * xh, Semantics::scattered) *
                                      std::sqrt(R) * std::polar(1.0, -k * R);
                 // Phase reference at the curve center: shift the far field accordingly.
                 const complex shifted = far * std::polar(1.0, k * geometry::dot(xh, ob.curve.params().center));
                 err = std::max(err, std::abs(near - shifted));
                 scale = std::max(scale, std::abs(far));
             }
             return make_row("far_field_limit", err / scale, 1e-6, "<=", "R = " + fmt(R));
         }},
        {"translation_far_field",
         [](SuiteContext& c, Baselines&, bool) {
             const double k = c.cfg.k;
             const auto ob = reference_obstacle(c.cfg);
             const solver::FieldEvaluator e1(ob, k);
             const solver::FieldEvaluator e2(solver::SoftObstacle{ob.curve.translated({0.5, 0.0})}, k);
             const auto inc = IncidentField::plane(unit(0.3), k);
             double err = 0.0, scale = 0.0;
             for (int m = 0; m < 32; ++m) {
                 const Vec2 xh = unit(2.0 * kPi * m / 32);
                 const double a = std::abs(e1.far(inc, xh)), b = std::abs(e2.far(inc, xh));
                 err = std::max(err, std::abs(a - b));
                 scale = std::max(scale, a);
             }
             return make_row("translation_far_field", err / scale, 1e-7, "<=", "shift (0.5, 0); plane wave");
         }},
        {"translation_near_phaseless",
         [](SuiteContext& c, Baselines& baselines, bool record) {
             const auto layout = build_layout(c.cfg);
             const auto a = phaseless::synthesize_triple(oracles::DiskSpec::soft({0.0, 0.0}, 1.0), layout);
             const auto b = phaseless::synthesize_triple(oracles::DiskSpec::soft({0.5, 0.0}, 1.0), layout);
             const double d = phaseless::discrepancy(a, b).total;
             const std::string key = "translation_near_phaseless/" + c.cfg.name;
             if (record) baselines.set(key, d);
             const auto recorded = baselines.get(key);
             return make_row("translation_near_phaseless", d, baseline_threshold(recorded), ">",
                             recorded ? "baseline " + fmt(*recorded) : "no baseline recorded; floor applied");
         }},
        {"cross_term_identity", [](SuiteContext& c, Baselines&, bool) { return cross_term_row(c.field_matrix()); }},
        {"branch_recovery",
         [](SuiteContext& c, Baselines&, bool) {
             return branch_row(c.field_matrix(), build_layout(c.cfg), prior_for(c.cfg.scatterer), c.cfg.tau_rel);
         }},
        {"rough_flat_exact",
         [](SuiteContext& c, Baselines&, bool) {
             const auto bump = reference_surface(c.cfg, false);
             const solver::SoftSurface flat{geometry::make_profile(bump.profile.a(), bump.profile.b(), 0.0),
                                            bump.options};
             const solver::FieldEvaluator ev(flat, c.cfg.k);
             double err = 0.0, scale = 0.0;
             for (int p = 0; p < 6; ++p) {
                 const Vec2 z{c.uniform(-4.0, 4.0), c.uniform(0.5, 4.0)};
                 const Vec2 x{c.uniform(-4.0, 4.0), c.uniform(0.5, 4.0)};
                 const complex exact = oracles::flat_halfplane_exact(c.cfg.k, z, x);
                 err = std::max(err, std::abs(ev.value(IncidentField::point(z, c.cfg.k), x, Semantics::total) - exact));
                 scale = std::max(scale, std::abs(exact));
             }
             return make_row("rough_flat_exact", err / scale, 1e-10, "<=", "h = 0 against the image solution");
         }},
        {"rough_margin_convergence",
         [](SuiteContext& c, Baselines&, bool) {
             auto surf = reference_surface(c.cfg, true);
             const Vec2 z{0.5 * (surf.profile.a() + surf.profile.b()), surf.profile.amplitude() + 2.0};
             std::vector<double> res;
             std::string detail = "residuals";
             for (double m : {4.0, 6.0, 8.0}) {
                 surf.options.margin_wavelengths = m;
                 res.push_back(solver::FieldEvaluator(surf, c.cfg.k).boundary_residual(IncidentField::point(z, c.cfg.k), 128));
                 detail += " M=" + fmt(m) + ":" + fmt(res.back());
             }
             auto row = make_row("rough_margin_convergence", res.back(), res.front(), "<=", detail);
             if (!(res[1] <= res[0] && res[2] <= res[1])) row.status = CheckStatus::fail;
             return row;
         }},
        {"admissibility_gate",
         [](SuiteContext& c, Baselines&, bool) {
             ExperimentConfig bad = c.cfg;
             bad.layout.gamma.radius = 2.5 / c.cfg.k;
             try {
                 const auto layout = build_layout(bad);
                 (void)solver::field_matrix(bad.scatterer, layout, Semantics::total);
             } catch (const AdmissibilityError& e) {
                 return make_row("admissibility_gate", 2.5, geometry::kDirichletDiskBound, ">=",
                                 std::string("rejected before solving: ") + e.what());
             }
             return CheckRow{"admissibility_gate", CheckStatus::fail, 2.5, geometry::kDirichletDiskBound, ">=",
                             "k*radius = 2.5 was accepted"};
         }},
    };
    return rows;
}

std::filesystem::path prepare_dir(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    return dir;
}

template <class Writer>
void write_artifact(RunReport& report, const std::filesystem::path& dir, const std::string& name,
                    const std::string& kind, Writer&& writer) {
    std::ostringstream os;
    writer(os);
    write_file_atomic(dir / name, os.str());
    report.artifacts.push_back({name, kind});
}

void finish_report(RunReport& report, const std::filesystem::path& dir) {
    report.artifacts.push_back({"checks.csv", "checks_csv"});
    report.artifacts.push_back({"report.json", "report_json"});
    std::ostringstream checks;
    write_checks_csv(checks, report.checks);
    write_file_atomic(dir / "checks.csv", checks.str());
    write_file_atomic(dir / "report.json", report_to_json(report).dump(2) + "\n");
}

// Re-reads every data artifact written so far through the module readers.
CheckRow roundtrip_row(const RunReport& report, const std::filesystem::path& dir, Eigen::Index receivers = 0,
                       Eigen::Index sources = 0) {
    return guarded("artifact_roundtrip", [&] {
        int n = 0;
        for (const auto& a : report.artifacts) {
            std::ifstream in(dir / a.path);
            if (!in) throw DataError("missing artifact " + a.path);
            if (a.kind == "field_csv") (void)solver::read_field_csv(in);
            else if (a.kind == "triple_csv") (void)phaseless::read_triple_csv(in);
            else if (a.kind == "recovered_csv") (void)phaseless::read_recovered_csv(in, receivers, sources);
            else continue;
            ++n;
        }
        return make_row("artifact_roundtrip", n, n, "==", std::to_string(n) + " data files parsed back");
    });
}

}  // namespace

const std::vector<std::string>& verify_check_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [name, fn] : suite_rows()) v.push_back(name);
        return v;
    }();
    return names;
}

std::filesystem::path resolve_output_dir(const std::optional<std::string>& flag, const ExperimentConfig& config) {
    if (flag && !flag->empty()) return *flag;
    if (config.output_dir && !config.output_dir->empty()) return *config.output_dir;
    if (const char* env = std::getenv("PHASESCAT_OUT"); env && *env) return env;
    return "phasescat-out";
}

std::vector<CheckRow> verify_suite(const ExperimentConfig& config, std::uint64_t seed,
                                   const std::vector<std::string>& filter, Baselines& baselines, bool record) {
    validate_or_throw(build_layout(config), config.scatterer);
    SuiteContext ctx{config, std::mt19937_64(seed), std::nullopt};
    std::vector<CheckRow> out;
    for (const auto& [name, fn] : suite_rows()) {
        if (!filter.empty() && std::find(filter.begin(), filter.end(), name) == filter.end()) continue;
        // Each row draws from its own stream so filtering does not change the samples.
        ctx.rng.seed(seed ^ fnv1a(name));
        out.push_back(guarded(name, [&] { return fn(ctx, baselines, record); }));
    }
    return out;
}

RunReport run(const ExperimentConfig& config, const RunOptions& options, std::optional<RunKind> kind) {
    RunReport report;
    report.kind = kind.value_or(config.run);
    report.seed = options.seed.value_or(config.seed);
    report.config = config.echo;
    report.run_id = fnv1a_hex(to_string(report.kind) + "|" + std::to_string(report.seed) + "|" + config.echo.dump());
    if (report.kind == RunKind::discriminate) throw ConfigError("discriminate needs two configs");

    const auto t_all = Clock::now();
    const auto layout = build_layout(config);
    validate_or_throw(layout, config.scatterer);
    const auto dir = prepare_dir(options.output_dir);
    report.checks.push_back(make_row("layout_validation", 0.0, 0.0, "==", "all layout hypotheses hold"));

    if (report.kind == RunKind::verify) {
        auto baselines = Baselines::load(options.baseline_path);
        const auto& filter = options.checks.empty() ? config.checks : options.checks;
        const auto t0 = Clock::now();
        auto rows = verify_suite(config, report.seed, filter, baselines, options.record_baseline);
        report.timings.emplace_back("verify", seconds_since(t0));
        report.checks.insert(report.checks.end(), rows.begin(), rows.end());
        if (options.record_baseline) baselines.save(options.baseline_path);
    } else {
        auto t0 = Clock::now();
        const auto fm = solver::field_matrix(config.scatterer, layout, Semantics::total);
        report.timings.emplace_back("field_matrix", seconds_since(t0));
        if (report.kind == RunKind::forward) {
            write_artifact(report, dir, "field.csv", "field_csv", [&](std::ostream& os) { solver::write_field_csv(os, fm); });
            t0 = Clock::now();
            report.checks.push_back(guarded("boundary_residual", [&] {
                return make_row("boundary_residual", boundary_residual_of(config.scatterer, config.k, layout.z0), 1e-8,
                                "<=", solver::describe(config.scatterer));
            }));
            report.timings.emplace_back("boundary_residual", seconds_since(t0));
        } else {
            auto triple = phaseless::triple_from_matrix(fm);
            triple.layout = layout;
            write_artifact(report, dir, "triple.csv", "triple_csv",
                           [&](std::ostream& os) { phaseless::write_triple_csv(os, triple); });
            double scale = 0.0;
            for (Eigen::Index i = 0; i < triple.s.rows(); ++i) scale = std::max(scale, triple.r(i) + triple.s.row(i).maxCoeff());
            report.checks.push_back(
                make_row("triangle_inequality", phaseless::triangle_violation(triple) / scale, 1e-12, "<="));
            report.checks.push_back(guarded("cross_term_identity", [&] { return cross_term_row(fm); }));
            if (report.kind == RunKind::retrieve) {
                t0 = Clock::now();
                phaseless::RecoveredField rec;
                report.checks.push_back(guarded("branch_recovery", [&] {
                    return branch_row(fm, layout, prior_for(config.scatterer), config.tau_rel, &rec);
                }));
                if (rec.values.size() > 0) {
                    write_artifact(report, dir, "recovered.csv", "recovered_csv",
                                   [&](std::ostream& os) { phaseless::write_recovered_csv(os, rec); });
                }
                report.timings.emplace_back("retrieve", seconds_since(t0));
            }
        }
        report.checks.push_back(roundtrip_row(report, dir, layout.sigma.n_points(), layout.gamma.n_points()));
    }
    report.timings.emplace_back("total", seconds_since(t_all));
    finish_report(report, dir);
    return report;
}

RunReport discriminate(const ExperimentConfig& a, const ExperimentConfig& b, const RunOptions& options) {
    if (a.k != b.k || a.echo["layout"] != b.echo["layout"]) {
        throw ConfigError("layout mismatch: discriminate needs identical wavenumber and layout in both configs");
    }
    RunReport report;
    report.kind = RunKind::discriminate;
    report.seed = options.seed.value_or(a.seed);
    report.config = {{"a", a.echo}, {"b", b.echo}};
    report.run_id = fnv1a_hex("discriminate|" + std::to_string(report.seed) + "|" + report.config.dump());

    const auto t0 = Clock::now();
    const auto layout = build_layout(a);
    validate_or_throw(layout, a.scatterer);
    validate_or_throw(layout, b.scatterer);
    const auto dir = prepare_dir(options.output_dir);
    const auto ta = phaseless::synthesize_triple(a.scatterer, layout);
    const auto tb = phaseless::synthesize_triple(b.scatterer, layout);
    report.timings.emplace_back("synthesize", seconds_since(t0));
    write_artifact(report, dir, "triple_a.csv", "triple_csv", [&](std::ostream& os) { phaseless::write_triple_csv(os, ta); });
    write_artifact(report, dir, "triple_b.csv", "triple_csv", [&](std::ostream& os) { phaseless::write_triple_csv(os, tb); });

    const auto d = phaseless::discrepancy(ta, tb);
    const std::string parts = "r " + fmt(d.r) + "; s " + fmt(d.s) + "; t " + fmt(d.t);
    if (a.echo["scatterer"] == b.echo["scatterer"]) {
        report.checks.push_back(make_row("discrepancy", d.total, 1e-12, "<=", "identical scatterers; " + parts));
    } else {
        auto baselines = Baselines::load(options.baseline_path);
        const std::string key = "discriminate/" + a.name + "|" + b.name;
        if (options.record_baseline) {
            baselines.set(key, d.total);
            baselines.save(options.baseline_path);
        }
        const auto recorded = baselines.get(key);
        report.checks.push_back(make_row("discrepancy", d.total, baseline_threshold(recorded), ">",
                                         (recorded ? "baseline " + fmt(*recorded) : std::string("no baseline recorded; floor applied")) +
                                             "; " + parts));
    }
    report.checks.push_back(roundtrip_row(report, dir));
    report.timings.emplace_back("total", seconds_since(t0));
    finish_report(report, dir);
    return report;
}

}  // namespace phasescat::cli
