#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "phasescat/cli.hpp"
#include "phasescat/errors.hpp"

namespace phasescat::cli {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;
constexpr double kPi = std::numbers::pi;

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
    throw ConfigError("config field `" + path + "`: " + what);
}

// Object view that rejects unknown keys so typos surface as errors.
class Obj {
public:
    Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) field_error(path_.empty() ? "<root>" : path_, "expected an object");
    }

    std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    bool has(const std::string& key) const {
        used_.insert(key);
        return j_.contains(key) && !j_.at(key).is_null();
    }
    const json& at(const std::string& key) const {
        used_.insert(key);
        if (!j_.contains(key)) field_error(child(key), "missing");
        return j_.at(key);
    }

    double number(const std::string& key) const {
        const auto& v = at(key);
        if (!v.is_number()) field_error(child(key), "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) field_error(child(key), "must be finite");
        return d;
    }
    double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

    int integer(const std::string& key, int fallback) const {
        if (!has(key)) return fallback;
        const auto& v = at(key);
        if (!v.is_number_integer()) field_error(child(key), "expected an integer");
        return v.get<int>();
    }

    std::string string(const std::string& key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        const auto& v = at(key);
        if (!v.is_string()) field_error(child(key), "expected a string");
        return v.get<std::string>();
    }

    Vec2 vec2(const std::string& key) const {
        const auto& v = at(key);
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
            field_error(child(key), "expected [x, y]");
        }
        return {v[0].get<double>(), v[1].get<double>()};
    }
    Vec2 vec2(const std::string& key, Vec2 fallback) const { return has(key) ? vec2(key) : fallback; }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!used_.count(key)) field_error(child(key), "unknown field");
        }
    }

private:
    const json& j_;
    std::string path_;
    mutable std::set<std::string> used_;
};

ojson vec_json(const Vec2& v) { return ojson::array({v.x, v.y}); }

solver::Scatterer parse_scatterer(const Obj& o, ojson& echo) {
    const std::string type = o.string("type", "");
    echo["type"] = type;
    if (type == "obstacle") {
        const std::string shape = o.string("shape", "kite");
        geometry::CurveKind kind;
        try {
            kind = geometry::curve_kind_from_string(shape);
        } catch (const ConfigError&) {
            field_error(o.child("shape"), "expected circle, ellipse or kite");
        }
        const std::string bc = o.string("bc", "soft");
        if (bc != "soft") field_error(o.child("bc"), "obstacles support the soft condition only (use a disk for impedance or medium)");
        geometry::CurveParams p;
        p.center = o.vec2("center", {0.0, 0.0});
        if (kind == geometry::CurveKind::circle) {
            p.radius_x = p.radius_y = o.number("radius", 1.0);
        } else if (kind == geometry::CurveKind::ellipse) {
            const Vec2 r = o.vec2("radii", {1.0, 0.5});
            p.radius_x = r.x;
            p.radius_y = r.y;
        } else {
            p.scale = o.number("scale", 1.0);
        }
        const int nodes = o.integer("nodes", 64);
        echo["shape"] = shape;
        echo["bc"] = bc;
        echo["center"] = vec_json(p.center);
        if (kind == geometry::CurveKind::circle) echo["radius"] = p.radius_x;
        if (kind == geometry::CurveKind::ellipse) echo["radii"] = vec_json({p.radius_x, p.radius_y});
        if (kind == geometry::CurveKind::kite) echo["scale"] = p.scale;
        echo["nodes"] = nodes;
        try {
            return solver::SoftObstacle{geometry::make_curve(kind, p, nodes)};
        } catch (const ConfigError& e) {
            field_error(o.child("shape"), e.what());
        }
    }
    if (type == "disk") {
        const std::string bc = o.string("bc", "soft");
        const Vec2 c = o.vec2("center", {0.0, 0.0});
        const double a = o.number("radius", 1.0);
        if (!(a > 0.0)) field_error(o.child("radius"), "must be positive");
        echo["bc"] = bc;
        echo["center"] = vec_json(c);
        echo["radius"] = a;
        if (bc == "soft") return oracles::DiskSpec::soft(c, a);
        if (bc == "impedance") {
            const double lambda = o.number("lambda", 1.0);
            echo["lambda"] = lambda;
            return oracles::DiskSpec::impedance(c, a, lambda);
        }
        if (bc == "medium") {
            std::complex<double> n{1.0, 0.0};
            if (o.has("index")) {
                const auto& v = o.at("index");
                if (v.is_number()) {
                    n = v.get<double>();
                } else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
                    n = {v[0].get<double>(), v[1].get<double>()};
                } else {
                    field_error(o.child("index"), "expected a number or [re, im]");
                }
            }
            if (!(n.real() > 0.0) || n.imag() < 0.0) field_error(o.child("index"), "needs Re n > 0 and Im n >= 0");
            echo["index"] = ojson::array({n.real(), n.imag()});
            return oracles::DiskSpec::medium(c, a, n);
        }
        field_error(o.child("bc"), "expected soft, impedance or medium");
    }
    if (type == "surface") {
        const Vec2 support = o.vec2("support", {-1.0, 1.0});
        const double h = o.number("height", 0.3);
        if (h < 0.0) field_error(o.child("height"), "must be nonnegative");
        solver::SurfaceOptions opt;
        opt.margin_wavelengths = o.number("margin", opt.margin_wavelengths);
        opt.taper_wavelengths = o.number("taper", opt.taper_wavelengths);
        opt.panels_per_wavelength = o.number("panels_per_wavelength", opt.panels_per_wavelength);
        opt.grading_levels = o.integer("grading_levels", opt.grading_levels);
        if (!(opt.margin_wavelengths > opt.taper_wavelengths && opt.taper_wavelengths > 0.0)) {
            field_error(o.child("margin"), "needs margin > taper > 0");
        }
        if (!(opt.panels_per_wavelength > 0.0)) field_error(o.child("panels_per_wavelength"), "must be positive");
        if (opt.grading_levels < 0) field_error(o.child("grading_levels"), "must be nonnegative");
        echo["support"] = vec_json(support);
        echo["height"] = h;
        echo["margin"] = opt.margin_wavelengths;
        echo["taper"] = opt.taper_wavelengths;
        echo["panels_per_wavelength"] = opt.panels_per_wavelength;
        echo["grading_levels"] = opt.grading_levels;
        try {
            return solver::SoftSurface{geometry::make_profile(support.x, support.y, h), opt};
        } catch (const ConfigError& e) {
            field_error(o.child("support"), e.what());
        }
    }
    field_error(o.child("type"), "expected obstacle, disk or surface");
}

ArcSpec parse_arc(const Obj& o, const ArcSpec& fallback, ojson& echo) {
    ArcSpec a = fallback;
    a.center = o.vec2("center", a.center);
    a.radius = o.number("radius", a.radius);
    if (!(a.radius > 0.0)) field_error(o.child("radius"), "must be positive");
    if (o.has("aperture") && o.has("aperture_pi")) field_error(o.child("aperture"), "give aperture or aperture_pi, not both");
    if (o.has("aperture")) {
        const Vec2 t = o.vec2("aperture");
        a.theta0 = t.x;
        a.theta1 = t.y;
    } else if (o.has("aperture_pi")) {
        const Vec2 t = o.vec2("aperture_pi");
        a.theta0 = kPi * t.x;
        a.theta1 = kPi * t.y;
    }
    if (!(a.theta1 > a.theta0) || a.theta1 - a.theta0 >= 2.0 * kPi) {
        field_error(o.child("aperture"), "needs theta0 < theta1 < theta0 + 2 pi");
    }
    a.points = o.integer("points", a.points);
    if (a.points < 2) field_error(o.child("points"), "must be at least 2");
    o.finish();
    echo["center"] = vec_json(a.center);
    echo["radius"] = a.radius;
    echo["aperture"] = ojson::array({a.theta0, a.theta1});
    echo["points"] = a.points;
    return a;
}

}  // namespace

std::string to_string(RunKind kind) {
    switch (kind) {
        case RunKind::forward: return "forward";
        case RunKind::measure: return "measure";
        case RunKind::retrieve: return "retrieve";
        case RunKind::discriminate: return "discriminate";
        case RunKind::verify: return "verify";
    }
    return "forward";
}

RunKind run_kind_from_string(const std::string& name) {
    for (auto k : {RunKind::forward, RunKind::measure, RunKind::retrieve, RunKind::discriminate, RunKind::verify}) {
        if (to_string(k) == name) return k;
    }
    throw ConfigError("unknown run kind '" + name + "'");
}

ExperimentConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        // The library message already carries line and column.
        std::string what = e.what();
        if (const auto p = what.find("] "); p != std::string::npos) what = what.substr(p + 2);
        throw ConfigError("config " + what);
    }
    const Obj root(doc, "");
    ExperimentConfig cfg;
    ojson echo;

    cfg.name = root.string("name", "experiment");
    echo["name"] = cfg.name;

    cfg.k = root.number("wavenumber");
    if (!(cfg.k > 0.0)) field_error("wavenumber", "must be positive");
    echo["wavenumber"] = cfg.k;

    {
        ojson s;
        const Obj o(root.at("scatterer"), "scatterer");
        cfg.scatterer = parse_scatterer(o, s);
        o.finish();
        echo["scatterer"] = s;
    }

    {
        // Both arcs above the scatterer, facing down, radius kept admissible.
        const double r = std::min(2.0, 2.0 / cfg.k);
        ArcSpec g{{-3.0, 4.0}, r, kPi, 2.0 * kPi, 16};
        ArcSpec s{{3.0, 4.0}, r, kPi, 2.0 * kPi, 16};
        ojson l;
        if (root.has("layout")) {
            const Obj o(root.at("layout"), "layout");
            ojson ge, se;
            if (o.has("gamma")) {
                g = parse_arc(Obj(o.at("gamma"), "layout.gamma"), g, ge);
            } else {
                parse_arc(Obj(json::object(), "layout.gamma"), g, ge);
            }
            if (o.has("sigma")) {
                s = parse_arc(Obj(o.at("sigma"), "layout.sigma"), s, se);
            } else {
                parse_arc(Obj(json::object(), "layout.sigma"), s, se);
            }
            if (o.has("z0")) cfg.layout.z0 = o.vec2("z0");
            o.finish();
            l["gamma"] = ge;
            l["sigma"] = se;
        } else {
            ojson ge, se;
            parse_arc(Obj(json::object(), "layout.gamma"), g, ge);
            parse_arc(Obj(json::object(), "layout.sigma"), s, se);
            l["gamma"] = ge;
            l["sigma"] = se;
        }
        cfg.layout.gamma = g;
        cfg.layout.sigma = s;
        if (cfg.layout.z0) l["z0"] = vec_json(*cfg.layout.z0);
        echo["layout"] = l;
    }

    try {
        cfg.run = run_kind_from_string(root.string("run", "forward"));
    } catch (const ConfigError&) {
        field_error("run", "expected forward, measure, retrieve, discriminate or verify");
    }
    echo["run"] = to_string(cfg.run);

    if (root.has("checks")) {
        const auto& c = root.at("checks");
        if (!c.is_array()) field_error("checks", "expected a list of check names");
        const auto& known = verify_check_names();
        for (const auto& item : c) {
            if (!item.is_string()) field_error("checks", "expected a list of check names");
            const auto name = item.get<std::string>();
            if (std::find(known.begin(), known.end(), name) == known.end()) field_error("checks", "unknown check '" + name + "'");
            cfg.checks.push_back(name);
        }
        echo["checks"] = cfg.checks;
    }
    if (root.has("output_dir")) {
        cfg.output_dir = root.string("output_dir", "");
        echo["output_dir"] = *cfg.output_dir;
    }
    if (root.has("seed")) {
        const auto& v = root.at("seed");
        if (!v.is_number_unsigned()) field_error("seed", "expected a nonnegative integer");
        cfg.seed = v.get<std::uint64_t>();
    }
    echo["seed"] = cfg.seed;
    cfg.tau_rel = root.number("tau_rel", cfg.tau_rel);
    if (!(cfg.tau_rel > 0.0 && cfg.tau_rel < 1.0)) field_error("tau_rel", "must lie in (0, 1)");
    echo["tau_rel"] = cfg.tau_rel;
    root.finish();
    cfg.echo = std::move(echo);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

geometry::SourceReceiverLayout build_layout(const ExperimentConfig& config) {
    auto arc = [&](const ArcSpec& a, const char* which) {
        try {
            return geometry::make_admissible_arc(a.center, a.radius, a.theta0, a.theta1, a.points, config.k);
        } catch (const AdmissibilityError& e) {
            throw AdmissibilityError(std::string("config field `layout.") + which + ".radius`: " + e.what());
        } catch (const ConfigError& e) {
            field_error(std::string("layout.") + which, e.what());
        }
    };
    auto g = arc(config.layout.gamma, "gamma");
    auto s = arc(config.layout.sigma, "sigma");
    const Vec2 z0 = config.layout.z0 ? *config.layout.z0 : geometry::default_reference_source(g, s, config.k);
    return {z0, std::move(g), std::move(s), config.k};
}

}  // namespace phasescat::cli
