#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "thinrod/analytic.hpp"
#include "thinrod/assembly.hpp"
#include "thinrod/eigensolve.hpp"
#include "thinrod/errors.hpp"
#include "thinrod/geometry.hpp"
#include "thinrod/limit1d.hpp"
#include "thinrod/mesh.hpp"
#include "thinrod/modes.hpp"

namespace thinrod {

using json = nlohmann::json;

// ---------------------------------------------------------------------------------------
// deterministic JSON output: sorted keys (nlohmann's default map), %.17g floats, null for
// non-finite values

namespace detail {

inline void write_json_string(std::ostream& os, const std::string& s) {
    os << json(s).dump();
}

inline void write_json(std::ostream& os, const json& j, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) os << ",\n";
            first = false;
            os << pad;
            write_json_string(os, it.key());
            os << ": ";
            write_json(os, it.value(), indent, depth + 1);
        }
        os << '\n' << close << '}';
        return;
    }
    case json::value_t::array: {
        if (j.empty()) {
            os << "[]";
            return;
        }
        // short scalar arrays stay on one line
        bool flat = j.size() <= 16;
        for (const auto& v : j) flat = flat && !v.is_structured();
        if (flat) {
            os << '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ", ";
                write_json(os, j[i], indent, depth + 1);
            }
            os << ']';
            return;
        }
        os << "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) os << ",\n";
            os << pad;
            write_json(os, j[i], indent, depth + 1);
        }
        os << '\n' << close << ']';
        return;
    }
    case json::value_t::number_float: {
        const double v = j.get<double>();
        if (!std::isfinite(v)) {
            os << "null";
            return;
        }
        os << format_g17(v);
        return;
    }
    default: os << j.dump(); return;
    }
}

} // namespace detail

inline std::string to_json_text(const json& j) {
    std::ostringstream os;
    detail::write_json(os, j, 2, 0);
    os << '\n';
    return os.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec)
            throw std::runtime_error("cannot create directory " + path.parent_path().string() +
                                     ": " + ec.message());
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << text;
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

/// null for NaN/inf, the value otherwise
inline json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ---------------------------------------------------------------------------------------
// configuration

namespace detail {

inline void check_keys(const json& j, const std::set<std::string>& allowed, const char* where) {
    if (!j.is_object()) throw ConfigError(std::string(where) + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(std::string(where) + ": unknown key '" + it.key() + "'");
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const char* where) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string(where) + "." + key + ": " + e.what());
    }
}

template <class T>
T require(const json& j, const char* key, const char* where) {
    if (!j.contains(key)) throw ConfigError(std::string(where) + ": missing '" + key + "'");
    return get_or<T>(j, key, T{}, where);
}

} // namespace detail

inline Profile parse_profile(const json& j) {
    detail::check_keys(j, {"name", "params"}, "profile");
    const auto name = detail::require<std::string>(j, "name", "profile");
    const auto p = detail::get_or<std::vector<double>>(j, "params", {}, "profile");
    if (name == "constant") {
        if (p.size() != 1) throw ConfigError("profile constant: params = [value]");
        return Profile::constant(p[0]);
    }
    if (name == "sin_bump") {
        if (p.size() < 2 || p.size() > 4)
            throw ConfigError("profile sin_bump: params = [base, amplitude, (wavenumber), (phase)]");
        return Profile::sin_bump(p[0], p[1], p.size() > 2 ? p[2] : std::numbers::pi,
                                 p.size() > 3 ? p[3] : 0.0);
    }
    if (name == "step") {
        if (p.size() != 3) throw ConfigError("profile step: params = [left, right, at]");
        return Profile::step(p[0], p[1], p[2]);
    }
    throw ConfigError("unknown profile '" + name + "' (sin_bump|constant|step)");
}

inline json profile_to_json(const Profile& p) {
    const auto a = p.params();
    switch (p.shape()) {
    case Profile::Shape::Constant: return {{"name", "constant"}, {"params", {a[0]}}};
    case Profile::Shape::SinBump:
        return {{"name", "sin_bump"}, {"params", {a[0], a[1], a[2], a[3]}}};
    case Profile::Shape::Step: return {{"name", "step"}, {"params", {a[0], a[1], a[2]}}};
    }
    return nullptr;
}

/// Builds a domain from the "domain" object; `eps_fallback` is used when it has no "eps".
inline RodDomain parse_domain(const json& j, std::optional<double> eps_fallback = {}) {
    if (!j.is_object()) throw ConfigError("domain: expected an object");
    const auto kind = detail::require<std::string>(j, "kind", "domain");
    const double ell0 = detail::get_or<double>(j, "ell0", 0.0, "domain");
    const double ell1 = detail::get_or<double>(j, "ell1", 1.0, "domain");
    double eps = eps_fallback.value_or(1.0);
    if (j.contains("eps")) eps = detail::get_or<double>(j, "eps", eps, "domain");
    std::set<std::string> keys{"kind", "ell0", "ell1", "eps"};
    try {
        if (kind == "prism") {
            keys.insert({"width", "height"});
            detail::check_keys(j, keys, "domain");
            return RodDomain::prism(ell0, ell1, eps, detail::get_or<double>(j, "width", 1.0, "domain"),
                                    detail::get_or<double>(j, "height", 1.0, "domain"));
        }
        if (kind == "two_prism") {
            keys.insert({"outer_half_width", "inner_half_width", "junction"});
            detail::check_keys(j, keys, "domain");
            return RodDomain::two_prism(
                ell0, ell1, eps, detail::get_or<double>(j, "outer_half_width", 1.0, "domain"),
                detail::get_or<double>(j, "inner_half_width", 0.5, "domain"),
                detail::get_or<double>(j, "junction", 0.5 * (ell0 + ell1), "domain"));
        }
        if (kind == "profiled_height" || kind == "profiled_width") {
            const char* other = kind == "profiled_height" ? "width" : "height";
            keys.insert({"profile", other});
            detail::check_keys(j, keys, "domain");
            if (!j.contains("profile")) throw ConfigError("domain: missing 'profile'");
            const Profile h = parse_profile(j.at("profile"));
            const double o = detail::get_or<double>(j, other, 1.0, "domain");
            return kind == "profiled_height" ? RodDomain::profiled_height(ell0, ell1, eps, h, o)
                                             : RodDomain::profiled_width(ell0, ell1, eps, h, o);
        }
        if (kind == "profiled_box") {
            keys.insert("profiles");
            detail::check_keys(j, keys, "domain");
            if (!j.contains("profiles") || !j.at("profiles").is_array() ||
                j.at("profiles").size() != 4)
                throw ConfigError("domain: profiled_box needs 'profiles' with four entries");
            std::array<Profile, 4> h;
            for (int i = 0; i < 4; ++i) h[i] = parse_profile(j.at("profiles")[i]);
            return RodDomain::profiled_box(ell0, ell1, eps, h);
        }
    } catch (const GeometryError& e) {
        throw ConfigError(std::string("domain: ") + e.what());
    }
    throw ConfigError("domain: unknown kind '" + kind +
                      "' (prism|two_prism|profiled_height|profiled_width|profiled_box)");
}

inline json domain_to_json(const RodDomain& d) {
    json j{{"kind", to_string(d.kind())}, {"ell0", d.ell0()}, {"ell1", d.ell1()}};
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, RectSection>) {
                j["width"] = s.width;
                j["height"] = s.height;
            } else if constexpr (std::is_same_v<T, TwoPrismSection>) {
                j["outer_half_width"] = s.outer_half;
                j["inner_half_width"] = s.inner_half;
                j["junction"] = s.junction;
            } else if constexpr (std::is_same_v<T, ProfiledSection>) {
                j["profile"] = profile_to_json(s.h);
                j[d.kind() == DomainKind::ProfiledHeight ? "width" : "height"] = s.other;
            } else {
                json arr = json::array();
                for (const auto& p : s.h) arr.push_back(profile_to_json(p));
                j["profiles"] = arr;
            }
        },
        d.section());
    return j;
}

struct StudyConfig {
    RodDomain domain = RodDomain::prism(0.0, 1.0, 1.0);
    BcMode bc = BcMode::Mixed;
    std::vector<double> eps_list;
    int n_modes = 6;
    std::array<int, 3> resolution{32, 8, 8};
    int elements_1d = 2000;
    double tol = 1e-8;
    std::string output_dir = "out";
    bool analytic_compare = false;
    std::optional<std::vector<double>> cuts;
    Thresholds thresholds;
    bool export_vtk = false;
    std::optional<double> bound_slack; // relative; default 10 * tol
    double compare_tolerance = 0.01;

    double slack() const { return bound_slack.value_or(10.0 * tol); }
    std::vector<double> segment_cuts() const { return cuts.value_or(domain.discontinuities()); }
};

inline void validate(const StudyConfig& c) {
    if (c.eps_list.empty()) throw ConfigError("config: eps_list must not be empty");
    for (std::size_t i = 0; i < c.eps_list.size(); ++i) {
        if (!(c.eps_list[i] > 0.0 && c.eps_list[i] <= 1.0))
            throw ConfigError("config: every eps must lie in (0, 1]");
        if (i > 0 && !(c.eps_list[i] < c.eps_list[i - 1]))
            throw ConfigError("config: eps_list must be strictly decreasing");
    }
    if (c.n_modes < 1) throw ConfigError("config: n_modes must be >= 1");
    for (int r : c.resolution)
        if (r < 1) throw ConfigError("config: resolution entries must be positive");
    if (c.elements_1d < 1000) throw ConfigError("config: elements_1d must be >= 1000");
    if (!(c.tol > 0.0 && c.tol < 1e-2)) throw ConfigError("config: tol must lie in (0, 1e-2)");
    if (!(c.compare_tolerance > 0.0)) throw ConfigError("config: compare_tolerance must be > 0");
    if (c.bound_slack && !(*c.bound_slack >= 0.0))
        throw ConfigError("config: bound_slack must be >= 0");
    validate(c.thresholds);
}

inline StudyConfig parse_config(const json& j) {
    detail::check_keys(j,
                       {"domain", "bc", "eps_list", "n_modes", "resolution", "elements_1d", "tol",
                        "output_dir", "analytic_compare", "cuts", "thresholds", "export_vtk",
                        "bound_slack", "compare_tolerance"},
                       "config");
    StudyConfig c;
    c.eps_list = detail::get_or<std::vector<double>>(j, "eps_list", {}, "config");
    if (!j.contains("domain")) throw ConfigError("config: missing 'domain'");
    const json& dj = j.at("domain");
    std::optional<double> fallback;
    if (!c.eps_list.empty()) fallback = c.eps_list.front();
    c.domain = parse_domain(dj, fallback);
    // a lone domain eps acts as a one-entry sweep
    if (!j.contains("eps_list") && dj.contains("eps")) c.eps_list = {c.domain.eps()};
    c.bc = parse_bc(detail::get_or<std::string>(j, "bc", "mixed", "config"));
    c.n_modes = detail::get_or<int>(j, "n_modes", c.n_modes, "config");
    if (j.contains("resolution")) {
        const auto r = detail::get_or<std::vector<int>>(j, "resolution", {}, "config");
        if (r.size() != 3) throw ConfigError("config: resolution needs three entries");
        c.resolution = {r[0], r[1], r[2]};
    }
    c.elements_1d = detail::get_or<int>(j, "elements_1d", c.elements_1d, "config");
    c.tol = detail::get_or<double>(j, "tol", c.tol, "config");
    c.output_dir = detail::get_or<std::string>(j, "output_dir", c.output_dir, "config");
    c.analytic_compare = detail::get_or<bool>(j, "analytic_compare", false, "config");
    if (j.contains("cuts")) c.cuts = detail::get_or<std::vector<double>>(j, "cuts", {}, "config");
    if (j.contains("thresholds")) {
        const json& t = j.at("thresholds");
        detail::check_keys(t, {"lo", "hi"}, "thresholds");
        c.thresholds.lo = detail::get_or<double>(t, "lo", c.thresholds.lo, "thresholds");
        c.thresholds.hi = detail::get_or<double>(t, "hi", c.thresholds.hi, "thresholds");
    }
    c.export_vtk = detail::get_or<bool>(j, "export_vtk", false, "config");
    if (j.contains("bound_slack"))
        c.bound_slack = detail::get_or<double>(j, "bound_slack", 0.0, "config");
    c.compare_tolerance =
        detail::get_or<double>(j, "compare_tolerance", c.compare_tolerance, "config");
    validate(c);
    return c;
}

inline json config_to_json(const StudyConfig& c) {
    json j{{"domain", domain_to_json(c.domain)},
           {"bc", to_string(c.bc)},
           {"eps_list", c.eps_list},
           {"n_modes", c.n_modes},
           {"resolution", c.resolution},
           {"elements_1d", c.elements_1d},
           {"tol", c.tol},
           {"output_dir", c.output_dir},
           {"analytic_compare", c.analytic_compare},
           {"cuts", c.segment_cuts()},
           {"thresholds", {{"lo", c.thresholds.lo}, {"hi", c.thresholds.hi}}},
           {"export_vtk", c.export_vtk},
           {"bound_slack", c.slack()},
           {"compare_tolerance", c.compare_tolerance}};
    return j;
}

inline StudyConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config " + path.string());
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return parse_config(j);
}

// ---------------------------------------------------------------------------------------
// sweeps

namespace detail {

/// Runs f and prefixes any library error with the stage name, keeping its type.
template <class F>
auto staged(const std::string& stage, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConfigError& e) {
        throw ConfigError(stage + ": " + e.what());
    } catch (const SolverError& e) {
        throw SolverError(stage + ": " + e.what());
    } catch (const GeometryError& e) {
        throw GeometryError(stage + ": " + e.what());
    } catch (const DomainError& e) {
        throw DomainError(stage + ": " + e.what());
    }
}

inline std::string eps_tag(double eps) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "eps=%.6g", eps);
    return buf;
}

} // namespace detail

struct EpsResult {
    double eps = 0.0;
    std::vector<EigenPair> pairs; // vectors kept for export
    std::vector<ModeReport> reports;
};

struct BoundCheck {
    int mode = 0;
    double eps = 0.0;
    double lambda = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    bool lower_ok = false;
    bool upper_ok = false;
};

struct LimitResult {
    std::vector<double> lambda0;
    std::vector<double> oracle; // empty unless the weight is piecewise constant
    double oracle_max_abs_diff = std::numeric_limits<double>::quiet_NaN();
    int elements = 0;
};

struct SweepReport {
    StudyConfig config;
    std::size_t nodes = 0, cells = 0;
    int free_dofs = 0;
    double c0 = 0.0, c1 = 0.0;
    std::vector<EpsResult> results;             // one per eps
    std::optional<LimitResult> limit;           // Mixed only
    std::vector<std::vector<double>> gaps;      // [mode][eps], NaN when undefined
    std::vector<std::optional<double>> slopes;  // per mode
    std::vector<bool> gaps_decreasing;          // per mode
    std::vector<BoundCheck> bounds;
    std::vector<std::vector<double>> analytic;  // [eps][mode], prism compare only

    /// Table rows: the zero mode (Neumann) plus n_modes modes.
    std::size_t rows() const { return results.empty() ? 0 : results.front().pairs.size(); }
};

/// 1D limit spectrum with the oracle cross-check for piecewise-constant weights.
inline LimitResult solve_limit_for(const RodDomain& d, int n, int elements) {
    LimitResult out;
    out.elements = elements;
    const Weight1D w = weight_from_domain(d);
    for (const auto& p : solve_limit(w, d.ell0(), d.ell1(), n, elements))
        out.lambda0.push_back(p.lambda0);
    if (w.piecewise_constant()) {
        out.oracle = shooting_oracle(w, d.ell0(), d.ell1(), n);
        out.oracle_max_abs_diff = 0.0;
        for (int i = 0; i < n; ++i)
            out.oracle_max_abs_diff =
                std::max(out.oracle_max_abs_diff, std::abs(out.lambda0[i] - out.oracle[i]));
    }
    return out;
}

/// Least-squares slope of log(gap) against log(eps); nullopt with fewer than two points.
inline std::optional<double> fit_slope(const std::vector<double>& eps,
                                       const std::vector<double>& gap) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < eps.size(); ++i)
        if (std::isfinite(gap[i]) && gap[i] > 0.0) {
            x.push_back(std::log(eps[i]));
            y.push_back(std::log(gap[i]));
        }
    if (x.size() < 2) return std::nullopt;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= x.size();
    my /= x.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) return std::nullopt;
    return sxy / sxx;
}

/// Lower bound (ell1 - ell0)^-2 and upper bound (c1/c0) lambda0_n for every mode n >= 1.
inline std::vector<BoundCheck> check_bounds(const SweepReport& r, double c0, double c1,
                                            const std::vector<double>& lambda0_unweighted,
                                            double slack) {
    std::vector<BoundCheck> out;
    const double L = r.config.domain.length();
    for (const auto& res : r.results)
        for (const auto& p : res.pairs) {
            if (p.index < 1 || p.index > static_cast<int>(lambda0_unweighted.size())) continue;
            BoundCheck b;
            b.mode = p.index;
            b.eps = res.eps;
            b.lambda = p.lambda;
            b.lower = 1.0 / (L * L);
            b.upper = c1 / c0 * lambda0_unweighted[p.index - 1];
            b.lower_ok = p.lambda >= b.lower * (1.0 - slack);
            b.upper_ok = p.lambda <= b.upper * (1.0 + slack);
            out.push_back(b);
        }
    return out;
}

/// Writes one VTK per mode into `dir` plus index.json; returns the written paths.
inline std::vector<std::string> export_fields(const HexMesh& mesh, const SparsePair& sp,
                                              const std::vector<EigenPair>& pairs,
                                              const std::vector<ModeReport>& reports,
                                              const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("export_fields: cannot create " + dir.string() + ": " + ec.message());
    std::vector<std::string> files;
    json index = json::object();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "mode_%03d.vtk", pairs[i].index);
        const auto path = dir / name;
        const std::vector<double> u = sp.expand(pairs[i].vector);
        try {
            write_vtk(path.string(), mesh, u, "u");
        } catch (const std::exception& e) {
            throw std::runtime_error("export_fields: " + path.string() + ": " + e.what());
        }
        json entry{{"index", pairs[i].index}, {"lambda", num(pairs[i].lambda)}};
        entry["classification"] =
            i < reports.size() ? json(to_string(reports[i].classification)) : json(nullptr);
        index[name] = entry;
        files.push_back(path.string());
    }
    write_text(dir / "index.json", to_json_text(index));
    files.push_back((dir / "index.json").string());
    return files;
}

inline bool analytic_applicable(const StudyConfig& c) {
    if (c.domain.kind() != DomainKind::Prism) return false;
    const auto& s = std::get<RectSection>(c.domain.section());
    return s.width == 1.0 && s.height == 1.0;
}

inline SweepReport run_sweep(const StudyConfig& c) {
    validate(c);
    SweepReport rep;
    rep.config = c;
    rep.c0 = c.domain.bounds().c0;
    rep.c1 = c.domain.bounds().c1;
    const HexMesh mesh = detail::staged("mesh", [&] { return build_mesh(c.domain, c.resolution); });
    const FullSystem fs = detail::staged("assemble", [&] { return assemble_full(mesh); });
    rep.nodes = mesh.num_nodes();
    rep.cells = mesh.num_cells();
    rep.free_dofs =
        static_cast<int>(mesh.num_nodes() - constrained_nodes(fs, c.bc).size());

    for (std::size_t k = 0; k < c.eps_list.size(); ++k) {
        const double eps = c.eps_list[k];
        const std::string tag = detail::eps_tag(eps);
        EpsResult r;
        r.eps = eps;
        const SparsePair sp = detail::staged("assemble[" + tag + "]",
                                             [&] { return assemble(fs, c.bc, eps, true); });
        r.pairs = detail::staged("solve[" + tag + "]",
                                 [&] { return solve_lowest(sp, c.n_modes, c.tol); });
        const auto cuts = c.segment_cuts();
        detail::staged("classify[" + tag + "]", [&] {
            for (const auto& p : r.pairs)
                r.reports.push_back(make_report(p, mesh, sp, cuts, c.thresholds));
            return 0;
        });
        if (c.export_vtk) {
            char dirname[32];
            std::snprintf(dirname, sizeof dirname, "eps_%02zu", k);
            export_fields(mesh, sp, r.pairs, r.reports,
                          std::filesystem::path(c.output_dir) / "fields" / dirname);
        }
        rep.results.push_back(std::move(r));
    }

    const std::size_t ne = c.eps_list.size();
    if (c.bc == BcMode::Mixed) {
        rep.limit = detail::staged("limit1d", [&] {
            return solve_limit_for(c.domain, c.n_modes, std::max(c.elements_1d, 4 * c.n_modes));
        });
        rep.gaps.assign(c.n_modes, std::vector<double>(ne, std::numeric_limits<double>::quiet_NaN()));
        for (int n = 0; n < c.n_modes; ++n) {
            std::vector<double> fit_gap(ne, std::numeric_limits<double>::quiet_NaN());
            bool decreasing = true;
            for (std::size_t k = 0; k < ne; ++k) {
                const double g = std::abs(rep.results[k].pairs[n].lambda - rep.limit->lambda0[n]);
                rep.gaps[n][k] = g;
                // transverse and hybrid modes escape as eps -> 0; keep them out of the fit
                if (rep.results[k].reports[n].classification == ModeClass::Longitudinal)
                    fit_gap[k] = g;
                if (k > 0 && !(g < rep.gaps[n][k - 1])) decreasing = false;
            }
            rep.slopes.push_back(fit_slope(c.eps_list, fit_gap));
            rep.gaps_decreasing.push_back(decreasing);
        }
    }

    rep.bounds = check_bounds(rep, rep.c0, rep.c1,
                              unweighted_dirichlet(c.domain.ell0(), c.domain.ell1(), c.n_modes),
                              c.slack());

    if (c.analytic_compare) {
        if (!analytic_applicable(c))
            throw ConfigError("analytic_compare: requires a prism with unit cross-section");
        for (double eps : c.eps_list) {
            const int count = static_cast<int>(rep.rows());
            std::vector<double> col;
            for (const auto& m : enumerate_sorted(c.bc, c.domain.length(), eps, count))
                col.push_back(m.lambda);
            rep.analytic.push_back(col);
        }
    }
    return rep;
}

inline json report_to_json(const SweepReport& r) {
    json j;
    j["config"] = config_to_json(r.config);
    j["mesh"] = {{"resolution", r.config.resolution},
                 {"nodes", r.nodes},
                 {"cells", r.cells},
                 {"free_dofs", r.free_dofs}};
    j["area_bounds"] = {{"c0", r.c0}, {"c1", r.c1}};
    json results = json::array();
    for (std::size_t k = 0; k < r.results.size(); ++k) {
        const auto& res = r.results[k];
        json modes = json::array();
        for (std::size_t i = 0; i < res.pairs.size(); ++i) {
            const auto& p = res.pairs[i];
            const auto& m = res.reports[i];
            json e{{"index", p.index},
                   {"lambda", num(p.lambda)},
                   {"residual", num(p.residual)},
                   {"classification", to_string(m.classification)},
                   {"transverse_fraction", num(m.transverse_fraction)},
                   {"axial_energy", num(m.axial_energy)},
                   {"transverse_energy", num(m.transverse_energy)},
                   {"axial_mass", m.axial_mass},
                   {"participation", num(m.participation)}};
            if (!r.analytic.empty()) {
                const double a = r.analytic[k][i];
                e["analytic"] = num(a);
                e["relative_error"] = a != 0.0 ? num((p.lambda - a) / a) : num(p.lambda);
            }
            modes.push_back(e);
        }
        results.push_back({{"eps", res.eps}, {"modes", modes}});
    }
    j["results"] = results;
    if (r.limit) {
        json lim{{"lambda0", r.limit->lambda0}, {"elements", r.limit->elements}};
        lim["oracle"] = r.limit->oracle.empty() ? json(nullptr) : json(r.limit->oracle);
        lim["oracle_max_abs_diff"] = num(r.limit->oracle_max_abs_diff);
        j["limit"] = lim;
        json gaps = json::array(), slopes = json::array(), dec = json::array();
        for (std::size_t n = 0; n < r.gaps.size(); ++n) {
            json row = json::array();
            for (double g : r.gaps[n]) row.push_back(num(g));
            gaps.push_back(row);
            slopes.push_back(r.slopes[n] ? json(*r.slopes[n]) : json(nullptr));
            dec.push_back(static_cast<bool>(r.gaps_decreasing[n]));
        }
        j["gaps"] = gaps;
        j["slopes"] = slopes;
        j["gaps_decreasing"] = dec;
    } else {
        j["limit"] = nullptr;
    }
    json checks = json::array();
    bool all_ok = true;
    for (const auto& b : r.bounds) {
        checks.push_back({{"mode", b.mode},
                          {"eps", b.eps},
                          {"lambda", num(b.lambda)},
                          {"lower", b.lower},
                          {"upper", b.upper},
                          {"lower_ok", b.lower_ok},
                          {"upper_ok", b.upper_ok}});
        all_ok = all_ok && b.lower_ok && b.upper_ok;
    }
    j["bounds"] = {{"checks", checks}, {"all_ok", all_ok}, {"slack", r.config.slack()}};
    return j;
}

inline std::string table_csv(const std::vector<EpsResult>& results) {
    std::string out = "mode,eps,lambda,residual,classification,transverse_fraction\n";
    for (const auto& res : results)
        for (std::size_t i = 0; i < res.pairs.size(); ++i) {
            out += std::to_string(res.pairs[i].index) + ',' + format_g17(res.eps) + ',' +
                   format_g17(res.pairs[i].lambda) + ',' + format_g17(res.pairs[i].residual) + ',' +
                   to_string(res.reports[i].classification) + ',' +
                   format_g17(res.reports[i].transverse_fraction) + '\n';
        }
    return out;
}

/// report.json and eigenvalues.csv under the configured output directory.
inline std::vector<std::string> write_report(const SweepReport& r, const std::string& stem = "report") {
    const std::filesystem::path dir(r.config.output_dir);
    const auto js = dir / (stem + ".json");
    const auto csv = dir / (stem + ".csv");
    write_text(js, to_json_text(report_to_json(r)));
    write_text(csv, table_csv(r.results));
    return {js.string(), csv.string()};
}

} // namespace thinrod
