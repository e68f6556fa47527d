#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "thinrod/studies.hpp"

namespace thinrod {

enum ExitCode { kOk = 0, kInternal = 1, kConfig = 2, kSolver = 3, kCheckFailed = 4 };

namespace cli_detail {

inline std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

inline json read_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config " + path);
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
}

struct Common {
    std::string config;
    std::string out;
    int modes = 0;
    double tol = 0.0;
    bool quiet = false;
};

inline StudyConfig load_with_overrides(const Common& c) {
    json j = read_json_file(c.config);
    if (!j.is_object()) throw ConfigError("config: expected an object");
    if (c.modes > 0) j["n_modes"] = c.modes;
    if (c.tol > 0.0) j["tol"] = c.tol;
    if (!c.out.empty()) j["output_dir"] = c.out;
    return parse_config(j);
}

inline void print_table(std::ostream& out, const SweepReport& r) {
    for (const auto& res : r.results) {
        out << "eps " << format_g17(res.eps) << '\n';
        out << "  mode  lambda                lambda/pi^2       residual   class         trans\n";
        for (std::size_t i = 0; i < res.pairs.size(); ++i) {
            const auto& p = res.pairs[i];
            char line[200];
            std::snprintf(line, sizeof line, "  %4d  %-20.12g  %-16.10g  %-9.2e  %-12s  %.4f\n",
                          p.index, p.lambda, p.lambda / (std::numbers::pi * std::numbers::pi),
                          p.residual, to_string(res.reports[i].classification).c_str(),
                          res.reports[i].transverse_fraction);
            out << line;
        }
    }
}

inline int cmd_solve(const Common& c, std::optional<double> eps, bool vtk, std::ostream& out) {
    StudyConfig cfg = load_with_overrides(c);
    if (eps) cfg.eps_list = {*eps};
    cfg.eps_list.resize(1);
    if (vtk) cfg.export_vtk = true;
    validate(cfg);
    const SweepReport r = run_sweep(cfg);
    const auto files = write_report(r, "solve");
    if (!c.quiet) {
        print_table(out, r);
        for (const auto& f : files) out << "wrote " << f << '\n';
    }
    return kOk;
}

inline int cmd_sweep(const Common& c, std::ostream& out) {
    const StudyConfig cfg = load_with_overrides(c);
    const SweepReport r = run_sweep(cfg);
    const auto files = write_report(r, "report");
    if (!c.quiet) {
        print_table(out, r);
        if (r.limit) {
            out << "limit lambda0:";
            for (double v : r.limit->lambda0) out << ' ' << fmt("%.10g", v);
            out << '\n';
            for (std::size_t n = 0; n < r.gaps.size(); ++n) {
                out << "  gap mode " << n + 1 << ':';
                for (double g : r.gaps[n]) out << ' ' << fmt("%.4e", g);
                out << (r.gaps_decreasing[n] ? "  decreasing" : "  NOT decreasing");
                out << "  slope " << (r.slopes[n] ? fmt("%.3f", *r.slopes[n]) : "n/a") << '\n';
            }
        }
        for (const auto& f : files) out << "wrote " << f << '\n';
    }
    return kOk;
}

inline int cmd_analytic(const std::string& bc_name, double ell1, double eps, int modes,
                        const std::string& outdir, bool quiet, std::ostream& out) {
    const BcMode bc = parse_bc(bc_name);
    if (modes < 1) throw ConfigError("analytic: --modes must be >= 1");
    // Neumann lists the zero mode as index 0 ahead of `modes` nonzero ones
    const int first = bc == BcMode::Neumann ? 0 : 1;
    const auto table = enumerate_sorted(bc, ell1, eps, modes + (first == 0 ? 1 : 0));
    json rows = json::array();
    std::string csv = "mode,eps,lambda,residual,classification,transverse_fraction\n";
    if (!quiet) out << "  mode   m   r   s  lambda/pi^2         lambda\n";
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto& m = table[i];
        const int idx = first + static_cast<int>(i);
        const double tf = transverse_fraction(m);
        rows.push_back({{"index", idx},
                        {"m", m.m},
                        {"r", m.r},
                        {"s", m.s},
                        {"lambda_over_pi2", m.pi2_multiple},
                        {"lambda", m.lambda},
                        {"transverse_fraction", tf},
                        {"classification", to_string(classify(tf))}});
        csv += std::to_string(idx) + ',' + format_g17(eps) + ',' + format_g17(m.lambda) + ",0," +
               to_string(classify(tf)) + ',' + format_g17(tf) + '\n';
        if (!quiet) {
            char line[160];
            std::snprintf(line, sizeof line, "  %4d %3d %3d %3d  %-18.12g  %.12g\n", idx, m.m, m.r,
                          m.s, m.pi2_multiple, m.lambda);
            out << line;
        }
    }
    if (!outdir.empty()) {
        const json j{{"bc", to_string(bc)}, {"ell1", ell1}, {"eps", eps}, {"modes", rows}};
        write_text(std::filesystem::path(outdir) / "analytic.json", to_json_text(j));
        write_text(std::filesystem::path(outdir) / "analytic.csv", csv);
    }
    return kOk;
}

inline int cmd_limit1d(const Common& c, int elements, std::ostream& out) {
    json j = read_json_file(c.config);
    if (!j.is_object()) throw ConfigError("config: expected an object");
    Weight1D w;
    double ell0 = 0.0, ell1 = 1.0;
    int n = 5;
    std::string outdir = "out";
    json echo;
    if (j.contains("weight")) {
        // free-standing piecewise-constant weight
        detail::check_keys(j, {"weight", "n_modes", "elements_1d", "output_dir"}, "config");
        const json& wj = j.at("weight");
        detail::check_keys(wj, {"breaks", "values"}, "weight");
        const auto br = detail::require<std::vector<double>>(wj, "breaks", "weight");
        const auto vals = detail::require<std::vector<double>>(wj, "values", "weight");
        w = Weight1D::pieces(br, vals);
        ell0 = br.front();
        ell1 = br.back();
        n = detail::get_or<int>(j, "n_modes", n, "config");
        if (elements == 0) elements = detail::get_or<int>(j, "elements_1d", 2000, "config");
        outdir = detail::get_or<std::string>(j, "output_dir", outdir, "config");
        echo = {{"breaks", br}, {"values", vals}};
    } else {
        if (c.modes > 0) j["n_modes"] = c.modes;
        const StudyConfig cfg = parse_config(j);
        w = weight_from_domain(cfg.domain);
        ell0 = cfg.domain.ell0();
        ell1 = cfg.domain.ell1();
        n = cfg.n_modes;
        if (elements == 0) elements = cfg.elements_1d;
        outdir = cfg.output_dir;
        echo = domain_to_json(cfg.domain);
    }
    if (c.modes > 0) n = c.modes;
    if (!c.out.empty()) outdir = c.out;
    const auto pairs = solve_limit(w, ell0, ell1, n, elements);
    std::vector<double> lam;
    for (const auto& p : pairs) lam.push_back(p.lambda0);
    json res{{"source", echo}, {"ell0", ell0}, {"ell1", ell1}, {"elements", elements},
             {"lambda0", lam}, {"c0", w.c0}, {"c1", w.c1}};
    std::vector<double> orc;
    if (w.piecewise_constant()) orc = shooting_oracle(w, ell0, ell1, n);
    res["oracle"] = orc.empty() ? json(nullptr) : json(orc);
    std::string csv = "mode,lambda0,oracle\n";
    for (int i = 0; i < n; ++i)
        csv += std::to_string(i + 1) + ',' + format_g17(lam[i]) + ',' +
               (orc.empty() ? std::string() : format_g17(orc[i])) + '\n';
    write_text(std::filesystem::path(outdir) / "limit1d.json", to_json_text(res));
    write_text(std::filesystem::path(outdir) / "limit1d.csv", csv);
    if (!c.quiet) {
        out << "  n  lambda0             lambda0/pi^2      oracle\n";
        for (int i = 0; i < n; ++i) {
            char line[160];
            std::snprintf(line, sizeof line, "  %d  %-18.12g  %-16.10g  %s\n", i + 1, lam[i],
                          lam[i] / (std::numbers::pi * std::numbers::pi),
                          orc.empty() ? "-" : fmt("%.12g", orc[i]).c_str());
            out << line;
        }
    }
    return kOk;
}

/// FEM against the separable prism solution and the 1D limit; exit 4 when a check fails.
inline int cmd_compare(const Common& c, std::ostream& out, std::ostream& err) {
    StudyConfig cfg = load_with_overrides(c);
    cfg.analytic_compare = true;
    const SweepReport r = run_sweep(cfg);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const double L = cfg.domain.length();
    json per_eps = json::array();
    bool ok = true;
    std::string csv = "mode,eps,lambda,analytic,relative_error,limit\n";
    for (std::size_t k = 0; k < r.results.size(); ++k) {
        const auto& res = r.results[k];
        const auto modes = enumerate_sorted(cfg.bc, L, res.eps, static_cast<int>(res.pairs.size()));
        double max_rel = 0.0;
        bool from_above = true;
        double max_limit_gap = 0.0;
        json rows = json::array();
        for (std::size_t i = 0; i < res.pairs.size(); ++i) {
            const double fem = res.pairs[i].lambda;
            const double an = modes[i].lambda;
            const double rel = an != 0.0 ? (fem - an) / an : fem;
            if (an != 0.0) {
                max_rel = std::max(max_rel, std::abs(rel));
                from_above = from_above && fem >= an * (1.0 - 10.0 * cfg.tol);
            }
            json row{{"index", res.pairs[i].index}, {"m", modes[i].m}, {"r", modes[i].r},
                     {"s", modes[i].s}, {"lambda", num(fem)}, {"analytic", an},
                     {"relative_error", num(rel)}, {"residual", num(res.pairs[i].residual)}};
            double limit = std::numeric_limits<double>::quiet_NaN();
            if (cfg.bc == BcMode::Mixed && modes[i].r == 0 && modes[i].s == 0) {
                // unit weight: the limit spectrum is m^2 pi^2 / L^2
                limit = modes[i].m * modes[i].m * pi2 / (L * L);
                max_limit_gap = std::max(max_limit_gap, std::abs(an - limit) / limit);
            }
            row["limit"] = num(limit);
            rows.push_back(row);
            csv += std::to_string(res.pairs[i].index) + ',' + format_g17(res.eps) + ',' +
                   format_g17(fem) + ',' + format_g17(an) + ',' + format_g17(rel) + ',' +
                   (std::isfinite(limit) ? format_g17(limit) : std::string()) + '\n';
        }
        const bool rel_ok = max_rel <= cfg.compare_tolerance;
        const bool limit_ok = max_limit_gap <= 4.0 * std::numeric_limits<double>::epsilon();
        ok = ok && rel_ok && from_above && limit_ok;
        per_eps.push_back({{"eps", res.eps},
                           {"modes", rows},
                           {"max_relative_error", max_rel},
                           {"relative_error_ok", rel_ok},
                           {"from_above", from_above},
                           {"analytic_limit_max_relative_gap", max_limit_gap},
                           {"analytic_limit_ok", limit_ok}});
        if (!c.quiet) {
            out << "eps " << format_g17(res.eps) << ": max relative error "
                << fmt("%.4e", max_rel) << (rel_ok ? " (ok)" : " (FAIL)") << ", from above "
                << (from_above ? "yes" : "NO") << ", analytic/limit gap "
                << fmt("%.1e", max_limit_gap) << '\n';
        }
    }
    const json j{{"config", config_to_json(cfg)},
                 {"tolerance", cfg.compare_tolerance},
                 {"results", per_eps},
                 {"passed", ok}};
    write_text(std::filesystem::path(cfg.output_dir) / "compare.json", to_json_text(j));
    write_text(std::filesystem::path(cfg.output_dir) / "compare.csv", csv);
    if (!ok) {
        err << "compare: acceptance check failed (tolerance " << cfg.compare_tolerance << ")\n";
        return kCheckFailed;
    }
    return kOk;
}

} // namespace cli_detail

/// Entry point shared by the executable and the tests. args[0] is the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
    CLI::App app{"Spectra of the Laplacian on thin rods", "thinrod"};
    app.require_subcommand(1);
    cli_detail::Common c;
    auto add_common = [&](CLI::App* s, bool need_config) {
        auto* opt = s->add_option("--config", c.config, "JSON study config");
        if (need_config) opt->required()->check(CLI::ExistingFile);
        s->add_option("--out", c.out, "output directory");
        s->add_option("--modes", c.modes, "number of modes")->check(CLI::PositiveNumber);
        s->add_option("--tol", c.tol, "solver residual tolerance")->check(CLI::PositiveNumber);
        s->add_flag("--quiet", c.quiet, "suppress tables on stdout");
    };

    auto* solve = app.add_subcommand("solve", "one (domain, bc, eps) instance");
    add_common(solve, true);
    std::optional<double> eps_override;
    bool vtk = false;
    solve->add_option("--eps", eps_override, "override eps");
    solve->add_flag("--vtk", vtk, "export VTK fields");

    auto* analytic = app.add_subcommand("analytic", "separable prism spectrum");
    add_common(analytic, false);
    std::string bc = "mixed";
    double ell1 = 1.0, eps = 0.1;
    analytic->add_option("--bc", bc, "mixed|neumann|dirichlet");
    analytic->add_option("--ell1", ell1, "rod length");
    analytic->add_option("--eps", eps, "thinness");

    auto* limit = app.add_subcommand("limit1d", "1D limit spectrum");
    add_common(limit, true);
    int elements = 0;
    limit->add_option("--elements", elements, "1D element count")->check(CLI::PositiveNumber);

    auto* sweep = app.add_subcommand("sweep", "eps sweep from a JSON config");
    add_common(sweep, true);

    auto* compare = app.add_subcommand("compare", "FEM vs analytic vs limit");
    add_common(compare, true);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back(); // program name
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "thinrod: " << e.what() << '\n';
        return kConfig;
    }

    try {
        if (*solve) return cli_detail::cmd_solve(c, eps_override, vtk, out);
        if (*analytic)
            return cli_detail::cmd_analytic(bc, ell1, eps, c.modes > 0 ? c.modes : 11, c.out,
                                            c.quiet, out);
        if (*limit) return cli_detail::cmd_limit1d(c, elements, out);
        if (*sweep) return cli_detail::cmd_sweep(c, out);
        if (*compare) return cli_detail::cmd_compare(c, out, err);
    } catch (const ConfigError& e) {
        err << "thinrod: configuration error: " << e.what() << '\n';
        return kConfig;
    } catch (const GeometryError& e) {
        err << "thinrod: geometry error: " << e.what() << '\n';
        return kConfig;
    } catch (const DomainError& e) {
        err << "thinrod: domain error: " << e.what() << '\n';
        return kConfig;
    } catch (const json::exception& e) {
        err << "thinrod: configuration error: " << e.what() << '\n';
        return kConfig;
    } catch (const SolverError& e) {
        err << "thinrod: solver failure: " << e.what() << '\n';
        return kSolver;
    } catch (const std::exception& e) {
        err << "thinrod: " << e.what() << '\n';
        return kInternal;
    }
    return kInternal;
}

} // namespace thinrod
