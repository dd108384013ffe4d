#include "aplab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "aplab/analysis.hpp"
#include "aplab/errors.hpp"
#include "aplab/oracle1d.hpp"
#include "aplab/plots.hpp"
#include "aplab/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace aplab {

namespace {

std::string error_code(const Error& e) {
    if (dynamic_cast<const ParameterError*>(&e)) return "parameter";
    if (dynamic_cast<const ContractError*>(&e)) return "contract";
    if (dynamic_cast<const DomainError*>(&e)) return "domain";
    if (dynamic_cast<const StencilError*>(&e)) return "stencil";
    if (dynamic_cast<const DegenerateDataError*>(&e)) return "degenerate_data";
    if (dynamic_cast<const ConvergenceError*>(&e)) return "convergence";
    if (dynamic_cast<const DivergenceError*>(&e)) return "divergence";
    if (dynamic_cast<const OracleError*>(&e)) return "oracle";
    if (dynamic_cast<const ConfigError*>(&e)) return "config";
    if (dynamic_cast<const ManifestError*>(&e)) return "manifest";
    if (dynamic_cast<const IoError*>(&e)) return "io";
    return "error";
}

json error_json(const Error& e) {
    return json{{"error_code", error_code(e)}, {"message", e.what()}};
}

template <typename Fn>
void guarded_block(json& report, const char* key, Fn&& fn) {
    try {
        report[key] = fn();
    } catch (const Error& e) {
        report[key] = error_json(e);
    }
}

json point_json(const Point& p, int dim) {
    json out = json::array();
    for (int a = 0; a < dim; ++a) out.push_back(p[static_cast<std::size_t>(a)]);
    return out;
}

json scenario_echo(const Scenario& s, const OperatorSpec& spec, const GridPtr& grid) {
    json domain = {{"shape", s.shape},
                   {"resolution", s.resolution},
                   {"spacing", grid->spacing()}};
    if (s.shape == "interval") domain["length"] = s.length;
    if (s.shape == "half_disk") domain["radius"] = s.radius;
    if (s.shape == "half_rectangle") {
        domain["halfwidth"] = s.halfwidth;
        domain["height"] = s.height;
    }
    return json{
        {"name", s.name},
        {"dim", s.dim},
        {"gamma", s.gamma},
        {"beta", s.params().beta()},
        {"lambda", s.lambda},
        {"seed", s.seed},
        {"operator", {{"kind", spec.name()}, {"params", spec.describe()}}},
        {"domain", domain},
        {"boundary",
         {{"generator", s.generator},
          {"scale", s.scale},
          {"offset", s.offset},
          {"aniso_c", s.aniso_c}}},
        {"solver",
         {{"max_sweeps", s.solve.max_sweeps},
          {"tol", s.solve.tol_residual},
          {"damping", s.solve.damping},
          {"over_relaxation", s.solve.over_relaxation},
          {"inner_sweeps", s.solve.inner_sweeps}}},
    };
}

void write_json_file(const json& j, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << "\n";
    if (!out) throw IoError("failed while writing " + path.string());
}

bool block_ok(const json& report, const char* key) {
    return report.contains(key) && report[key].is_object() &&
           !report[key].contains("error_code");
}

std::vector<double> doubles_of(const json& arr) {
    std::vector<double> out;
    for (const auto& v : arr) out.push_back(v.get<double>());
    return out;
}

} // namespace

nlohmann::json run_scenario(const Scenario& s, const std::string& out_dir) {
    validate_scenario(s);
    const ApParams params = s.params();
    const OperatorSpec spec = s.make_operator();
    const GridPtr grid = s.make_grid();
    const std::vector<double> data = s.make_boundary_data(grid);

    json report;
    report["format_version"] = kReportFormatVersion;
    report["name"] = s.name;
    report["scenario"] = scenario_echo(s, spec, grid);

    guarded_block(report, "operator_audit", [&] {
        const EllipticityReport audit = ellipticity_report(spec, 1000, s.seed, s.dim);
        return json{{"measured_lambda", audit.measured_lambda},
                    {"declared_lambda", spec.declared_lambda()},
                    {"convexity_violations", audit.convexity_violations},
                    {"trace_gradient_error", audit.trace_gradient_error},
                    {"n_samples", audit.n_samples},
                    {"seed", audit.seed}};
    });

    SolveResult result;
    bool solved = false;
    try {
        result = spec.kind() == OperatorKind::Laplacian
                     ? solve_laplacian(grid, data, params, s.solve)
                     : solve_fully_nonlinear(grid, data, spec, params, s.solve);
        solved = true;
    } catch (const Error& e) {
        report["solve"] = error_json(e);
    }

    const fs::path dir = fs::path(out_dir) / s.name;
    std::error_code fs_err;
    fs::create_directories(dir, fs_err);
    if (fs_err) throw IoError("cannot create output directory " + dir.string());

    if (solved) {
        const ScalarField& u = result.field;
        json solve_block = {{"sweeps", result.sweeps_used},
                            {"final_residual", result.final_residual},
                            {"complementarity_gap", result.complementarity_gap},
                            {"effective_tol", result.effective_tol},
                            {"max_u", u.max_abs()},
                            {"positivity_floor", positivity_floor(u)}};
        if (!result.energy_history.empty()) {
            bool mono = true;
            for (std::size_t i = 0; i + 1 < result.energy_history.size(); ++i)
                if (result.energy_history[i + 1] > result.energy_history[i]) mono = false;
            solve_block["energy"] = {{"initial", result.energy_history.front()},
                                     {"final", result.energy_history.back()},
                                     {"recorded", result.energy_history.size()},
                                     {"nonincreasing", mono}};
        }
        report["solve"] = solve_block;

        const FreeBoundarySet fb = extract_free_boundary(u);
        {
            json pts = json::array();
            for (const Point& p : fb.points) pts.push_back(point_json(p, fb.dim));
            report["free_boundary"] = {
                {"count", fb.points.size()}, {"floor", fb.floor}, {"points", pts}};
        }

        const Point origin{};

        if (!s.weiss_radii.empty())
            guarded_block(report, "weiss", [&] {
                const WeissProfile wp = weiss_profile(u, origin, s.weiss_radii, params);
                return json{{"x0", point_json(wp.x0, s.dim)},
                            {"radii", wp.radii},
                            {"values", wp.values},
                            {"max_drop", wp.max_drop},
                            {"spread", wp.spread}};
            });

        Point growth_x0 = origin;
        bool have_base = true;
        if (s.growth_base == "nearest_fb") {
            have_base = false;
            double best = std::numeric_limits<double>::infinity();
            for (const Point& p : fb.points) {
                const double d = norm(p, s.dim);
                if (d < best) {
                    best = d;
                    growth_x0 = p;
                    have_base = true;
                }
            }
        }
        if (!s.growth_radii.empty()) {
            if (!have_base) {
                report["growth"] = json{{"error_code", "degenerate_data"},
                                        {"message", "no free boundary point to anchor growth"}};
            } else {
                guarded_block(report, "growth", [&] {
                    const GrowthReport gr = growth_exponent(u, growth_x0, s.growth_radii, params);
                    return json{{"x0", point_json(gr.x0, s.dim)},
                                {"radii", gr.radii},
                                {"sups", gr.sups},
                                {"slope", gr.slope},
                                {"intercept", gr.intercept}};
                });
            }
        }
        if (s.nondeg_a_rel > 0.0 && !s.growth_radii.empty() && have_base)
            guarded_block(report, "nondegeneracy", [&] {
                const double a = s.nondeg_a_rel * profile_amplitude(params);
                const NondegeneracyReport nd =
                    nondegeneracy_check(u, growth_x0, s.growth_radii, a, params);
                return json{{"x0", point_json(nd.x0, s.dim)},
                            {"a", nd.a},
                            {"precondition_ok", nd.precondition_ok},
                            {"holds", nd.holds},
                            {"radii", nd.radii},
                            {"sphere_sups", nd.sphere_sups},
                            {"margins", nd.margins}};
            });

        if (!s.contact_radii.empty())
            guarded_block(report, "contact", [&] {
                const auto rows = contact_modulus(fb, s.contact_radii);
                std::vector<double> radii, values;
                std::vector<bool> present;
                for (const auto& row : rows) {
                    radii.push_back(row.r);
                    present.push_back(row.present);
                    values.push_back(row.value);
                }
                return json{{"radii", radii}, {"present", present}, {"values", values}};
            });

        if (!s.blowup_radii.empty())
            guarded_block(report, "blowup", [&] {
                const BlowupReport br = blowup_distance(u, origin, s.blowup_radii, params);
                return json{{"x0", point_json(br.x0, s.dim)},
                            {"radii", br.radii},
                            {"distances", br.distances}};
            });

        if (!s.directions.empty())
            guarded_block(report, "monotonicity", [&] {
                std::vector<Point> dirs;
                for (const std::string& t : s.directions)
                    dirs.push_back(parse_direction(t, s.dim));
                double region_r = s.monotonicity_radius;
                if (region_r <= 0.0) {
                    region_r = s.shape == "interval"
                                   ? s.length
                                   : (s.shape == "half_disk"
                                          ? s.radius
                                          : std::hypot(s.halfwidth, s.height));
                }
                const auto reps = directional_monotonicity(u, dirs, origin, region_r);
                json out = json::array();
                for (std::size_t i = 0; i < reps.size(); ++i)
                    out.push_back(json{{"direction", s.directions[i]},
                                       {"min_derivative", reps[i].min_derivative},
                                       {"tol_slope", reps[i].tol_slope},
                                       {"monotone", reps[i].monotone}});
                return json{{"directions", out}};
            });

        if (s.run_transform_w)
            guarded_block(report, "transform_w", [&] {
                const TransformWReport tw = transform_w(u, params);
                return json{{"A", tw.A},
                            {"B", tw.B},
                            {"residual_sup", tw.residual_sup},
                            {"region_nodes", tw.region_nodes}};
            });

        if (s.run_first_integral && s.dim == 1)
            guarded_block(report, "first_integral", [&] {
                const ScalarField E = first_integral(u, params);
                double sup = 0.0;
                for (long id = 0; id < grid->num_nodes(); ++id)
                    sup = std::max(sup, std::fabs(E[id]));
                return json{{"sup_abs", sup}};
            });

        if (s.gradient_at_origin)
            guarded_block(report, "gradient_at_origin", [&] {
                return json{{"value", gradient_at_contact(u, origin)},
                            {"spacing", grid->spacing()}};
            });

        if (s.dim == 1)
            guarded_block(report, "profile_overlay", [&] {
                long right = -1;
                for (long id = 0; id < grid->num_nodes(); ++id)
                    if (grid->node_class(id) == NodeClass::CurvedBoundary) right = id;
                const double terminal = right >= 0 ? data[static_cast<std::size_t>(right)] : 0.0;
                const ScalarField oracle =
                    shoot(params, s.length, terminal, 1e-12, s.resolution);
                std::vector<double> xs, us, os;
                for (long id = 0; id < grid->num_nodes(); ++id) {
                    xs.push_back(grid->coord(id)[0]);
                    us.push_back(u[id]);
                    os.push_back(oracle[id]);
                }
                return json{{"x", xs}, {"u", us}, {"oracle", os}};
            });

        write_field_csv(u, (dir / "field.csv").string());
        report["artifacts"] = {{"field_csv", "field.csv"}};
    }

    const std::vector<std::string> plot_paths = render_plots(report, dir.string());
    {
        json names = json::array();
        for (const std::string& p : plot_paths) names.push_back(fs::path(p).filename().string());
        if (!report.contains("artifacts")) report["artifacts"] = json::object();
        report["artifacts"]["plots"] = names;
    }

    write_json_file(report, dir / "report.json");
    return report;
}

nlohmann::json run_scenario_file(const std::string& scenario_path, const std::string& out_dir) {
    return run_scenario(load_scenario(scenario_path), out_dir);
}

namespace {

struct AssertionSpec {
    std::string scenario;
    std::string path;
    std::string op;
    double v1 = 0.0, v2 = 0.0;
    std::string expr;
    int line_no = 0;
};

double parse_assert_number(const std::string& tok, const std::string& manifest, int line_no) {
    if (tok == "true") return 1.0;
    if (tok == "false") return 0.0;
    std::size_t idx = 0;
    double v = 0.0;
    bool ok = true;
    try {
        v = std::stod(tok, &idx);
    } catch (const std::exception&) {
        ok = false;
    }
    if (!ok || idx != tok.size())
        throw ManifestError(manifest + ":" + std::to_string(line_no) +
                            ": expected a number, got '" + tok + "'");
    return v;
}

/// Looks up a dotted path ("weiss.max_drop", "growth.sups.0") in a report.
bool lookup_field(const json& report, const std::string& path, double& out) {
    const json* cur = &report;
    std::size_t pos = 0;
    while (pos <= path.size()) {
        const std::size_t dot = path.find('.', pos);
        const std::string tok =
            path.substr(pos, (dot == std::string::npos ? path.size() : dot) - pos);
        if (cur->is_object()) {
            if (!cur->contains(tok)) return false;
            cur = &(*cur)[tok];
        } else if (cur->is_array()) {
            std::size_t idx = 0;
            try {
                idx = std::stoul(tok);
            } catch (const std::exception&) {
                return false;
            }
            if (idx >= cur->size()) return false;
            cur = &(*cur)[idx];
        } else {
            return false;
        }
        if (dot == std::string::npos) break;
        pos = dot + 1;
    }
    if (cur->is_number()) {
        out = cur->get<double>();
        return true;
    }
    if (cur->is_boolean()) {
        out = cur->get<bool>() ? 1.0 : 0.0;
        return true;
    }
    return false;
}

bool holds(const std::string& op, double measured, double v1, double v2) {
    if (op == "<=") return measured <= v1;
    if (op == ">=") return measured >= v1;
    if (op == "<") return measured < v1;
    if (op == ">") return measured > v1;
    if (op == "==") return measured == v1;
    if (op == "!=") return measured != v1;
    if (op == "between") return measured >= v1 && measured <= v2;
    return false;
}

std::string format_measured(double v) {
    std::ostringstream out;
    out.precision(12);
    out << v;
    return out.str();
}

} // namespace

SuiteResult run_suite(const std::string& manifest_path, const std::string& out_dir) {
    std::ifstream in(manifest_path);
    if (!in) throw ManifestError("cannot open manifest: " + manifest_path);
    const fs::path base = fs::path(manifest_path).parent_path();

    std::vector<std::string> scenario_paths;
    std::vector<AssertionSpec> asserts;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream tokens(line);
        std::string head;
        if (!(tokens >> head)) continue;
        if (head == "scenario") {
            std::string p;
            if (!(tokens >> p))
                throw ManifestError(manifest_path + ":" + std::to_string(line_no) +
                                    ": 'scenario' needs a file path");
            const fs::path full = fs::path(p).is_absolute() ? fs::path(p) : base / p;
            scenario_paths.push_back(full.string());
        } else if (head == "assert") {
            AssertionSpec a;
            a.line_no = line_no;
            std::string v1, v2;
            if (!(tokens >> a.scenario >> a.path >> a.op >> v1))
                throw ManifestError(manifest_path + ":" + std::to_string(line_no) +
                                    ": expected 'assert <scenario> <field> <op> <value>'");
            a.v1 = parse_assert_number(v1, manifest_path, line_no);
            if (a.op == "between") {
                if (!(tokens >> v2))
                    throw ManifestError(manifest_path + ":" + std::to_string(line_no) +
                                        ": 'between' needs two bounds");
                a.v2 = parse_assert_number(v2, manifest_path, line_no);
            } else if (a.op != "<=" && a.op != ">=" && a.op != "<" && a.op != ">" &&
                       a.op != "==" && a.op != "!=") {
                throw ManifestError(manifest_path + ":" + std::to_string(line_no) +
                                    ": unknown comparison '" + a.op + "'");
            }
            std::ostringstream expr;
            expr << a.scenario << " " << a.path << " " << a.op << " " << v1;
            if (a.op == "between") expr << " " << v2;
            a.expr = expr.str();
            asserts.push_back(a);
        } else {
            throw ManifestError(manifest_path + ":" + std::to_string(line_no) +
                                ": unknown directive '" + head + "'");
        }
    }
    if (scenario_paths.empty())
        throw ManifestError(manifest_path + ": manifest lists no scenarios");

    std::map<std::string, Scenario> scenarios;
    for (const std::string& p : scenario_paths) {
        if (!fs::exists(p))
            throw ManifestError("manifest references missing scenario file: " + p);
        Scenario s = load_scenario(p);
        if (scenarios.count(s.name))
            throw ManifestError("duplicate scenario name '" + s.name + "' in manifest");
        scenarios.emplace(s.name, std::move(s));
    }
    for (const AssertionSpec& a : asserts)
        if (!scenarios.count(a.scenario))
            throw ManifestError(manifest_path + ":" + std::to_string(a.line_no) +
                                ": assertion references unknown scenario '" + a.scenario + "'");

    SuiteResult suite;
    json scenario_rows = json::array();
    std::map<std::string, json> reports;
    for (const auto& [name, scen] : scenarios) {
        json row = {{"name", name}};
        try {
            json report = run_scenario(scen, out_dir);
            const bool ok = block_ok(report, "solve");
            row["status"] = ok ? "ok" : "solve_failed";
            if (!ok) suite.all_passed = false;
            reports.emplace(name, std::move(report));
        } catch (const Error& e) {
            row["status"] = "error";
            row["error_code"] = error_code(e);
            row["message"] = e.what();
            suite.all_passed = false;
        }
        scenario_rows.push_back(std::move(row));
    }

    json assertion_rows = json::array();
    for (const AssertionSpec& a : asserts) {
        AssertionResult res;
        res.expr = a.expr;
        const auto it = reports.find(a.scenario);
        double measured = 0.0;
        if (it == reports.end() || !lookup_field(it->second, a.path, measured)) {
            res.status = "fail";
            res.measured = "missing";
            suite.all_passed = false;
        } else {
            res.measured = format_measured(measured);
            const bool weiss_claim = a.path.rfind("weiss", 0) == 0;
            const bool nonlinear_op = scenarios.at(a.scenario).operator_kind != "laplacian" ||
                                      scenarios.at(a.scenario).rescale_r > 0.0;
            if (weiss_claim && nonlinear_op) {
                res.status = "reported_not_asserted";
            } else if (holds(a.op, measured, a.v1, a.v2)) {
                res.status = "pass";
            } else {
                res.status = "fail";
                suite.all_passed = false;
            }
        }
        assertion_rows.push_back(
            json{{"expr", res.expr}, {"status", res.status}, {"measured", res.measured}});
    }

    suite.summary = {{"format_version", kReportFormatVersion},
                     {"scenarios", scenario_rows},
                     {"assertions", assertion_rows},
                     {"all_passed", suite.all_passed}};
    std::error_code fs_err;
    fs::create_directories(out_dir, fs_err);
    if (fs_err) throw IoError("cannot create output directory " + out_dir);
    write_json_file(suite.summary, fs::path(out_dir) / "summary.json");
    return suite;
}

std::vector<std::string> render_plots(const nlohmann::json& report, const std::string& out_dir) {
    std::vector<std::string> written;
    std::error_code fs_err;
    fs::create_directories(out_dir, fs_err);
    if (fs_err) throw IoError("cannot create output directory " + out_dir);
    const int dim = report.contains("scenario") && report["scenario"].contains("dim")
                        ? report["scenario"]["dim"].get<int>()
                        : 0;

    if (block_ok(report, "weiss")) {
        PlotSpec spec;
        spec.title = "Weiss energy vs radius";
        spec.x_label = "r";
        spec.y_label = "W(r)";
        PlotSeries s;
        s.x = doubles_of(report["weiss"]["radii"]);
        s.y = doubles_of(report["weiss"]["values"]);
        s.label = "W(u, r)";
        spec.series.push_back(std::move(s));
        const std::string path = (fs::path(out_dir) / "weiss_vs_r.svg").string();
        write_svg_plot(spec, path);
        written.push_back(path);
    }

    if (block_ok(report, "growth")) {
        PlotSpec spec;
        spec.title = "Growth of sup u over half-balls";
        spec.x_label = "r";
        spec.y_label = "sup u";
        spec.log_x = true;
        spec.log_y = true;
        PlotSeries pts;
        pts.x = doubles_of(report["growth"]["radii"]);
        pts.y = doubles_of(report["growth"]["sups"]);
        pts.label = "measured";
        pts.line = false;
        const double slope = report["growth"]["slope"].get<double>();
        const double intercept = report["growth"]["intercept"].get<double>();
        PlotSeries fit;
        fit.color = "#c04a3a";
        fit.markers = false;
        if (!pts.x.empty()) {
            const auto [lo, hi] = std::minmax_element(pts.x.begin(), pts.x.end());
            for (double r : {*lo, *hi}) {
                fit.x.push_back(r);
                fit.y.push_back(std::exp(intercept + slope * std::log(r)));
            }
        }
        {
            std::ostringstream label;
            label.precision(4);
            label << "fit slope " << slope;
            fit.label = label.str();
        }
        spec.series.push_back(std::move(pts));
        spec.series.push_back(std::move(fit));
        const std::string path = (fs::path(out_dir) / "growth_loglog.svg").string();
        write_svg_plot(spec, path);
        written.push_back(path);
    }

    if (dim >= 2 && block_ok(report, "free_boundary") &&
        !report["free_boundary"]["points"].empty()) {
        PlotSpec spec;
        spec.title = "Free boundary and tangential cones";
        spec.x_label = "x1";
        spec.y_label = "xn";
        PlotSeries pts;
        pts.line = false;
        pts.label = "free boundary";
        double span = 0.0;
        for (const auto& p : report["free_boundary"]["points"]) {
            const double x = p[0].get<double>();
            const double y = p[static_cast<std::size_t>(dim - 1)].get<double>();
            pts.x.push_back(x);
            pts.y.push_back(y);
            span = std::max(span, std::fabs(x));
        }
        spec.series.push_back(std::move(pts));
        const char* cone_colors[3] = {"#c04a3a", "#d98e3a", "#8a68b5"};
        const double cone_eps[3] = {0.5, 0.25, 0.1};
        for (int i = 0; i < 3; ++i) {
            PlotSeries cone;
            cone.markers = false;
            cone.color = cone_colors[i];
            cone.x = {-span, 0.0, span};
            cone.y = {cone_eps[i] * span, 0.0, cone_eps[i] * span};
            std::ostringstream label;
            label << "xn = " << cone_eps[i] << "|x'|";
            cone.label = label.str();
            spec.series.push_back(std::move(cone));
        }
        const std::string path = (fs::path(out_dir) / "free_boundary.svg").string();
        write_svg_plot(spec, path);
        written.push_back(path);
    }

    if (block_ok(report, "profile_overlay")) {
        PlotSpec spec;
        spec.title = "Solution vs 1D oracle";
        spec.x_label = "x";
        spec.y_label = "u";
        PlotSeries sol;
        sol.x = doubles_of(report["profile_overlay"]["x"]);
        sol.y = doubles_of(report["profile_overlay"]["u"]);
        sol.label = "solver";
        sol.markers = false;
        PlotSeries oracle;
        oracle.x = sol.x;
        oracle.y = doubles_of(report["profile_overlay"]["oracle"]);
        oracle.label = "oracle";
        oracle.markers = false;
        oracle.color = "#c04a3a";
        spec.series.push_back(std::move(sol));
        spec.series.push_back(std::move(oracle));
        const std::string path = (fs::path(out_dir) / "solution_vs_oracle.svg").string();
        write_svg_plot(spec, path);
        written.push_back(path);
    }

    return written;
}

} // namespace aplab
