// Acceptance battery for the free-boundary laboratory.  Each criterion prints
// one PASS/FAIL line with the measured numbers; the process exits nonzero if
// any criterion fails.  argv[1] points at the scenarios directory.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "aplab/analysis.hpp"
#include "aplab/errors.hpp"
#include "aplab/oracle1d.hpp"
#include "aplab/scenario.hpp"
#include "aplab/solver.hpp"

using namespace aplab;

namespace {

int g_failures = 0;

void report(int index, bool pass, const std::string& what, const std::string& detail) {
    std::printf("C%02d %s  %s — %s\n", index, pass ? "PASS" : "FAIL", what.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double linf_vs_profile(const ScalarField& u, const ApParams& p) {
    double worst = 0.0;
    const auto& g = *u.grid;
    for (long id = 0; id < g.num_nodes(); ++id) {
        if (g.node_class(id) == NodeClass::Exterior) continue;
        const double x = g.coord(id)[0];
        worst = std::max(worst, std::fabs(u[id] - profile_eval(p, x)));
    }
    return worst;
}

} // namespace

int main(int argc, char** argv) {
    const std::string scen_dir = argc > 1 ? argv[1] : "scenarios";
    using clock = std::chrono::steady_clock;
    const ApParams params(1.5);
    const double alpha = profile_amplitude(params); // 1/64

    // ---- one-dimensional benchmark family (criteria 1, 2, 9, 10) ----
    Scenario prof = load_scenario(scen_dir + "/profile1d.cfg");
    validate_scenario(prof);

    SolveResult sol1024, sol512, sol256;
    double err1024 = 0.0, err512 = 0.0, err256 = 0.0;
    double t_solve_1024 = 0.0;
    for (int n : {256, 512, 1024}) {
        Scenario s = prof;
        s.resolution = n;
        GridPtr g = s.make_grid();
        const auto data = s.make_boundary_data(g);
        const auto t0 = clock::now();
        SolveResult res = solve_laplacian(g, data, s.params(), s.solve);
        const double dt = std::chrono::duration<double>(clock::now() - t0).count();
        const double err = linf_vs_profile(res.field, s.params());
        if (n == 1024) {
            sol1024 = res;
            err1024 = err;
            t_solve_1024 = dt;
        } else if (n == 512) {
            sol512 = res;
            err512 = err;
        } else {
            sol256 = res;
            err256 = err;
        }
    }

    report(1, err1024 <= 1e-4 && t_solve_1024 < 5.0, "profile benchmark at n = 1024",
           "sup error " + fmt(err1024) + " (limit 1e-4), solve time " + fmt(t_solve_1024) +
               " s (limit 5)");

    const double ratio_a = err256 / err512;
    const double ratio_b = err512 / err1024;
    const bool c2 = ratio_a >= 3.2 && ratio_a <= 4.8 && ratio_b >= 3.2 && ratio_b <= 4.8;
    report(2, c2, "second-order convergence under refinement",
           "errors " + fmt(err256) + " / " + fmt(err512) + " / " + fmt(err1024) + ", ratios " +
               fmt(ratio_a) + ", " + fmt(ratio_b) + " (window [3.2, 4.8])");

    // ---- Weiss energy on the exact profile (criterion 3) ----
    {
        auto g = HalfGrid::interval(4096, 1.0);
        ScalarField u = make_field(g, [&](const Point& x) { return profile_eval(params, x[0]); });
        const double w1 = weiss(u, make_point(0.0), 1.0, params);
        const double wh = weiss(u, make_point(0.0), 0.5, params);
        const double target = 1.0 / 14336.0;
        const bool ok = std::fabs(w1 - target) <= 1e-6 && std::fabs(wh - w1) <= 1e-6;
        report(3, ok, "Weiss energy of the exact profile",
               "W(1) = " + fmt(w1) + " vs 1/14336 = " + fmt(target) + ", |W(1/2) - W(1)| = " +
                   fmt(std::fabs(wh - w1)) + " (limits 1e-6)");
    }

    // ---- half-disk contact experiment (criteria 4, 6, 7, 8, 12) ----
    Scenario tan2d = load_scenario(scen_dir + "/tangent2d.cfg");
    validate_scenario(tan2d);
    GridPtr tg = tan2d.make_grid();
    const auto tdata = tan2d.make_boundary_data(tg);
    const auto t0 = clock::now();
    SolveResult tsol = solve_laplacian(tg, tdata, tan2d.params(), tan2d.solve);
    const double t_solve_2d = std::chrono::duration<double>(clock::now() - t0).count();
    std::printf("    [tangent2d: %ld sweeps, residual %.3e, gap %.3e, %.1f s]\n",
                tsol.sweeps_used, tsol.final_residual, tsol.complementarity_gap, t_solve_2d);

    const std::vector<double> ladder = {0.05, 0.1, 0.2, 0.4};
    {
        WeissProfile wp = weiss_profile(tsol.field, make_point(0.0, 0.0), ladder, params);
        const double tol = 1e-3 * std::fabs(wp.values.back());
        report(4, wp.max_drop <= tol, "Weiss monotonicity along the contact point",
               "values " + fmt(wp.values[0]) + ", " + fmt(wp.values[1]) + ", " +
                   fmt(wp.values[2]) + ", " + fmt(wp.values[3]) + ", max drop " +
                   fmt(wp.max_drop) + " (tol " + fmt(tol) + ")");
    }

    // ---- comparison principle for ordered data (criterion 5) ----
    {
        SolveOptions copts;
        copts.tol_residual = 1e-9;
        bool all = true;
        std::string detail;

        auto g1 = HalfGrid::interval(256, 1.0);
        auto d1_lo = boundary_data(g1, params, "profile", 0.5, 0.0, 1.0);
        auto d1_hi = boundary_data(g1, params, "profile", 1.0, 0.0, 1.0);
        ComparisonReport r1 =
            comparison_test(g1, d1_lo, d1_hi, OperatorSpec::laplacian(), params, copts);
        all = all && r1.ordered;
        detail += "interval " + fmt(r1.max_violation);

        auto g2 = HalfGrid::half_disk(2, 128, 1.0);
        auto d2_lo = boundary_data(g2, params, "ramp_profile", 0.5, 0.0, 1.0);
        auto d2_hi = boundary_data(g2, params, "ramp_profile", 1.0, 0.0, 1.0);
        ComparisonReport r2 =
            comparison_test(g2, d2_lo, d2_hi, OperatorSpec::laplacian(), params, copts);
        all = all && r2.ordered;
        detail += ", half-disk " + fmt(r2.max_violation);

        ComparisonReport r3 = comparison_test(g2, d2_lo, d2_hi,
                                              OperatorSpec::perturbed_trace(0.1), params, copts);
        all = all && r3.ordered;
        detail += ", perturbed half-disk " + fmt(r3.max_violation) + " (tol " +
                  fmt(r3.tol_used) + ")";

        report(5, all, "comparison principle on ordered data", detail);
    }

    // free boundary of the contact experiment, shared by criteria 6 and 7
    FreeBoundarySet fb = extract_free_boundary(tsol.field);
    Point fb_near = make_point(0.0, 0.0);
    {
        double best = 1e300;
        for (const Point& q : fb.points) {
            const double d = norm(q, 2);
            if (d < best) {
                best = d;
                fb_near = q;
            }
        }
    }

    {
        bool ok = !fb.points.empty();
        std::string detail;
        if (!ok) {
            detail = "free boundary is empty";
        } else {
            GrowthReport gr = growth_exponent(tsol.field, fb_near, ladder, params);
            NondegeneracyReport nd =
                nondegeneracy_check(tsol.field, fb_near, ladder, 1e-2 * alpha, params);
            ok = gr.slope >= 0.9 * 4.0 && gr.slope <= 1.1 * 4.0 && nd.holds;
            detail = "growth slope " + fmt(gr.slope) + " (window [3.6, 4.4]) at (" +
                     fmt(fb_near[0]) + ", " + fmt(fb_near[1]) + "), nondegeneracy margins min " +
                     fmt(*std::min_element(nd.margins.begin(), nd.margins.end()));
        }
        report(6, ok, "growth rate and nondegeneracy at the free boundary", detail);
    }

    {
        auto rows = contact_modulus(fb, ladder);
        // Empty rows carry value 0: no free-boundary point inside that radius
        // means the tangential bound holds vacuously there.  The largest
        // radius must still witness actual free-boundary points.
        bool ok = rows.back().present;
        for (std::size_t i = 1; i < rows.size(); ++i)
            ok = ok && rows[i - 1].value <= rows[i].value + 1e-12;
        if (ok) ok = rows.front().value <= 0.5 * rows.back().value;
        std::string detail = "x_n/|x| table ";
        for (const auto& row : rows)
            detail += fmt(row.r) + ":" + (row.present ? fmt(row.value) : "absent") + " ";
        report(7, ok, "tangential decay of the contact modulus", detail);
    }

    {
        BlowupReport br = blowup_distance(tsol.field, make_point(0.0, 0.0), ladder, params);
        bool ok = true;
        for (std::size_t i = 1; i < br.distances.size(); ++i)
            ok = ok && br.distances[i - 1] < br.distances[i];
        ok = ok && br.distances.front() <= 0.05 * alpha;
        report(8, ok, "blow-up converges to the half-space profile",
               "distances " + fmt(br.distances[0]) + ", " + fmt(br.distances[1]) + ", " +
                   fmt(br.distances[2]) + ", " + fmt(br.distances[3]) + " (smallest limit " +
                   fmt(0.05 * alpha) + ")");
    }

    // ---- w-transform residual (criterion 9) ----
    {
        TransformWReport w1024 = transform_w(sol1024.field, params);
        TransformWReport w512 = transform_w(sol512.field, params);
        const double ratio = w512.residual_sup / w1024.residual_sup;
        const bool ok = w1024.residual_sup <= 1e-3 && ratio >= 3.2 && ratio <= 4.8;
        report(9, ok, "quadratic expansion of w = sqrt(u)",
               "residual " + fmt(w1024.residual_sup) + " at n = 1024 (limit 1e-3), refinement " +
                   "ratio " + fmt(ratio) + " (window [3.2, 4.8])");
    }

    // ---- operator family deformation (criterion 10) ----
    {
        Scenario s = prof;
        s.resolution = 1024;
        GridPtr g = s.make_grid();
        const auto data = s.make_boundary_data(g);
        SolveOptions fopts = s.solve;
        fopts.tol_residual = 1e-8;
        std::vector<double> dist;
        for (double theta : {0.2, 0.1, 0.05}) {
            SolveResult r = solve_fully_nonlinear(g, data, OperatorSpec::perturbed_trace(theta),
                                                  s.params(), fopts);
            double d = 0.0;
            for (long id = 0; id < g->num_nodes(); ++id)
                d = std::max(d, std::fabs(r.field[id] - sol1024.field[id]));
            dist.push_back(d);
        }
        const bool ok = dist[0] > dist[1] && dist[1] > dist[2];
        report(10, ok, "perturbed operators deform the solution continuously",
               "distance to the trace solution " + fmt(dist[0]) + " > " + fmt(dist[1]) + " > " +
                   fmt(dist[2]) + " for theta = 0.2, 0.1, 0.05");
    }

    // ---- structural audit of every built-in operator (criterion 11) ----
    {
        std::vector<std::pair<std::string, OperatorSpec>> battery;
        battery.emplace_back("laplacian", OperatorSpec::laplacian());
        battery.emplace_back("linear_trace(I)", OperatorSpec::linear_trace(SymMat::identity(3)));
        battery.emplace_back("perturbed_trace(0.2)", OperatorSpec::perturbed_trace(0.2));
        battery.emplace_back("perturbed_trace(0.1)", OperatorSpec::perturbed_trace(0.1));
        battery.emplace_back("rescaled(perturbed_trace(0.1), 0.5)",
                             rescaled_operator(OperatorSpec::perturbed_trace(0.1), 0.5, params));
        bool ok = true;
        std::string worst_name;
        double worst_excess = 0.0;
        for (const auto& [name, spec] : battery) {
            for (int dim : {2, 3}) {
                EllipticityReport rep = ellipticity_report(spec, 1000, 2026, dim);
                const double excess = rep.measured_lambda / spec.declared_lambda() - 1.0;
                if (excess > worst_excess) {
                    worst_excess = excess;
                    worst_name = name;
                }
                if (rep.convexity_violations != 0 || rep.trace_gradient_error > 1e-6 ||
                    rep.measured_lambda > spec.declared_lambda() * (1.0 + 1e-6)) {
                    ok = false;
                    worst_name = name;
                }
            }
        }
        report(11, ok, "ellipticity audit of the operator battery",
               "5 operators x dims {2, 3}, 1000 samples each; worst declared-bound excess " +
                   fmt(worst_excess) + (worst_name.empty() ? "" : " (" + worst_name + ")"));
    }

    // ---- tangential contact at the origin (criterion 12) ----
    {
        const double gnorm = gradient_at_contact(tsol.field, make_point(0.0, 0.0));
        const double limit = 10.0 * tg->spacing();
        report(12, gnorm <= limit, "vanishing gradient at the contact origin",
               "|grad u|(0) = " + fmt(gnorm) + " (limit " + fmt(limit) + ")");
    }

    if (g_failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
}
