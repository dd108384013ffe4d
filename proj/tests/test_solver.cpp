#include <cmath>
#include <vector>

#include "aplab/errors.hpp"
#include "aplab/oracle1d.hpp"
#include "aplab/scenario.hpp"
#include "aplab/solver.hpp"
#include "doctest.h"

using namespace aplab;

namespace {

std::vector<double> profile_data(const GridPtr& g, const ApParams& p, double scale = 1.0) {
    std::vector<double> data(static_cast<std::size_t>(g->num_nodes()), 0.0);
    for (long id = 0; id < g->num_nodes(); ++id)
        if (g->node_class(id) != NodeClass::Exterior)
            data[static_cast<std::size_t>(id)] =
                scale * profile_eval(p, g->coord(id)[g->dim() - 1]);
    for (long id = 0; id < g->num_nodes(); ++id)
        if (g->node_class(id) == NodeClass::FlatBoundary)
            data[static_cast<std::size_t>(id)] = 0.0;
    return data;
}

} // namespace

TEST_CASE("one-dimensional solve matches the exact profile") {
    ApParams p(1.5);
    auto g = HalfGrid::interval(128, 1.0);
    SolveOptions opts;
    opts.tol_residual = 1e-10;
    SolveResult res = solve_laplacian(g, profile_data(g, p), p, opts);

    CHECK(res.final_residual <= res.effective_tol);
    CHECK(res.complementarity_gap <= res.effective_tol);
    double worst = 0.0;
    for (long id = 0; id <= 128; ++id) {
        const double x = g->coord(id)[0];
        worst = std::max(worst, std::fabs(res.field[id] - profile_eval(p, x)));
    }
    CHECK(worst <= 5e-6);
    // boundary rows are held at the data
    CHECK(res.field[0] == 0.0);
    CHECK(res.field[128] == 1.0 / 64.0);
}

TEST_CASE("recorded energy never increases") {
    ApParams p(1.5);
    auto g = HalfGrid::half_disk(2, 64, 1.0);
    std::vector<double> data = boundary_data(g, p, "ramp_profile", 1.0, 0.0, 1.0);
    SolveOptions opts;
    opts.tol_residual = 1e-7;
    SolveResult res = solve_laplacian(g, data, p, opts);
    REQUIRE(res.energy_history.size() >= 2);
    for (std::size_t i = 1; i < res.energy_history.size(); ++i)
        CHECK(res.energy_history[i] <= res.energy_history[i - 1]);
    // the recorded final energy agrees with an independent evaluation
    const double direct = discrete_energy(res.field, p);
    CHECK(res.energy_history.back() ==
          doctest::Approx(direct).epsilon(1e-8));
}

TEST_CASE("solution is insensitive to the initial relaxation factor") {
    ApParams p(1.5);
    auto g = HalfGrid::interval(64, 1.0);
    SolveOptions a, b;
    a.tol_residual = b.tol_residual = 1e-11;
    a.over_relaxation = 0.0; // auto
    b.over_relaxation = 1.4;
    SolveResult ra = solve_laplacian(g, profile_data(g, p), p, a);
    SolveResult rb = solve_laplacian(g, profile_data(g, p), p, b);
    double diff = 0.0;
    for (long id = 0; id <= 64; ++id)
        diff = std::max(diff, std::fabs(ra.field[id] - rb.field[id]));
    CHECK(diff <= 1e-8);
    CHECK(rb.sweeps_used > ra.sweeps_used); // plain relaxation is slower
}

TEST_CASE("zero data yields the zero solution immediately") {
    ApParams p(1.5);
    auto g = HalfGrid::half_disk(2, 32, 1.0);
    std::vector<double> data(static_cast<std::size_t>(g->num_nodes()), 0.0);
    SolveResult res = solve_laplacian(g, data, p);
    CHECK(res.field.max_abs() == 0.0);
    CHECK(res.final_residual == 0.0);
    CHECK(res.complementarity_gap == 0.0);
}

TEST_CASE("boundary data must be admissible") {
    ApParams p(1.5);
    auto g = HalfGrid::interval(32, 1.0);
    std::vector<double> bad(static_cast<std::size_t>(g->num_nodes()), 0.0);
    bad[0] = 0.5; // nonzero on the flat boundary
    CHECK_THROWS_AS(solve_laplacian(g, bad, p), ContractError);
    std::vector<double> neg(static_cast<std::size_t>(g->num_nodes()), 0.0);
    neg[32] = -1.0;
    CHECK_THROWS_AS(solve_laplacian(g, neg, p), ParameterError);
    std::vector<double> short_vec(3, 0.0);
    CHECK_THROWS_AS(solve_laplacian(g, short_vec, p), ContractError);
}

TEST_CASE("sweep cap raises a convergence error carrying the history") {
    ApParams p(1.5);
    auto g = HalfGrid::interval(64, 1.0);
    SolveOptions opts;
    opts.max_sweeps = 3;
    opts.tol_residual = 1e-14;
    try {
        solve_laplacian(g, profile_data(g, p), p, opts);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.residual_history.size() == 3);
    }
}

TEST_CASE("pde_residual of the exact profile is the discretization defect") {
    ApParams p(1.5);
    auto g = HalfGrid::interval(64, 1.0);
    ScalarField u = make_field(g, [&](const Point& x) { return profile_eval(p, x[0]); });
    ScalarField r = pde_residual(u, OperatorSpec::laplacian(), p);
    // second difference of x^4/64 exceeds 12x^2/64 by exactly 2h^2/64
    const double h = g->spacing();
    CHECK(r.max_abs() == doctest::Approx(h * h / 32.0).epsilon(1e-10));
}

TEST_CASE("comparison principle holds for ordered data") {
    ApParams p(1.5);
    auto g = HalfGrid::interval(64, 1.0);
    SolveOptions opts;
    opts.tol_residual = 1e-10;
    ComparisonReport rep = comparison_test(g, profile_data(g, p, 0.5), profile_data(g, p, 1.0),
                                           OperatorSpec::laplacian(), p, opts);
    CHECK(rep.ordered);
    CHECK(rep.max_violation <= rep.tol_used);
    CHECK_THROWS_AS(comparison_test(g, profile_data(g, p, 1.0), profile_data(g, p, 0.5),
                                    OperatorSpec::laplacian(), p, opts),
                    ContractError);
}

TEST_CASE("fully nonlinear path with the trace reproduces the direct solver") {
    ApParams p(1.5);
    auto g = HalfGrid::interval(64, 1.0);
    SolveOptions opts;
    opts.tol_residual = 1e-9;
    SolveResult direct = solve_laplacian(g, profile_data(g, p), p, opts);
    SolveResult fn = solve_fully_nonlinear(g, profile_data(g, p), OperatorSpec::laplacian(), p, opts);
    CHECK(fn.energy_history.empty());
    double diff = 0.0;
    for (long id = 0; id <= 64; ++id)
        diff = std::max(diff, std::fabs(direct.field[id] - fn.field[id]));
    CHECK(diff <= 10.0 * std::max(direct.effective_tol, fn.effective_tol));
}

TEST_CASE("separable anisotropic operator reduces to the one-dimensional oracle") {
    ApParams p(1.5);
    const double c = 2.0;
    auto g = HalfGrid::half_rectangle(2, 64, 1.0, 1.0);
    // data independent of the tangential coordinate, matching c u'' = gamma u^(gamma-1)
    std::vector<double> data(static_cast<std::size_t>(g->num_nodes()), 0.0);
    for (long id = 0; id < g->num_nodes(); ++id)
        if (g->node_class(id) != NodeClass::Exterior)
            data[static_cast<std::size_t>(id)] = profile_eval_aniso(p, g->coord(id)[1], c);
    for (long id = 0; id < g->num_nodes(); ++id)
        if (g->node_class(id) == NodeClass::FlatBoundary) data[static_cast<std::size_t>(id)] = 0.0;

    SymMat A = SymMat::identity(2);
    A.at(1, 1) = c;
    SolveOptions opts;
    opts.tol_residual = 1e-9;
    SolveResult res = solve_fully_nonlinear(g, data, OperatorSpec::linear_trace(A), p, opts);

    double worst = 0.0;
    for (long id = 0; id < g->num_nodes(); ++id) {
        if (g->node_class(id) == NodeClass::Exterior) continue;
        const Point q = g->coord(id);
        worst = std::max(worst, std::fabs(res.field[id] - profile_eval_aniso(p, q[1], c)));
    }
    // discretization error at h = 1/32 dominates; the tangential axis stays inert
    CHECK(worst <= 2e-4);
}

TEST_CASE("discrete energy decreases from data toward the minimizer") {
    ApParams p(1.5);
    auto g = HalfGrid::interval(64, 1.0);
    ScalarField init(g);
    auto data = profile_data(g, p);
    for (long id = 0; id <= 64; ++id) init[id] = data[static_cast<std::size_t>(id)];
    SolveResult res = solve_laplacian(g, data, p);
    CHECK(discrete_energy(res.field, p) <= discrete_energy(init, p) + 1e-15);
}

TEST_CASE("solver options are validated") {
    ApParams p(1.5);
    auto g = HalfGrid::interval(16, 1.0);
    auto data = profile_data(g, p);
    SolveOptions opts;
    opts.max_sweeps = 0;
    CHECK_THROWS_AS(solve_laplacian(g, data, p, opts), ParameterError);
    opts = SolveOptions{};
    opts.tol_residual = 0.0;
    CHECK_THROWS_AS(solve_laplacian(g, data, p, opts), ParameterError);
    opts = SolveOptions{};
    opts.damping = 1.5;
    CHECK_THROWS_AS(solve_fully_nonlinear(g, data, OperatorSpec::laplacian(), p, opts),
                    ParameterError);
    opts = SolveOptions{};
    opts.over_relaxation = 2.5;
    CHECK_THROWS_AS(solve_laplacian(g, data, p, opts), ParameterError);
}
