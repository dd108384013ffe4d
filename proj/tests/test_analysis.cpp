#include <cmath>
#include <vector>

#include "aplab/analysis.hpp"
#include "aplab/errors.hpp"
#include "aplab/oracle1d.hpp"
#include "doctest.h"

using namespace aplab;

namespace {

ScalarField profile_field_1d(int n, const ApParams& p) {
    auto g = HalfGrid::interval(n, 1.0);
    return make_field(g, [&](const Point& x) { return profile_eval(p, x[0]); });
}

ScalarField planar_profile_field(const GridPtr& g, const ApParams& p) {
    const int nrm = g->dim() - 1;
    return make_field(g, [&](const Point& x) {
        return profile_eval(p, x[static_cast<std::size_t>(nrm)]);
    });
}

} // namespace

TEST_CASE("weiss energy of the exact profile is 1/14336") {
    ApParams p(1.5);
    ScalarField u = profile_field_1d(256, p);
    // closed form: int_0^1 x^6/256 dx - 2 * (1/64)^2 = 1/1792 - 1/2048
    const double exact = 1.0 / 14336.0;
    const double w1 = weiss(u, make_point(0.0), 1.0, p);
    CHECK(w1 == doctest::Approx(exact).epsilon(5e-4));
    CHECK(std::fabs(w1 - exact) <= 2e-7);
    // homogeneity: the value is scale invariant on the exact profile
    const double whalf = weiss(u, make_point(0.0), 0.5, p);
    CHECK(std::fabs(whalf - w1) <= 2e-7);
}

TEST_CASE("weiss energy of the planar profile on the half-disk") {
    ApParams p(1.5);
    auto g = HalfGrid::half_disk(2, 256, 1.0);
    ScalarField u = planar_profile_field(g, p);
    // closed form in two dimensions: 5*pi/32768 - 35*pi/262144 = 5*pi/262144
    const double exact = 5.0 * M_PI / 262144.0;
    const double w1 = weiss(u, make_point(0.0, 0.0), 1.0, p);
    CHECK(std::fabs(w1 - exact) <= 5e-7);
}

TEST_CASE("weiss profile flags drops beyond tolerance") {
    ApParams p(1.5);
    ScalarField u = profile_field_1d(128, p);
    WeissProfile wp = weiss_profile(u, make_point(0.0), {0.25, 0.5, 1.0}, p);
    REQUIRE(wp.values.size() == 3);
    CHECK(wp.max_drop <= 1e-6);
    CHECK(wp.nondecreasing(1e-6));
    CHECK(wp.spread <= 1e-5);
}

TEST_CASE("weiss validates base point and radii") {
    ApParams p(1.5);
    ScalarField u = profile_field_1d(64, p);
    CHECK_THROWS_AS(weiss(u, make_point(0.0), -1.0, p), ParameterError);
    CHECK_THROWS_AS(weiss(u, make_point(7.0), 0.5, p), DomainError);
    CHECK_THROWS_AS(weiss_profile(u, make_point(0.0), {0.5, 0.25}, p), ContractError);
    CHECK_THROWS_AS(weiss_profile(u, make_point(0.0), {}, p), ContractError);
}

TEST_CASE("free boundary extraction locates the contact point of a translate") {
    ApParams p(1.5);
    // at finer resolutions the first node past 0.5 dips below the positivity
    // floor (h^4/64 < 1e-10) and the crossing slides one cell outward
    auto g = HalfGrid::interval(64, 1.0);
    ScalarField u = make_field(g, [&](const Point& x) { return profile_eval(p, x[0] - 0.5); });
    FreeBoundarySet fb = extract_free_boundary(u);
    CHECK(fb.dim == 1);
    REQUIRE(fb.points.size() == 1);
    CHECK(std::fabs(fb.points[0][0] - 0.5) <= g->spacing());
}

TEST_CASE("free boundary of a tangentially touching slab") {
    ApParams p(1.5);
    auto g = HalfGrid::half_rectangle(2, 32, 1.0, 1.0);
    // positive for x1 > 0 only; the free boundary is the vertical line x1 = 0
    ScalarField u = make_field(g, [&](const Point& x) {
        return profile_eval(p, std::max(x[0], 0.0));
    });
    FreeBoundarySet fb = extract_free_boundary(u);
    CHECK(fb.dim == 2);
    const double h = g->spacing();
    // one crossing per row above the flat boundary, top boundary row included
    CHECK(fb.points.size() == 16);
    for (const Point& q : fb.points) {
        CHECK(std::fabs(q[0]) <= h);
        CHECK(q[1] > 0.5 * h);
    }
}

TEST_CASE("contact modulus on synthetic parabolic points") {
    FreeBoundarySet fb;
    fb.dim = 2;
    for (double t : {0.1, 0.2, 0.4}) fb.points.push_back(make_point(t, t * t));
    auto rows = contact_modulus(fb, {0.05, 0.15, 0.25, 0.5});
    REQUIRE(rows.size() == 4);

    CHECK_FALSE(rows[0].present); // no point within radius 0.05
    CHECK(rows[1].present);
    CHECK(rows[1].value == doctest::Approx(0.1 / std::sqrt(1.01)).epsilon(1e-12));
    CHECK(rows[2].value == doctest::Approx(0.2 / std::sqrt(1.04)).epsilon(1e-12));
    CHECK(rows[3].value == doctest::Approx(0.4 / std::sqrt(1.16)).epsilon(1e-12));
    // tangential contact: modulus decreases toward the origin
    CHECK(rows[1].value < rows[2].value);
    CHECK(rows[2].value < rows[3].value);
}

TEST_CASE("growth exponent of the profile is beta") {
    ApParams p(1.5);
    ScalarField u = profile_field_1d(128, p);
    GrowthReport rep = growth_exponent(u, make_point(0.0), {0.125, 0.25, 0.5, 1.0}, p);
    CHECK(rep.slope == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(rep.intercept == doctest::Approx(std::log(1.0 / 64.0)).epsilon(1e-9));
    REQUIRE(rep.sups.size() == 4);
    CHECK(rep.sups[3] == 1.0 / 64.0);
}

TEST_CASE("growth exponent preconditions") {
    ApParams p(1.5);
    ScalarField u = profile_field_1d(64, p);
    CHECK_THROWS_AS(growth_exponent(u, make_point(0.0), {0.5, 1.0}, p), ContractError);
    CHECK_THROWS_AS(growth_exponent(u, make_point(0.5), {0.125, 0.25, 0.5}, p), ContractError);
    ScalarField z = make_field(u.grid, [](const Point&) { return 0.0; });
    CHECK_THROWS_AS(growth_exponent(z, make_point(0.0), {0.25, 0.5, 1.0}, p),
                    DegenerateDataError);
}

TEST_CASE("nondegeneracy margins vanish exactly at the profile amplitude") {
    ApParams p(1.5);
    // n = 64 keeps u(h) = h^4/64 above the positivity floor next to the contact
    ScalarField u = profile_field_1d(64, p);
    NondegeneracyReport rep =
        nondegeneracy_check(u, make_point(0.0), {0.25, 0.5, 1.0}, 1.0 / 64.0, p);
    CHECK(rep.precondition_ok);
    CHECK(rep.holds);
    REQUIRE(rep.margins.size() == 3);
    for (double m : rep.margins) CHECK(m == 0.0);

    NondegeneracyReport fail =
        nondegeneracy_check(u, make_point(0.0), {0.25, 0.5, 1.0}, 1.0 / 32.0, p);
    CHECK_FALSE(fail.holds);
    CHECK(fail.margins[0] < 0.0);

    CHECK_THROWS_AS(nondegeneracy_check(u, make_point(0.0), {0.5}, 0.0, p), ParameterError);
}

TEST_CASE("nondegeneracy holds on the planar profile in two dimensions") {
    ApParams p(1.5);
    auto g = HalfGrid::half_rectangle(2, 64, 1.0, 1.0);
    ScalarField u = planar_profile_field(g, p);
    NondegeneracyReport rep =
        nondegeneracy_check(u, make_point(0.0, 0.0), {0.25, 0.5}, 0.9 / 64.0, p);
    CHECK(rep.precondition_ok);
    CHECK(rep.holds);
}

TEST_CASE("barrier margin is exactly zero at the critical one-dimensional amplitude") {
    ApParams p(1.5);
    OperatorSpec F = OperatorSpec::laplacian();
    std::vector<Point> pts = {make_point(0.25), make_point(0.5), make_point(1.0)};
    BarrierReport rep = barrier_supersolution_check(F, p, 1.0 / 64.0, pts, 1);
    CHECK(rep.is_supersolution);
    CHECK(rep.worst_margin == 0.0);

    BarrierReport big = barrier_supersolution_check(F, p, 1.0, pts, 1);
    CHECK_FALSE(big.is_supersolution);
    CHECK(big.worst_margin > 0.0);

    BarrierReport tiny = barrier_supersolution_check(F, p, 1e-6, pts, 1);
    CHECK(tiny.is_supersolution);
    CHECK(tiny.worst_margin < 0.0);
}

TEST_CASE("barrier amplitude threshold depends on the dimension") {
    ApParams p(1.5);
    OperatorSpec F = OperatorSpec::laplacian();
    std::vector<Point> pts = {make_point(0.0, 0.5), make_point(0.5, 0.5), make_point(0.0, 1.0)};
    // trace of the barrier hessian gains a tangential term in two dimensions,
    // so the one-dimensional critical amplitude is no longer admissible
    BarrierReport flat = barrier_supersolution_check(F, p, 1.0 / 64.0, pts, 2);
    CHECK_FALSE(flat.is_supersolution);
    // 16 a = 1.5 sqrt(a) at a = 9/1024
    BarrierReport crit = barrier_supersolution_check(F, p, 9.0 / 1024.0, pts, 2);
    CHECK(crit.is_supersolution);
    CHECK(crit.worst_margin == 0.0);

    CHECK_THROWS_AS(barrier_supersolution_check(F, p, -1.0, pts, 2), ParameterError);
    CHECK_THROWS_AS(barrier_supersolution_check(F, p, 0.5, {}, 2), ContractError);
}

TEST_CASE("transform w of the profile is exactly quadratic") {
    ApParams p(1.5);
    ScalarField u = profile_field_1d(64, p);
    TransformWReport rep = transform_w(u, p);
    CHECK(rep.A == 0.75);
    CHECK(rep.B == 1.0);
    CHECK(rep.region_nodes > 0);
    // w = sqrt(x^4/64) = x^2/8 makes every discrete quantity dyadic-exact
    CHECK(rep.residual_sup == 0.0);
    // w values match x^2/8 on the nose
    for (long id = 0; id <= 64; ++id) {
        const double x = u.grid->coord(id)[0];
        CHECK(rep.w[id] == x * x / 8.0);
    }
}

TEST_CASE("directional monotonicity of the planar profile") {
    ApParams p(1.5);
    auto g = HalfGrid::half_rectangle(2, 64, 1.0, 1.0);
    ScalarField u = planar_profile_field(g, p);
    std::vector<Point> dirs = {make_point(0.0, 1.0), make_point(1.0, 0.0),
                               make_point(std::sqrt(0.5), std::sqrt(0.5))};
    auto reps = directional_monotonicity(u, dirs, make_point(0.0, 0.0), 0.5);
    REQUIRE(reps.size() == 3);
    for (const auto& r : reps) {
        CHECK(r.monotone);
        CHECK(r.min_derivative >= -r.tol_slope);
    }
    // the tangential direction is exactly flat
    CHECK(reps[1].min_derivative == doctest::Approx(0.0).epsilon(1e-14));

    CHECK_THROWS_AS(
        directional_monotonicity(u, {make_point(0.0, -1.0)}, make_point(0.0, 0.0), 0.5),
        ContractError);
    CHECK_THROWS_AS(
        directional_monotonicity(u, {make_point(0.5, 0.5)}, make_point(0.0, 0.0), 0.5),
        ParameterError);
    CHECK_THROWS_AS(directional_monotonicity(u, dirs, make_point(0.0, 0.0), 0.0),
                    ParameterError);
}

TEST_CASE("blowup distance vanishes for the profile and is the amplitude for zero data") {
    ApParams p(1.5);
    ScalarField u = profile_field_1d(128, p);
    BlowupReport rep = blowup_distance(u, make_point(0.0), {0.25, 0.5}, p);
    REQUIRE(rep.distances.size() == 2);
    CHECK(rep.distances[0] <= 2e-5);
    CHECK(rep.distances[1] <= 5e-6);

    ScalarField z = make_field(u.grid, [](const Point&) { return 0.0; });
    BlowupReport zr = blowup_distance(z, make_point(0.0), {0.5}, p);
    CHECK(zr.distances[0] == 1.0 / 64.0);
}

TEST_CASE("blowup distance preconditions") {
    ApParams p(1.5);
    ScalarField u = profile_field_1d(64, p);
    CHECK_THROWS_AS(blowup_distance(u, make_point(0.5), {0.25}, p), ContractError);
}

TEST_CASE("gradient at contact on reference fields") {
    ApParams p(1.5);
    auto g = HalfGrid::half_rectangle(2, 32, 1.0, 1.0);
    ScalarField lin = make_field(g, [](const Point& x) { return x[1]; });
    CHECK(gradient_at_contact(lin, make_point(0.0, 0.0)) == doctest::Approx(1.0).epsilon(1e-13));

    ScalarField quad = make_field(g, [](const Point& x) { return x[1] * x[1]; });
    CHECK(gradient_at_contact(quad, make_point(0.0, 0.0)) ==
          doctest::Approx(0.0).epsilon(1e-13));

    ScalarField prof = planar_profile_field(g, p);
    CHECK(gradient_at_contact(prof, make_point(0.0, 0.0)) <= 1e-4);

    CHECK_THROWS_AS(gradient_at_contact(lin, make_point(0.0, 0.5)), ContractError);
    CHECK_THROWS_AS(gradient_at_contact(lin, make_point(0.3e-3, 0.0)), ContractError);
}
