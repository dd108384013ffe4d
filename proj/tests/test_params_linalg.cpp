#include <cmath>

#include "aplab/errors.hpp"
#include "aplab/linalg.hpp"
#include "aplab/params.hpp"
#include "doctest.h"

using namespace aplab;

TEST_CASE("beta_of on reference values") {
    CHECK(beta_of(1.5) == 4.0);
    CHECK(beta_of(4.0 / 3.0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(beta_of(1.2) == doctest::Approx(2.5).epsilon(1e-14));
    // beta -> 2 as gamma -> 1, beta -> infinity as gamma -> 2
    CHECK(beta_of(1.001) == doctest::Approx(2.0 / 0.999).epsilon(1e-12));
    CHECK(beta_of(1.999) == doctest::Approx(2000.0).epsilon(1e-9));
}

TEST_CASE("beta_of rejects gamma outside (1,2)") {
    CHECK_THROWS_AS(beta_of(1.0), ParameterError);
    CHECK_THROWS_AS(beta_of(2.0), ParameterError);
    CHECK_THROWS_AS(beta_of(0.5), ParameterError);
    CHECK_THROWS_AS(beta_of(2.5), ParameterError);
}

TEST_CASE("ApParams validates and exposes beta") {
    ApParams p(1.5);
    CHECK(p.gamma == 1.5);
    CHECK(p.lambda == 1.0);
    CHECK(p.beta() == 4.0);
    CHECK_THROWS_AS(ApParams(1.5, 0.5), ParameterError);
    CHECK_THROWS_AS(ApParams(2.5), ParameterError);
}

TEST_CASE("rhs at exact dyadic values") {
    ApParams p(1.5);
    // gamma * u^(gamma-1) = 1.5 * sqrt(u); u = 1/64 gives exactly 3/16.
    CHECK(rhs(p, 1.0 / 64.0) == 0.1875);
    CHECK(rhs(p, 0.0) == 0.0);
    CHECK(rhs(p, 1.0) == 1.5);
    CHECK_THROWS_AS(rhs(p, -1e-12), ContractError);
}

TEST_CASE("SymMat constructors and accessors") {
    SymMat I = SymMat::identity(3);
    CHECK(I.trace() == 3.0);
    CHECK(I.frob() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));

    const double d[] = {2.0, 5.0};
    SymMat D = SymMat::diag(2, d);
    CHECK(D.at(0, 0) == 2.0);
    CHECK(D.at(1, 1) == 5.0);
    CHECK(D.at(0, 1) == 0.0);
    CHECK(D.trace() == 7.0);

    SymMat Z = SymMat::zero(2);
    CHECK(Z.trace() == 0.0);
    CHECK(Z.frob() == 0.0);
    CHECK(Z.asymmetry() == 0.0);
}

TEST_CASE("SymMat arithmetic") {
    SymMat I = SymMat::identity(2);
    SymMat twoI = 2.0 * I;
    CHECK(twoI.at(0, 0) == 2.0);
    CHECK((twoI + I).trace() == 6.0);
    CHECK((twoI - I).trace() == 2.0);
}

TEST_CASE("sym_eigenvalues on known matrices") {
    const double d[] = {5.0, 2.0};
    auto ev = sym_eigenvalues(SymMat::diag(2, d));
    CHECK(ev[0] == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(ev[1] == doctest::Approx(5.0).epsilon(1e-13));

    // [[0,1],[1,0]]: eigenvalues -1, 1
    SymMat S = SymMat::zero(2);
    S.at(0, 1) = 1.0;
    S.at(1, 0) = 1.0;
    auto ev2 = sym_eigenvalues(S);
    CHECK(ev2[0] == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(ev2[1] == doctest::Approx(1.0).epsilon(1e-13));

    // tridiagonal [[2,1,0],[1,2,1],[0,1,2]]: eigenvalues 2 - sqrt(2), 2, 2 + sqrt(2)
    SymMat T = SymMat::identity(3);
    T.at(0, 0) = T.at(1, 1) = T.at(2, 2) = 2.0;
    T.at(0, 1) = T.at(1, 0) = 1.0;
    T.at(1, 2) = T.at(2, 1) = 1.0;
    auto ev3 = sym_eigenvalues(T);
    CHECK(ev3[0] == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
    CHECK(ev3[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(ev3[2] == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("require_symmetric_finite rejects bad matrices") {
    SymMat M = SymMat::identity(2);
    CHECK_NOTHROW(require_symmetric_finite(M, "test"));

    SymMat N = M;
    N.at(0, 0) = std::nan("");
    CHECK_THROWS_AS(require_symmetric_finite(N, "test"), ContractError);

    SymMat A = SymMat::zero(2);
    A.at(0, 1) = 1.0; // transpose entry left at zero
    CHECK(A.asymmetry() == 1.0);
    CHECK_THROWS_AS(require_symmetric_finite(A, "test"), ContractError);
}

TEST_CASE("point helpers") {
    Point p = make_point(3.0, 4.0);
    CHECK(norm(p, 2) == 5.0);
    Point q = make_point(1.0, 1.0);
    CHECK(dot(p, q, 2) == 7.0);
    CHECK(norm(make_point(1.0, 2.0, 2.0), 3) == 3.0);
}
