#pragma once

#include <vector>

#include "aplab/grid.hpp"
#include "aplab/params.hpp"

namespace aplab {

/// Exact half-space profile  u(x) = (sqrt(2) * max(x_n,0) / beta)^beta,
/// the unique nonnegative beta-homogeneous solution of
/// u'' = gamma*u^(gamma-1) with contact at the origin.
double profile_eval(const ApParams& params, double xn);

/// Amplitude (sqrt(2)/beta)^beta of the profile, i.e. profile_eval at 1.
double profile_amplitude(const ApParams& params);

/// Anisotropic variant: solves c * u'' = gamma*u^(gamma-1); amplitude
/// becomes (sqrt(2/c)/beta)^beta.
double profile_eval_aniso(const ApParams& params, double xn, double c);

/// First integral E(x) = u'(x)^2/2 - u(x)^gamma along a 1D field, evaluated
/// with central differences at interior nodes (zero at boundary nodes).
/// E is conserved by u'' = gamma*u^(gamma-1); it vanishes identically on the
/// profile branch.
ScalarField first_integral(const ScalarField& field1d, const ApParams& params);

/// Independent 1D oracle for the two-point problem
///   u'' = gamma*u^(gamma-1),  u(0) = 0,  u(length) = terminal_value.
/// Terminal values above the profile branch select the first integral E0 > 0
/// by bisection, integrating u'' = gamma*u^(gamma-1) with a fixed-step
/// fourth-order scheme (step <= length/4096) from u(0) = 0,
/// u'(0) = sqrt(2*E0).  At or below the branch the solution is the exact
/// profile translate u(x) = profile_eval(x - x0) with contact point
/// x0 = length - (terminal/amplitude)^(1/beta).
ScalarField shoot(const ApParams& params, double length, double terminal_value,
                  double tol, int n_cells);

} // namespace aplab
