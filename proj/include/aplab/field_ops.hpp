#pragma once

#include <string>
#include <vector>

#include "aplab/grid.hpp"
#include "aplab/linalg.hpp"
#include "aplab/params.hpp"

namespace aplab {

/// Central-difference gradient at an Interior node.
Point gradient_at(const ScalarField& f, long id);

/// Standard 2*dim+1 point Laplacian at an Interior node.
double laplacian_at(const ScalarField& f, long id);

/// Full central-difference Hessian at an Interior node; mixed entries use the
/// four diagonal neighbors.  Throws StencilError naming the node if any
/// required neighbor is Exterior or outside the lattice.
SymMat hessian_at(const ScalarField& f, long id);

/// Hessian that falls back to one-sided mixed stencils in the thin band where
/// a diagonal neighbor is masked out (half-disk rim).  Interior solver use.
SymMat hessian_at_relaxed(const ScalarField& f, long id);

/// Multilinear interpolation at an arbitrary point of the closed domain.
double interp(const ScalarField& f, const Point& p);

/// Max of nodal values over grid nodes in the closed half-ball
/// B_r(x0) & {x_n >= 0}.  Empty intersection is a domain error.
double sup_on_halfball(const ScalarField& f, const Point& x0, double r);

/// Max of interpolated values over a uniform angular sample of
/// dB_r(x0) & {x_n > 0} (64*dim points on the surviving part).
double sup_on_halfsphere(const ScalarField& f, const Point& x0, double r);

/// u_{x0,r}(y) = u(x0 + r*y) / r^beta sampled on the target grid.
/// Every non-Exterior target node must map into the source domain.
ScalarField rescale_field(const ScalarField& f, const Point& x0, double r,
                          const ApParams& params, const GridPtr& target);

/// Positivity threshold separating "numerically zero" from positive values:
/// 1e-10 * max(1, |u|_inf).
double positivity_floor(const ScalarField& f);

/// CSV with header x1,...,xd,u and one row per non-Exterior node, 17
/// significant digits.
void write_field_csv(const ScalarField& f, const std::string& path);

/// Rebuilds the grid (spacing, extents, shape) from the coordinates and
/// returns the field.  Round-trips write_field_csv bit-exactly.
ScalarField read_field_csv(const std::string& path);

} // namespace aplab
