#pragma once

#include "aplab/errors.hpp"

namespace aplab {

/// Homogeneity exponent beta = 2/(2-gamma).  Rejects gamma outside the open
/// interval (1,2); beta then ranges over (2, infinity).
double beta_of(double gamma);

/// Problem parameters for the absorption term gamma*u^(gamma-1).
/// beta is always recomputed from gamma, never stored separately.
struct ApParams {
    double gamma;
    double lambda; // ellipticity bound of the operator family, >= 1

    explicit ApParams(double gamma_, double lambda_ = 1.0);

    double beta() const { return beta_of(gamma); }
};

/// Right-hand side gamma*u^(gamma-1) for u > 0, zero at u = 0.
/// Negative u violates the contract.
double rhs(const ApParams& params, double u);

} // namespace aplab
