#include "aplab/params.hpp"

#include <cmath>
#include <string>

namespace aplab {

double beta_of(double gamma) {
    if (!(gamma > 1.0) || !(gamma < 2.0))
        throw ParameterError("beta_of: gamma must lie in the open interval (1,2), got " +
                             std::to_string(gamma));
    return 2.0 / (2.0 - gamma);
}

ApParams::ApParams(double gamma_, double lambda_) : gamma(gamma_), lambda(lambda_) {
    beta_of(gamma); // range check
    if (!(lambda >= 1.0))
        throw ParameterError("ApParams: lambda must be >= 1, got " + std::to_string(lambda));
}

double rhs(const ApParams& params, double u) {
    if (u < 0.0) throw ContractError("rhs: u must be nonnegative, got " + std::to_string(u));
    if (u == 0.0) return 0.0;
    return params.gamma * std::pow(u, params.gamma - 1.0);
}

} // namespace aplab
