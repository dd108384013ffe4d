#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aplab/grid.hpp"
#include "aplab/operators.hpp"
#include "aplab/params.hpp"
#include "aplab/solver.hpp"

namespace aplab {

/// Declarative description of one experiment, parsed from a flat key-value
/// config file with [section] headers (see scenarios/ for samples).
struct Scenario {
    std::string name;
    int dim = 1;
    double gamma = 1.5;
    double lambda = 1.0;
    unsigned seed = 7;

    // [operator]
    std::string operator_kind = "laplacian"; // laplacian | linear_trace | perturbed_trace
    double theta = 0.0;
    std::vector<double> diag;   // linear_trace diagonal
    double rescale_r = 0.0;     // wrap in rescaled_operator when > 0

    // [domain]
    std::string shape = "interval"; // interval | half_rectangle | half_disk
    int resolution = 256;           // cells across
    double radius = 1.0;
    double length = 1.0;
    double halfwidth = 1.0;
    double height = 1.0;

    // [boundary]
    std::string generator = "profile"; // zero | profile | ramp_profile
    double scale = 1.0;
    double offset = 0.0;   // added on the curved boundary only
    double aniso_c = 1.0;  // profile amplitude for linear_trace(diag(..,c))
    double ramp_lo = -0.5; // ramp_profile: data vanish for cos t <= ramp_lo
    double ramp_hi = 0.0;  // ramp_profile: full profile for cos t >= ramp_hi

    // [solver]
    SolveOptions solve;

    // [analysis]
    std::vector<double> weiss_radii;
    std::vector<double> growth_radii;
    std::string growth_base = "origin"; // origin | nearest_fb
    std::vector<double> blowup_radii;
    std::vector<double> contact_radii;
    std::vector<std::string> directions; // tokens: e_1 .. e_n, -e_1, ...
    double monotonicity_radius = 0.0;    // 0 = whole domain
    double nondeg_a_rel = 0.0;           // a = rel * profile amplitude; 0 disables
    bool run_transform_w = false;
    bool run_first_integral = false;
    bool gradient_at_origin = false;

    ApParams params() const { return ApParams(gamma, lambda); }
    OperatorSpec make_operator() const;
    GridPtr make_grid() const;
    std::vector<double> make_boundary_data(const GridPtr& grid) const;
};

/// Parse a scenario config file.  Unknown keys and malformed values raise
/// ConfigError with the offending line.
Scenario load_scenario(const std::string& path);

/// Validation beyond parsing: resolution >= 32, dim matches the shape,
/// analysis radii inside the domain, boundary data admissible.
void validate_scenario(const Scenario& s);

/// Parses a direction token "e_1" .. "e_3" (optionally negated) into a unit
/// vector.  Rejects axes beyond dim and directions pointing below the fixed
/// boundary.
Point parse_direction(const std::string& token, int dim);

/// Named Dirichlet data generators, one value per grid node.
/// - zero:          0 everywhere
/// - profile:       scale * (sqrt(2/c)*x_n/beta)^beta on outer boundary
/// - ramp_profile:  half-disk data profile(sin t) * ramp(cos t) with
///                  ramp = 0 below cos t = ramp_lo, 1 above cos t = ramp_hi,
///                  linear between; starves the solution on the left so the
///                  contact set reaches toward the origin.
/// offset is added at CurvedBoundary nodes.  Flat-boundary entries are 0.
std::vector<double> boundary_data(const GridPtr& grid, const ApParams& params,
                                  const std::string& generator, double scale,
                                  double offset, double aniso_c,
                                  double ramp_lo = -0.5, double ramp_hi = 0.0);

} // namespace aplab
