#pragma once

#include <array>
#include <vector>

#include "aplab/field_ops.hpp"
#include "aplab/grid.hpp"
#include "aplab/operators.hpp"
#include "aplab/params.hpp"

namespace aplab {

/// Free boundary nodes: dead nodes at the foot of a relative cliff along a
/// lattice edge (value under 1% of a solid neighbor's), keeping points with
/// x_n > h/2 (away from the fixed boundary).  floor records the positivity
/// floor of the source field for reporting.
struct FreeBoundarySet {
    int dim = 0;
    double floor = 0.0;
    std::vector<Point> points;
};

FreeBoundarySet extract_free_boundary(const ScalarField& field);

/// Weiss boundary-adjusted energy of the rescaling u_{x0,r} at unit scale:
///   W(u_{x0,r}, 1) = int_{B_1^+} (|grad u_r|^2/2 + u_r^gamma chi_{u_r>0})
///                    - (beta/2) int_{dB_1 & {x_n>0}} u_r^2.
/// u_{x0,r} is sampled onto a unit half-ball grid matching the source
/// resolution; the volume integral uses a midpoint rule with subcell-counted
/// ball weights, the surface integral a fixed 64*dim-point angular sample.
double weiss(const ScalarField& field, const Point& x0, double r, const ApParams& params);

struct WeissProfile {
    Point x0{};
    std::vector<double> radii;
    std::vector<double> values;
    /// Largest drop max(0, W(r_i) - W(r_{i+1})) between consecutive radii.
    double max_drop = 0.0;
    double spread = 0.0; // max - min
    bool nondecreasing(double tol) const { return max_drop <= tol; }
};

WeissProfile weiss_profile(const ScalarField& field, const Point& x0,
                           const std::vector<double>& radii, const ApParams& params);

struct ContactModulusRow {
    double r = 0.0;
    bool present = false;  // false when no free boundary point has |x| <= r
    double value = 0.0;    // max over points with |x| <= r of x_n/|x|
};

/// Contact modulus table about the origin.  A tangentially attaching free
/// boundary makes the values decay with r.
std::vector<ContactModulusRow> contact_modulus(const FreeBoundarySet& fb,
                                               const std::vector<double>& radii);

struct GrowthReport {
    Point x0{};
    std::vector<double> radii;
    std::vector<double> sups; // sup of u over B_r^+(x0)
    double slope = 0.0;       // log-log least squares; beta for profile data
    double intercept = 0.0;
};

/// Least-squares fit of log sup_{B_r^+(x0)} u against log r.  Requires at
/// least three radii and u(x0) at the positivity floor; vanishing sups are a
/// degenerate-data error.
GrowthReport growth_exponent(const ScalarField& field, const Point& x0,
                             const std::vector<double>& radii, const ApParams& params);

struct NondegeneracyReport {
    Point x0{};
    double a = 0.0;
    bool precondition_ok = false; // x0 within 1.5h of the positivity set
    bool holds = false;
    std::vector<double> radii;
    std::vector<double> sphere_sups;
    std::vector<double> margins; // sup - a*r^beta
};

/// Checks sup_{dB_r^+(x0)} u >= a * r^beta across the radius ladder.
NondegeneracyReport nondegeneracy_check(const ScalarField& field, const Point& x0,
                                        const std::vector<double>& radii, double a,
                                        const ApParams& params);

struct BarrierReport {
    bool is_supersolution = false;
    double worst_margin = 0.0; // max of F(D2 Phi) - gamma*Phi^(gamma-1); <= 0 means supersolution
    Point worst_point{};
};

/// Evaluates whether Phi = a*|x|^beta is a supersolution of
/// F(D2 Phi) <= gamma*Phi^(gamma-1) at the given sample points, using the
/// exact Hessian  a*beta*|x|^(beta-2) * (I + (beta-2) xhat xhat^T).
BarrierReport barrier_supersolution_check(const OperatorSpec& spec, const ApParams& params,
                                          double a, const std::vector<Point>& sample_points,
                                          int dim);

struct TransformWReport {
    ScalarField w;
    double residual_sup = 0.0;
    double A = 0.0;
    double B = 0.0;
    long region_nodes = 0;
};

/// w = u^(2/beta) obeys  Delta w = A - B*|grad w|^2 / w  with
/// A = gamma*(2-gamma), B = (gamma-1)/(2-gamma).  Reports the sup of the
/// discrete residual over {w > 0.05 * max w}.
TransformWReport transform_w(const ScalarField& field, const ApParams& params);

struct DirectionReport {
    Point direction{};
    double min_derivative = 0.0;
    double tol_slope = 0.0;
    bool monotone = false;
};

/// Minimum central-difference directional derivative over interior nodes of
/// B_region_r(x0); monotone when it stays above -tol_slope with
/// tol_slope = 10*h*max(1, sup|D2_h u|).
std::vector<DirectionReport> directional_monotonicity(const ScalarField& field,
                                                      const std::vector<Point>& directions,
                                                      const Point& x0, double region_r);

struct BlowupReport {
    Point x0{};
    std::vector<double> radii;
    std::vector<double> distances; // sup over unit half-ball target grid
};

/// Sup distance between u_{x0,r} and the half-space profile on a unit
/// half-ball target grid, per radius.  u(x0) must sit at the positivity
/// floor.
BlowupReport blowup_distance(const ScalarField& field, const Point& x0,
                             const std::vector<double>& radii, const ApParams& params);

/// |grad u| at a flat-boundary node from one-sided second-order differences
/// (normal direction) and boundary-tangential central differences.
double gradient_at_contact(const ScalarField& field, const Point& x0);

} // namespace aplab
