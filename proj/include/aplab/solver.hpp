#pragma once

#include <vector>

#include "aplab/field_ops.hpp"
#include "aplab/grid.hpp"
#include "aplab/operators.hpp"
#include "aplab/params.hpp"

namespace aplab {

struct SolveOptions {
    long max_sweeps = 40000;
    /// Stopping tolerance, scaled internally by the right-hand-side magnitude
    /// max(1, gamma * (max u)^(gamma-1)).
    double tol_residual = 1e-8;
    /// Outer blending factor of the fully nonlinear fixed-point iteration.
    double damping = 0.7;
    /// Values at or below this are treated as contact (0 keeps the default
    /// derived floor 1e-10 * max(1, |u|_inf)).
    double positivity_floor = 0.0;
    int scalar_newton_iters = 40;
    /// Over-relaxation factor of the projected sweeps; 0 selects
    /// 2/(1 + sin(pi*h/L)) from the grid automatically.
    double over_relaxation = 0.0;
    /// Linear relaxation sweeps per outer iteration of the nonlinear path.
    int inner_sweeps = 8;
    /// Record the discrete energy after every sweep (Laplacian path).
    bool track_energy = true;
};

struct SolveResult {
    ScalarField field;
    long sweeps_used = 0;
    double final_residual = 0.0;      // max PDE residual over {u > floor}
    double complementarity_gap = 0.0; // max |min(gamma*u^(gamma-1) - F(D2u), u)|
    double effective_tol = 0.0;       // tol_residual after RHS scaling
    /// Laplacian path only: discrete energy before the first sweep and after
    /// every sweep; exactly nonincreasing.  Empty on the fully nonlinear path.
    std::vector<double> energy_history;
};

/// Minimizes  sum_cells |grad u|^2/2 + u^gamma  over u >= 0 with the given
/// Dirichlet data, by projected nonlinear Gauss-Seidel sweeps: each nodal
/// update solves a*u - b + gamma*u^(gamma-1) = 0 by safeguarded
/// bisection-Newton and projects to u >= 0.  Sweeps are over-relaxed with a
/// per-node energy guard, so the discrete energy never increases.
///
/// boundary_data holds one value per node; entries at FlatBoundary nodes must
/// be exactly zero and all entries must be nonnegative.
SolveResult solve_laplacian(const GridPtr& grid, const std::vector<double>& boundary_data,
                            const ApParams& params, const SolveOptions& opts = {});

/// Damped fixed-point iteration for F(D2u) = gamma*u^(gamma-1) chi_{u>0}:
/// freeze the right-hand side at the current iterate, relax the linearized
/// operator DF(D2u_k) for a few monotone sweeps, then blend with the damping
/// factor and project to u >= 0.  Divergence (residual growth over 50
/// consecutive outer iterations) raises DivergenceError.
SolveResult solve_fully_nonlinear(const GridPtr& grid, const std::vector<double>& boundary_data,
                                  const OperatorSpec& spec, const ApParams& params,
                                  const SolveOptions& opts = {});

/// |F(D2_h u) - gamma*u^(gamma-1)| at interior nodes with u above the
/// positivity floor, zero elsewhere.
ScalarField pde_residual(const ScalarField& field, const OperatorSpec& spec,
                         const ApParams& params);

struct ComparisonReport {
    bool ordered = false;
    double max_violation = 0.0; // max over nodes of (u_low - u_high)
    double tol_used = 0.0;      // 10 * max effective solver tolerance
    SolveResult low, high;
};

/// Solves both data sets and checks the discrete comparison principle
/// u_low <= u_high + tol.  data_low <= data_high is a precondition.
ComparisonReport comparison_test(const GridPtr& grid, const std::vector<double>& data_low,
                                 const std::vector<double>& data_high, const OperatorSpec& spec,
                                 const ApParams& params, const SolveOptions& opts = {});

/// Discrete energy  h^d * [ sum_edges (du/h)^2/2 + sum_interior u^gamma ],
/// Kahan-summed for reproducible monotonicity checks.
double discrete_energy(const ScalarField& field, const ApParams& params);

} // namespace aplab
