#include "aplab/oracle1d.hpp"

#include <cmath>
#include <string>

#include "aplab/errors.hpp"

namespace aplab {

// (sqrt(2c) x / beta)^beta is computed as (2c x^2 / beta^2)^(beta/2); the
// base is then rational in x, which keeps dyadic inputs exact when beta/2 is
// a small integer (gamma = 3/2 gives beta = 4 and amplitude exactly 1/64).
double profile_amplitude(const ApParams& params) {
    const double beta = params.beta();
    return std::pow(2.0 / (beta * beta), 0.5 * beta);
}

double profile_eval(const ApParams& params, double xn) {
    if (xn <= 0.0) return 0.0;
    const double beta = params.beta();
    return std::pow(2.0 * xn * xn / (beta * beta), 0.5 * beta);
}

double profile_eval_aniso(const ApParams& params, double xn, double c) {
    if (!(c > 0.0)) throw ParameterError("profile_eval_aniso: c must be positive");
    if (xn <= 0.0) return 0.0;
    const double beta = params.beta();
    return std::pow(2.0 * xn * xn / (c * beta * beta), 0.5 * beta);
}

ScalarField first_integral(const ScalarField& field1d, const ApParams& params) {
    const auto& g = *field1d.grid;
    if (g.dim() != 1) throw ContractError("first_integral: field must be one-dimensional");
    const double h = g.spacing();
    ScalarField out(field1d.grid);
    for (long id = 0; id < g.num_nodes(); ++id) {
        if (g.node_class(id) != NodeClass::Interior) continue;
        const double up = field1d[g.neighbor(id, 0, +1)];
        const double dn = field1d[g.neighbor(id, 0, -1)];
        const double du = (up - dn) / (2.0 * h);
        const double u = std::max(field1d[id], 0.0);
        out[id] = 0.5 * du * du - std::pow(u, params.gamma);
    }
    return out;
}

namespace {

// Integrates u'' = gamma*u^(gamma-1) from (u, u') = (0, sqrt(2*E0)) with a
// classical 4-stage Runge-Kutta step aligned to the grid nodes.  When `out`
// is non-null the node samples are stored.
double integrate_branch(const ApParams& params, const HalfGrid& g, double e0,
                        ScalarField* out) {
    const double gamma = params.gamma;
    const auto f = [gamma](double u) { return gamma * std::pow(std::max(u, 0.0), gamma - 1.0); };
    const long n_cells = g.num_nodes() - 1;
    const int k = static_cast<int>((4096 + n_cells - 1) / n_cells);
    const double step = g.spacing() / k;
    double u = 0.0, p = std::sqrt(2.0 * e0);
    if (out) (*out)[0] = 0.0;
    for (long cell = 0; cell < n_cells; ++cell) {
        for (int j = 0; j < k; ++j) {
            const double k1u = p, k1p = f(u);
            const double k2u = p + 0.5 * step * k1p, k2p = f(u + 0.5 * step * k1u);
            const double k3u = p + 0.5 * step * k2p, k3p = f(u + 0.5 * step * k2u);
            const double k4u = p + step * k3p, k4p = f(u + step * k3u);
            u += step / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            p += step / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        }
        if (out) (*out)[cell + 1] = u;
    }
    return u;
}

} // namespace

ScalarField shoot(const ApParams& params, double length, double terminal_value,
                  double tol, int n_cells) {
    if (terminal_value < 0.0)
        throw ContractError("shoot: terminal value must be nonnegative");
    if (!(tol > 0.0)) throw ParameterError("shoot: tol must be positive");
    auto grid = HalfGrid::interval(n_cells, length);
    ScalarField field(grid);

    const double tstar = profile_eval(params, length);
    if (terminal_value <= tstar) {
        // Exact translate: contact on [0, x0], profile afterwards.
        const double alpha = profile_amplitude(params);
        const double x0 =
            length - std::pow(terminal_value / alpha, 1.0 / params.beta());
        for (long id = 0; id < grid->num_nodes(); ++id)
            field[id] = profile_eval(params, grid->coord(id)[0] - x0);
        field[grid->num_nodes() - 1] = terminal_value;
        return field;
    }

    double e_lo = 0.0, t_lo = tstar;
    double e_hi = std::max(terminal_value, 1.0);
    double t_hi = integrate_branch(params, *grid, e_hi, nullptr);
    int guard = 0;
    while (t_hi < terminal_value) {
        if (++guard > 200)
            throw OracleError("shoot: cannot bracket the first integral for terminal value " +
                              std::to_string(terminal_value));
        e_lo = e_hi;
        t_lo = t_hi;
        e_hi *= 2.0;
        t_hi = integrate_branch(params, *grid, e_hi, nullptr);
    }
    (void)t_lo;

    double e_mid = 0.5 * (e_lo + e_hi);
    for (int it = 0; it < 200; ++it) {
        e_mid = 0.5 * (e_lo + e_hi);
        const double t = integrate_branch(params, *grid, e_mid, nullptr);
        if (std::fabs(t - terminal_value) <= tol) break;
        if (t < terminal_value)
            e_lo = e_mid;
        else
            e_hi = e_mid;
        if (e_hi - e_lo <= 1e-17 * std::max(1.0, e_hi)) break;
    }
    integrate_branch(params, *grid, e_mid, &field);
    field[grid->num_nodes() - 1] = terminal_value;
    return field;
}

} // namespace aplab
