#include "aplab/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "aplab/errors.hpp"
#include "aplab/oracle1d.hpp"

namespace aplab {

namespace {

double pow_gamma(double u, double g) {
    if (u <= 0.0) return 0.0;
    return g == 1.5 ? u * std::sqrt(u) : std::pow(u, g);
}

double pow_gm1(double u, double g) {
    if (u <= 0.0) return 0.0;
    return g == 1.5 ? std::sqrt(u) : std::pow(u, g - 1.0);
}

GridPtr unit_halfball_grid(int dim, int m) {
    if (dim == 1) return HalfGrid::interval(m, 1.0);
    return HalfGrid::half_disk(dim, 2 * m, 1.0);
}

int target_cells(double r, double h) {
    return std::max(2, static_cast<int>(std::ceil(r / h - 1e-9)));
}

void check_radii(const std::vector<double>& radii, const char* who) {
    if (radii.empty()) throw ContractError(std::string(who) + ": radius list is empty");
    double prev = 0.0;
    for (double r : radii) {
        if (!(r > prev))
            throw ContractError(std::string(who) + ": radii must be positive and increasing");
        prev = r;
    }
}

} // namespace

FreeBoundarySet extract_free_boundary(const ScalarField& field) {
    const auto& g = *field.grid;
    FreeBoundarySet fb;
    fb.dim = g.dim();
    fb.floor = positivity_floor(field);
    const double h = g.spacing();
    // A fixed level cannot separate the phases: genuine values of a
    // beta-growth field drop below any absolute threshold within O(h) of the
    // contact plane, while relaxation leaves a skirt of meaninglessly tiny
    // positives just inside the dead set.  Both are handled by a relative
    // cliff test -- a node is dead at the foot of a solid neighbor when it
    // carries under 1% of that neighbor's value, and a node is solid only
    // when it is not itself the foot of a larger cliff.
    const double rho = 1e-2;
    const auto max_neighbor = [&](long id) {
        double m = 0.0;
        for (int a = 0; a < g.dim(); ++a)
            for (int dir : {-1, +1}) {
                const long k = g.neighbor(id, a, dir);
                if (k >= 0 && g.node_class(k) != NodeClass::Exterior)
                    m = std::max(m, field[k]);
            }
        return m;
    };
    for (long id = 0; id < g.num_nodes(); ++id) {
        if (g.node_class(id) == NodeClass::Exterior) continue;
        const double ui = field[id];
        for (int a = 0; a < g.dim(); ++a) {
            const long j = g.neighbor(id, a, +1);
            if (j < 0 || g.node_class(j) == NodeClass::Exterior) continue;
            const double uj = field[j];
            const double hi = std::max(ui, uj);
            if (hi <= 0.0 || !(std::min(ui, uj) <= rho * hi)) continue;
            const long solid = ui < uj ? j : id;
            const long dead = ui < uj ? id : j;
            if (field[solid] < rho * max_neighbor(solid)) continue;
            const Point p = g.coord(dead);
            if (p[static_cast<std::size_t>(g.dim() - 1)] > 0.5 * h) fb.points.push_back(p);
        }
    }
    return fb;
}

namespace {

// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre_unit(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double step = p1 / dp;
            t -= step;
            if (std::fabs(step) < 1e-15) break;
        }
        const double wi = 2.0 / ((1.0 - t * t) * dp * dp);
        x[i] = 0.5 * (1.0 - t);
        w[i] = 0.5 * wi;
        x[n - 1 - i] = 0.5 * (1.0 + t);
        w[n - 1 - i] = 0.5 * wi;
    }
}

// Node field sampled by multilinear interpolation with a curvature
// correction: subtracting (h^2/2) xi(1-xi) times the interpolated second
// difference removes the leading interpolation bias.  Plain interpolation
// leaves an O(h^2) sawtooth that the r^{-2beta} normalisation of the Weiss
// energy blows up at small radii.
struct CorrectedField {
    const HalfGrid* g = nullptr;
    const std::vector<double>* v = nullptr;
    std::vector<double> own;
    std::array<std::vector<double>, 3> d2;

    void build(const HalfGrid& grid, const std::vector<double>& values) {
        g = &grid;
        v = &values;
        fill_d2();
    }
    void build_owned(const HalfGrid& grid, std::vector<double> values) {
        g = &grid;
        own = std::move(values);
        v = &own;
        fill_d2();
    }

    void fill_d2() {
        const int dim = g->dim();
        const long nn = g->num_nodes();
        const double inv_h2 = 1.0 / (g->spacing() * g->spacing());
        const auto& f = *v;
        for (int a = 0; a < dim; ++a) {
            d2[a].assign(nn, 0.0);
            std::vector<char> set(nn, 0);
            for (long id = 0; id < nn; ++id) {
                if (g->node_class(id) == NodeClass::Exterior) continue;
                const long m = g->neighbor(id, a, -1);
                const long p = g->neighbor(id, a, +1);
                if (m >= 0 && p >= 0 && g->node_class(m) != NodeClass::Exterior &&
                    g->node_class(p) != NodeClass::Exterior) {
                    d2[a][id] = (f[m] - 2.0 * f[id] + f[p]) * inv_h2;
                    set[id] = 1;
                }
            }
            // edge nodes borrow the curvature of their lone axis neighbor
            for (long id = 0; id < nn; ++id) {
                if (g->node_class(id) == NodeClass::Exterior || set[id]) continue;
                for (int dir : {-1, +1}) {
                    const long nb = g->neighbor(id, a, dir);
                    if (nb >= 0 && set[nb]) {
                        d2[a][id] = d2[a][nb];
                        break;
                    }
                }
            }
        }
    }

    double at(const Point& p) const {
        const int dim = g->dim();
        const double h = g->spacing();
        std::array<std::array<int, 3>, 2> corner_k{};
        std::array<double, 3> frac{0.0, 0.0, 0.0};
        std::array<int, 3> base{0, 0, 0};
        for (int a = 0; a < dim; ++a) {
            const double t = p[a] / h - g->lo(a);
            int c = static_cast<int>(std::floor(t));
            c = std::clamp(c, 0, g->count(a) - 2);
            base[a] = c + g->lo(a);
            frac[a] = std::clamp(t - c, 0.0, 1.0);
        }
        (void)corner_k;
        const int corners = 1 << dim;
        std::array<long, 8> ids{};
        std::array<double, 8> wgt{};
        double live_sum = 0.0;
        int n_dead = 0;
        for (int c = 0; c < corners; ++c) {
            std::array<int, 3> k = base;
            double wc = 1.0;
            for (int a = 0; a < dim; ++a) {
                if (c & (1 << a)) {
                    k[a] += 1;
                    wc *= frac[a];
                } else {
                    wc *= 1.0 - frac[a];
                }
            }
            const long id = g->id_of(k);
            const bool dead = id < 0 || g->node_class(id) == NodeClass::Exterior;
            ids[c] = dead ? -1 : id;
            wgt[c] = wc;
            if (dead)
                ++n_dead;
            else
                live_sum += wc;
        }
        if (n_dead == corners || live_sum <= 0.0)
            throw DomainError("weiss: sample point is outside the grid");
        const auto& f = *v;
        if (n_dead > 0) {
            // rim cell: fall back to the live corners alone, no correction
            double val = 0.0;
            for (int c = 0; c < corners; ++c)
                if (ids[c] >= 0) val += wgt[c] * f[ids[c]];
            return val / live_sum;
        }
        double val = 0.0;
        std::array<double, 3> curv{0.0, 0.0, 0.0};
        for (int c = 0; c < corners; ++c) {
            val += wgt[c] * f[ids[c]];
            for (int a = 0; a < dim; ++a) curv[a] += wgt[c] * d2[a][ids[c]];
        }
        const double half_h2 = 0.5 * h * h;
        for (int a = 0; a < dim; ++a)
            val -= half_h2 * frac[a] * (1.0 - frac[a]) * curv[a];
        return val;
    }
};

// Samples u and its gradient along rays from a base point, extrapolating
// inward values across the last couple of cells before a curved rim, where
// interpolation cells lose corners and degrade to first order.
struct RaySampler {
    const HalfGrid* g = nullptr;
    CorrectedField u;
    std::array<CorrectedField, 3> grad;
    double h = 0.0;
    double rim_safe = -1.0;  // radius below which every interpolation cell is whole

    explicit RaySampler(const ScalarField& field) {
        g = field.grid.get();
        h = g->spacing();
        u.build(*g, field.values);
        const int dim = g->dim();
        const long nn = g->num_nodes();
        for (int a = 0; a < dim; ++a) {
            std::vector<double> ga(nn, 0.0);
            for (long id = 0; id < nn; ++id) {
                if (g->node_class(id) == NodeClass::Exterior) continue;
                const long m = g->neighbor(id, a, -1);
                const long p = g->neighbor(id, a, +1);
                const bool lm = m >= 0 && g->node_class(m) != NodeClass::Exterior;
                const bool lp = p >= 0 && g->node_class(p) != NodeClass::Exterior;
                const auto& f = field.values;
                if (lm && lp) {
                    const long m2 = g->neighbor(m, a, -1);
                    const long p2 = g->neighbor(p, a, +1);
                    const bool deep = m2 >= 0 && p2 >= 0 &&
                                      g->node_class(m2) != NodeClass::Exterior &&
                                      g->node_class(p2) != NodeClass::Exterior;
                    ga[id] = deep ? (-f[p2] + 8.0 * f[p] - 8.0 * f[m] + f[m2]) / (12.0 * h)
                                  : (f[p] - f[m]) / (2.0 * h);
                } else if (lp) {
                    const long p2 = g->neighbor(p, a, +1);
                    ga[id] = p2 >= 0 && g->node_class(p2) != NodeClass::Exterior
                                 ? (-3.0 * f[id] + 4.0 * f[p] - f[p2]) / (2.0 * h)
                                 : (f[p] - f[id]) / h;
                } else if (lm) {
                    const long m2 = g->neighbor(m, a, -1);
                    ga[id] = m2 >= 0 && g->node_class(m2) != NodeClass::Exterior
                                 ? (3.0 * f[id] - 4.0 * f[m] + f[m2]) / (2.0 * h)
                                 : (f[id] - f[m]) / h;
                }
            }
            grad[a].build_owned(*g, std::move(ga));
        }
        if (g->shape() == ShapeKind::HalfDisk) rim_safe = g->radius() - 2.5 * h;
    }

    static Point along(const Point& x0, const Point& w, double s, int dim) {
        Point p = x0;
        for (int a = 0; a < dim; ++a) p[a] += s * w[a];
        if (p[dim - 1] < 0.0) p[dim - 1] = 0.0;
        return p;
    }

    // Largest ray parameter whose sample sits clear of the curved rim.
    double safe_cap(const Point& x0, const Point& w, double want) const {
        if (rim_safe < 0.0) return want;
        double b = 0.0, q = -rim_safe * rim_safe;
        for (int a = 0; a < g->dim(); ++a) {
            b += x0[a] * w[a];
            q += x0[a] * x0[a];
        }
        const double disc = b * b - q;
        if (disc <= 0.0) return 0.0;
        return std::min(want, -b + std::sqrt(disc));
    }

    double sample(const CorrectedField& cf, const Point& x0, const Point& w, double s,
                  double cap) const {
        const int dim = g->dim();
        if (s <= cap) return cf.at(along(x0, w, s, dim));
        if (cap >= 2.2 * h && s - cap <= 4.0 * h) {
            // quadratic extrapolation along the ray from the last safe points
            const double s0 = cap, s1 = cap - h, s2 = cap - 2.0 * h;
            const double f0 = cf.at(along(x0, w, s0, dim));
            const double f1 = cf.at(along(x0, w, s1, dim));
            const double f2 = cf.at(along(x0, w, s2, dim));
            const double l0 = (s - s1) * (s - s2) / ((s0 - s1) * (s0 - s2));
            const double l1 = (s - s0) * (s - s2) / ((s1 - s0) * (s1 - s2));
            const double l2 = (s - s0) * (s - s1) / ((s2 - s0) * (s2 - s1));
            return l0 * f0 + l1 * f1 + l2 * f2;
        }
        return cf.at(along(x0, w, s, dim));
    }

    double value(const Point& x0, const Point& w, double s) const {
        return sample(u, x0, w, s, safe_cap(x0, w, s));
    }

    double radial_derivative(const Point& x0, const Point& w, double s) const {
        const double cap = safe_cap(x0, w, s);
        const int dim = g->dim();
        double d = 0.0;
        for (int a = 0; a < dim; ++a) d += w[a] * sample(grad[a], x0, w, s, cap);
        return d;
    }
};

std::vector<Point> sphere_directions(int dim, std::vector<double>& wq) {
    std::vector<Point> dirs;
    if (dim == 1) {
        dirs = {make_point(1.0), make_point(-1.0)};
        wq = {1.0, 1.0};
    } else if (dim == 2) {
        const int K = 512;
        for (int j = 0; j < K; ++j) {
            const double th = 2.0 * M_PI * (j + 0.5) / K;
            dirs.push_back(make_point(std::cos(th), std::sin(th)));
            wq.push_back(2.0 * M_PI / K);
        }
    } else {
        const int K = 1024;  // Fibonacci sphere
        const double ga = M_PI * (3.0 - std::sqrt(5.0));
        for (int j = 0; j < K; ++j) {
            const double z = 1.0 - 2.0 * (j + 0.5) / K;
            const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
            dirs.push_back(make_point(rho * std::cos(ga * j), rho * std::sin(ga * j), z));
            wq.push_back(4.0 * M_PI / K);
        }
    }
    return dirs;
}

void require_ball_inside(const HalfGrid& g, const Point& x0, double r) {
    const int dim = g.dim();
    const double tol = 1e-9 * std::max(1.0, r);
    bool ok = true;
    switch (g.shape()) {
        case ShapeKind::Interval:
            ok = x0[0] + r <= g.length() + tol;
            break;
        case ShapeKind::HalfRectangle: {
            for (int a = 0; a + 1 < dim; ++a)
                ok = ok && std::fabs(x0[a]) + r <= g.halfwidth() + tol;
            ok = ok && x0[dim - 1] + r <= g.height() + tol;
            break;
        }
        case ShapeKind::HalfDisk: {
            double n2 = 0.0;
            for (int a = 0; a < dim; ++a) n2 += x0[a] * x0[a];
            ok = std::sqrt(n2) + r <= g.radius() + tol;
            break;
        }
    }
    if (!ok)
        throw DomainError("weiss: the ball of radius " + std::to_string(r) +
                          " exits the domain through its outer boundary");
}

}  // namespace

// Computed in polar form after integration by parts on the positivity set:
//
//   int_{B_r^+} |grad u|^2 / 2 dx
//     = (1/2) oint_{dB_r} u u_rho dS - (gamma/2) int_{B_r^+} u^gamma dx,
//
// so the scaled energy needs only field values, one radial derivative on the
// sphere, and no volume gradients:
//
//   W(r) = r^{2-2beta-d} [ (1/2) r^{d-1} oint u u_rho domega
//                          + (1 - gamma/2) int_{B_r^+} u^gamma dx ]
//          - (beta/2) r^{-2beta} oint u(x0 + r omega)^2 domega.
//
// Rays below the contact plane are cut at x_n = 0, where u vanishes.
double weiss(const ScalarField& field, const Point& x0, double r, const ApParams& params) {
    if (!field.grid) throw ContractError("weiss: field has no grid");
    const auto& g = *field.grid;
    const int dim = g.dim();
    if (!(r > 0.0)) throw ParameterError("weiss: radius must be positive");
    if (x0[dim - 1] < -1e-12 || !g.covers(x0))
        throw DomainError("weiss: base point is outside the closed half-domain");
    require_ball_inside(g, x0, r);

    const double beta = params.beta();
    const double x0n = std::max(x0[dim - 1], 0.0);
    RaySampler smp(field);

    std::vector<double> wq;
    const std::vector<Point> dirs = sphere_directions(dim, wq);
    std::vector<double> gx, gw;
    gauss_legendre_unit(32, gx, gw);

    const double inf = std::numeric_limits<double>::infinity();
    double vol_pow = 0.0;  // int_{B_r^+} u^gamma dx
    double srf_uur = 0.0;  // oint u u_rho domega at |x - x0| = r
    double srf_u2 = 0.0;   // oint u^2 domega at |x - x0| = r
    for (std::size_t j = 0; j < dirs.size(); ++j) {
        const Point& w = dirs[j];
        const double wn = w[dim - 1];
        const double s_cut = wn < 0.0 ? (x0n > 0.0 ? x0n / (-wn) : 0.0) : inf;
        const double s_hi = std::min(r, s_cut);
        if (s_hi > 0.0) {
            double acc = 0.0;
            for (std::size_t q = 0; q < gx.size(); ++q) {
                const double s = s_hi * gx[q];
                const double us = std::max(smp.value(x0, w, s), 0.0);
                acc += gw[q] * std::pow(s, dim - 1) * pow_gamma(us, params.gamma);
            }
            vol_pow += wq[j] * s_hi * acc;
        }
        if (s_cut >= r) {
            const double us = std::max(smp.value(x0, w, r), 0.0);
            srf_uur += wq[j] * us * smp.radial_derivative(x0, w, r);
            srf_u2 += wq[j] * us * us;
        }
    }

    const double scale = std::pow(r, 2.0 - 2.0 * beta - dim);
    const double vol_part =
        scale * (0.5 * std::pow(r, dim - 1) * srf_uur + (1.0 - 0.5 * params.gamma) * vol_pow);
    const double surf_part = 0.5 * beta * std::pow(r, -2.0 * beta) * srf_u2;
    return vol_part - surf_part;
}

WeissProfile weiss_profile(const ScalarField& field, const Point& x0,
                           const std::vector<double>& radii, const ApParams& params) {
    check_radii(radii, "weiss_profile");
    WeissProfile wp;
    wp.x0 = x0;
    wp.radii = radii;
    for (double r : radii) wp.values.push_back(weiss(field, x0, r, params));
    for (std::size_t i = 0; i + 1 < wp.values.size(); ++i)
        wp.max_drop = std::max(wp.max_drop, wp.values[i] - wp.values[i + 1]);
    const auto [mn, mx] = std::minmax_element(wp.values.begin(), wp.values.end());
    wp.spread = wp.values.empty() ? 0.0 : *mx - *mn;
    return wp;
}

std::vector<ContactModulusRow> contact_modulus(const FreeBoundarySet& fb,
                                               const std::vector<double>& radii) {
    check_radii(radii, "contact_modulus");
    std::vector<ContactModulusRow> rows;
    for (double r : radii) {
        ContactModulusRow row;
        row.r = r;
        for (const Point& p : fb.points) {
            double n2 = 0.0;
            for (int a = 0; a < fb.dim; ++a)
                n2 += p[static_cast<std::size_t>(a)] * p[static_cast<std::size_t>(a)];
            const double norm = std::sqrt(n2);
            if (norm > r * (1.0 + 1e-12)) continue;
            row.present = true;
            row.value = std::max(row.value,
                                 p[static_cast<std::size_t>(fb.dim - 1)] / norm);
        }
        rows.push_back(row);
    }
    return rows;
}

GrowthReport growth_exponent(const ScalarField& field, const Point& x0,
                             const std::vector<double>& radii, const ApParams&) {
    check_radii(radii, "growth_exponent");
    if (radii.size() < 3)
        throw ContractError("growth_exponent: at least three radii are required");
    const double floor = positivity_floor(field);
    if (interp(field, x0) > 1.01 * floor)
        throw ContractError("growth_exponent: base point must sit at the positivity floor");
    GrowthReport rep;
    rep.x0 = x0;
    rep.radii = radii;
    for (double r : radii) {
        const double s = sup_on_halfball(field, x0, r);
        if (s <= 0.0)
            throw DegenerateDataError(
                "growth_exponent: sup over B_r^+ vanishes at r = " + std::to_string(r));
        rep.sups.push_back(s);
    }
    double mx = 0.0, my = 0.0;
    const double n = static_cast<double>(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
        mx += std::log(radii[i]);
        my += std::log(rep.sups[i]);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double dx = std::log(radii[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(rep.sups[i]) - my);
    }
    rep.slope = sxy / sxx;
    rep.intercept = my - rep.slope * mx;
    return rep;
}

NondegeneracyReport nondegeneracy_check(const ScalarField& field, const Point& x0,
                                        const std::vector<double>& radii, double a,
                                        const ApParams& params) {
    check_radii(radii, "nondegeneracy_check");
    if (!(a > 0.0)) throw ParameterError("nondegeneracy_check: a must be positive");
    NondegeneracyReport rep;
    rep.x0 = x0;
    rep.a = a;
    rep.radii = radii;
    const auto& g = *field.grid;
    const double h = g.spacing();
    const double floor = positivity_floor(field);
    for (long id = 0; id < g.num_nodes() && !rep.precondition_ok; ++id) {
        if (g.node_class(id) == NodeClass::Exterior) continue;
        if (field[id] <= floor) continue;
        const Point p = g.coord(id);
        double d2 = 0.0;
        for (int ax = 0; ax < g.dim(); ++ax) {
            const double d = p[static_cast<std::size_t>(ax)] - x0[static_cast<std::size_t>(ax)];
            d2 += d * d;
        }
        if (d2 <= 2.25 * h * h) rep.precondition_ok = true;
    }
    const double beta = params.beta();
    bool all = true;
    for (double r : radii) {
        const double s = sup_on_halfsphere(field, x0, r);
        rep.sphere_sups.push_back(s);
        const double margin = s - a * std::pow(r, beta);
        rep.margins.push_back(margin);
        if (margin < 0.0) all = false;
    }
    rep.holds = rep.precondition_ok && all;
    return rep;
}

BarrierReport barrier_supersolution_check(const OperatorSpec& spec, const ApParams& params,
                                          double a, const std::vector<Point>& sample_points,
                                          int dim) {
    if (!(a > 0.0)) throw ParameterError("barrier_supersolution_check: a must be positive");
    if (dim < 1 || dim > 3)
        throw ParameterError("barrier_supersolution_check: dim must be 1, 2, or 3");
    if (sample_points.empty())
        throw ContractError("barrier_supersolution_check: sample point list is empty");
    const double beta = params.beta();
    BarrierReport rep;
    rep.worst_margin = -std::numeric_limits<double>::infinity();
    for (const Point& p : sample_points) {
        double n2 = 0.0;
        for (int ax = 0; ax < dim; ++ax)
            n2 += p[static_cast<std::size_t>(ax)] * p[static_cast<std::size_t>(ax)];
        const double norm = std::sqrt(n2);
        double margin;
        if (norm == 0.0) {
            margin = spec.eval(SymMat::zero(dim));
        } else {
            const double s = a * beta * std::pow(norm, beta - 2.0);
            SymMat M = SymMat::zero(dim);
            for (int i = 0; i < dim; ++i) {
                for (int j = 0; j < dim; ++j) {
                    const double xi = p[static_cast<std::size_t>(i)] / norm;
                    const double xj = p[static_cast<std::size_t>(j)] / norm;
                    M.at(i, j) = s * ((i == j ? 1.0 : 0.0) + (beta - 2.0) * xi * xj);
                }
            }
            const double phi = a * std::pow(norm, beta);
            margin = spec.eval(M) - params.gamma * pow_gm1(phi, params.gamma);
        }
        if (margin > rep.worst_margin) {
            rep.worst_margin = margin;
            rep.worst_point = p;
        }
    }
    rep.is_supersolution = rep.worst_margin <= 0.0;
    return rep;
}

TransformWReport transform_w(const ScalarField& field, const ApParams& params) {
    const auto& g = *field.grid;
    const double gamma = params.gamma;
    TransformWReport rep{ScalarField(field.grid), 0.0, gamma * (2.0 - gamma),
                         (gamma - 1.0) / (2.0 - gamma), 0};
    const double expo = 2.0 - gamma; // 2/beta
    double max_w = 0.0;
    for (long id = 0; id < g.num_nodes(); ++id) {
        if (g.node_class(id) == NodeClass::Exterior) continue;
        const double u = std::max(field[id], 0.0);
        const double w = expo == 0.5 ? std::sqrt(u) : std::pow(u, expo);
        rep.w[id] = w;
        max_w = std::max(max_w, w);
    }
    const double cut = 0.05 * max_w;
    const double h = g.spacing();
    for (long id = 0; id < g.num_nodes(); ++id) {
        if (g.node_class(id) != NodeClass::Interior) continue;
        const double w = rep.w[id];
        if (!(w > cut) || max_w == 0.0) continue;
        double lap = 0.0, grad2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
            const double up = rep.w[g.neighbor(id, a, +1)];
            const double dn = rep.w[g.neighbor(id, a, -1)];
            lap += (up - 2.0 * w + dn);
            const double d = (up - dn) / (2.0 * h);
            grad2 += d * d;
        }
        lap /= h * h;
        ++rep.region_nodes;
        rep.residual_sup =
            std::max(rep.residual_sup, std::fabs(lap - rep.A + rep.B * grad2 / w));
    }
    return rep;
}

std::vector<DirectionReport> directional_monotonicity(const ScalarField& field,
                                                      const std::vector<Point>& directions,
                                                      const Point& x0, double region_r) {
    const auto& g = *field.grid;
    if (!(region_r > 0.0))
        throw ParameterError("directional_monotonicity: region radius must be positive");
    const double h = g.spacing();

    std::vector<long> region;
    double c2 = 1.0;
    for (long id = 0; id < g.num_nodes(); ++id) {
        if (g.node_class(id) != NodeClass::Interior) continue;
        const Point p = g.coord(id);
        double d2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
            const double d = p[static_cast<std::size_t>(a)] - x0[static_cast<std::size_t>(a)];
            d2 += d * d;
        }
        if (d2 > region_r * region_r) continue;
        region.push_back(id);
        const SymMat H = hessian_at_relaxed(field, id);
        for (int i = 0; i < g.dim(); ++i)
            for (int j = 0; j < g.dim(); ++j) c2 = std::max(c2, std::fabs(H.at(i, j)));
    }
    const double tol_slope = 10.0 * h * c2;

    std::vector<DirectionReport> out;
    for (const Point& e : directions) {
        double n2 = 0.0;
        for (int a = 0; a < g.dim(); ++a)
            n2 += e[static_cast<std::size_t>(a)] * e[static_cast<std::size_t>(a)];
        if (std::fabs(n2 - 1.0) > 1e-9)
            throw ParameterError("directional_monotonicity: directions must be unit vectors");
        if (e[static_cast<std::size_t>(g.dim() - 1)] < 0.0)
            throw ContractError(
                "directional_monotonicity: directions must have nonnegative x_n component");
        DirectionReport rep;
        rep.direction = e;
        rep.tol_slope = tol_slope;
        rep.min_derivative = std::numeric_limits<double>::infinity();
        for (long id : region) {
            const Point p = g.coord(id);
            Point fwd = p, bwd = p;
            for (int a = 0; a < g.dim(); ++a) {
                fwd[static_cast<std::size_t>(a)] += h * e[static_cast<std::size_t>(a)];
                bwd[static_cast<std::size_t>(a)] -= h * e[static_cast<std::size_t>(a)];
            }
            if (!g.covers(fwd) || !g.covers(bwd)) continue;
            if (bwd[static_cast<std::size_t>(g.dim() - 1)] < 0.0) continue;
            const double der = (interp(field, fwd) - interp(field, bwd)) / (2.0 * h);
            rep.min_derivative = std::min(rep.min_derivative, der);
        }
        if (!std::isfinite(rep.min_derivative)) rep.min_derivative = 0.0;
        rep.monotone = rep.min_derivative >= -tol_slope;
        out.push_back(rep);
    }
    return out;
}

BlowupReport blowup_distance(const ScalarField& field, const Point& x0,
                             const std::vector<double>& radii, const ApParams& params) {
    check_radii(radii, "blowup_distance");
    const auto& g = *field.grid;
    if (std::fabs(x0[static_cast<std::size_t>(g.dim() - 1)]) > 1e-12)
        throw ContractError("blowup_distance: base point must lie on the fixed boundary");
    if (interp(field, x0) > 1.01 * positivity_floor(field))
        throw ContractError("blowup_distance: base point must sit at the positivity floor");
    BlowupReport rep;
    rep.x0 = x0;
    rep.radii = radii;
    for (double r : radii) {
        const int m = target_cells(r, g.spacing());
        const GridPtr target = unit_halfball_grid(g.dim(), m);
        const ScalarField u_r = rescale_field(field, x0, r, params, target);
        double dist = 0.0;
        for (long id = 0; id < target->num_nodes(); ++id) {
            if (target->node_class(id) == NodeClass::Exterior) continue;
            const double yn = target->coord(id)[static_cast<std::size_t>(g.dim() - 1)];
            dist = std::max(dist, std::fabs(u_r[id] - profile_eval(params, yn)));
        }
        rep.distances.push_back(dist);
    }
    return rep;
}

double gradient_at_contact(const ScalarField& field, const Point& x0) {
    const auto& g = *field.grid;
    const long id = g.nearest_node(x0);
    if (id < 0 || g.node_class(id) != NodeClass::FlatBoundary)
        throw ContractError("gradient_at_contact: base point must be a flat-boundary node");
    {
        const Point p = g.coord(id);
        for (int a = 0; a < g.dim(); ++a)
            if (std::fabs(p[static_cast<std::size_t>(a)] - x0[static_cast<std::size_t>(a)]) >
                1e-9 * std::max(1.0, g.spacing()))
                throw ContractError("gradient_at_contact: base point must be a grid node");
    }
    const double h = g.spacing();
    const int n_axis = g.dim() - 1;
    double sum2 = 0.0;

    const auto value = [&](long nid) -> double { return field[nid]; };
    const auto live = [&](long nid) {
        return nid >= 0 && g.node_class(nid) != NodeClass::Exterior;
    };

    // Normal direction: one-sided second order, degrading to first order on
    // very small grids.
    {
        const long up1 = g.neighbor(id, n_axis, +1);
        const long up2 = up1 >= 0 ? g.neighbor(up1, n_axis, +1) : -1;
        double d = 0.0;
        if (live(up1) && live(up2))
            d = (-3.0 * value(id) + 4.0 * value(up1) - value(up2)) / (2.0 * h);
        else if (live(up1))
            d = (value(up1) - value(id)) / h;
        sum2 += d * d;
    }
    for (int a = 0; a < n_axis; ++a) {
        const long lo = g.neighbor(id, a, -1);
        const long hi = g.neighbor(id, a, +1);
        double d = 0.0;
        if (live(lo) && live(hi)) {
            d = (value(hi) - value(lo)) / (2.0 * h);
        } else if (live(hi)) {
            const long hi2 = g.neighbor(hi, a, +1);
            d = live(hi2) ? (-3.0 * value(id) + 4.0 * value(hi) - value(hi2)) / (2.0 * h)
                          : (value(hi) - value(id)) / h;
        } else if (live(lo)) {
            const long lo0 = g.neighbor(lo, a, -1);
            d = live(lo0) ? (3.0 * value(id) - 4.0 * value(lo) + value(lo0)) / (2.0 * h)
                          : (value(id) - value(lo)) / h;
        }
        sum2 += d * d;
    }
    return std::sqrt(sum2);
}

} // namespace aplab
