#include "aplab/field_ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "aplab/errors.hpp"

namespace aplab {

namespace {

std::string point_str(const Point& p, int dim) {
    std::string s = "(";
    for (int a = 0; a < dim; ++a) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", p[static_cast<std::size_t>(a)]);
        s += buf;
        if (a + 1 < dim) s += ", ";
    }
    return s + ")";
}

double value_or_throw(const ScalarField& f, long id, long at, const char* who) {
    if (id < 0 || f.grid->node_class(id) == NodeClass::Exterior)
        throw StencilError(std::string(who) + ": stencil leaves the grid at node " +
                           std::to_string(at) + " " + point_str(f.grid->coord(at), f.grid->dim()));
    return f[id];
}

} // namespace

Point gradient_at(const ScalarField& f, long id) {
    const auto& g = *f.grid;
    if (g.node_class(id) != NodeClass::Interior)
        throw ContractError("gradient_at: node is not Interior");
    const double h = g.spacing();
    Point d{0.0, 0.0, 0.0};
    for (int a = 0; a < g.dim(); ++a) {
        const double up = value_or_throw(f, g.neighbor(id, a, +1), id, "gradient_at");
        const double dn = value_or_throw(f, g.neighbor(id, a, -1), id, "gradient_at");
        d[static_cast<std::size_t>(a)] = (up - dn) / (2.0 * h);
    }
    return d;
}

double laplacian_at(const ScalarField& f, long id) {
    const auto& g = *f.grid;
    if (g.node_class(id) != NodeClass::Interior)
        throw ContractError("laplacian_at: node is not Interior");
    const double h = g.spacing();
    double s = 0.0;
    const double uc = f[id];
    for (int a = 0; a < g.dim(); ++a) {
        const double up = value_or_throw(f, g.neighbor(id, a, +1), id, "laplacian_at");
        const double dn = value_or_throw(f, g.neighbor(id, a, -1), id, "laplacian_at");
        s += up - 2.0 * uc + dn;
    }
    return s / (h * h);
}

namespace {

long diag_neighbor(const HalfGrid& g, long id, int a, int da, int b, int db) {
    auto k = g.index_of(id);
    k[static_cast<std::size_t>(a)] += da;
    k[static_cast<std::size_t>(b)] += db;
    const long nid = g.id_of(k);
    if (nid < 0 || g.node_class(nid) == NodeClass::Exterior) return -1;
    return nid;
}

SymMat hessian_impl(const ScalarField& f, long id, bool strict) {
    const auto& g = *f.grid;
    if (g.node_class(id) != NodeClass::Interior)
        throw ContractError("hessian_at: node is not Interior");
    const double h = g.spacing();
    const double h2 = h * h;
    const double uc = f[id];
    SymMat H = SymMat::zero(g.dim());

    for (int a = 0; a < g.dim(); ++a) {
        const double up = value_or_throw(f, g.neighbor(id, a, +1), id, "hessian_at");
        const double dn = value_or_throw(f, g.neighbor(id, a, -1), id, "hessian_at");
        H.at(a, a) = (up - 2.0 * uc + dn) / h2;
    }
    for (int a = 0; a < g.dim(); ++a) {
        for (int b = a + 1; b < g.dim(); ++b) {
            const long pp = diag_neighbor(g, id, a, +1, b, +1);
            const long pm = diag_neighbor(g, id, a, +1, b, -1);
            const long mp = diag_neighbor(g, id, a, -1, b, +1);
            const long mm = diag_neighbor(g, id, a, -1, b, -1);
            double v;
            if (pp >= 0 && pm >= 0 && mp >= 0 && mm >= 0) {
                v = (f[pp] - f[pm] - f[mp] + f[mm]) / (4.0 * h2);
            } else if (strict) {
                throw StencilError("hessian_at: mixed-derivative stencil leaves the grid at node " +
                                   std::to_string(id) + " " + point_str(g.coord(id), g.dim()));
            } else {
                // One-sided quadrant fallback in the masked rim band.  Prefer the
                // quadrant pointing toward the origin, which stays inside the disk.
                const auto k = g.index_of(id);
                const int sa0 = k[static_cast<std::size_t>(a)] > 0 ? -1 : +1;
                const int sb0 = k[static_cast<std::size_t>(b)] > 0 ? -1 : +1;
                v = 0.0;
                bool done = false;
                const int sas[2] = {sa0, -sa0};
                const int sbs[2] = {sb0, -sb0};
                for (int ia = 0; ia < 2 && !done; ++ia) {
                    for (int ib = 0; ib < 2 && !done; ++ib) {
                        const int sa = sas[ia], sb = sbs[ib];
                        const long corner = diag_neighbor(g, id, a, sa, b, sb);
                        const long ea = g.neighbor(id, a, sa);
                        const long eb = g.neighbor(id, b, sb);
                        if (corner < 0 || ea < 0 || eb < 0) continue;
                        if (g.node_class(ea) == NodeClass::Exterior ||
                            g.node_class(eb) == NodeClass::Exterior)
                            continue;
                        v = (f[corner] - f[ea] - f[eb] + uc) * (sa * sb) / h2;
                        done = true;
                    }
                }
                // With every quadrant masked (cannot happen away from degenerate
                // geometries) the mixed term degrades to zero.
            }
            H.at(a, b) = v;
            H.at(b, a) = v;
        }
    }
    return H;
}

} // namespace

SymMat hessian_at(const ScalarField& f, long id) { return hessian_impl(f, id, true); }
SymMat hessian_at_relaxed(const ScalarField& f, long id) { return hessian_impl(f, id, false); }

double interp(const ScalarField& f, const Point& p) {
    const auto& g = *f.grid;
    const int dim = g.dim();
    const double h = g.spacing();
    if (!g.covers(p))
        throw DomainError("interp: point " + point_str(p, dim) + " is outside the domain");

    std::array<int, 3> base{0, 0, 0};
    std::array<double, 3> frac{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) {
        const double t = p[static_cast<std::size_t>(a)] / h - g.lo(a);
        int c = static_cast<int>(std::floor(t));
        c = std::clamp(c, 0, g.count(a) - 2);
        base[static_cast<std::size_t>(a)] = c + g.lo(a);
        frac[static_cast<std::size_t>(a)] = std::clamp(t - c, 0.0, 1.0);
    }

    const int corners = 1 << dim;
    std::array<double, 8> val{};
    std::array<bool, 8> ok{};
    int n_ok = 0;
    for (int c = 0; c < corners; ++c) {
        auto k = base;
        for (int a = 0; a < dim; ++a)
            if (c & (1 << a)) k[static_cast<std::size_t>(a)] += 1;
        const long id = g.id_of(k);
        ok[static_cast<std::size_t>(c)] = id >= 0 && g.node_class(id) != NodeClass::Exterior;
        if (ok[static_cast<std::size_t>(c)]) {
            val[static_cast<std::size_t>(c)] = f[id];
            ++n_ok;
        }
    }
    if (n_ok == 0)
        throw DomainError("interp: point " + point_str(p, dim) + " lies in a fully masked cell");
    if (n_ok < corners) {
        // Constant extension into masked corners of rim cells: copy the value of
        // the nearest live corner (ties by index order).
        for (int c = 0; c < corners; ++c) {
            if (ok[static_cast<std::size_t>(c)]) continue;
            int best = -1, bestd = 99;
            for (int o = 0; o < corners; ++o) {
                if (!ok[static_cast<std::size_t>(o)]) continue;
                int d = 0;
                for (int a = 0; a < dim; ++a)
                    if (((c ^ o) >> a) & 1) ++d;
                if (d < bestd) { bestd = d; best = o; }
            }
            val[static_cast<std::size_t>(c)] = val[static_cast<std::size_t>(best)];
        }
    }

    double acc = 0.0;
    for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        for (int a = 0; a < dim; ++a) {
            const double t = frac[static_cast<std::size_t>(a)];
            w *= (c & (1 << a)) ? t : (1.0 - t);
        }
        acc += w * val[static_cast<std::size_t>(c)];
    }
    return acc;
}

namespace {

// Deterministic unit directions covering the full sphere; callers filter by
// half-space and domain membership.  Sized so that about 64*dim samples
// survive when x0 sits on the flat boundary.
std::vector<Point> sphere_directions(int dim) {
    std::vector<Point> dirs;
    if (dim == 1) {
        dirs.push_back(make_point(1.0));
        dirs.push_back(make_point(-1.0));
    } else if (dim == 2) {
        const int K = 256;
        dirs.reserve(K);
        for (int k = 0; k < K; ++k) {
            const double th = 2.0 * M_PI * (k + 0.5) / K;
            dirs.push_back(make_point(std::cos(th), std::sin(th)));
        }
    } else {
        const int K = 384; // Fibonacci sphere
        dirs.reserve(K);
        const double ga = M_PI * (3.0 - std::sqrt(5.0));
        for (int k = 0; k < K; ++k) {
            const double z = 1.0 - 2.0 * (k + 0.5) / K;
            const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double th = ga * k;
            dirs.push_back(make_point(rho * std::cos(th), rho * std::sin(th), z));
        }
    }
    return dirs;
}

} // namespace

double sup_on_halfball(const ScalarField& f, const Point& x0, double r) {
    const auto& g = *f.grid;
    const int dim = g.dim();
    const double h = g.spacing();
    if (!(r > 0.0)) throw ParameterError("sup_on_halfball: radius must be positive");

    bool found = false;
    double best = 0.0;
    std::array<int, 3> klo{0, 0, 0}, khi{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
        klo[static_cast<std::size_t>(a)] = std::max(
            g.lo(a), static_cast<int>(std::floor((x0[static_cast<std::size_t>(a)] - r) / h)));
        khi[static_cast<std::size_t>(a)] = std::min(
            g.lo(a) + g.count(a) - 1,
            static_cast<int>(std::ceil((x0[static_cast<std::size_t>(a)] + r) / h)));
    }
    std::array<int, 3> k = klo;
    while (true) {
        const long id = g.id_of(k);
        if (id >= 0 && g.node_class(id) != NodeClass::Exterior) {
            const Point p = g.coord(id);
            double d2 = 0.0;
            for (int a = 0; a < dim; ++a) {
                const double dx = p[static_cast<std::size_t>(a)] - x0[static_cast<std::size_t>(a)];
                d2 += dx * dx;
            }
            if (d2 <= r * r * (1.0 + 1e-12) && p[static_cast<std::size_t>(dim - 1)] >= 0.0) {
                best = found ? std::max(best, f[id]) : f[id];
                found = true;
            }
        }
        int a = 0;
        for (; a < dim; ++a) {
            if (++k[static_cast<std::size_t>(a)] <= khi[static_cast<std::size_t>(a)]) break;
            k[static_cast<std::size_t>(a)] = klo[static_cast<std::size_t>(a)];
        }
        if (a == dim) break;
    }
    if (!found)
        throw DomainError("sup_on_halfball: B_r^+(x0) with r = " + std::to_string(r) +
                          " does not meet the grid");
    return best;
}

double sup_on_halfsphere(const ScalarField& f, const Point& x0, double r) {
    const auto& g = *f.grid;
    const int dim = g.dim();
    if (!(r > 0.0)) throw ParameterError("sup_on_halfsphere: radius must be positive");
    bool found = false;
    double best = 0.0;
    for (const Point& w : sphere_directions(dim)) {
        Point p = x0;
        for (int a = 0; a < dim; ++a) p[static_cast<std::size_t>(a)] += r * w[static_cast<std::size_t>(a)];
        if (p[static_cast<std::size_t>(dim - 1)] <= 0.0) continue;
        if (!g.covers(p)) continue;
        const double v = interp(f, p);
        best = found ? std::max(best, v) : v;
        found = true;
    }
    if (!found)
        throw DomainError("sup_on_halfsphere: dB_r(x0) & {x_n>0} with r = " + std::to_string(r) +
                          " does not meet the grid");
    return best;
}

double positivity_floor(const ScalarField& f) { return 1e-10 * std::max(1.0, f.max_abs()); }

ScalarField rescale_field(const ScalarField& f, const Point& x0, double r,
                          const ApParams& params, const GridPtr& target) {
    if (!(r > 0.0)) throw ParameterError("rescale_field: r must be positive");
    const double scale = std::pow(r, params.beta());
    ScalarField out(target);
    for (long id = 0; id < target->num_nodes(); ++id) {
        if (target->node_class(id) == NodeClass::Exterior) continue;
        const Point y = target->coord(id);
        Point p = x0;
        for (int a = 0; a < target->dim(); ++a)
            p[static_cast<std::size_t>(a)] += r * y[static_cast<std::size_t>(a)];
        if (!f.grid->covers(p))
            throw DomainError("rescale_field: target node " + point_str(y, target->dim()) +
                              " maps to " + point_str(p, f.grid->dim()) +
                              " outside the source domain");
        out[id] = interp(f, p) / scale;
    }
    return out;
}

void write_field_csv(const ScalarField& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("write_field_csv: cannot open " + path);
    const auto& g = *f.grid;
    const int dim = g.dim();
    for (int a = 0; a < dim; ++a) os << "x" << (a + 1) << ",";
    os << "u\n";
    char buf[64];
    for (long id = 0; id < g.num_nodes(); ++id) {
        if (g.node_class(id) == NodeClass::Exterior) continue;
        const Point p = g.coord(id);
        for (int a = 0; a < dim; ++a) {
            std::snprintf(buf, sizeof buf, "%.17g", p[static_cast<std::size_t>(a)]);
            os << buf << ",";
        }
        std::snprintf(buf, sizeof buf, "%.17g", f[id]);
        os << buf << "\n";
    }
    if (!os) throw IoError("write_field_csv: short write to " + path);
}

ScalarField read_field_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("read_field_csv: cannot open " + path);
    std::string header;
    if (!std::getline(is, header)) throw IoError("read_field_csv: empty file " + path);
    int dim = 0;
    {
        std::stringstream ss(header);
        std::string col;
        std::vector<std::string> cols;
        while (std::getline(ss, col, ',')) cols.push_back(col);
        if (cols.empty() || cols.back() != "u")
            throw IoError("read_field_csv: malformed header in " + path);
        dim = static_cast<int>(cols.size()) - 1;
        if (dim < 1 || dim > 3) throw IoError("read_field_csv: unsupported dimension in " + path);
    }

    std::vector<std::array<double, 3>> pts;
    std::vector<double> vals;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::array<double, 3> p{0.0, 0.0, 0.0};
        std::string tok;
        for (int a = 0; a < dim; ++a) {
            if (!std::getline(ss, tok, ',')) throw IoError("read_field_csv: short row in " + path);
            p[static_cast<std::size_t>(a)] = std::stod(tok);
        }
        if (!std::getline(ss, tok, ',')) throw IoError("read_field_csv: short row in " + path);
        pts.push_back(p);
        vals.push_back(std::stod(tok));
    }
    if (pts.empty()) throw IoError("read_field_csv: no rows in " + path);

    // Spacing: smallest positive gap between sorted distinct coordinates.
    double h = 0.0;
    {
        std::set<double> xs;
        for (const auto& p : pts) xs.insert(p[0]);
        double prev = 0.0;
        bool first = true;
        for (double x : xs) {
            if (!first) {
                const double d = x - prev;
                if (d > 1e-12 && (h == 0.0 || d < h)) h = d;
            }
            prev = x;
            first = false;
        }
        if (h == 0.0) throw IoError("read_field_csv: cannot infer spacing from " + path);
    }

    double max_norm = 0.0, max_abs_t = 0.0, max_n = 0.0;
    for (const auto& p : pts) {
        double s = 0.0;
        for (int a = 0; a < dim; ++a) s += p[static_cast<std::size_t>(a)] * p[static_cast<std::size_t>(a)];
        max_norm = std::max(max_norm, std::sqrt(s));
        for (int a = 0; a < dim - 1; ++a)
            max_abs_t = std::max(max_abs_t, std::fabs(p[static_cast<std::size_t>(a)]));
        max_n = std::max(max_n, p[static_cast<std::size_t>(dim - 1)]);
    }

    GridPtr grid;
    if (dim == 1) {
        grid = HalfGrid::interval(static_cast<int>(std::lround(max_n / h)), max_n);
    } else {
        // Full-box lattices are rectangles; anything masked came from a disk.
        const long n_box = [&] {
            const long nn = 2 * static_cast<long>(std::lround(max_abs_t / h)) + 1;
            long total = 1;
            for (int a = 0; a < dim - 1; ++a) total *= nn;
            total *= static_cast<long>(std::lround(max_n / h)) + 1;
            return total;
        }();
        if (static_cast<long>(pts.size()) == n_box) {
            grid = HalfGrid::half_rectangle(dim, 2 * static_cast<int>(std::lround(max_abs_t / h)),
                                            max_abs_t, max_n);
        } else {
            grid = HalfGrid::half_disk(dim, 2 * static_cast<int>(std::lround(max_norm / h)),
                                       max_norm);
        }
    }

    ScalarField f(grid);
    std::vector<bool> seen(static_cast<std::size_t>(grid->num_nodes()), false);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        Point p{pts[i][0], pts[i][1], pts[i][2]};
        const long id = grid->nearest_node(p);
        if (id < 0 || grid->node_class(id) == NodeClass::Exterior)
            throw IoError("read_field_csv: row " + std::to_string(i + 1) +
                          " does not match the reconstructed grid");
        f[id] = vals[i];
        seen[static_cast<std::size_t>(id)] = true;
    }
    for (long id = 0; id < grid->num_nodes(); ++id)
        if (grid->node_class(id) != NodeClass::Exterior && !seen[static_cast<std::size_t>(id)])
            throw IoError("read_field_csv: reconstructed grid has unmatched nodes");
    return f;
}

} // namespace aplab
