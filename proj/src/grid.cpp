#include "aplab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aplab/errors.hpp"

namespace aplab {

namespace {

constexpr double kGeomTol = 1e-12;

void check_resolution(int n_cells, const char* who) {
    if (n_cells < 2)
        throw ParameterError(std::string(who) + ": need at least 2 cells, got " +
                             std::to_string(n_cells));
}

void check_dim(int dim, const char* who) {
    if (dim < 2 || dim > 3)
        throw ParameterError(std::string(who) + ": dim must be 2 or 3, got " +
                             std::to_string(dim));
}

} // namespace

std::shared_ptr<const HalfGrid> HalfGrid::interval(int n_cells, double length) {
    check_resolution(n_cells, "HalfGrid::interval");
    if (!(length > 0.0)) throw ParameterError("HalfGrid::interval: length must be positive");
    auto g = std::shared_ptr<HalfGrid>(new HalfGrid());
    g->dim_ = 1;
    g->shape_ = ShapeKind::Interval;
    g->length_ = length;
    g->h_ = length / n_cells;
    g->lo_ = {0, 0, 0};
    g->cnt_ = {n_cells + 1, 1, 1};
    g->classify();
    return g;
}

std::shared_ptr<const HalfGrid> HalfGrid::half_rectangle(int dim, int n_cells_across,
                                                         double halfwidth, double height) {
    check_dim(dim, "HalfGrid::half_rectangle");
    check_resolution(n_cells_across, "HalfGrid::half_rectangle");
    if (n_cells_across % 2 != 0)
        throw ParameterError("HalfGrid::half_rectangle: n_cells_across must be even");
    if (!(halfwidth > 0.0) || !(height > 0.0))
        throw ParameterError("HalfGrid::half_rectangle: extents must be positive");
    auto g = std::shared_ptr<HalfGrid>(new HalfGrid());
    g->dim_ = dim;
    g->shape_ = ShapeKind::HalfRectangle;
    g->halfwidth_ = halfwidth;
    g->h_ = 2.0 * halfwidth / n_cells_across;
    const int m = n_cells_across / 2;
    int nv = static_cast<int>(std::lround(height / g->h_));
    nv = std::max(nv, 2);
    g->height_ = nv * g->h_; // snapped so the top face is a lattice row
    for (int a = 0; a < dim - 1; ++a) {
        g->lo_[static_cast<std::size_t>(a)] = -m;
        g->cnt_[static_cast<std::size_t>(a)] = 2 * m + 1;
    }
    g->lo_[static_cast<std::size_t>(dim - 1)] = 0;
    g->cnt_[static_cast<std::size_t>(dim - 1)] = nv + 1;
    g->classify();
    return g;
}

std::shared_ptr<const HalfGrid> HalfGrid::half_disk(int dim, int n_cells_across, double radius) {
    check_dim(dim, "HalfGrid::half_disk");
    check_resolution(n_cells_across, "HalfGrid::half_disk");
    if (n_cells_across % 2 != 0)
        throw ParameterError("HalfGrid::half_disk: n_cells_across must be even");
    if (!(radius > 0.0)) throw ParameterError("HalfGrid::half_disk: radius must be positive");
    auto g = std::shared_ptr<HalfGrid>(new HalfGrid());
    g->dim_ = dim;
    g->shape_ = ShapeKind::HalfDisk;
    g->radius_ = radius;
    g->h_ = 2.0 * radius / n_cells_across;
    const int m = n_cells_across / 2;
    for (int a = 0; a < dim - 1; ++a) {
        g->lo_[static_cast<std::size_t>(a)] = -m;
        g->cnt_[static_cast<std::size_t>(a)] = 2 * m + 1;
    }
    g->lo_[static_cast<std::size_t>(dim - 1)] = 0;
    g->cnt_[static_cast<std::size_t>(dim - 1)] = m + 1;
    g->classify();
    return g;
}

void HalfGrid::classify() {
    total_ = 1;
    for (int a = 0; a < dim_; ++a) total_ *= cnt_[static_cast<std::size_t>(a)];
    cls_.assign(static_cast<std::size_t>(total_), NodeClass::Exterior);

    const double rtol = radius_ * (1.0 + kGeomTol);
    auto inside = [&](const std::array<int, 3>& k) {
        if (shape_ != ShapeKind::HalfDisk) return true; // box shapes fill the lattice
        double s = 0.0;
        for (int a = 0; a < dim_; ++a) {
            const double x = k[static_cast<std::size_t>(a)] * h_;
            s += x * x;
        }
        return std::sqrt(s) <= rtol;
    };

    n_interior_ = 0;
    for (long id = 0; id < total_; ++id) {
        const auto k = index_of(id);
        if (!inside(k)) continue;
        const int kn = k[static_cast<std::size_t>(dim_ - 1)];
        if (kn == 0) {
            cls_[static_cast<std::size_t>(id)] = NodeClass::FlatBoundary;
            continue;
        }
        bool on_hull = false;
        bool axis_neighbor_outside = false;
        for (int a = 0; a < dim_ && !on_hull && !axis_neighbor_outside; ++a) {
            for (int dir = -1; dir <= 1; dir += 2) {
                auto kk = k;
                kk[static_cast<std::size_t>(a)] += dir;
                if (kk[static_cast<std::size_t>(a)] < lo_[static_cast<std::size_t>(a)] ||
                    kk[static_cast<std::size_t>(a)] >=
                        lo_[static_cast<std::size_t>(a)] + cnt_[static_cast<std::size_t>(a)]) {
                    if (!(a == dim_ - 1 && dir == -1)) on_hull = true; // below flat handled above
                    continue;
                }
                if (!inside(kk)) axis_neighbor_outside = true;
            }
        }
        if (on_hull || axis_neighbor_outside)
            cls_[static_cast<std::size_t>(id)] = NodeClass::CurvedBoundary;
        else {
            cls_[static_cast<std::size_t>(id)] = NodeClass::Interior;
            ++n_interior_;
        }
    }
}

Point HalfGrid::coord(long id) const {
    const auto k = index_of(id);
    Point p{0.0, 0.0, 0.0};
    for (int a = 0; a < dim_; ++a) p[static_cast<std::size_t>(a)] = k[static_cast<std::size_t>(a)] * h_;
    return p;
}

std::array<int, 3> HalfGrid::index_of(long id) const {
    std::array<int, 3> k{0, 0, 0};
    long rest = id;
    for (int a = dim_ - 1; a >= 0; --a) {
        const long c = cnt_[static_cast<std::size_t>(a)];
        k[static_cast<std::size_t>(a)] = static_cast<int>(rest % c) + lo_[static_cast<std::size_t>(a)];
        rest /= c;
    }
    return k;
}

long HalfGrid::id_of(const std::array<int, 3>& k) const {
    long id = 0;
    for (int a = 0; a < dim_; ++a) {
        const int off = k[static_cast<std::size_t>(a)] - lo_[static_cast<std::size_t>(a)];
        if (off < 0 || off >= cnt_[static_cast<std::size_t>(a)]) return -1;
        id = id * cnt_[static_cast<std::size_t>(a)] + off;
    }
    return id;
}

long HalfGrid::neighbor(long id, int axis, int dir) const {
    auto k = index_of(id);
    k[static_cast<std::size_t>(axis)] += dir;
    return id_of(k);
}

bool HalfGrid::covers(const Point& p) const {
    for (int a = 0; a < dim_; ++a) {
        const double x = p[static_cast<std::size_t>(a)];
        const double xmin = lo_[static_cast<std::size_t>(a)] * h_;
        const double xmax = (lo_[static_cast<std::size_t>(a)] + cnt_[static_cast<std::size_t>(a)] - 1) * h_;
        if (x < xmin - kGeomTol || x > xmax + kGeomTol) return false;
    }
    if (shape_ == ShapeKind::HalfDisk) {
        if (norm(p, dim_) > radius_ * (1.0 + 1e-9)) return false;
    }
    return true;
}

long HalfGrid::nearest_node(const Point& p) const {
    std::array<int, 3> k{0, 0, 0};
    for (int a = 0; a < dim_; ++a)
        k[static_cast<std::size_t>(a)] =
            static_cast<int>(std::lround(p[static_cast<std::size_t>(a)] / h_));
    return id_of(k);
}

ScalarField::ScalarField(GridPtr g)
    : grid(std::move(g)), values(static_cast<std::size_t>(grid->num_nodes()), 0.0) {}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (long id = 0; id < grid->num_nodes(); ++id) {
        if (grid->node_class(id) == NodeClass::Exterior) continue;
        m = std::max(m, std::fabs(values[static_cast<std::size_t>(id)]));
    }
    return m;
}

ScalarField make_field(const GridPtr& grid, const std::function<double(const Point&)>& fn) {
    ScalarField f(grid);
    for (long id = 0; id < grid->num_nodes(); ++id) {
        if (grid->node_class(id) == NodeClass::Exterior) continue;
        f[id] = fn(grid->coord(id));
    }
    return f;
}

} // namespace aplab
