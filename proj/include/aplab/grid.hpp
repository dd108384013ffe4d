#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "aplab/linalg.hpp"

namespace aplab {

enum class NodeClass : std::uint8_t {
    Interior,
    FlatBoundary,   // x_n = 0 exactly
    CurvedBoundary, // outer Dirichlet boundary (sphere, box faces, interval end)
    Exterior,       // lattice node outside the masked domain
};

enum class ShapeKind : std::uint8_t { Interval, HalfRectangle, HalfDisk };

/// Uniform Cartesian grid on a half-domain {x_n >= 0} in dimension 1..3.
/// Nodes sit at integer multiples of the spacing, so the origin is always a
/// lattice node.  Grids are immutable and shared between fields.
class HalfGrid {
public:
    /// 1D interval [0, length] with n_cells cells.  x = 0 is the flat
    /// boundary, x = length carries Dirichlet data.
    static std::shared_ptr<const HalfGrid> interval(int n_cells, double length = 1.0);

    /// [-halfwidth, halfwidth]^(dim-1) x [0, height].  n_cells_across counts
    /// cells across the tangential extent (must be even).
    static std::shared_ptr<const HalfGrid> half_rectangle(int dim, int n_cells_across,
                                                          double halfwidth, double height);

    /// Masked half-ball {|x| <= radius, x_n >= 0}.  n_cells_across counts
    /// cells across the diameter (must be even).  Curved-boundary values are
    /// imposed at the masked nodes nearest the sphere, which all lie within
    /// one spacing of |x| = radius.
    static std::shared_ptr<const HalfGrid> half_disk(int dim, int n_cells_across,
                                                     double radius);

    int dim() const { return dim_; }
    double spacing() const { return h_; }
    ShapeKind shape() const { return shape_; }
    double radius() const { return radius_; }     // HalfDisk only
    double length() const { return length_; }     // Interval only
    double halfwidth() const { return halfwidth_; }
    double height() const { return height_; }

    long num_nodes() const { return total_; }
    long num_interior() const { return n_interior_; }

    NodeClass node_class(long id) const { return cls_[static_cast<std::size_t>(id)]; }
    Point coord(long id) const;
    std::array<int, 3> index_of(long id) const;
    /// Flat id for a lattice index, or -1 when the index leaves the lattice.
    long id_of(const std::array<int, 3>& k) const;
    /// Axis neighbor (dir = +1/-1), or -1 when it leaves the lattice box.
    long neighbor(long id, int axis, int dir) const;

    /// Closed-domain membership test for arbitrary points (used by
    /// interpolation and coverage checks).
    bool covers(const Point& p) const;

    /// Lattice index range per axis.
    int lo(int axis) const { return lo_[static_cast<std::size_t>(axis)]; }
    int count(int axis) const { return cnt_[static_cast<std::size_t>(axis)]; }

    /// Snap a point to the nearest lattice node id; -1 if outside the lattice.
    long nearest_node(const Point& p) const;

private:
    HalfGrid() = default;
    void classify();

    int dim_ = 1;
    double h_ = 0.0;
    ShapeKind shape_ = ShapeKind::Interval;
    double radius_ = 0.0;
    double length_ = 0.0;
    double halfwidth_ = 0.0;
    double height_ = 0.0;
    std::array<int, 3> lo_{0, 0, 0};
    std::array<int, 3> cnt_{1, 1, 1};
    long total_ = 0;
    long n_interior_ = 0;
    std::vector<NodeClass> cls_;
};

using GridPtr = std::shared_ptr<const HalfGrid>;

/// Nodal scalar field.  Values at Exterior nodes are kept at zero and carry
/// no meaning; values at all other nodes must stay finite.
struct ScalarField {
    GridPtr grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(GridPtr g);

    double operator[](long id) const { return values[static_cast<std::size_t>(id)]; }
    double& operator[](long id) { return values[static_cast<std::size_t>(id)]; }

    double max_abs() const;
};

/// Fill a field by evaluating fn at every non-Exterior node.
ScalarField make_field(const GridPtr& grid, const std::function<double(const Point&)>& fn);

} // namespace aplab
