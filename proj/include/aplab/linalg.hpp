#pragma once

#include <array>
#include <cmath>
#include <string>

#include "aplab/errors.hpp"

namespace aplab {

/// Point in up to three dimensions; only the first `dim` entries are meaningful,
/// the rest stay zero.  The last active axis is always the normal direction x_n.
using Point = std::array<double, 3>;

inline Point make_point(double x0 = 0.0, double x1 = 0.0, double x2 = 0.0) {
    return Point{x0, x1, x2};
}

inline double dot(const Point& a, const Point& b, int dim) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Point& a, int dim) { return std::sqrt(dot(a, a, dim)); }

/// Dense symmetric matrix of order n <= 3, stored row-major.
struct SymMat {
    int n = 0;
    std::array<double, 9> a{};

    static SymMat zero(int n);
    static SymMat identity(int n);
    static SymMat diag(int n, const double* entries);

    double& at(int i, int j) { return a[static_cast<std::size_t>(i * n + j)]; }
    double at(int i, int j) const { return a[static_cast<std::size_t>(i * n + j)]; }

    double trace() const;
    double frob() const;

    /// Largest asymmetry |a_ij - a_ji|; exact zero for matrices built through at().
    double asymmetry() const;
    bool finite() const;
};

SymMat operator+(const SymMat& x, const SymMat& y);
SymMat operator-(const SymMat& x, const SymMat& y);
SymMat operator*(double s, const SymMat& x);

/// Eigenvalues of a symmetric matrix (ascending), via cyclic Jacobi rotations.
/// Only the first n entries of the result are meaningful.
std::array<double, 3> sym_eigenvalues(const SymMat& m);

/// Throws ContractError unless m is finite and symmetric to within tol.
void require_symmetric_finite(const SymMat& m, const std::string& who,
                              double tol = 1e-12);

} // namespace aplab
