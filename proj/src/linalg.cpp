#include "aplab/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace aplab {

SymMat SymMat::zero(int n) {
    SymMat m;
    m.n = n;
    return m;
}

SymMat SymMat::identity(int n) {
    SymMat m = zero(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

SymMat SymMat::diag(int n, const double* entries) {
    SymMat m = zero(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = entries[i];
    return m;
}

double SymMat::trace() const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += at(i, i);
    return s;
}

double SymMat::frob() const {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += at(i, j) * at(i, j);
    return std::sqrt(s);
}

double SymMat::asymmetry() const {
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            worst = std::max(worst, std::fabs(at(i, j) - at(j, i)));
    return worst;
}

bool SymMat::finite() const {
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!std::isfinite(at(i, j))) return false;
    return true;
}

SymMat operator+(const SymMat& x, const SymMat& y) {
    SymMat r = x;
    for (int i = 0; i < x.n * x.n; ++i) r.a[static_cast<std::size_t>(i)] += y.a[static_cast<std::size_t>(i)];
    return r;
}

SymMat operator-(const SymMat& x, const SymMat& y) {
    SymMat r = x;
    for (int i = 0; i < x.n * x.n; ++i) r.a[static_cast<std::size_t>(i)] -= y.a[static_cast<std::size_t>(i)];
    return r;
}

SymMat operator*(double s, const SymMat& x) {
    SymMat r = x;
    for (int i = 0; i < x.n * x.n; ++i) r.a[static_cast<std::size_t>(i)] *= s;
    return r;
}

std::array<double, 3> sym_eigenvalues(const SymMat& m) {
    // Cyclic Jacobi; for n <= 3 a handful of sweeps reaches machine precision.
    SymMat w = m;
    const int n = w.n;
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += w.at(p, q) * w.at(p, q);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = w.at(p, q);
                if (std::fabs(apq) < 1e-300) continue;
                const double tau = (w.at(q, q) - w.at(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double wkp = w.at(k, p), wkq = w.at(k, q);
                    w.at(k, p) = c * wkp - s * wkq;
                    w.at(k, q) = s * wkp + c * wkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double wpk = w.at(p, k), wqk = w.at(q, k);
                    w.at(p, k) = c * wpk - s * wqk;
                    w.at(q, k) = s * wpk + c * wqk;
                }
            }
        }
    }
    std::array<double, 3> ev{0.0, 0.0, 0.0};
    for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = w.at(i, i);
    std::sort(ev.begin(), ev.begin() + n);
    return ev;
}

void require_symmetric_finite(const SymMat& m, const std::string& who, double tol) {
    if (m.n < 1 || m.n > 3)
        throw ContractError(who + ": matrix order must be 1..3, got " + std::to_string(m.n));
    if (!m.finite()) throw ContractError(who + ": matrix has non-finite entries");
    if (m.asymmetry() > tol * (1.0 + m.frob()))
        throw ContractError(who + ": matrix is not symmetric");
}

} // namespace aplab
