#include "aplab/operators.hpp"

#include <cmath>
#include <random>
#include <string>

namespace aplab {

namespace {

// phi(M) = s^2/(1+s) with s = |M|_F.  Convex, phi(0) = 0, and
// phi'(s) = s*(s+2)/(1+s)^2 < 1, so |D phi(M)|_F < 1 everywhere.
double phi_of_norm(double s) { return s * s / (1.0 + s); }
double dphi_of_norm(double s) { return s * (s + 2.0) / ((1.0 + s) * (1.0 + s)); }

double eval_linear_trace(const SymMat& A, const SymMat& M) {
    double s = 0.0;
    for (int i = 0; i < M.n; ++i)
        for (int j = 0; j < M.n; ++j) s += A.at(i, j) * M.at(j, i);
    return s;
}

} // namespace

OperatorSpec OperatorSpec::laplacian() {
    OperatorSpec s;
    s.kind_ = OperatorKind::Laplacian;
    s.declared_lambda_ = 1.0;
    return s;
}

OperatorSpec OperatorSpec::linear_trace(const SymMat& A) {
    require_symmetric_finite(A, "linear_trace");
    const auto ev = sym_eigenvalues(A);
    const double lo = ev[0];
    const double hi = ev[static_cast<std::size_t>(A.n - 1)];
    if (!(lo > 0.0))
        throw ParameterError("linear_trace: coefficient matrix must be positive definite "
                             "(smallest eigenvalue " + std::to_string(lo) + ")");
    OperatorSpec s;
    s.kind_ = OperatorKind::LinearTrace;
    s.A_ = A;
    s.declared_lambda_ = std::max(hi, 1.0 / lo);
    return s;
}

OperatorSpec OperatorSpec::perturbed_trace(double theta) {
    if (!(theta >= 0.0) || theta > kThetaMax)
        throw ParameterError("perturbed_trace: theta must lie in [0, " +
                             std::to_string(kThetaMax) + "], got " + std::to_string(theta));
    OperatorSpec s;
    s.kind_ = OperatorKind::PerturbedTrace;
    s.theta_ = theta;
    s.declared_lambda_ = 1.0 / (1.0 - 2.0 * theta);
    return s;
}

OperatorSpec rescaled_operator(const OperatorSpec& spec, double r, const ApParams& params) {
    if (!(r > 0.0))
        throw ParameterError("rescaled_operator: scale must be positive, got " + std::to_string(r));
    OperatorSpec s;
    s.kind_ = OperatorKind::Rescaled;
    s.inner_ = std::make_shared<OperatorSpec>(spec);
    s.rescale_r_ = r;
    s.scale_ = std::pow(r, params.beta() - 2.0);
    s.declared_lambda_ = spec.declared_lambda(); // rescaling preserves (2.1)-type bounds
    return s;
}

const OperatorSpec& OperatorSpec::inner() const {
    if (!inner_) throw ContractError("OperatorSpec: no inner operator");
    return *inner_;
}

double OperatorSpec::eval(const SymMat& M) const {
    switch (kind_) {
        case OperatorKind::Laplacian:
            return M.trace();
        case OperatorKind::LinearTrace:
            return eval_linear_trace(A_, M);
        case OperatorKind::PerturbedTrace:
            return M.trace() + theta_ * phi_of_norm(M.frob());
        case OperatorKind::Rescaled:
            return inner_->eval(scale_ * M) / scale_;
    }
    throw ContractError("OperatorSpec: unknown kind");
}

SymMat OperatorSpec::gradient(const SymMat& M) const {
    switch (kind_) {
        case OperatorKind::Laplacian:
            return SymMat::identity(M.n);
        case OperatorKind::LinearTrace:
            return A_;
        case OperatorKind::PerturbedTrace: {
            const double s = M.frob();
            SymMat g = SymMat::identity(M.n);
            if (s > 0.0) g = g + (theta_ * dphi_of_norm(s) / s) * M;
            return g;
        }
        case OperatorKind::Rescaled:
            // d/dM [inner(s*M)/s] = DF_inner(s*M)
            return inner_->gradient(scale_ * M);
    }
    throw ContractError("OperatorSpec: unknown kind");
}

double OperatorSpec::omega_bound(double t) const {
    switch (kind_) {
        case OperatorKind::Laplacian:
        case OperatorKind::LinearTrace:
            return 0.0; // DF constant in M
        case OperatorKind::PerturbedTrace:
            return theta_ * dphi_of_norm(t);
        case OperatorKind::Rescaled:
            return inner_->omega_bound(scale_ * t);
    }
    throw ContractError("OperatorSpec: unknown kind");
}

std::string OperatorSpec::name() const {
    switch (kind_) {
        case OperatorKind::Laplacian: return "laplacian";
        case OperatorKind::LinearTrace: return "linear_trace";
        case OperatorKind::PerturbedTrace: return "perturbed_trace";
        case OperatorKind::Rescaled: return "rescaled(" + inner_->name() + ")";
    }
    return "unknown";
}

std::map<std::string, double> OperatorSpec::describe() const {
    std::map<std::string, double> d;
    d["declared_lambda"] = declared_lambda_;
    if (kind_ == OperatorKind::PerturbedTrace) d["theta"] = theta_;
    if (kind_ == OperatorKind::Rescaled) {
        d["rescale_r"] = rescale_r_;
        d["rescale_factor"] = scale_;
        for (const auto& [k, v] : inner_->describe()) d["inner." + k] = v;
    }
    if (kind_ == OperatorKind::LinearTrace) {
        for (int i = 0; i < A_.n; ++i)
            for (int j = i; j < A_.n; ++j)
                d["a" + std::to_string(i + 1) + std::to_string(j + 1)] = A_.at(i, j);
    }
    return d;
}

double eval_operator(const OperatorSpec& spec, const SymMat& M) {
    require_symmetric_finite(M, "eval_operator");
    return spec.eval(M);
}

EllipticityReport ellipticity_report(const OperatorSpec& spec, int n_samples,
                                     unsigned seed, int dim) {
    if (n_samples < 1) throw ParameterError("ellipticity_report: need at least one sample");
    if (dim < 1 || dim > 3) throw ParameterError("ellipticity_report: dim must be 1..3");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> mag(-1.0, 1.0);

    auto random_sym = [&](double scale) {
        SymMat m = SymMat::zero(dim);
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j) {
                const double v = scale * gauss(rng);
                m.at(i, j) = v;
                m.at(j, i) = v;
            }
        return m;
    };
    auto random_psd = [&](double scale) {
        // B^T B is positive semidefinite with trace = |B|_F^2 > 0 a.s.
        std::array<double, 9> b{};
        for (int i = 0; i < dim * dim; ++i) b[static_cast<std::size_t>(i)] = scale * gauss(rng);
        SymMat p = SymMat::zero(dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) {
                double s = 0.0;
                for (int k = 0; k < dim; ++k)
                    s += b[static_cast<std::size_t>(k * dim + i)] * b[static_cast<std::size_t>(k * dim + j)];
                p.at(i, j) = s;
            }
        return p;
    };

    EllipticityReport rep;
    rep.n_samples = n_samples;
    rep.seed = seed;
    rep.dim = dim;
    rep.measured_lambda = 1.0;

    const double fd_step = 1e-4;
    for (int s = 0; s < n_samples; ++s) {
        const double scale = std::pow(10.0, mag(rng));
        const SymMat M = random_sym(scale);
        const SymMat P = random_psd(scale);
        const double tp = P.trace();
        if (tp > 1e-10) {
            const double q = (spec.eval(M + P) - spec.eval(M)) / tp;
            if (q > 0.0)
                rep.measured_lambda = std::max(rep.measured_lambda, std::max(q, 1.0 / q));
            else
                rep.convexity_violations += 1; // degenerate ellipticity counts as structural failure
        }

        // Midpoint convexity against an independent draw.
        const SymMat N = random_sym(scale);
        const double lhs = spec.eval(0.5 * (M + N));
        const double rhs2 = 0.5 * (spec.eval(M) + spec.eval(N));
        const double slack = 1e-12 * (1.0 + std::fabs(lhs) + std::fabs(rhs2));
        if (lhs > rhs2 + slack) rep.convexity_violations += 1;

        // DF(0) = trace, probed with central differences through the origin.
        const double fm = M.frob();
        if (fm > 1e-12) {
            const double fd =
                (spec.eval(fd_step * M) - spec.eval(-fd_step * M)) / (2.0 * fd_step);
            rep.trace_gradient_error =
                std::max(rep.trace_gradient_error, std::fabs(fd - M.trace()) / fm);
        }
    }
    return rep;
}

} // namespace aplab
