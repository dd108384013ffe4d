#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>

#include "aplab/linalg.hpp"
#include "aplab/params.hpp"

namespace aplab {

enum class OperatorKind : std::uint8_t {
    Laplacian,      // F(M) = trace(M)
    LinearTrace,    // F(M) = trace(A*M), A symmetric positive definite
    PerturbedTrace, // F(M) = trace(M) + theta*phi(M)
    Rescaled,       // F_r(M) = inner(s*M)/s with s = r^(beta-2)
};

/// Largest admissible perturbation strength for PerturbedTrace.
inline constexpr double kThetaMax = 0.2;

/// A uniformly elliptic, convex operator F acting on symmetric matrices,
/// normalized so that F(0) = 0 and DF(0) = trace.
///
/// PerturbedTrace uses phi(M) = |M|_F^2 / (1 + |M|_F), which is convex with
/// |D phi| < 1, so F stays within ellipticity bound 1/(1-2*theta).
class OperatorSpec {
public:
    static OperatorSpec laplacian();
    static OperatorSpec linear_trace(const SymMat& A);
    static OperatorSpec perturbed_trace(double theta);

    OperatorKind kind() const { return kind_; }
    /// Analytic ellipticity constant declared by the construction.
    double declared_lambda() const { return declared_lambda_; }
    /// Analytic bound on |DF(M) - DF(0)| as a function of |M|_F (monotone).
    double omega_bound(double t) const;

    /// F(M).  Dimension of M must not exceed 3.
    double eval(const SymMat& M) const;
    /// DF(M), the coefficient matrix of the linearization at M.
    SymMat gradient(const SymMat& M) const;

    std::string name() const;
    /// Flat parameter echo for reports (theta, scale, matrix entries, ...).
    std::map<std::string, double> describe() const;

    double theta() const { return theta_; }
    double scale() const { return scale_; }
    const SymMat& matrix() const { return A_; }
    const OperatorSpec& inner() const;

private:
    OperatorSpec() = default;

    OperatorKind kind_ = OperatorKind::Laplacian;
    SymMat A_{};        // LinearTrace coefficient
    double theta_ = 0.0; // PerturbedTrace strength
    double scale_ = 1.0; // Rescaled: s = r^(beta-2)
    double rescale_r_ = 1.0;
    std::shared_ptr<const OperatorSpec> inner_;
    double declared_lambda_ = 1.0;

    friend OperatorSpec rescaled_operator(const OperatorSpec&, double, const ApParams&);
};

/// Wraps spec into F_r(M) = r^(2-beta) * spec(r^(beta-2) * M).
/// The family F_r keeps the ellipticity constant of spec for every r > 0.
OperatorSpec rescaled_operator(const OperatorSpec& spec, double r, const ApParams& params);

/// Checked evaluation: requires M symmetric and finite.
double eval_operator(const OperatorSpec& spec, const SymMat& M);

/// Randomized structural audit of an operator.
///
/// measured_lambda is the tightest constant L with
///   (1/L)*|P| <= F(M+P) - F(M) <= L*|P|
/// over the sample set, where |P| = trace(P) for positive semidefinite P
/// (nuclear norm; makes the pure trace operator measure exactly 1).
struct EllipticityReport {
    double measured_lambda = 0.0;
    long convexity_violations = 0;
    /// max over samples of |d/dt F(t*M)|_{t=0} - trace(M)| / |M|_F,
    /// central differences with step 1e-4.
    double trace_gradient_error = 0.0;
    int n_samples = 0;
    unsigned seed = 0;
    int dim = 0;
};

EllipticityReport ellipticity_report(const OperatorSpec& spec, int n_samples,
                                     unsigned seed, int dim = 2);

} // namespace aplab
