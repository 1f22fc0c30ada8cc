#pragma once

#include <functional>
#include <memory>

#include "spinboson/types.hpp"

namespace spinboson {

/// Factorized solver for (H - z) u = v. When the off-diagonal part is a
/// contraction against the diagonal resolvent, the shifted system
/// (I + (D - z)^{-1} V) u = (D - z)^{-1} v is factorized instead; the
/// near-singular diagonal then never enters the LU. Residuals are checked
/// and refined; a solve that cannot reach 1e-10 relative residual raises
/// NearEigenvalueError.
class ResolventSolver {
  public:
    ResolventSolver(const Matrix& h, Complex z);

    Complex shift() const { return z_; }
    Eigen::Index dim() const { return dim_; }

    Vector apply(const Vector& v) const;          // (H - z)^{-1} v
    Vector apply_adjoint(const Vector& v) const;  // (H - z)^{-*} v

    /// Full resolvent matrix (column-wise solves).
    Matrix dense() const;

    /// Cheap lower bound estimate of the smallest singular value of (H - z)
    /// via a few inverse-power steps on the factorization.
    double smallest_singular_estimate() const;

  private:
    Vector solve_impl(const Vector& v, bool adjoint) const;

    const Matrix* h_;
    Matrix shifted_;          // the matrix actually factorized
    Vector diag_resolvent_;   // (D - z)^{-1} when split mode is active
    bool split_ = false;
    Complex z_;
    Eigen::Index dim_;
    Eigen::PartialPivLU<Matrix> lu_;
    double norm_h_;
};

/// Solves (H - z) u = v with residual guarantee 1e-10 ||v||.
Vector apply_resolvent(const Matrix& h, Complex z, const Vector& v);

struct NormEstimate {
    double value = 0.0;
    double rel_err = 0.0;
    int iterations = 0;
};

/// Largest singular value by power iteration on M* M with a deterministic
/// start vector. Relative error at most 1e-8 on success; throws
/// NonConvergenceError after 10^4 iterations.
NormEstimate operator_norm(const Matrix& m);

/// Same, for an operator given by its action and adjoint action.
using LinearAction = std::function<Vector(const Vector&)>;
NormEstimate operator_norm(const LinearAction& apply, const LinearAction& apply_adjoint,
                           Eigen::Index dim);

/// kappa = g ||W (H0 - z)^{-1}|| with the product formed explicitly.
/// W carries no coupling factor; g scales the result linearly.
double neumann_contraction(const Matrix& h0, const Matrix& w, double g, Complex z);

struct BoundAudit {
    double measured = 0.0;
    double bound = 0.0;
    bool pass = false;
};

/// Checks ||(H - z)^{-1} Pbar|| <= C / ((sin(vartheta)/2) rho + |z - E|).
BoundAudit resolvent_bound_audit(const Matrix& h, Complex z, const Matrix& pbar, double c,
                                 double rho, Complex energy, double vartheta);

}  // namespace spinboson
