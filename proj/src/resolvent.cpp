#include "spinboson/resolvent.hpp"

#include <cmath>

namespace spinboson {

namespace {

constexpr double kResidualTol = 1e-10;
constexpr double kSplitThreshold = 0.9;
constexpr int kMaxPowerIterations = 10000;
constexpr double kPowerTol = 0.5e-8;

}  // namespace

ResolventSolver::ResolventSolver(const Matrix& h, Complex z)
    : h_(&h), z_(z), dim_(h.rows()) {
    if (h.rows() != h.cols()) throw DomainError("ResolventSolver: matrix must be square");
    norm_h_ = h.cwiseAbs().rowwise().sum().maxCoeff();

    // Frobenius norm of (D - z)^{-1} V decides whether the split form is
    // well conditioned; it upper-bounds the spectral norm.
    Vector diag = h.diagonal();
    double off_sq = 0.0;
    bool diag_ok = true;
    diag_resolvent_.resize(dim_);
    for (Eigen::Index i = 0; i < dim_; ++i) {
        Complex d = diag(i) - z;
        if (std::abs(d) == 0.0) {
            diag_ok = false;
            break;
        }
        diag_resolvent_(i) = 1.0 / d;
    }
    if (diag_ok) {
        for (Eigen::Index i = 0; i < dim_ && off_sq < 1e300; ++i) {
            double row = 0.0;
            for (Eigen::Index j = 0; j < dim_; ++j) {
                if (i == j) continue;
                row += std::norm(h(i, j));
            }
            off_sq += row * std::norm(diag_resolvent_(i));
        }
    }
    split_ = diag_ok && std::sqrt(off_sq) < kSplitThreshold;

    if (split_) {
        shifted_ = Matrix::Identity(dim_, dim_);
        for (Eigen::Index i = 0; i < dim_; ++i)
            for (Eigen::Index j = 0; j < dim_; ++j)
                if (i != j) shifted_(i, j) = diag_resolvent_(i) * h(i, j);
    } else {
        shifted_ = h;
        shifted_.diagonal().array() -= z;
    }
    lu_.compute(shifted_);
}

Vector ResolventSolver::solve_impl(const Vector& v, bool adjoint) const {
    Vector rhs = v;
    if (split_ && !adjoint) rhs = diag_resolvent_.cwiseProduct(rhs);
    Vector u = adjoint ? Vector(lu_.adjoint().solve(rhs)) : Vector(lu_.solve(rhs));
    if (split_ && adjoint) u = diag_resolvent_.conjugate().cwiseProduct(u);
    return u;
}

Vector ResolventSolver::apply(const Vector& v) const {
    Vector u = solve_impl(v, false);
    double vnorm = v.norm();
    if (vnorm == 0.0) return u;

    Matrix const& h = *h_;
    auto residual = [&](const Vector& x) { return Vector(h * x - z_ * x - v); };
    Vector r = residual(u);
    if (r.norm() <= kResidualTol * vnorm) return u;
    // One step of iterative refinement.
    u -= solve_impl(r, false);
    r = residual(u);
    if (r.norm() <= kResidualTol * vnorm)
        return u;
    throw NearEigenvalueError(
        z_, "apply_resolvent: shift is too close to the spectrum for a reliable solve");
}

Vector ResolventSolver::apply_adjoint(const Vector& v) const {
    Vector u = solve_impl(v, true);
    double vnorm = v.norm();
    if (vnorm == 0.0) return u;
    Matrix const& h = *h_;
    auto residual = [&](const Vector& x) {
        return Vector(h.adjoint() * x - std::conj(z_) * x - v);
    };
    Vector r = residual(u);
    if (r.norm() <= kResidualTol * vnorm) return u;
    u -= solve_impl(r, true);
    r = residual(u);
    if (r.norm() <= kResidualTol * vnorm) return u;
    throw NearEigenvalueError(
        z_, "apply_resolvent (adjoint): shift is too close to the spectrum");
}

Matrix ResolventSolver::dense() const {
    Matrix out(dim_, dim_);
    Vector e = Vector::Zero(dim_);
    for (Eigen::Index j = 0; j < dim_; ++j) {
        e(j) = 1.0;
        out.col(j) = apply(e);
        e(j) = 0.0;
    }
    return out;
}

double ResolventSolver::smallest_singular_estimate() const {
    DeterministicRng rng(0x5ca1ab1eull);
    Vector v(dim_);
    for (Eigen::Index i = 0; i < dim_; ++i) v(i) = rng.next_complex();
    v.normalize();
    double sigma = 0.0;
    for (int it = 0; it < 8; ++it) {
        Vector w = solve_impl(v, false);
        w = solve_impl(w, true);
        double n = w.norm();
        if (!(n > 0.0) || !std::isfinite(n)) return 0.0;
        sigma = 1.0 / std::sqrt(n);
        v = w / n;
    }
    return sigma;
}

Vector apply_resolvent(const Matrix& h, Complex z, const Vector& v) {
    return ResolventSolver(h, z).apply(v);
}

NormEstimate operator_norm(const LinearAction& apply, const LinearAction& apply_adjoint,
                           Eigen::Index dim) {
    if (dim == 0) return {0.0, 0.0, 0};
    DeterministicRng rng(0x9e3779b97f4a7c15ull);
    Vector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = rng.next_complex();
    double vn = v.norm();
    if (vn == 0.0) return {0.0, 0.0, 0};
    v /= vn;

    double sigma = 0.0;
    double prev = -1.0;
    int settled = 0;
    for (int it = 1; it <= kMaxPowerIterations; ++it) {
        Vector w = apply(v);
        double wn = w.norm();
        if (wn == 0.0) return {0.0, 0.0, it};
        Vector u = apply_adjoint(w);
        double un = u.norm();
        sigma = std::sqrt(un);
        if (un == 0.0) return {0.0, 0.0, it};
        v = u / un;
        double delta = std::abs(sigma - prev) / std::max(sigma, 1e-300);
        prev = sigma;
        if (delta <= kPowerTol) {
            if (++settled >= 2) return {sigma, delta, it};
        } else {
            settled = 0;
        }
    }
    throw NonConvergenceError("operator_norm: power iteration did not settle");
}

NormEstimate operator_norm(const Matrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return {0.0, 0.0, 0};
    return operator_norm([&](const Vector& v) { return Vector(m * v); },
                         [&](const Vector& v) { return Vector(m.adjoint() * v); }, m.cols());
}

double neumann_contraction(const Matrix& h0, const Matrix& w, double g, Complex z) {
    if (g == 0.0) return 0.0;
    Eigen::Index n = h0.rows();
    double off = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j) off += std::norm(h0(i, j));

    Matrix product(n, n);
    if (off == 0.0) {
        // Diagonal free part: the resolvent scales columns exactly.
        product = w;
        for (Eigen::Index j = 0; j < n; ++j) {
            Complex d = h0(j, j) - z;
            if (std::abs(d) == 0.0)
                throw NearEigenvalueError(z, "neumann_contraction: z on the free spectrum");
            product.col(j) /= d;
        }
    } else {
        ResolventSolver solver(h0, z);
        // W (H0 - z)^{-1} column by column: solve (H0 - z) x = e_j.
        Matrix r = solver.dense();
        product = w * r;
    }
    return g * operator_norm(product).value;
}

BoundAudit resolvent_bound_audit(const Matrix& h, Complex z, const Matrix& pbar, double c,
                                 double rho, Complex energy, double vartheta) {
    ResolventSolver solver(h, z);
    auto apply = [&](const Vector& v) { return solver.apply(Vector(pbar * v)); };
    auto apply_adjoint = [&](const Vector& v) {
        return Vector(pbar.adjoint() * solver.apply_adjoint(v));
    };
    BoundAudit out;
    out.measured = operator_norm(apply, apply_adjoint, h.rows()).value;
    out.bound = c / ((std::sin(vartheta) / 2.0) * rho + std::abs(z - energy));
    out.pass = out.measured <= out.bound;
    return out;
}

}  // namespace spinboson
