#include "spinboson/feshbach.hpp"

#include <cmath>

#include "spinboson/oracle.hpp"
#include "spinboson/resolvent.hpp"

namespace spinboson {

namespace {

Complex dilation_phase(const ModelParams& p, bool theta_on) {
    return theta_on ? std::exp(Complex(0.0, -p.vartheta)) : Complex(1.0, 0.0);
}

}  // namespace

Matrix feshbach_block(const SpinBosonOperator& h, Complex z) {
    const Eigen::Index nf = h.op.dim() / 2;
    Matrix a = h.op.m.block(0, 0, nf, nf);
    a.diagonal().array() -= z;
    Matrix b = h.op.m.block(0, nf, nf, nf);
    Matrix c = h.op.m.block(nf, 0, nf, nf);
    Matrix d = h.op.m.block(nf, nf, nf, nf);

    if (b.isZero(0.0) && c.isZero(0.0)) return a;

    Matrix x(nf, nf);
    try {
        ResolventSolver lower(d, z);
        for (Eigen::Index j = 0; j < nf; ++j) x.col(j) = lower.apply(Vector(c.col(j)));
    } catch (const NearEigenvalueError&) {
        throw NearEigenvalueError(
            z, "feshbach_block: lower sector singular at the evaluation point");
    }
    return a - b * x;
}

FeshbachTerms feshbach_terms(const ModelParams& p, const FockBasis& basis, Complex z,
                             const ShellFilter& filter, KernelVariant variant,
                             double g0_over_g) {
    const auto n = static_cast<Eigen::Index>(basis.size());
    const auto& modes = basis.modes().modes;
    Complex phase = dilation_phase(p, true);

    // Photon energy of every basis state over the filtered modes.
    std::vector<double> energy(basis.size(), 0.0);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const auto& occ = basis.state(i);
        double e = 0.0;
        for (std::size_t j = 0; j < modes.size(); ++j)
            if (filter.contains(modes[j].shell)) e += modes[j].omega * occ[j];
        energy[i] = e;
    }

    // Kernel denominators; the WithoutZ reading drops the shift for the
    // two-creator and two-annihilator parts only.
    auto kernel = [&](double hph, bool keep_z) -> Complex {
        Complex den = phase * hph - (keep_z ? z : Complex(0.0, 0.0));
        return 1.0 / den;
    };
    const bool offdiag_z = (variant == KernelVariant::WithZ);

    std::vector<std::size_t> active;
    std::vector<Complex> cr(modes.size()), an(modes.size());
    for (std::size_t j = 0; j < modes.size(); ++j) {
        if (!filter.contains(modes[j].shell) || modes[j].c == 0.0) continue;
        active.push_back(j);
        cr[j] = modes[j].c * dilation_ratio(modes[j].k, true, p);
        an[j] = modes[j].c * dilation_ratio_conj(modes[j].k, true, p);
    }

    FeshbachTerms out;
    out.z = z;
    out.variant = variant;
    out.w00 = Matrix::Zero(n, n);
    out.w20 = Matrix::Zero(n, n);
    out.w11 = Matrix::Zero(n, n);
    out.w02 = Matrix::Zero(n, n);

    for (std::size_t b = 0; b < basis.size(); ++b) {
        const auto bi = static_cast<Eigen::Index>(b);
        double eb = energy[b];

        for (std::size_t j : active) {
            double wj = modes[j].omega;
            // W00: single contraction, diagonal.
            out.w00(bi, bi) += cr[j] * an[j] * kernel(eb + wj, true);

            // W20 = sum a*_i a*_j kernel(H_ph + w_j).
            if (auto up_j = basis.raise(b, j)) {
                Complex base = cr[j] * kernel(eb + wj, offdiag_z) * up_j->amp;
                for (std::size_t i : active) {
                    if (auto up_i = basis.raise(up_j->target, i))
                        out.w20(static_cast<Eigen::Index>(up_i->target), bi) +=
                            cr[i] * base * up_i->amp;
                }
            }

            // W11 and W02 both start by annihilating mode j.
            if (auto dn_j = basis.lower(b, j)) {
                double e_mid = energy[dn_j->target];
                for (std::size_t i : active) {
                    double wi = modes[i].omega;
                    if (auto up_i = basis.raise(dn_j->target, i)) {
                        Complex ker = kernel(e_mid + wi + wj, true) + kernel(e_mid, true);
                        out.w11(static_cast<Eigen::Index>(up_i->target), bi) +=
                            cr[i] * an[j] * ker * dn_j->amp * up_i->amp;
                    }
                    if (auto dn_i = basis.lower(dn_j->target, i)) {
                        Complex ker = kernel(energy[dn_i->target] + wi, offdiag_z);
                        out.w02(static_cast<Eigen::Index>(dn_i->target), bi) +=
                            an[i] * an[j] * ker * dn_i->amp * dn_j->amp;
                    }
                }
            }
        }
    }

    out.f0 = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        out.f0(ii, ii) = 2.0 - z + phase * energy[i];
    }
    out.f0 -= (g0_over_g * g0_over_g) * out.w00;
    return out;
}

VariantResolution resolve_kernel_variant(const ModelParams& p, const FockBasis& basis,
                                         const SpinBosonOperator& h, Complex z,
                                         const ShellFilter& filter) {
    Matrix block = feshbach_block(h, z);
    double scale = block.cwiseAbs().maxCoeff();
    VariantResolution out;
    FeshbachTerms with_z = feshbach_terms(p, basis, z, filter, KernelVariant::WithZ);
    FeshbachTerms without_z = feshbach_terms(p, basis, z, filter, KernelVariant::WithoutZ);
    out.dev_with_z = (with_z.assembled() - block).cwiseAbs().maxCoeff() / scale;
    out.dev_without_z = (without_z.assembled() - block).cwiseAbs().maxCoeff() / scale;
    out.matched =
        out.dev_with_z <= out.dev_without_z ? KernelVariant::WithZ : KernelVariant::WithoutZ;
    return out;
}

Complex smallest_eigenvalue(const Matrix& m) {
    Eigen::PartialPivLU<Matrix> lu(m);
    DeterministicRng rng(0xfeedfaceull);
    Vector v(m.rows());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.next_complex();
    v.normalize();
    Complex lambda = 0.0;
    for (int it = 0; it < 50; ++it) {
        Vector w = lu.solve(v);
        double n = w.norm();
        if (!(n > 0.0) || !std::isfinite(n)) break;
        w /= n;
        Complex next = (w.adjoint() * (m * w))(0, 0);
        if (std::abs(next - lambda) <= 1e-14 * std::abs(next)) {
            lambda = next;
            break;
        }
        lambda = next;
        v = w;
    }
    return lambda;
}

IsospectralityReport isospectrality_check(const SpinBosonOperator& h,
                                          Complex seed, const std::vector<Complex>& samples,
                                          double root_tol, double identity_tol) {
    const Eigen::Index nf = h.op.dim() / 2;
    IsospectralityReport rep;

    // (a) Newton iteration on the smallest-magnitude eigenvalue of the
    // effective operator; its root is the eigenvalue of the full operator.
    Complex z = seed;
    double step_scale = std::max(1e-9, 1e-7 * std::abs(seed));
    for (int it = 0; it < 60; ++it) {
        Complex lam = smallest_eigenvalue(feshbach_block(h, z));
        Complex h_step(step_scale, 0.0);
        Complex lam_p = smallest_eigenvalue(feshbach_block(h, z + h_step));
        Complex lam_m = smallest_eigenvalue(feshbach_block(h, z - h_step));
        Complex deriv = (lam_p - lam_m) / (2.0 * h_step);
        if (std::abs(deriv) == 0.0) break;
        Complex dz = lam / deriv;
        z -= dz;
        if (std::abs(dz) < 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    rep.effective_root = z;

    Matrix at_root = feshbach_block(h, z);
    rep.sigma_min_at_root = std::abs(smallest_eigenvalue(at_root));

    std::vector<Complex> spec = dense_spectrum(h.op.m);
    Complex best = spec.front();
    for (Complex e : spec)
        if (std::abs(e - seed) < std::abs(best - seed)) best = e;
    rep.oracle_eigenvalue = best;
    rep.root_deviation = std::abs(best - z);

    // (b) H_eff(z)^{-1} = P (H - z)^{-1} P on the excited block.
    double worst = 0.0;
    for (Complex zs : samples) {
        Matrix eff = feshbach_block(h, zs);
        ResolventSolver eff_inv(eff, Complex(0.0, 0.0));
        ResolventSolver full(h.op.m, zs);
        Matrix lhs(nf, nf), rhs(nf, nf);
        Vector e = Vector::Zero(2 * nf);
        for (Eigen::Index j = 0; j < nf; ++j) {
            Vector col = Vector::Zero(nf);
            col(j) = 1.0;
            lhs.col(j) = eff_inv.apply(col);
            e.setZero();
            e(j) = 1.0;
            rhs.col(j) = full.apply(e).head(nf);
        }
        double scale = std::max(lhs.cwiseAbs().maxCoeff(), 1e-300);
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff() / scale);
    }
    rep.inverse_identity_dev = worst;
    rep.pass = rep.root_deviation <= root_tol && worst <= identity_tol;
    return rep;
}

void audit_standard_estimate(const ModelParams& p, const FockBasis& basis,
                             const ShellFilter& filter, double k_lo, double k_hi, double rho,
                             bool theta_on, int scale, AuditSink& sink) {
    OperatorMatrix phi = field_operator(basis, p, theta_on, filter);
    OperatorMatrix hph = photon_hamiltonian(basis, filter);
    Matrix product = phi.m;
    for (Eigen::Index j = 0; j < product.cols(); ++j)
        product.col(j) /= std::sqrt(hph.m(j, j).real() + rho);
    double measured = operator_norm(product).value;
    CouplingNorms norms = coupling_l2_norms(p, k_lo, k_hi, theta_on);
    double bound = 2.0 * (norms.over_sqrt_omega + norms.plain / std::sqrt(rho));
    std::string name = theta_on ? "standard_estimate_dilated" : "standard_estimate";
    sink.record(name + "_rho_" + std::to_string(rho), scale, measured, bound);
}

void audit_feshbach_cutoff(const ModelParams& p, const FockBasis& basis,
                           const ShellFilter& filter, double k_lo, double k_hi,
                           const std::vector<Complex>& zs, int scale, AuditSink& sink) {
    if (p.g == 0.0) return;
    OperatorMatrix phi = field_operator(basis, p, true, filter);
    OperatorMatrix hph = photon_hamiltonian(basis, filter);
    DerivedConstants consts = DerivedConstants::make(p);
    CouplingNorms norms = coupling_l2_norms(p, k_lo, k_hi, true);
    // The kernel norms carry no coupling factor; ours do.
    double bound = consts.c_fs * (norms.over_sqrt_omega + norms.plain);
    Complex phase = std::exp(Complex(0.0, -p.vartheta));

    double worst_right = 0.0, worst_left = 0.0;
    for (Complex z : zs) {
        Matrix right = phi.m;  // Phi (e^{-theta} H_ph - z)^{-1}
        Matrix left = phi.m;   // (e^{-theta} H_ph - z)^{-1} Phi
        for (Eigen::Index j = 0; j < right.cols(); ++j) {
            Complex den = phase * hph.m(j, j).real() - z;
            if (std::abs(den) == 0.0)
                throw NearEigenvalueError(z, "audit_feshbach_cutoff: singular kernel");
            right.col(j) /= den;
            left.row(j) /= den;
        }
        worst_right = std::max(worst_right, operator_norm(right).value);
        worst_left = std::max(worst_left, operator_norm(left).value);
    }
    sink.record("feshbach_cutoff_right", scale, worst_right, bound);
    sink.record("feshbach_cutoff_left", scale, worst_left, bound);
}

}  // namespace spinboson
