#include "spinboson/hamiltonian.hpp"

#include <cmath>

namespace spinboson {

namespace {

constexpr double kAtomExcited = 2.0;
constexpr double kAtomGround = 0.0;

Complex dilation_phase(const ModelParams& p, bool theta_on) {
    return theta_on ? std::exp(Complex(0.0, -p.vartheta)) : Complex(1.0, 0.0);
}

}  // namespace

SpinBosonOperator assemble_hamiltonian(const ModelParams& p, const FockBasis& basis,
                                       const ShellFilter& filter, bool theta_on,
                                       OperatorKind kind, int scale) {
    const auto nf = static_cast<Eigen::Index>(basis.size());
    Matrix h = Matrix::Zero(2 * nf, 2 * nf);

    OperatorMatrix hph = photon_hamiltonian(basis, filter);
    Complex phase = dilation_phase(p, theta_on);
    for (Eigen::Index i = 0; i < nf; ++i) {
        Complex e = phase * hph.m(i, i);
        h(i, i) = kAtomExcited + e;
        h(nf + i, nf + i) = kAtomGround + e;
    }

    if (kind != OperatorKind::Free && p.g != 0.0) {
        OperatorMatrix phi = field_operator(basis, p, theta_on, filter);
        h.block(0, nf, nf, nf) = phi.m;
        h.block(nf, 0, nf, nf) = phi.m;
    }
    return {OperatorMatrix{std::move(h), basis.spin_tag()}, kind, scale, theta_on};
}

SpinBosonOperator build_hamiltonian(const ModelParams& p, const FockBasis& basis, int scale,
                                    bool bridged, bool theta_on) {
    int max_shell = -1;
    for (const auto& md : basis.modes().modes) max_shell = std::max(max_shell, md.shell);
    if (scale >= 0 && max_shell + 1 < scale)
        throw BasisCompatibilityError("build_hamiltonian: basis does not cover the requested scale");

    ShellFilter coupling = scale < 0 ? ShellFilter::all() : ShellFilter::up_to_scale(scale);
    SpinBosonOperator out = assemble_hamiltonian(
        p, basis, coupling, theta_on,
        scale < 0 ? OperatorKind::Full : (bridged ? OperatorKind::Bridged : OperatorKind::Regularized),
        scale);

    if (bridged) {
        if (scale < 0 || max_shell + 1 < scale + 1)
            throw BasisCompatibilityError("build_hamiltonian: bridged variant needs shell `scale`");
        OperatorMatrix hph_new = photon_hamiltonian(basis, ShellFilter::single_shell(scale));
        Complex phase = dilation_phase(p, theta_on);
        const auto nf = static_cast<Eigen::Index>(basis.size());
        for (Eigen::Index i = 0; i < nf; ++i) {
            Complex e = phase * hph_new.m(i, i);
            out.op.m(i, i) += e;
            out.op.m(nf + i, nf + i) += e;
        }
    }
    return out;
}

SpinBosonOperator free_hamiltonian(const ModelParams& p, const FockBasis& basis,
                                   const ShellFilter& filter, bool theta_on) {
    return assemble_hamiltonian(p, basis, filter, theta_on, OperatorKind::Free, -1);
}

OperatorMatrix interaction_operator(const ModelParams& p, const FockBasis& basis,
                                    const ShellFilter& filter, bool theta_on) {
    const auto nf = static_cast<Eigen::Index>(basis.size());
    Matrix w = Matrix::Zero(2 * nf, 2 * nf);
    OperatorMatrix phi = field_operator(basis, p, theta_on, filter);
    w.block(0, nf, nf, nf) = phi.m;
    w.block(nf, 0, nf, nf) = phi.m;
    return {std::move(w), basis.spin_tag()};
}

OperatorMatrix symmetry_operator(const FockBasis& basis) {
    const auto nf = static_cast<Eigen::Index>(basis.size());
    Matrix s = Matrix::Zero(2 * nf, 2 * nf);
    OperatorMatrix parity = photon_parity(basis);
    s.block(0, 0, nf, nf) = parity.m;
    s.block(nf, nf, nf, nf) = -parity.m;
    return {std::move(s), basis.spin_tag()};
}

OperatorMatrix sigma1_operator(const FockBasis& basis) {
    const auto nf = static_cast<Eigen::Index>(basis.size());
    Matrix s = Matrix::Zero(2 * nf, 2 * nf);
    s.block(0, nf, nf, nf) = Matrix::Identity(nf, nf);
    s.block(nf, 0, nf, nf) = Matrix::Identity(nf, nf);
    return {std::move(s), basis.spin_tag()};
}

OperatorMatrix spin_up_projection(const FockBasis& basis) {
    const auto nf = static_cast<Eigen::Index>(basis.size());
    Matrix pmat = Matrix::Zero(2 * nf, 2 * nf);
    pmat.block(0, 0, nf, nf) = Matrix::Identity(nf, nf);
    return {std::move(pmat), basis.spin_tag()};
}

Vector excited_vacuum(const FockBasis& basis) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(2 * basis.size()));
    v(0) = 1.0;
    return v;
}

}  // namespace spinboson
