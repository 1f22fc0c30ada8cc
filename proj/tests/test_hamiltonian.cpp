#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "spinboson/hamiltonian.hpp"
#include "spinboson/oracle.hpp"
#include "spinboson/resolvent.hpp"

using namespace spinboson;

namespace {

ModelParams tiny_params() {
    ModelParams p;
    p.g = 5e-2;
    p.vartheta = 0.45;
    p.rho0 = 0.3;
    p.gamma = 0.25;
    p.modes_outer = 3;
    p.modes_per_shell = 1;
    p.occupancy_cap = 2;
    p.total_cap = 2;
    return p;
}

}  // namespace

TEST_CASE("free hamiltonian is diagonal and normal") {
    ModelParams p = tiny_params();
    ShellGrid grid = ShellGrid::build(p.rho0, p.gamma, 1);
    FockBasis basis = basis_for_scale(p, grid, 1);
    SpinBosonOperator h0 = free_hamiltonian(p, basis, ShellFilter::up_to_scale(1), true);
    Matrix comm = h0.op.m * h0.op.m.adjoint() - h0.op.m.adjoint() * h0.op.m;
    double h_norm = operator_norm(h0.op.m).value;
    CHECK(comm.cwiseAbs().maxCoeff() <= 1e-12 * h_norm * h_norm);

    // Its spectrum sits on {2, 0} + e^{-i vartheta} (photon diagonal).
    OperatorMatrix hph = photon_hamiltonian(basis, ShellFilter::up_to_scale(1));
    Complex phase = std::exp(Complex(0.0, -p.vartheta));
    for (Eigen::Index i = 0; i < hph.m.rows(); ++i) {
        CHECK(h0.op.m(i, i) == Complex(2.0, 0.0) + phase * hph.m(i, i));
        Eigen::Index j = hph.m.rows() + i;
        CHECK(h0.op.m(j, j) == phase * hph.m(i, i));
    }
}

TEST_CASE("decoupled system has the exact product spectrum") {
    ModelParams p = tiny_params();
    p.g = 0.0;
    ShellGrid grid = ShellGrid::build(p.rho0, p.gamma, 0);
    FockBasis basis = basis_for_scale(p, grid, 0);
    SpinBosonOperator h = build_hamiltonian(p, basis, 0, false, false);

    double min_eig = 1e300;
    bool has_two = false;
    for (Eigen::Index i = 0; i < h.op.m.rows(); ++i) {
        double e = h.op.m(i, i).real();
        min_eig = std::min(min_eig, e);
        if (e == 2.0) has_two = true;
    }
    CHECK(min_eig == 0.0);
    CHECK(has_two);
    CHECK(h.op.m(0, 0) == Complex(2.0, 0.0));  // (1,0) (x) vacuum sits at index 0
}

TEST_CASE("undilated interacting hamiltonian is hermitian") {
    ModelParams p = tiny_params();
    ShellGrid grid = ShellGrid::build(p.rho0, p.gamma, 1);
    FockBasis basis = basis_for_scale(p, grid, 1);
    SpinBosonOperator h = build_hamiltonian(p, basis, 1, false, false);
    CHECK((h.op.m - h.op.m.adjoint()).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("dilated resonance acquires a negative imaginary part") {
    ModelParams p = tiny_params();
    ShellGrid grid = ShellGrid::build(p.rho0, p.gamma, 0);
    FockBasis basis = basis_for_scale(p, grid, 0);
    SpinBosonOperator h = build_hamiltonian(p, basis, 0, false);
    REQUIRE(h.op.dim() <= 200);
    std::vector<Complex> spec = dense_spectrum(h.op.m);
    Complex nearest = spec.front();
    for (Complex e : spec)
        if (std::abs(e - Complex(2.0, 0.0)) < std::abs(nearest - Complex(2.0, 0.0)))
            nearest = e;
    CHECK(nearest.imag() < 0.0);
    CHECK(std::abs(nearest - Complex(2.0, 0.0)) < 0.1);
}

TEST_CASE("bridged operator equals the embedded one plus the new shell energy") {
    ModelParams p = tiny_params();
    ShellGrid grid = ShellGrid::build(p.rho0, p.gamma, 1);
    FockBasis fine = basis_for_scale(p, grid, 1);
    FockBasis coarse = basis_for_scale(p, grid, 0);

    SpinBosonOperator bridged = build_hamiltonian(p, fine, 0, true);
    SpinBosonOperator coarse_h = build_hamiltonian(p, coarse, 0, false);
    OperatorMatrix lifted = embed_operator_spin(coarse_h.op, coarse, fine, EmbedKind::Identity);
    OperatorMatrix shell = photon_hamiltonian(fine, ShellFilter::single_shell(0));
    Complex phase = std::exp(Complex(0.0, -p.vartheta));
    Matrix expected = lifted.m;
    Eigen::Index nf = shell.m.rows();
    for (Eigen::Index i = 0; i < nf; ++i) {
        expected(i, i) += phase * shell.m(i, i);
        expected(nf + i, nf + i) += phase * shell.m(i, i);
    }
    CHECK((bridged.op.m - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("cutoff operator differs from the bridged one by the shell coupling") {
    ModelParams p = tiny_params();
    ShellGrid grid = ShellGrid::build(p.rho0, p.gamma, 1);
    FockBasis fine = basis_for_scale(p, grid, 1);
    SpinBosonOperator full = build_hamiltonian(p, fine, 1, false);
    SpinBosonOperator bridged = build_hamiltonian(p, fine, 0, true);
    OperatorMatrix shell_w = field_operator(fine, p, true, ShellFilter::single_shell(0));
    Matrix diff = full.op.m - bridged.op.m;
    Eigen::Index nf = shell_w.m.rows();
    CHECK((diff.block(0, nf, nf, nf) - shell_w.m).cwiseAbs().maxCoeff() == 0.0);
    CHECK((diff.block(0, 0, nf, nf)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("scale mismatch raises a basis error") {
    ModelParams p = tiny_params();
    ShellGrid grid = ShellGrid::build(p.rho0, p.gamma, 2);
    FockBasis coarse = basis_for_scale(p, grid, 0);
    CHECK_THROWS_AS(build_hamiltonian(p, coarse, 2, false), BasisCompatibilityError);
}

TEST_CASE("symmetry operator squares to one and commutes exactly") {
    ModelParams p = tiny_params();
    ShellGrid grid = ShellGrid::build(p.rho0, p.gamma, 1);
    FockBasis basis = basis_for_scale(p, grid, 1);
    OperatorMatrix s = symmetry_operator(basis);
    Matrix s2 = s.m * s.m;
    CHECK((s2 - Matrix::Identity(s2.rows(), s2.cols())).cwiseAbs().maxCoeff() == 0.0);

    Vector ev = excited_vacuum(basis);
    CHECK((s.m * ev - ev).norm() == 0.0);

    SpinBosonOperator h = build_hamiltonian(p, basis, 1, false);
    SpinBosonOperator h0 = free_hamiltonian(p, basis, ShellFilter::up_to_scale(1), true);
    CHECK((s.m * h.op.m - h.op.m * s.m).cwiseAbs().maxCoeff() == 0.0);
    CHECK((s.m * h0.op.m - h0.op.m * s.m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("interaction is relatively bounded at admissible coupling") {
    ModelParams p = tiny_params();
    p.g = 1e-3;
    ShellGrid grid = ShellGrid::build(p.rho0, p.gamma, 0);
    FockBasis basis = basis_for_scale(p, grid, 0);
    ModelParams unit = p;
    unit.g = 1.0;
    OperatorMatrix w = interaction_operator(unit, basis, ShellFilter::up_to_scale(0), true);
    SpinBosonOperator h0 = free_hamiltonian(p, basis, ShellFilter::up_to_scale(0), true);
    for (Complex z : {Complex(2.0, 0.02), Complex(1.9, -0.01), Complex(2.1, 0.0)}) {
        double kappa = neumann_contraction(h0.op.m, w.m, p.g, z);
        CHECK(kappa < 1.0);
    }
}
