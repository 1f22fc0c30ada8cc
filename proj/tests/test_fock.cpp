#include <doctest.h>

#include <cmath>

#include "spinboson/fock.hpp"
#include "spinboson/oracle.hpp"
#include "spinboson/resolvent.hpp"

using namespace spinboson;

namespace {

ModelParams small_params() {
    ModelParams p;
    p.g = 1e-2;
    p.vartheta = 0.45;
    p.rho0 = 0.3;
    p.gamma = 0.25;
    p.modes_outer = 3;
    p.modes_per_shell = 1;
    p.occupancy_cap = 2;
    p.total_cap = 4;
    return p;
}

ModeSet two_modes() {
    ModeSet m;
    m.modes.push_back({0.5, 0.5, 0.1, -1});
    m.modes.push_back({1.5, 1.5, 0.2, -1});
    return m;
}

}  // namespace

TEST_CASE("shell grid is a multiplicative cascade") {
    ShellGrid g = ShellGrid::build(0.5, 0.25, 2);
    REQUIRE(g.rhos.size() == 3);
    CHECK(g.rhos[0] == 0.5);
    CHECK(g.rhos[1] == 0.125);
    CHECK(g.rhos[2] == 0.03125);
    for (std::size_t n = 0; n + 1 < g.rhos.size(); ++n)
        CHECK(g.rhos[n + 1] == g.rhos[n] * 0.25);  // exact by construction

    ShellGrid single = ShellGrid::build(0.5, 0.25, 0);
    CHECK(single.rhos.size() == 1);
    auto iv = single.intervals(6.0);
    REQUIRE(iv.size() == 1);
    CHECK(iv[0].shell == -1);
    CHECK(iv[0].lo == 0.5);
}

TEST_CASE("basis counting with and without the total cap") {
    CHECK(build_basis(two_modes(), 2, 100).size() == 9);
    CHECK(build_basis(two_modes(), 2, 2).size() == 6);
    CHECK(build_basis(ModeSet{}, 2, 2).size() == 1);
}

TEST_CASE("vacuum is state zero and enumeration is graded") {
    FockBasis b = build_basis(two_modes(), 2, 4);
    for (auto n : b.state(0)) CHECK(n == 0);
    for (std::size_t i = 0; i + 1 < b.size(); ++i)
        CHECK(b.total_occupation(i) <= b.total_occupation(i + 1));
}

TEST_CASE("basis capacity limit is enforced") {
    ModeSet m;
    for (int j = 0; j < 12; ++j)
        m.modes.push_back({0.1 * (j + 1), 0.1 * (j + 1), 0.0, -1});
    CHECK_THROWS_AS(build_basis(std::move(m), 2, 8, 50), BasisCapacityError);
}

TEST_CASE("discretization splits weight equally and preserves the total") {
    ModelParams p = small_params();
    double lo = p.rho0, hi = 4.0;
    ModeSet one = discretize_region(lo, hi, p, 1, -1);
    ModeSet four = discretize_region(lo, hi, p, 4, -1);
    REQUIRE(one.size() == 1);
    REQUIRE(four.size() == 4);
    double total_one = one.modes[0].c * one.modes[0].c;
    double total_four = 0.0;
    for (const auto& md : four.modes) total_four += md.c * md.c;
    CHECK(total_four == doctest::Approx(total_one).epsilon(1e-12));
    // Equal weights across the split.
    for (const auto& md : four.modes)
        CHECK(md.c * md.c == doctest::Approx(total_one / 4.0).epsilon(1e-9));
    // Matches the direct restricted norm.
    CouplingNorms norms = coupling_l2_norms(p, lo, hi, false);
    CHECK(total_one == doctest::Approx(norms.plain * norms.plain).epsilon(1e-10));
}

TEST_CASE("zero-coupling discretization places modes at midpoints") {
    ModelParams p = small_params();
    p.g = 0.0;
    ModeSet m = discretize_region(0.2, 1.0, p, 2, 3);
    REQUIRE(m.size() == 2);
    CHECK(m.modes[0].c == 0.0);
    CHECK(m.modes[0].k == doctest::Approx(0.4));
    CHECK(m.modes[1].k == doctest::Approx(0.8));
    CHECK(m.modes[0].shell == 3);
}

TEST_CASE("ladder operators satisfy the commutation relations below the caps") {
    FockBasis b = build_basis(two_modes(), 3, 6);
    auto [a0, a0dag] = ladder_matrices(b, 0);
    auto [a1, a1dag] = ladder_matrices(b, 1);

    // a annihilates the vacuum.
    Vector vac = Vector::Zero(static_cast<Eigen::Index>(b.size()));
    vac(0) = 1.0;
    CHECK((a0.m * vac).norm() == 0.0);

    // [a_i, a_j] = 0 exactly.
    CHECK((a0.m * a1.m - a1.m * a0.m).cwiseAbs().maxCoeff() == 0.0);

    // [a_j, a*_j] = 1 on states strictly below both caps.
    Matrix comm = a0.m * a0dag.m - a0dag.m * a0.m;
    for (std::size_t i = 0; i < b.size(); ++i) {
        bool below = b.state(i)[0] + 1 < 3 && b.total_occupation(i) + 1 < 6;
        if (below)
            CHECK(std::abs(comm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) -
                           Complex(1.0, 0.0)) < 1e-14);
    }
    // The adjoint pair really is an adjoint pair.
    CHECK((a0dag.m - a0.m.adjoint()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("field operator is hermitian without dilation and zero at g = 0") {
    ModelParams p = small_params();
    ShellGrid grid = ShellGrid::build(p.rho0, p.gamma, 1);
    FockBasis b = basis_for_scale(p, grid, 1);
    OperatorMatrix phi = field_operator(b, p, false, ShellFilter::all());
    CHECK((phi.m - phi.m.adjoint()).cwiseAbs().maxCoeff() < 1e-14);

    ModelParams p0 = p;
    p0.g = 0.0;
    FockBasis b0 = basis_for_scale(p0, grid, 1);
    CHECK(field_operator(b0, p0, true, ShellFilter::all()).m.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single mode with occupancy one gives the hand-built two-level matrix") {
    ModeSet m;
    m.modes.push_back({0.7, 0.7, 0.25, -1});
    FockBasis b = build_basis(std::move(m), 1, 1);
    REQUIRE(b.size() == 2);
    ModelParams p = small_params();
    OperatorMatrix phi = field_operator(b, p, true, ShellFilter::all());
    Complex expected = 0.25 * dilation_ratio(0.7, true, p);
    CHECK(std::abs(phi.m(1, 0) - expected) < 1e-15);
    CHECK(std::abs(phi.m(0, 1) - expected) < 1e-15);  // conjugate pair coincides here
    CHECK(std::abs(phi.m(0, 0)) == 0.0);
}

TEST_CASE("field operator is additive over shell filters") {
    ModelParams p = small_params();
    ShellGrid grid = ShellGrid::build(p.rho0, p.gamma, 2);
    FockBasis b = basis_for_scale(p, grid, 2);
    Matrix full = field_operator(b, p, true, ShellFilter::up_to_scale(2)).m;
    Matrix outer = field_operator(b, p, true, ShellFilter::single_shell(-1)).m;
    Matrix s0 = field_operator(b, p, true, ShellFilter::single_shell(0)).m;
    Matrix s1 = field_operator(b, p, true, ShellFilter::single_shell(1)).m;
    CHECK((full - outer - s0 - s1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("photon hamiltonian is the expected diagonal") {
    ModelParams p = small_params();
    ShellGrid grid = ShellGrid::build(p.rho0, p.gamma, 1);
    FockBasis b = basis_for_scale(p, grid, 1);
    OperatorMatrix h = photon_hamiltonian(b, ShellFilter::up_to_scale(1));
    CHECK(h.m(0, 0) == Complex(0.0, 0.0));
    // One-boson states carry their mode frequency.
    for (std::size_t j = 0; j < b.modes().size(); ++j) {
        std::vector<std::uint8_t> occ(b.modes().size(), 0);
        occ[j] = 1;
        auto idx = b.index_of(occ);
        REQUIRE(idx.has_value());
        CHECK(h.m(static_cast<Eigen::Index>(*idx), static_cast<Eigen::Index>(*idx)).real() ==
              doctest::Approx(b.modes().modes[j].omega));
    }
    // Excluding the shell keeps every nonzero diagonal entry above rho_0.
    OperatorMatrix houter = photon_hamiltonian(b, ShellFilter::up_to_scale(0));
    for (Eigen::Index i = 0; i < houter.m.rows(); ++i) {
        double e = houter.m(i, i).real();
        if (e != 0.0) CHECK(e >= grid.rhos[0]);
    }
}

TEST_CASE("embedding into the larger basis preserves structure") {
    ModelParams p = small_params();
    ShellGrid grid = ShellGrid::build(p.rho0, p.gamma, 1);
    FockBasis coarse = basis_for_scale(p, grid, 0);
    FockBasis fine = basis_for_scale(p, grid, 1);

    // Vacuum goes to vacuum.
    Vector vac = Vector::Zero(static_cast<Eigen::Index>(coarse.size()));
    vac(0) = 1.0;
    Vector lifted = embed_vector(vac, coarse, fine);
    CHECK(lifted(0) == Complex(1.0, 0.0));
    CHECK(lifted.norm() == 1.0);

    // Identity-embedded photon term plus the new-shell term reproduces the
    // fine-basis spectrum on the old-vacuum sector.
    OperatorMatrix h_coarse = photon_hamiltonian(coarse, ShellFilter::up_to_scale(0));
    OperatorMatrix h_emb = embed_operator(h_coarse, coarse, fine, EmbedKind::Identity);
    OperatorMatrix h_fine = photon_hamiltonian(fine, ShellFilter::up_to_scale(1));
    OperatorMatrix h_shell = photon_hamiltonian(fine, ShellFilter::single_shell(0));
    CHECK((h_emb.m + h_shell.m - h_fine.m).cwiseAbs().maxCoeff() < 1e-14);

    // Operator norm is preserved when tensoring a projection with the vacuum
    // projection; cross-checked against the eigenvalue oracle on M*M.
    Matrix rank_one = Matrix::Zero(static_cast<Eigen::Index>(coarse.size()),
                                   static_cast<Eigen::Index>(coarse.size()));
    DeterministicRng rng(7);
    Vector u(static_cast<Eigen::Index>(coarse.size()));
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = rng.next_complex();
    rank_one = u * u.adjoint() / u.squaredNorm();
    OperatorMatrix proj{rank_one, coarse.tag()};
    OperatorMatrix lifted_proj = embed_operator(proj, coarse, fine, EmbedKind::VacuumProjection);
    double n1 = operator_norm(proj.m).value;
    double n2 = operator_norm(lifted_proj.m).value;
    CHECK(n1 == doctest::Approx(n2).epsilon(1e-9));
    std::vector<Complex> gram = dense_spectrum(Matrix(proj.m.adjoint() * proj.m));
    double largest = 0.0;
    for (Complex e : gram) largest = std::max(largest, e.real());
    CHECK(std::sqrt(largest) == doctest::Approx(n1).epsilon(1e-8));
}

TEST_CASE("embedding rejects incompatible bases") {
    ModelParams p = small_params();
    ShellGrid grid = ShellGrid::build(p.rho0, p.gamma, 1);
    FockBasis coarse = basis_for_scale(p, grid, 1);
    FockBasis fine = basis_for_scale(p, grid, 0);  // fewer modes than coarse
    Vector v = Vector::Zero(static_cast<Eigen::Index>(coarse.size()));
    CHECK_THROWS_AS(embed_vector(v, coarse, fine), BasisCompatibilityError);
}
