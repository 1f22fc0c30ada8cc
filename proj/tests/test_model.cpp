#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "spinboson/model.hpp"

using namespace spinboson;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ModelParams base_params() {
    ModelParams p;
    p.g = 1e-3;
    p.vartheta = 0.45;
    p.lambda_uv = 1.0;
    p.rho0 = 0.3;
    p.gamma = 0.4;
    p.n_scales = 4;
    return p;
}

}  // namespace

TEST_CASE("coupling is real and positive without dilation") {
    ModelParams p = base_params();
    for (double k : {1e-4, 0.03, 0.7, 2.5}) {
        Complex v = eval_coupling(k, false, p);
        CHECK(v.imag() == 0.0);
        CHECK(v.real() > 0.0);
        CHECK(v.real() ==
              doctest::Approx(p.g * std::exp(-k * k / (p.lambda_uv * p.lambda_uv)) /
                              std::sqrt(k)));
    }
}

TEST_CASE("coupling matches the high-precision scalar value") {
    ModelParams p;
    p.g = 0.01;
    p.lambda_uv = 1.0;
    p.vartheta = 0.1;
    Complex v = eval_coupling(0.5, true, p);
    // Frozen from a 40-digit evaluation of g e^{-i t} exp(-(e^{-i t} k)^2)/sqrt(k).
    CHECK(v.real() == doctest::Approx(0.011054911567102295).epsilon(1e-14));
    CHECK(v.imag() == doctest::Approx(-0.00055689353923116914).epsilon(1e-12));
}

TEST_CASE("coupling rejects the infrared singularity") {
    ModelParams p = base_params();
    CHECK_THROWS_AS(eval_coupling(0.0, false, p), DomainError);
    CHECK_THROWS_AS(eval_coupling(-0.2, true, p), DomainError);
}

TEST_CASE("coupling exhibits the k^{-1/2} blowup with unit residue in g") {
    ModelParams p = base_params();
    for (double k : {1e-4, 1e-6, 1e-8}) {
        Complex v = eval_coupling(k, true, p);
        CHECK(std::abs(v) * std::sqrt(k) == doctest::Approx(p.g).epsilon(1e-6));
    }
}

TEST_CASE("form factor modulus is even in the dilation angle") {
    ModelParams p = base_params();
    for (double k : {0.2, 1.0, 3.1}) {
        Complex plus = form_factor(std::exp(Complex(0.0, p.vartheta)) * k, p);
        Complex minus = form_factor(std::exp(Complex(0.0, -p.vartheta)) * k, p);
        CHECK(std::abs(plus) == doctest::Approx(std::abs(minus)).epsilon(1e-14));
    }
}

TEST_CASE("coupling norms vanish when g is zero") {
    ModelParams p = base_params();
    p.g = 0.0;
    CouplingNorms n = coupling_l2_norms(p, 0.0, kInf, false);
    CHECK(n.plain == 0.0);
    CHECK(n.over_sqrt_omega == 0.0);
}

TEST_CASE("coupling norms reproduce the closed Gaussian integrals") {
    ModelParams p = base_params();
    p.g = 0.02;
    p.lambda_uv = 1.3;
    CouplingNorms n = coupling_l2_norms(p, 0.0, kInf, false);
    double plain_sq = std::numbers::pi * p.g * p.g * p.lambda_uv * p.lambda_uv;
    double over_sq = 2.0 * std::numbers::pi * p.g * p.g * p.lambda_uv *
                     std::sqrt(std::numbers::pi / 2.0);
    CHECK(n.plain * n.plain == doctest::Approx(plain_sq).epsilon(1e-10));
    CHECK(n.over_sqrt_omega * n.over_sqrt_omega == doctest::Approx(over_sq).epsilon(1e-10));

    // Dilated norms equal the undilated ones at the widened Gaussian scale.
    CouplingNorms d = coupling_l2_norms(p, 0.0, kInf, true);
    double lam_eff = p.lambda_uv / std::sqrt(std::cos(2.0 * p.vartheta));
    CHECK(d.plain * d.plain ==
          doctest::Approx(std::numbers::pi * p.g * p.g * lam_eff * lam_eff).epsilon(1e-10));
}

TEST_CASE("coupling norms are interval additive") {
    ModelParams p = base_params();
    for (bool theta_on : {false, true}) {
        auto sq = [&](double lo, double hi) {
            CouplingNorms n = coupling_l2_norms(p, lo, hi, theta_on);
            return std::pair{n.over_sqrt_omega * n.over_sqrt_omega, n.plain * n.plain};
        };
        auto [a1, b1] = sq(0.05, 0.7);
        auto [a2, b2] = sq(0.7, 4.0);
        auto [a, b] = sq(0.05, 4.0);
        CHECK(a == doctest::Approx(a1 + a2).epsilon(1e-10));
        CHECK(b == doctest::Approx(b1 + b2).epsilon(1e-10));
    }
}

TEST_CASE("empty region produces zero norms") {
    ModelParams p = base_params();
    CouplingNorms n = coupling_l2_norms(p, 0.5, 0.5, false);
    CHECK(n.plain == 0.0);
    CHECK(n.over_sqrt_omega == 0.0);
}

TEST_CASE("C_n sequence starts at 43 and grows geometrically") {
    ModelParams p = base_params();
    DerivedConstants c = DerivedConstants::make(p);
    CHECK(constant_Cn(0, c) == 43.0);
    // Independent scalar evaluation of the growth factor.
    double s = std::sin(p.vartheta);
    double expected_growth = 1120.0 / s + 600.0 / (c.theta_d * s);
    CHECK(constant_Cn(1, c) == doctest::Approx(43.0 * expected_growth).epsilon(1e-13));
    double r1 = constant_Cn(3, c) / constant_Cn(2, c);
    double r2 = constant_Cn(7, c) / constant_Cn(6, c);
    CHECK(r1 == doctest::Approx(r2).epsilon(1e-12));
}

TEST_CASE("derived constants are positive for accepted parameters") {
    ModelParams p = base_params();
    DerivedConstants c = DerivedConstants::make(p);
    CHECK(c.c_f == doctest::Approx(1.0));  // Gaussian peaks at zero momentum
    CHECK(c.theta_d > 0.0);
    CHECK(c.c_fs == doctest::Approx(2.0 + 7.0 / c.theta_d));
    for (std::size_t n = 0; n < c.contour_radii.size(); ++n)
        CHECK(c.contour_radii[n] ==
              doctest::Approx((std::sin(p.vartheta) / 8.0) * c.rhos[n]));
}

TEST_CASE("parameter chain rejects the boundary scale ratio") {
    ModelParams p = base_params();
    p.gamma = 1.0 / 625.0;  // exactly the fifth-power boundary; strict inequality fails
    RestrictionReport rep = check_parameter_chain(p);
    const RestrictionEntry* e = rep.find("gamma_fifth_power");
    REQUIRE(e != nullptr);
    CHECK_FALSE(e->pass);
    CHECK_FALSE(rep.all_pass);
}

TEST_CASE("parameter chain rejects the dilation boundary") {
    ModelParams p = base_params();
    p.vartheta = std::numbers::pi / 6.0;
    // The boundary angle is outside the declared domain entirely.
    CHECK_THROWS_AS(p.validate(), DomainError);
    RestrictionReport rep = check_parameter_chain(p);
    const RestrictionEntry* e = rep.find("theta_below_pi_sixth");
    REQUIRE(e != nullptr);
    CHECK_FALSE(e->pass);
}

TEST_CASE("parameter chain is monotone in g") {
    ModelParams p = base_params();
    p.vartheta = 0.45;
    p.rho0 = 2e-10;
    p.gamma = 1e-15;
    p.n_scales = 2;
    p.g = 1e-18;
    RestrictionReport rep = check_parameter_chain(p);
    if (rep.all_pass) {
        for (double shrink : {0.5, 0.1, 1e-3}) {
            ModelParams q = p;
            q.g = p.g * shrink;
            CHECK(check_parameter_chain(q).all_pass);
        }
    }
    // Monotonicity also holds for the individual g-entries.
    ModelParams q = p;
    q.g = p.g * 0.25;
    RestrictionReport rep_q = check_parameter_chain(q);
    for (const auto& name :
         {"g_neumann_basis", "g_neumann_step", "g_feshbach_row", "g_contour_shift"}) {
        const RestrictionEntry* a = rep.find(name);
        const RestrictionEntry* b = rep_q.find(name);
        REQUIRE(a != nullptr);
        REQUIRE(b != nullptr);
        if (a->pass) CHECK(b->pass);
    }
}

TEST_CASE("admissible fixture tuple passes the whole chain") {
    // Frozen from the grid search over (vartheta, rho0, gamma, g); see
    // data/admissible.cfg.
    ModelParams p;
    p.vartheta = 0.45;
    p.rho0 = 3e-10;
    p.gamma = 3e-15;
    p.g = 1e-18;
    p.n_scales = 2;
    RestrictionReport rep = check_parameter_chain(p);
    for (const auto& e : rep.entries) {
        INFO(e.name, " value ", e.lhs, " bound ", e.rhs);
        if (e.required) CHECK(e.pass);
    }
    CHECK(rep.all_pass);
}

TEST_CASE("printed gamma growth bound exceeds one while the inverse is tiny") {
    ModelParams p = base_params();
    RestrictionReport rep = check_parameter_chain(p);
    const RestrictionEntry* printed = rep.find("gamma_growth_printed");
    const RestrictionEntry* inverse = rep.find("gamma_growth_inverse");
    REQUIRE(printed != nullptr);
    REQUIRE(inverse != nullptr);
    CHECK(printed->rhs > 1.0);
    CHECK_FALSE(printed->required);
    CHECK(inverse->rhs < 1e-12);
}
