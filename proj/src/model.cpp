#include "spinboson/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace spinboson {

namespace {

constexpr double kPi = std::numbers::pi;

using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;

// Gaussian integrands vanish fast; integrating past this point changes
// nothing at double precision.
double integration_cap(const ModelParams& p) { return 16.0 * p.lambda_uv; }

double quad_interval(const std::function<double(double)>& f, double a, double b) {
    if (b <= a) return 0.0;
    return Quad::integrate(f, a, b, 15, 1e-12);
}

}  // namespace

void ModelParams::validate() const {
    if (!(g >= 0.0)) throw DomainError("coupling constant g must be nonnegative");
    if (!(vartheta > 0.0 && vartheta < kPi / 6.0))
        throw DomainError("dilation angle vartheta must lie in (0, pi/6)");
    if (!(lambda_uv > 0.0)) throw DomainError("ultraviolet scale must be positive");
    if (!(rho0 > 0.0 && rho0 < 1.0)) throw DomainError("rho0 must lie in (0, 1)");
    if (!(gamma > 0.0 && gamma < 0.5)) throw DomainError("gamma must lie in (0, 1/2)");
    if (n_scales < 0) throw DomainError("n_scales must be nonnegative");
    if (modes_per_shell < 1) throw DomainError("modes_per_shell must be at least 1");
    if (modes_outer < 1) throw DomainError("modes_outer must be at least 1");
    if (occupancy_cap < 1 || total_cap < 1) throw DomainError("occupation caps must be at least 1");
    if (outer_kmax_factor <= 0.0) throw DomainError("outer_kmax_factor must be positive");
}

Complex form_factor(Complex k, const ModelParams& p) {
    Complex w = k / p.lambda_uv;
    return std::exp(-w * w);
}

Complex eval_coupling(double k, bool theta_on, const ModelParams& p) {
    if (!(k > 0.0))
        throw DomainError("eval_coupling: momentum must be strictly positive");
    if (!theta_on) return p.g * form_factor(Complex(k, 0.0), p).real() / std::sqrt(k);
    Complex rot = std::exp(Complex(0.0, -p.vartheta));
    return p.g * rot * form_factor(rot * k, p) / std::sqrt(k);
}

Complex dilation_ratio(double k, bool theta_on, const ModelParams& p) {
    if (!(k > 0.0)) throw DomainError("dilation_ratio: momentum must be strictly positive");
    if (!theta_on) return Complex(1.0, 0.0);
    Complex rot = std::exp(Complex(0.0, -p.vartheta));
    return rot * form_factor(rot * k, p) / form_factor(Complex(k, 0.0), p);
}

Complex dilation_ratio_conj(double k, bool theta_on, const ModelParams& p) {
    if (!(k > 0.0)) throw DomainError("dilation_ratio_conj: momentum must be strictly positive");
    if (!theta_on) return Complex(1.0, 0.0);
    // conj(G_{theta-bar}) / G_0 with theta-bar = -i vartheta.
    Complex rot_bar = std::exp(Complex(0.0, p.vartheta));
    Complex val = rot_bar * form_factor(rot_bar * k, p) / form_factor(Complex(k, 0.0), p);
    return std::conj(val);
}

namespace {

// |f(e^{-i vartheta} k)|^2 for real k, either dilated or not.
double abs_form_sq(double k, bool theta_on, const ModelParams& p) {
    if (!theta_on) {
        double f = form_factor(Complex(k, 0.0), p).real();
        return f * f;
    }
    Complex rot = std::exp(Complex(0.0, -p.vartheta));
    return std::norm(form_factor(rot * k, p));
}

}  // namespace

CouplingNorms coupling_l2_norms(const ModelParams& p, double k_lo, double k_hi, bool theta_on) {
    if (k_lo < 0.0) throw DomainError("coupling_l2_norms: region must lie in (0, inf)");
    if (!(k_hi > k_lo)) return {};
    double hi = std::min(k_hi, integration_cap(p));
    if (hi <= k_lo) return {};
    double g2 = p.g * p.g;
    auto dens_over = [&](double k) { return abs_form_sq(k, theta_on, p); };
    auto dens_plain = [&](double k) { return k * abs_form_sq(k, theta_on, p); };
    CouplingNorms out;
    out.over_sqrt_omega = std::sqrt(4.0 * kPi * g2 * quad_interval(dens_over, k_lo, hi));
    out.plain = std::sqrt(4.0 * kPi * g2 * quad_interval(dens_plain, k_lo, hi));
    return out;
}

double coupling_weight(const ModelParams& p, double k_lo, double k_hi) {
    if (!(k_hi > k_lo)) return 0.0;
    double hi = std::min(k_hi, integration_cap(p));
    if (hi <= k_lo) return 0.0;
    auto dens = [&](double k) { return k * abs_form_sq(k, false, p); };
    return 4.0 * kPi * p.g * p.g * quad_interval(dens, k_lo, hi);
}

double coupling_weight_centroid(const ModelParams& p, double k_lo, double k_hi) {
    double hi = std::min(k_hi, integration_cap(p));
    auto dens = [&](double k) { return k * abs_form_sq(k, false, p); };
    auto dens_k = [&](double k) { return k * k * abs_form_sq(k, false, p); };
    double w = quad_interval(dens, k_lo, hi);
    if (w <= 0.0) return 0.5 * (k_lo + std::min(k_hi, hi));
    return quad_interval(dens_k, k_lo, hi) / w;
}

DerivedConstants DerivedConstants::make(const ModelParams& p) {
    DerivedConstants c;
    c.vartheta = p.vartheta;
    c.sin_vartheta = std::sin(p.vartheta);

    // Max of |f| sampled on a fine grid over [0, rho0]; for the Gaussian the
    // maximum sits at k = 0.
    constexpr int kGrid = 10000;
    double cf = 0.0;
    for (int i = 0; i <= kGrid; ++i) {
        double k = p.rho0 * static_cast<double>(i) / kGrid;
        cf = std::max(cf, std::abs(form_factor(Complex(k, 0.0), p).real()));
    }
    c.c_f = cf;

    // Geometric gap between the dilated continuum and the spectral window
    // near 2. Disk variant: 2 sin(vartheta) - (disk radius); the radius is
    // the energy-decay envelope C g with C = 9 sqrt(pi) C_f / (1 - gamma).
    double disk_radius = 9.0 * std::sqrt(kPi) * c.c_f * p.g / (1.0 - p.gamma);
    c.delta_disk = 2.0 * c.sin_vartheta - disk_radius;
    // Strip variant: distance between the tilted ray and the parallel line
    // through the lower window edge, evaluated at the most pessimistic scale.
    c.delta_strip = c.sin_vartheta *
                    (2.0 - p.rho0 / 4.0 -
                     std::cos(p.vartheta) * (c.sin_vartheta / 2.0) * p.rho0);
    c.theta_d = std::min(c.delta_disk, c.delta_strip);
    c.c_fs = 2.0 + 7.0 / c.theta_d;
    c.growth = 1120.0 / c.sin_vartheta + 600.0 / (c.theta_d * c.sin_vartheta);

    c.rhos.resize(static_cast<std::size_t>(p.n_scales) + 1);
    c.c_n.resize(c.rhos.size());
    c.contour_radii.resize(c.rhos.size());
    double rho = p.rho0;
    double cn = 43.0;
    for (std::size_t n = 0; n < c.rhos.size(); ++n) {
        c.rhos[n] = rho;
        c.c_n[n] = cn;
        c.contour_radii[n] = (c.sin_vartheta / 8.0) * rho;
        rho *= p.gamma;
        cn *= c.growth;
    }
    return c;
}

double constant_Cn(int n, const DerivedConstants& c) {
    if (n < 0) throw DomainError("constant_Cn: scale index must be nonnegative");
    return 43.0 * std::pow(c.growth, n);
}

const RestrictionEntry* RestrictionReport::find(const std::string& name) const {
    for (const auto& e : entries)
        if (e.name == name) return &e;
    return nullptr;
}

RestrictionReport check_parameter_chain(const ModelParams& p) {
    RestrictionReport rep;
    DerivedConstants c = DerivedConstants::make(p);
    auto add = [&](const std::string& name, double lhs, double rhs, bool required = true) {
        rep.entries.push_back({name, lhs, rhs, required, lhs < rhs});
    };

    add("theta_below_pi_sixth", p.vartheta, kPi / 6.0);
    add("rho0_window", p.rho0, std::pow(c.sin_vartheta / 100.0, 4.0));
    add("rho0_basis", p.rho0, std::pow(1.0 / 43.0, 4.0));
    add("gamma_half", p.gamma, 0.5);
    add("gamma_fifth_power", p.gamma, 1.0 / 625.0);
    // The growth-rate bound on gamma is evaluated in both readings; only the
    // inverse power is compatible with rho_n^{1/4} C_n < 1, so only that one
    // is required.
    add("gamma_growth_printed", p.gamma, std::pow(c.growth, 4.0), false);
    add("gamma_growth_inverse", p.gamma, std::pow(c.growth, -4.0));

    CouplingNorms full = coupling_l2_norms(p, 0.0, std::numeric_limits<double>::infinity(), true);
    double n1 = p.g > 0.0 ? full.over_sqrt_omega / p.g : 0.0;
    double n2 = p.g > 0.0 ? full.plain / p.g : 0.0;
    if (p.g == 0.0) {
        ModelParams unit = p;
        unit.g = 1.0;
        CouplingNorms u = coupling_l2_norms(unit, 0.0, std::numeric_limits<double>::infinity(), true);
        n1 = u.over_sqrt_omega;
        n2 = u.plain;
    }

    double g1 = (1.0 / 6.0) /
                (8.0 / (c.sin_vartheta * std::sqrt(2.0 * p.rho0)) *
                 (n1 + n2 / std::sqrt(p.rho0)));
    add("g_neumann_basis", p.g, g1);

    double g2 = 0.25 * std::sqrt(c.sin_vartheta * p.gamma * c.theta_d /
                                 (4100.0 * c.c_f * c.c_f * kPi));
    add("g_neumann_step", p.g, g2);
    // The same inequality in its raw quadratic form.
    add("g_step_quadratic",
        p.g * p.g * 4100.0 * c.c_f * c.c_f * kPi / (c.sin_vartheta * p.gamma * c.theta_d),
        0.5);

    add("g_feshbach_row", p.g, 1.0 / (c.c_fs * (n1 + n2)));
    add("g_feshbach_projection", p.g, 1.0 / (1.5 * std::sqrt(kPi) * c.c_fs * c.c_f));
    add("g_contour_shift", p.g, c.sin_vartheta * p.gamma / (72.0 * std::sqrt(kPi) * c.c_f));

    // rho_n^{1/4} C_n < 1 for every n up to N; report the worst scale.
    double worst = 0.0;
    for (int n = 0; n <= p.n_scales; ++n) {
        double v = std::pow(c.rhos[static_cast<std::size_t>(n)], 0.25) *
                   c.c_n[static_cast<std::size_t>(n)];
        worst = std::max(worst, v);
    }
    add("rho_quarter_Cn", worst, 1.0);

    add("theta_d_positive", 0.0, c.theta_d);

    rep.all_pass = true;
    for (const auto& e : rep.entries)
        if (e.required && !e.pass) rep.all_pass = false;
    return rep;
}

}  // namespace spinboson
