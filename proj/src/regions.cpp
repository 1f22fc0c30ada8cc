#include "spinboson/regions.hpp"

#include <algorithm>
#include <cmath>

namespace spinboson {

namespace {

struct RectWindow {
    double re_lo, re_hi, im_lo, im_hi;
};

RectWindow window(const RegionA& a) {
    double s = std::sin(a.vartheta);
    return {2.0 - a.rho0 / 4.0, 2.0 + a.rho0 / 4.0, -s * a.rho0 / 4.0, s * a.rho0 / 4.0};
}

}  // namespace

bool RegionA::contains(Complex z) const {
    // z belongs to A iff the ray z + e^{-i vartheta} t, t >= 0, meets the
    // rectangle. Solve the interval conditions for t.
    RectWindow w = window(*this);
    double c = std::cos(vartheta), s = std::sin(vartheta);
    double t_im_lo = (z.imag() - w.im_hi) / s;  // Im(z) - t s <= im_hi
    double t_im_hi = (z.imag() - w.im_lo) / s;
    double t_re_lo = (w.re_lo - z.real()) / c;
    double t_re_hi = (w.re_hi - z.real()) / c;
    double lo = std::max({t_im_lo, t_re_lo, 0.0});
    double hi = std::min(t_im_hi, t_re_hi);
    return lo <= hi;
}

bool RegionA0::contains(Complex z) const {
    if (!base.contains(z)) return false;
    double s = std::sin(base.vartheta);
    return std::abs(z - Complex(2.0, 0.0)) >= (s / 16.0) * base.rho0;
}

bool RegionBelowCut::contains(Complex z) const {
    if (!base.contains(z)) return false;
    return z.imag() >= energy.imag() - depth;
}

RegionA region_a(const ModelParams& p) { return {p.rho0, p.vartheta}; }

RegionA0 region_a0(const ModelParams& p) { return {region_a(p)}; }

RegionBelowCut region_am(const ModelParams& p, Complex energy, double rho_m) {
    return {region_a(p), energy, (std::sin(p.vartheta) / 4.0) * rho_m};
}

RegionBelowCut region_a_tilde(const ModelParams& p, Complex energy, double rho_next) {
    return {region_a(p), energy, (std::sin(p.vartheta) / 2.0) * rho_next};
}

double halton(std::size_t index, int base) {
    double f = 1.0, r = 0.0;
    std::size_t i = index + 1;  // skip the origin
    while (i > 0) {
        f /= base;
        r += f * static_cast<double>(i % static_cast<std::size_t>(base));
        i /= static_cast<std::size_t>(base);
    }
    return r;
}

namespace {

// Candidate stream covering the rectangle and its sweep tail. u, v pick a
// point of the rectangle, t slides it along -e^{-i vartheta}; t is biased
// toward small values so most samples land near the spectral window.
Complex sweep_candidate(const RegionA& a, std::size_t i) {
    RectWindow w = window(a);
    double u = halton(i, 2);
    double v = halton(i, 3);
    double tpar = halton(i, 5);
    double re = w.re_lo + u * (w.re_hi - w.re_lo);
    double im = w.im_lo + v * (w.im_hi - w.im_lo);
    double t_max = (2.0 + a.rho0) / std::cos(a.vartheta) + 1.0;
    double t = t_max * tpar * tpar * tpar;
    return Complex(re, im) - std::exp(Complex(0.0, -a.vartheta)) * t;
}

}  // namespace

std::vector<Complex> sample_region_a0(const ModelParams& p, int count) {
    RegionA0 r = region_a0(p);
    std::vector<Complex> out;
    std::size_t i = 0;
    while (out.size() < static_cast<std::size_t>(count) && i < 1000000) {
        Complex z = sweep_candidate(r.base, i++);
        if (r.contains(z)) out.push_back(z);
    }
    if (out.size() < static_cast<std::size_t>(count))
        throw NonConvergenceError("sample_region_a0: rejection sampling exhausted");
    return out;
}

std::vector<Complex> sample_region_below_cut(const ModelParams& p, const RegionBelowCut& r,
                                             int count, double exclusion_radius) {
    (void)p;
    std::vector<Complex> out;
    std::size_t i = 0;
    while (out.size() < static_cast<std::size_t>(count) && i < 1000000) {
        Complex z = sweep_candidate(r.base, i++);
        if (!r.contains(z)) continue;
        if (exclusion_radius > 0.0 && std::abs(z - r.energy) < exclusion_radius) continue;
        out.push_back(z);
    }
    if (out.size() < static_cast<std::size_t>(count))
        throw NonConvergenceError("sample_region_below_cut: rejection sampling exhausted");
    return out;
}

std::vector<Complex> sample_annulus_in_region(const RegionBelowCut& r, Complex energy,
                                              double r_inner, double r_outer, int count) {
    std::vector<Complex> out;
    std::size_t i = 0;
    while (out.size() < static_cast<std::size_t>(count) && i < 1000000) {
        double phase = 2.0 * M_PI * halton(i, 2);
        double radius = (i % 2 == 0) ? r_inner : r_outer;
        ++i;
        Complex z = energy + radius * std::exp(Complex(0.0, phase));
        if (r.contains(z)) out.push_back(z);
    }
    if (out.size() < static_cast<std::size_t>(count))
        throw NonConvergenceError("sample_annulus_in_region: rejection sampling exhausted");
    return out;
}

}  // namespace spinboson
