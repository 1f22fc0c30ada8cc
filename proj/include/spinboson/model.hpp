#pragma once

#include <string>
#include <vector>

#include "spinboson/types.hpp"

namespace spinboson {

/// Physical and scale parameters of the dilated spin-boson model together
/// with the truncation controls of the finite-dimensional surrogate.
struct ModelParams {
    double g = 1e-3;            // coupling constant, > 0 (0 allowed for the trivial limit)
    double vartheta = 0.45;     // dilation angle, 0 < vartheta < pi/6
    double lambda_uv = 1.0;     // ultraviolet scale of the Gaussian form factor
    double rho0 = 0.3;          // initial infrared cutoff, in (0, 1)
    double gamma = 0.4;         // scale ratio, in (0, 1/2)
    int n_scales = 6;           // number of iteration steps N

    // Truncation knobs.
    int modes_per_shell = 1;
    int modes_outer = 8;
    int occupancy_cap = 2;
    int total_cap = 4;
    double outer_kmax_factor = 6.0;   // outer region is [rho0, factor * lambda_uv]
    std::size_t basis_limit = 20000;  // hard cap on enumerated Fock states

    /// Throws DomainError when a structural invariant is violated.
    void validate() const;
};

/// Ultraviolet form factor f(k) = exp(-k^2 / Lambda^2), evaluated for a
/// complex argument (needed along the dilated ray).
Complex form_factor(Complex k, const ModelParams& p);

/// Coupling function g f(k)/sqrt(k), or its dilated continuation
/// g e^{-i vartheta} f(e^{-i vartheta} k)/sqrt(k) when theta_on is set.
/// The point k = 0 is a genuine singularity and is rejected.
Complex eval_coupling(double k, bool theta_on, const ModelParams& p);

/// Ratio of the dilated to the undilated coupling at momentum k. Equals one
/// when theta_on is false; independent of g.
Complex dilation_ratio(double k, bool theta_on, const ModelParams& p);

/// Annihilator-side coefficient ratio conj(G_{theta-bar})/G_0 at momentum k.
Complex dilation_ratio_conj(double k, bool theta_on, const ModelParams& p);

struct CouplingNorms {
    double over_sqrt_omega = 0.0;  // || G / sqrt(omega) ||_{L^2}
    double plain = 0.0;            // || G ||_{L^2}
};

/// Radial L^2 norms of the coupling over the momentum interval [k_lo, k_hi]
/// (k_hi may be infinity). Relative quadrature error below 1e-10.
CouplingNorms coupling_l2_norms(const ModelParams& p, double k_lo, double k_hi,
                                bool theta_on);

/// Restricted squared-weight and first-moment integrals of the undilated
/// coupling density 4 pi k^2 |G(k)|^2; the workhorse behind mode splitting.
double coupling_weight(const ModelParams& p, double k_lo, double k_hi);
double coupling_weight_centroid(const ModelParams& p, double k_lo, double k_hi);

struct DerivedConstants {
    double vartheta = 0.0;
    double sin_vartheta = 0.0;
    double c_f = 1.0;          // max of |f| on [0, rho0]
    double delta_disk = 0.0;   // geometric gap, disk variant
    double delta_strip = 0.0;  // geometric gap, strip variant
    double theta_d = 0.0;      // min of the two gaps; enters C_FS and C_n
    double c_fs = 0.0;         // 2 + 7 / theta_d
    double growth = 0.0;       // C_{n+1} / C_n
    std::vector<double> c_n;           // C_0 .. C_N
    std::vector<double> rhos;          // rho_0 .. rho_N
    std::vector<double> contour_radii; // (sin vartheta / 8) rho_n

    static DerivedConstants make(const ModelParams& p);
};

/// C_n = 43 * (1120/sin(vartheta) + 600/(theta_d sin(vartheta)))^n.
double constant_Cn(int n, const DerivedConstants& c);

struct RestrictionEntry {
    std::string name;
    double lhs = 0.0;   // the parameter-side value
    double rhs = 0.0;   // the bound it must stay below
    bool required = true;
    bool pass = false;
};

struct RestrictionReport {
    std::vector<RestrictionEntry> entries;
    bool all_pass = false;

    const RestrictionEntry* find(const std::string& name) const;
};

/// Evaluates every inequality of the admissibility chain; failures are
/// entries, never exceptions. All inequalities are applied strictly.
RestrictionReport check_parameter_chain(const ModelParams& p);

}  // namespace spinboson
