#pragma once

#include <vector>

#include "spinboson/audit.hpp"
#include "spinboson/fock.hpp"
#include "spinboson/hamiltonian.hpp"
#include "spinboson/types.hpp"

namespace spinboson {

/// Fock-space effective operator obtained from the block decomposition
/// P (H - z) P - P (H - z) Pbar (Pbar (H - z) Pbar)^{-1} Pbar (H - z) P
/// with P the excited-level projection.
Matrix feshbach_block(const SpinBosonOperator& h, Complex z);

/// Reading of the two-creator / two-annihilator kernel denominators: with
/// the spectral shift -z included, or verbatim without it.
enum class KernelVariant { WithZ, WithoutZ };

struct FeshbachTerms {
    Matrix f0;    // 2 - z + e^{-theta} H_ph - (g0/g)^2 W00
    Matrix w00;   // diagonal single-contraction part (carries g^2)
    Matrix w20;   // two creators
    Matrix w11;   // one of each
    Matrix w02;   // two annihilators
    Complex z;
    KernelVariant variant = KernelVariant::WithZ;

    /// F0 - (W20 + W11 + W02); equals feshbach_block up to cap effects.
    Matrix assembled() const { return f0 - (w20 + w11 + w02); }
};

/// Normal-ordered kernel form of the effective operator over the filtered
/// modes. g0_over_g rescales only the W00 part of F0.
FeshbachTerms feshbach_terms(const ModelParams& p, const FockBasis& basis, Complex z,
                             const ShellFilter& filter, KernelVariant variant,
                             double g0_over_g = 1.0);

struct VariantResolution {
    KernelVariant matched = KernelVariant::WithZ;
    double dev_with_z = 0.0;
    double dev_without_z = 0.0;
};

/// Compares both kernel readings against the block formula at a point and
/// reports which one reproduces it.
VariantResolution resolve_kernel_variant(const ModelParams& p, const FockBasis& basis,
                                         const SpinBosonOperator& h, Complex z,
                                         const ShellFilter& filter);

struct IsospectralityReport {
    Complex effective_root;     // z with vanishing smallest singular value
    Complex oracle_eigenvalue;  // dense-spectrum eigenvalue nearest the seed
    double root_deviation = 0.0;
    double sigma_min_at_root = 0.0;
    double inverse_identity_dev = 0.0;  // max over sampled z
    bool pass = false;
};

/// (a) locates the root of the effective operator near `seed` and compares
/// it with the dense-spectrum oracle; (b) checks the inverse relation
/// H_eff(z)^{-1} = P (H - z)^{-1} P at the sampled points.
IsospectralityReport isospectrality_check(const SpinBosonOperator& h,
                                          Complex seed, const std::vector<Complex>& samples,
                                          double root_tol = 1e-8,
                                          double identity_tol = 1e-9);

/// Smallest-magnitude eigenvalue of a dense matrix by inverse iteration.
Complex smallest_eigenvalue(const Matrix& m);

/// ||Phi (H_ph + rho)^{-1/2}|| <= 2 (||G/sqrt(w)|| + rho^{-1/2} ||G||) on the
/// truncated space; region [k_lo, k_hi] must cover the filtered modes.
void audit_standard_estimate(const ModelParams& p, const FockBasis& basis,
                             const ShellFilter& filter, double k_lo, double k_hi, double rho,
                             bool theta_on, int scale, AuditSink& sink);

/// ||g Phi_theta (e^{-theta} H_ph - z)^{-1}|| <= g C_FS (||G/sqrt(w)|| + ||G||),
/// both operator orderings, at the given points.
void audit_feshbach_cutoff(const ModelParams& p, const FockBasis& basis,
                           const ShellFilter& filter, double k_lo, double k_hi,
                           const std::vector<Complex>& zs, int scale, AuditSink& sink);

}  // namespace spinboson
