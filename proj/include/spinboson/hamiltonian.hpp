#pragma once

#include "spinboson/fock.hpp"
#include "spinboson/model.hpp"
#include "spinboson/types.hpp"

namespace spinboson {

enum class OperatorKind { Free, Full, Regularized, Bridged };

/// A two-level-atom x Fock operator. Index convention: spin is the slow
/// index, row = s * dimF + i with s = 0 the excited (upper) level.
struct SpinBosonOperator {
    OperatorMatrix op;
    OperatorKind kind = OperatorKind::Full;
    int scale = -1;      // infrared cutoff scale, -1 when not regularized
    bool theta_on = true;
};

/// H = H_at (x) 1 + 1 (x) e^{-theta} H_ph + g sigma_1 (x) Phi_theta over the
/// filtered modes. H_at = diag(2, 0).
SpinBosonOperator assemble_hamiltonian(const ModelParams& p, const FockBasis& basis,
                                       const ShellFilter& filter, bool theta_on,
                                       OperatorKind kind, int scale);

/// Cutoff Hamiltonian at the given scale on a basis covering it. The bridged
/// variant adds the photon energy of shell `scale` without its coupling.
SpinBosonOperator build_hamiltonian(const ModelParams& p, const FockBasis& basis,
                                    int scale, bool bridged, bool theta_on = true);

/// The free part H_0(theta) on the same basis/filter (diagonal).
SpinBosonOperator free_hamiltonian(const ModelParams& p, const FockBasis& basis,
                                   const ShellFilter& filter, bool theta_on);

/// Interaction part sigma_1 (x) Phi_theta, including the factor g.
OperatorMatrix interaction_operator(const ModelParams& p, const FockBasis& basis,
                                    const ShellFilter& filter, bool theta_on);

/// S = sigma_3 (x) (-1)^{N}; squares to the identity.
OperatorMatrix symmetry_operator(const FockBasis& basis);

/// sigma_1 (x) 1 on the tensored space.
OperatorMatrix sigma1_operator(const FockBasis& basis);

/// P_up (x) 1, the excited-level projection.
OperatorMatrix spin_up_projection(const FockBasis& basis);

/// Vector (1,0) (x) Omega on the tensored space.
Vector excited_vacuum(const FockBasis& basis);

}  // namespace spinboson
