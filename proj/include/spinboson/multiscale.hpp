#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "spinboson/audit.hpp"
#include "spinboson/fock.hpp"
#include "spinboson/hamiltonian.hpp"
#include "spinboson/model.hpp"
#include "spinboson/types.hpp"

namespace spinboson {

struct ContourSpec {
    Complex center;
    double radius = 0.0;
    int nodes = 16;  // initial trapezoidal node count, at least 16
};

struct ContourResult {
    Matrix projector;
    int nodes_used = 0;
    double idempotency = 0.0;  // ||P^2 - P||
};

/// Spectral projector -(1/2 pi i) contour integral of the resolvent by the
/// trapezoidal rule on the circle; the node count doubles until
/// ||P^2 - P|| <= tol or the cap is reached. Nodes are solved in fixed-size
/// batches and summed in index order, so the result does not depend on the
/// thread count.
ContourResult contour_projector(const Matrix& h, const ContourSpec& contour,
                                double idempotency_tol = 1e-9, int node_cap = 1024);

/// <ref, H P ref> / <ref, P ref>; requires ||P ref|| >= 0.1 ||ref||.
Complex eigenvalue_from_projection(const Matrix& h, const Matrix& projector,
                                   const Vector& ref);

enum class AuditLevel { Basic, Full };

struct MultiscaleOptions {
    int contour_nodes = 16;
    double idempotency_tol = 1e-9;
    double converge_tol = 1e-12;   // stop when |E_{n+1} - E_n| drops below
    bool renormalize_psi = true;
    AuditPolicy policy = AuditPolicy::WarnAndContinue;
    AuditLevel level = AuditLevel::Basic;
    bool keep_scale_operators = false;  // retain H and P per scale (small runs)
    bool enforce_chain = false;         // strict-mode abort when the chain fails
};

struct ScaleDiagnostics {
    double idempotency = 0.0;
    double trace_re = 0.0;
    double dE_abs = 0.0;
    double dE_bound = 0.0;
    double dP_norm = 0.0;
    double dP_bound = 0.0;
    double kappa = 0.0;
    double residual = 0.0;
    int contour_nodes = 0;
};

struct ScaleState {
    int n = 0;
    Complex energy;
    Matrix projector;
    Vector psi;
    std::shared_ptr<const FockBasis> basis;
    ScaleDiagnostics diag;
};

struct ScaleSnapshot {
    Matrix hamiltonian;
    Matrix projector;
    Complex energy;
    Complex contour_center;  // 2 at the basis, E_{n-1} afterwards
    double contour_radius = 0.0;
};

/// Scale-0 state: projector around 2 with radius (sin(vartheta)/8) rho_0,
/// plus the basis audits (contraction, projector distance, vector norms).
ScaleState induction_basis(const ModelParams& p, const ShellGrid& grid,
                           const MultiscaleOptions& opts, AuditSink& sink);

/// One step n -> n+1: embed, project around E_n with the shrunken radius,
/// extract the next eigenvalue, audit the decay bounds.
ScaleState induction_step(const ScaleState& state, const ModelParams& p,
                          const ShellGrid& grid, const MultiscaleOptions& opts,
                          AuditSink& sink);

struct MultiscaleResult {
    Complex e_res;
    Vector psi_res;
    Matrix p_res;
    std::shared_ptr<const FockBasis> final_basis;
    std::vector<ScaleDiagnostics> table;       // one row per scale
    std::vector<Complex> energies;             // E_0 .. E_N
    std::vector<double> rhos;
    std::vector<AuditRecord> audits;
    std::vector<ScaleSnapshot> snapshots;      // only when requested
    bool converged = false;
    bool chain_pass = false;
    double final_residual = 0.0;
};

MultiscaleResult run_multiscale(const ModelParams& p, const MultiscaleOptions& opts = {});

}  // namespace spinboson
