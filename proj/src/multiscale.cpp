#include "spinboson/multiscale.hpp"

#include <cmath>
#include <numbers>

#include "spinboson/feshbach.hpp"
#include "spinboson/parallel.hpp"
#include "spinboson/regions.hpp"
#include "spinboson/resolvent.hpp"

namespace spinboson {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kNodeBatch = 4;  // fixed batch size keeps sums thread-count independent

Matrix accumulate_contour(const Matrix& h, Complex center, double radius, int nodes) {
    const Eigen::Index n = h.rows();
    double h_norm = h.cwiseAbs().rowwise().sum().maxCoeff();
    Matrix p = Matrix::Zero(n, n);
    std::vector<Matrix> batch(kNodeBatch);
    for (int k0 = 0; k0 < nodes; k0 += kNodeBatch) {
        int cnt = std::min(kNodeBatch, nodes - k0);
        parallel_for(static_cast<std::size_t>(cnt), [&](std::size_t i) {
            int k = k0 + static_cast<int>(i);
            double phi = 2.0 * std::numbers::pi * k / nodes;
            Complex phase = std::exp(Complex(0.0, phi));
            Complex z = center + radius * phase;
            ResolventSolver solver(h, z);
            if (solver.smallest_singular_estimate() <= 10.0 * kEps * std::max(1.0, h_norm))
                throw EigenvalueOnContourError(
                    "contour_projector: spectrum touches the contour");
            batch[i] = (-radius / nodes) * phase * solver.dense();
        });
        for (int i = 0; i < cnt; ++i) p += batch[i];
    }
    return p;
}

double idempotency_defect(const Matrix& p) {
    auto apply = [&](const Vector& v) { return Vector(p * (p * v) - p * v); };
    auto apply_adjoint = [&](const Vector& v) {
        Vector w = p.adjoint() * v;
        return Vector(p.adjoint() * w - w);
    };
    return operator_norm(apply, apply_adjoint, p.rows()).value;
}

double operator_distance(const Matrix& a, const Matrix& b) {
    auto apply = [&](const Vector& v) { return Vector(a * v - b * v); };
    auto apply_adjoint = [&](const Vector& v) {
        return Vector(a.adjoint() * v - b.adjoint() * v);
    };
    return operator_norm(apply, apply_adjoint, a.rows()).value;
}

}  // namespace

ContourResult contour_projector(const Matrix& h, const ContourSpec& contour,
                                double idempotency_tol, int node_cap) {
    if (!(contour.radius > 0.0)) throw DomainError("contour_projector: radius must be positive");
    int nodes = std::max(contour.nodes, 16);
    ContourResult out;
    while (true) {
        out.projector = accumulate_contour(h, contour.center, contour.radius, nodes);
        out.nodes_used = nodes;
        out.idempotency = idempotency_defect(out.projector);
        if (out.idempotency <= idempotency_tol) return out;
        if (nodes >= node_cap)
            throw NonIdempotentProjectorError(
                "contour_projector: projector not idempotent at the node cap; defect " +
                std::to_string(out.idempotency));
        nodes *= 2;
    }
}

Complex eigenvalue_from_projection(const Matrix& h, const Matrix& projector,
                                   const Vector& ref) {
    Vector pref = projector * ref;
    if (pref.norm() < 0.1 * ref.norm())
        throw DegenerateOverlapError(
            "eigenvalue_from_projection: reference overlap below 0.1");
    Complex num = (ref.adjoint() * (h * pref))(0, 0);
    Complex den = (ref.adjoint() * pref)(0, 0);
    return num / den;
}

namespace {

// Diagnostic contraction g ||W (H_0 - z)^{-1}|| at evenly spaced contour
// nodes; the scale-0 value doubles as the basis audit.
double contour_contraction(const ModelParams& p, const FockBasis& basis,
                           const ShellFilter& filter, Complex center, double radius,
                           int node_count) {
    if (p.g == 0.0) return 0.0;
    ModelParams unit = p;
    unit.g = 1.0;
    OperatorMatrix w = interaction_operator(unit, basis, filter, true);
    SpinBosonOperator h0 = free_hamiltonian(p, basis, filter, true);
    std::vector<double> vals(static_cast<std::size_t>(node_count), 0.0);
    parallel_for(vals.size(), [&](std::size_t i) {
        double phi = 2.0 * std::numbers::pi * static_cast<double>(i) / node_count;
        Complex z = center + radius * std::exp(Complex(0.0, phi));
        vals[i] = neumann_contraction(h0.op.m, w.m, p.g, z);
    });
    double worst = 0.0;
    for (double v : vals) worst = std::max(worst, v);
    return worst;
}

double vector_residual(const Matrix& h, Complex e, const Vector& psi) {
    double n = psi.norm();
    if (n == 0.0) return 0.0;
    return (h * psi - e * psi).norm() / n;
}

// Audits shared by the full level at every scale n >= 0; `state` is the
// freshly built scale, `prev` the embedded one (absent at the basis).
struct FullAuditContext {
    const ModelParams& p;
    const ShellGrid& grid;
    AuditSink& sink;
};

void full_audits_for_step(const FullAuditContext& ctx, const ScaleState& prev,
                          const ScaleState& next, const Matrix& h_next,
                          const Matrix& p_tilde) {
    const ModelParams& p = ctx.p;
    DerivedConstants consts = DerivedConstants::make(p);
    int n = prev.n;
    double rho_n = ctx.grid.rhos[static_cast<std::size_t>(n)];
    double rho_next = ctx.grid.rhos[static_cast<std::size_t>(n) + 1];
    double s = consts.sin_vartheta;
    const FockBasis& basis_next = *next.basis;

    // Sample points in the tilde window around E_n, away from the energy.
    RegionBelowCut a_tilde = region_a_tilde(p, prev.energy, rho_next);
    double exclusion = (s / 16.0) * rho_next;
    std::vector<Complex> zs =
        sample_annulus_in_region(a_tilde, prev.energy, (s / 4.0) * rho_next,
                                 2.0 * (s / 4.0) * rho_next, 8);

    SpinBosonOperator h_tilde = build_hamiltonian(p, basis_next, n, true);
    Matrix pbar_tilde = Matrix::Identity(p_tilde.rows(), p_tilde.cols()) - p_tilde;

    double cn = consts.c_n[static_cast<std::size_t>(n)];
    double worst_tilde = 0.0;
    double worst_fesh = 0.0, worst_fesh_tilde = 0.0;
    double worst_ne2 = 0.0, worst_step = 0.0;

    OperatorMatrix hph_shell = photon_hamiltonian(basis_next, ShellFilter::single_shell(n));
    const Eigen::Index nf = static_cast<Eigen::Index>(basis_next.size());
    SpinBosonOperator h_n = build_hamiltonian(p, *prev.basis, n, false);

    for (Complex z : zs) {
        if (std::abs(z - prev.energy) < exclusion) continue;
        double weight = (s / 2.0) * rho_next + std::abs(z - prev.energy);

        // Resolvent of the bridged operator against the embedded complement.
        ResolventSolver tilde_solver(h_tilde.op.m, z);
        auto apply = [&](const Vector& v) { return tilde_solver.apply(Vector(pbar_tilde * v)); };
        auto apply_adj = [&](const Vector& v) {
            return Vector(pbar_tilde.adjoint() * tilde_solver.apply_adjoint(v));
        };
        worst_tilde = std::max(
            worst_tilde, operator_norm(apply, apply_adj, h_tilde.op.dim()).value * weight);

        // Effective-operator norms through the block decomposition.
        Matrix eff_tilde = feshbach_block(h_tilde, z);
        ResolventSolver eff_tilde_inv(eff_tilde, Complex(0.0, 0.0));
        auto et_apply = [&](const Vector& v) { return eff_tilde_inv.apply(v); };
        auto et_adj = [&](const Vector& v) { return eff_tilde_inv.apply_adjoint(v); };
        double eff_tilde_norm = operator_norm(et_apply, et_adj, nf).value;
        worst_fesh_tilde = std::max(worst_fesh_tilde, eff_tilde_norm * weight);

        {
            // The unbridged scale-n operator on its own basis.
            Matrix eff_n = feshbach_block(h_n, z);
            ResolventSolver eff_n_inv(eff_n, Complex(0.0, 0.0));
            auto en_apply = [&](const Vector& v) { return eff_n_inv.apply(v); };
            auto en_adj = [&](const Vector& v) { return eff_n_inv.apply_adjoint(v); };
            worst_fesh = std::max(worst_fesh,
                                  operator_norm(en_apply, en_adj, eff_n.rows()).value * weight);
        }

        // (H_ph^{(n,n+1)} + rho_{n+1}) acting after the tilde effective inverse.
        auto ne2_apply = [&](const Vector& v) {
            Vector u = eff_tilde_inv.apply(v);
            for (Eigen::Index i = 0; i < nf; ++i)
                u(i) *= hph_shell.m(i, i).real() + rho_next;
            return u;
        };
        auto ne2_adj = [&](const Vector& v) {
            Vector u = v;
            for (Eigen::Index i = 0; i < nf; ++i)
                u(i) *= hph_shell.m(i, i).real() + rho_next;
            return eff_tilde_inv.apply_adjoint(u);
        };
        worst_ne2 = std::max(worst_ne2, operator_norm(ne2_apply, ne2_adj, nf).value);

        // Step invertibility: the next effective inverse against twice the tilde one.
        Matrix eff_next = feshbach_block({OperatorMatrix{h_next, basis_next.spin_tag()},
                                          OperatorKind::Regularized, n + 1, true},
                                         z);
        ResolventSolver eff_next_inv(eff_next, Complex(0.0, 0.0));
        auto enx_apply = [&](const Vector& v) { return eff_next_inv.apply(v); };
        auto enx_adj = [&](const Vector& v) { return eff_next_inv.apply_adjoint(v); };
        double next_norm = operator_norm(enx_apply, enx_adj, nf).value;
        if (eff_tilde_norm > 0.0)
            worst_step = std::max(worst_step, next_norm / (2.0 * eff_tilde_norm));
    }

    ctx.sink.record("invertibility_tilde", n, worst_tilde, (4.0 / s) * cn);
    ctx.sink.record("feshbach_norm", n, worst_fesh, 25.0 * cn);
    ctx.sink.record("feshbach_norm_tilde", n, worst_fesh_tilde, (28.0 / s) * cn);
    ctx.sink.record("neumann_estimate_2", n, worst_ne2, 100.0 * cn / s);
    ctx.sink.record("invertibility_step", n, worst_step, 1.0);

    // Shell interaction against the shifted shell photon energy.
    if (p.g > 0.0) {
        Complex z_ref = zs.front();
        FeshbachTerms shell =
            feshbach_terms(p, basis_next, z_ref, ShellFilter::single_shell(n),
                           KernelVariant::WithZ);
        Matrix w_sum = shell.w20 + shell.w11 + shell.w02;
        for (Eigen::Index j = 0; j < nf; ++j)
            w_sum.col(j) /= hph_shell.m(j, j).real() + rho_next;
        double measured = operator_norm(w_sum).value;
        CouplingNorms shell_norms = coupling_l2_norms(p, rho_next, rho_n, true);
        double integral = shell_norms.over_sqrt_omega * shell_norms.over_sqrt_omega +
                          shell_norms.plain * shell_norms.plain / rho_next;
        ctx.sink.record("neumann_shell", n, measured, 10.0 / consts.theta_d * integral);
    }

    // Resolvent bound with C_{n+1} over the next window.
    double c_next = consts.c_n[static_cast<std::size_t>(n) + 1];
    RegionBelowCut a_next = region_am(p, next.energy, rho_next);
    std::vector<Complex> zs_next =
        sample_annulus_in_region(a_next, next.energy, (s / 2.0) * rho_next,
                                 4.0 * (s / 2.0) * rho_next, 32);
    Matrix pbar_next = Matrix::Identity(next.projector.rows(), next.projector.cols()) -
                       next.projector;
    std::vector<double> ratios(zs_next.size(), 0.0);
    parallel_for(zs_next.size(), [&](std::size_t i) {
        BoundAudit audit = resolvent_bound_audit(h_next, zs_next[i], pbar_next, c_next,
                                                 rho_next, next.energy, p.vartheta);
        ratios[i] = audit.measured / audit.bound;
    });
    double worst_ratio = 0.0;
    for (double r : ratios) worst_ratio = std::max(worst_ratio, r);
    ctx.sink.record("resolvent_bound", n + 1, worst_ratio, 1.0);
}

}  // namespace

ScaleState induction_basis(const ModelParams& p, const ShellGrid& grid,
                           const MultiscaleOptions& opts, AuditSink& sink) {
    DerivedConstants consts = DerivedConstants::make(p);
    double s = consts.sin_vartheta;

    ScaleState state;
    state.n = 0;
    state.basis = std::make_shared<FockBasis>(basis_for_scale(p, grid, 0));
    ShellFilter filter = ShellFilter::up_to_scale(0);
    SpinBosonOperator h = build_hamiltonian(p, *state.basis, 0, false);

    double radius = (s / 8.0) * grid.rhos[0];
    ContourResult contour = contour_projector(h.op.m, {Complex(2.0, 0.0), radius,
                                                       opts.contour_nodes},
                                              opts.idempotency_tol);
    state.projector = std::move(contour.projector);
    state.diag.contour_nodes = contour.nodes_used;
    state.diag.idempotency = contour.idempotency;

    Vector ref = excited_vacuum(*state.basis);
    state.energy = eigenvalue_from_projection(h.op.m, state.projector, ref);
    state.psi = state.projector * ref;
    double psi_norm = state.psi.norm();
    if (opts.renormalize_psi && psi_norm > 0.0) state.psi /= psi_norm;

    // Basis audits.
    double kappa = contour_contraction(p, *state.basis, filter, Complex(2.0, 0.0), radius,
                                       std::max(opts.contour_nodes, 16));
    state.diag.kappa = kappa;
    sink.record("kappa_contour", 0, kappa, 1.0 / 6.0);

    Matrix p_free = Matrix::Zero(state.projector.rows(), state.projector.cols());
    p_free(0, 0) = 1.0;
    double dp = operator_distance(state.projector, p_free);
    state.diag.dP_norm = dp;
    state.diag.dP_bound = 0.2;
    sink.record("p0_distance", 0, dp, 0.2);
    sink.record("psi0_norm_window", 0, std::abs(psi_norm - 1.0), 0.2);

    state.diag.dE_abs = std::abs(state.energy - Complex(2.0, 0.0));
    state.diag.dE_bound = (s / 16.0) * grid.rhos[0];
    sink.record("energy_localization", 0, state.diag.dE_abs, state.diag.dE_bound);

    double trace = state.projector.trace().real();
    state.diag.trace_re = trace;
    if (std::abs(trace - 1.0) > 1e-6)
        throw NonIdempotentProjectorError("induction_basis: projector rank is not one");

    state.diag.residual = vector_residual(h.op.m, state.energy, state.psi);

    if (opts.level == AuditLevel::Full) {
        // Resolvent norm over the punctured window.
        std::vector<Complex> zs = sample_region_a0(p, 64);
        std::vector<double> ratios(zs.size(), 0.0);
        parallel_for(zs.size(), [&](std::size_t i) {
            ResolventSolver solver(h.op.m, zs[i]);
            auto apply = [&](const Vector& v) { return solver.apply(v); };
            auto adj = [&](const Vector& v) { return solver.apply_adjoint(v); };
            double nrm = operator_norm(apply, adj, h.op.dim()).value;
            ratios[i] = nrm * std::abs(Complex(2.0, 0.0) - zs[i]);
        });
        double worst = 0.0;
        for (double r : ratios) worst = std::max(worst, r);
        sink.record("resolvent_a0", 0, worst, 1.2);

        // Relative bound of the interaction against the free operator.
        if (p.g > 0.0) {
            ModelParams unit = p;
            unit.g = 1.0;
            OperatorMatrix w = interaction_operator(unit, *state.basis, filter, true);
            SpinBosonOperator h0 = free_hamiltonian(p, *state.basis, filter, true);
            double worst_rel = 0.0;
            for (std::size_t i = 0; i < zs.size(); i += 4)
                worst_rel = std::max(worst_rel,
                                     neumann_contraction(h0.op.m, w.m, p.g, zs[i]));
            sink.record("relative_bound", 0, worst_rel, 1.0);
        }

        double k_hi = p.outer_kmax_factor * p.lambda_uv;
        for (double rho : {grid.rhos[0], 1.0}) {
            audit_standard_estimate(p, *state.basis, filter, grid.rhos[0], k_hi, rho, false,
                                    0, sink);
            audit_standard_estimate(p, *state.basis, filter, grid.rhos[0], k_hi, rho, true,
                                    0, sink);
        }

        if (grid.rhos.size() > 1 && p.g > 0.0) {
            RegionBelowCut a_tilde = region_a_tilde(p, state.energy, grid.rhos[1]);
            std::vector<Complex> zt = sample_annulus_in_region(
                a_tilde, state.energy, (s / 4.0) * grid.rhos[1], (s / 2.0) * grid.rhos[0], 8);
            audit_feshbach_cutoff(p, *state.basis, filter, grid.rhos[0], k_hi, zt, 0, sink);
        }
    }
    return state;
}

ScaleState induction_step(const ScaleState& state, const ModelParams& p,
                          const ShellGrid& grid, const MultiscaleOptions& opts,
                          AuditSink& sink) {
    DerivedConstants consts = DerivedConstants::make(p);
    double s = consts.sin_vartheta;
    int n = state.n;
    if (static_cast<std::size_t>(n) + 1 >= grid.rhos.size())
        throw DomainError("induction_step: no further scale in the grid");
    double rho_n = grid.rhos[static_cast<std::size_t>(n)];
    double rho_next = grid.rhos[static_cast<std::size_t>(n) + 1];

    ScaleState next;
    next.n = n + 1;
    next.basis = std::make_shared<FockBasis>(basis_for_scale(p, grid, n + 1));
    SpinBosonOperator h = build_hamiltonian(p, *next.basis, n + 1, false);

    Matrix p_tilde = embed_operator_spin(OperatorMatrix{state.projector,
                                                        state.basis->spin_tag()},
                                         *state.basis, *next.basis,
                                         EmbedKind::VacuumProjection)
                         .m;

    double radius = (s / 8.0) * rho_next;
    ContourResult contour = contour_projector(h.op.m, {state.energy, radius,
                                                       opts.contour_nodes},
                                              opts.idempotency_tol);
    next.projector = std::move(contour.projector);
    next.diag.contour_nodes = contour.nodes_used;
    next.diag.idempotency = contour.idempotency;

    double trace = next.projector.trace().real();
    next.diag.trace_re = trace;
    if (std::abs(trace - 1.0) > 1e-6)
        throw NonIdempotentProjectorError("induction_step: projector rank is not one");

    Vector ref = excited_vacuum(*next.basis);
    next.energy = eigenvalue_from_projection(h.op.m, next.projector, ref);

    Vector psi_prev = embed_vector_spin(state.psi, *state.basis, *next.basis);
    next.psi = next.projector * psi_prev;
    double psi_norm = next.psi.norm();
    if (opts.renormalize_psi && psi_norm > 0.0) next.psi /= psi_norm;

    next.diag.dE_abs = std::abs(next.energy - state.energy);
    next.diag.dE_bound = 9.0 * std::sqrt(std::numbers::pi) * consts.c_f * p.g * rho_n;
    sink.record("energy_decay", n + 1, next.diag.dE_abs, next.diag.dE_bound);
    sink.record("contour_localization", n + 1, next.diag.dE_abs, radius);

    next.diag.dP_norm = operator_distance(next.projector, p_tilde);
    next.diag.dP_bound = (100.0 / s) * std::pow(rho_n, 0.25);
    sink.record("projection_decay", n + 1, next.diag.dP_norm, next.diag.dP_bound);

    next.diag.kappa = contour_contraction(p, *next.basis, ShellFilter::up_to_scale(n + 1),
                                          state.energy, radius, 4);
    next.diag.residual = vector_residual(h.op.m, next.energy, next.psi);

    if (opts.level == AuditLevel::Full && p.g > 0.0)
        full_audits_for_step({p, grid, sink}, state, next, h.op.m, p_tilde);

    return next;
}

MultiscaleResult run_multiscale(const ModelParams& p, const MultiscaleOptions& opts) {
    p.validate();
    MultiscaleResult result;
    RestrictionReport chain = check_parameter_chain(p);
    result.chain_pass = chain.all_pass;
    if (opts.enforce_chain && !chain.all_pass)
        throw AuditFailure("run_multiscale: parameter chain fails in strict mode");

    ShellGrid grid = ShellGrid::build(p.rho0, p.gamma, p.n_scales);
    AuditSink sink(opts.policy);

    ScaleState state = induction_basis(p, grid, opts, sink);
    result.rhos.push_back(grid.rhos[0]);
    result.energies.push_back(state.energy);
    result.table.push_back(state.diag);
    if (opts.keep_scale_operators) {
        SpinBosonOperator h0 = build_hamiltonian(p, *state.basis, 0, false);
        result.snapshots.push_back({h0.op.m, state.projector, state.energy,
                                    Complex(2.0, 0.0),
                                    (std::sin(p.vartheta) / 8.0) * grid.rhos[0]});
    }

    // Iterate to the last scale, or stop once the energy increments drop
    // below the convergence tolerance.
    for (int n = 0; n < p.n_scales; ++n) {
        Complex contour_center = state.energy;
        ScaleState next = induction_step(state, p, grid, opts, sink);
        result.rhos.push_back(grid.rhos[static_cast<std::size_t>(n) + 1]);
        result.energies.push_back(next.energy);
        result.table.push_back(next.diag);
        if (opts.keep_scale_operators) {
            SpinBosonOperator hn = build_hamiltonian(p, *next.basis, next.n, false);
            result.snapshots.push_back({hn.op.m, next.projector, next.energy, contour_center,
                                        (std::sin(p.vartheta) / 8.0) *
                                            grid.rhos[static_cast<std::size_t>(next.n)]});
        }
        state = std::move(next);
        if (state.diag.dE_abs < opts.converge_tol) break;
    }
    result.converged = true;

    result.e_res = state.energy;
    result.psi_res = state.psi;
    result.p_res = state.projector;
    result.final_basis = state.basis;
    {
        SpinBosonOperator h_full = build_hamiltonian(p, *state.basis, state.n, false);
        result.final_residual =
            state.psi.norm() > 0.0
                ? (h_full.op.m * state.psi - result.e_res * state.psi).norm() / state.psi.norm()
                : 0.0;
    }
    result.audits = sink.records();
    return result;
}

}  // namespace spinboson
