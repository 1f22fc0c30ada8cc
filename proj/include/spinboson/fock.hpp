#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "spinboson/model.hpp"
#include "spinboson/types.hpp"

namespace spinboson {

/// Infrared cutoff sequence rho_n = rho_0 gamma^n together with the radial
/// shells it induces. rhos[n+1] is computed multiplicatively, so
/// rhos[n+1] == gamma * rhos[n] holds exactly.
struct ShellGrid {
    std::vector<double> rhos;  // rho_0 .. rho_N, strictly decreasing

    struct Interval {
        double lo = 0.0;
        double hi = 0.0;
        int shell = -1;  // -1 denotes the outer region
    };

    /// Outer region first, then shells [rho_{n+1}, rho_n] by index.
    std::vector<Interval> intervals(double outer_hi) const;

    static ShellGrid build(double rho0, double gamma, int n_scales);
};

struct Mode {
    double k = 0.0;      // representative momentum (coupling-weighted centroid)
    double omega = 0.0;  // frequency; equals k for the photon dispersion
    double c = 0.0;      // undilated coupling weight, includes the factor g
    int shell = -1;      // -1 = outer region, otherwise shell index
};

struct ModeSet {
    std::vector<Mode> modes;

    std::size_t size() const { return modes.size(); }
};

/// Splits [k_lo, k_hi] into `count` sub-intervals of equal coupling weight
/// and collapses each onto one effective mode. Dilation is not baked in.
ModeSet discretize_region(double k_lo, double k_hi, const ModelParams& p, int count,
                          int shell_index);

/// Mode set for the cutoff Hamiltonian at the given scale: outer region
/// plus shells 0 .. scale-1. scale == 0 keeps only the outer region.
ModeSet modes_for_scale(const ModelParams& p, const ShellGrid& grid, int scale);

/// Occupation-number basis over a ModeSet with per-mode and total caps.
/// State 0 is the vacuum; enumeration is graded lexicographic.
class FockBasis {
  public:
    FockBasis(ModeSet modes, int occupancy_cap, int total_cap, std::size_t limit);

    const ModeSet& modes() const { return modes_; }
    int occupancy_cap() const { return occupancy_cap_; }
    int total_cap() const { return total_cap_; }
    std::size_t size() const { return states_.size(); }
    const std::vector<std::uint8_t>& state(std::size_t i) const { return states_[i]; }
    int total_occupation(std::size_t i) const { return totals_[i]; }

    /// Index of an occupation tuple, or nullopt when outside the truncation.
    std::optional<std::size_t> index_of(const std::vector<std::uint8_t>& occ) const;

    /// a_j |i> = amp |target>; nullopt when the state is annihilated.
    struct LadderEntry {
        std::size_t target;
        double amp;
    };
    std::optional<LadderEntry> lower(std::size_t i, std::size_t mode) const;
    std::optional<LadderEntry> raise(std::size_t i, std::size_t mode) const;

    BasisTag tag() const { return {id_, false}; }
    BasisTag spin_tag() const { return {id_, true}; }

  private:
    ModeSet modes_;
    int occupancy_cap_;
    int total_cap_;
    std::vector<std::vector<std::uint8_t>> states_;
    std::vector<int> totals_;
    std::map<std::vector<std::uint8_t>, std::size_t> index_;
    std::uint64_t id_;
};

FockBasis build_basis(ModeSet modes, int occupancy_cap, int total_cap,
                      std::size_t limit = 20000);

/// Convenience: basis for the cutoff model at the given scale.
FockBasis basis_for_scale(const ModelParams& p, const ShellGrid& grid, int scale);

/// Selects which radial regions contribute to an operator sum.
struct ShellFilter {
    bool include_outer = true;
    std::set<int> shells;  // shell indices to include

    static ShellFilter all();
    static ShellFilter up_to_scale(int scale);  // outer + shells 0 .. scale-1
    static ShellFilter single_shell(int shell);

    bool contains(int shell_index) const;
};

/// Annihilation and creation matrices for one mode.
std::pair<OperatorMatrix, OperatorMatrix> ladder_matrices(const FockBasis& basis,
                                                          std::size_t mode);

/// Field operator on the Fock factor: sum over filtered modes of
/// coeff_create a*_j + coeff_annihilate a_j with the dilation applied
/// pointwise at the representative momenta.
OperatorMatrix field_operator(const FockBasis& basis, const ModelParams& p,
                              bool theta_on, const ShellFilter& filter);

/// Diagonal photon Hamiltonian over the filtered modes (undilated).
OperatorMatrix photon_hamiltonian(const FockBasis& basis, const ShellFilter& filter);

/// Diagonal photon-number parity (-1)^{N}.
OperatorMatrix photon_parity(const FockBasis& basis);

/// How an operator extends to an enlarged basis: tensor with the identity of
/// the new factor, or with its vacuum projection.
enum class EmbedKind { Identity, VacuumProjection };

/// The coarse basis modes must form a prefix of the fine basis modes.
Vector embed_vector(const Vector& v, const FockBasis& coarse, const FockBasis& fine);
OperatorMatrix embed_operator(const OperatorMatrix& op, const FockBasis& coarse,
                              const FockBasis& fine, EmbedKind kind);

/// Same embeddings for objects carrying the two-level factor.
Vector embed_vector_spin(const Vector& v, const FockBasis& coarse, const FockBasis& fine);
OperatorMatrix embed_operator_spin(const OperatorMatrix& op, const FockBasis& coarse,
                                   const FockBasis& fine, EmbedKind kind);

}  // namespace spinboson
