#include "spinboson/fock.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>

namespace spinboson {

namespace {

std::uint64_t next_basis_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1);
}

}  // namespace

ShellGrid ShellGrid::build(double rho0, double gamma, int n_scales) {
    if (!(rho0 > 0.0 && rho0 < 1.0)) throw DomainError("ShellGrid: rho0 must lie in (0,1)");
    if (!(gamma > 0.0 && gamma < 0.5)) throw DomainError("ShellGrid: gamma must lie in (0,1/2)");
    if (n_scales < 0) throw DomainError("ShellGrid: n_scales must be nonnegative");
    ShellGrid g;
    g.rhos.resize(static_cast<std::size_t>(n_scales) + 1);
    g.rhos[0] = rho0;
    for (std::size_t n = 1; n < g.rhos.size(); ++n) g.rhos[n] = g.rhos[n - 1] * gamma;
    return g;
}

std::vector<ShellGrid::Interval> ShellGrid::intervals(double outer_hi) const {
    std::vector<Interval> out;
    out.push_back({rhos.front(), outer_hi, -1});
    for (std::size_t n = 0; n + 1 < rhos.size(); ++n)
        out.push_back({rhos[n + 1], rhos[n], static_cast<int>(n)});
    return out;
}

ModeSet discretize_region(double k_lo, double k_hi, const ModelParams& p, int count,
                          int shell_index) {
    if (!(k_hi > k_lo) || !(k_lo >= 0.0))
        throw DomainError("discretize_region: empty or invalid region");
    if (count < 1) throw DomainError("discretize_region: mode count must be positive");

    ModeSet out;
    double total = coupling_weight(p, k_lo, k_hi);
    std::vector<double> cuts(static_cast<std::size_t>(count) + 1);
    cuts.front() = k_lo;
    cuts.back() = k_hi;

    if (total <= 0.0) {
        // Zero coupling weight: equal-width split, modes at midpoints.
        for (int j = 1; j < count; ++j)
            cuts[static_cast<std::size_t>(j)] = k_lo + (k_hi - k_lo) * j / count;
        for (int j = 0; j < count; ++j) {
            double lo = cuts[static_cast<std::size_t>(j)], hi = cuts[static_cast<std::size_t>(j) + 1];
            double mid = 0.5 * (lo + hi);
            out.modes.push_back({mid, mid, 0.0, shell_index});
        }
        return out;
    }

    // Interior breakpoints at equal cumulative coupling weight.
    for (int j = 1; j < count; ++j) {
        double target = total * j / count;
        double lo = k_lo, hi = k_hi;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            if (coupling_weight(p, k_lo, mid) < target)
                lo = mid;
            else
                hi = mid;
        }
        cuts[static_cast<std::size_t>(j)] = 0.5 * (lo + hi);
    }

    for (int j = 0; j < count; ++j) {
        double lo = cuts[static_cast<std::size_t>(j)], hi = cuts[static_cast<std::size_t>(j) + 1];
        double w = coupling_weight(p, lo, hi);
        double k = coupling_weight_centroid(p, lo, hi);
        out.modes.push_back({k, k, std::sqrt(std::max(w, 0.0)), shell_index});
    }
    return out;
}

ModeSet modes_for_scale(const ModelParams& p, const ShellGrid& grid, int scale) {
    if (scale < 0 || static_cast<std::size_t>(scale) >= grid.rhos.size())
        throw DomainError("modes_for_scale: scale outside the grid");
    ModeSet out;
    double outer_hi = p.outer_kmax_factor * p.lambda_uv;
    ModeSet outer = discretize_region(grid.rhos[0], outer_hi, p, p.modes_outer, -1);
    out.modes.insert(out.modes.end(), outer.modes.begin(), outer.modes.end());
    for (int s = 0; s < scale; ++s) {
        ModeSet shell = discretize_region(grid.rhos[static_cast<std::size_t>(s) + 1],
                                          grid.rhos[static_cast<std::size_t>(s)], p,
                                          p.modes_per_shell, s);
        out.modes.insert(out.modes.end(), shell.modes.begin(), shell.modes.end());
    }
    return out;
}

FockBasis::FockBasis(ModeSet modes, int occupancy_cap, int total_cap, std::size_t limit)
    : modes_(std::move(modes)),
      occupancy_cap_(occupancy_cap),
      total_cap_(total_cap),
      id_(next_basis_id()) {
    if (occupancy_cap < 1 || total_cap < 1)
        throw DomainError("FockBasis: caps must be at least 1");
    const std::size_t m = modes_.size();
    std::vector<std::uint8_t> occ(m, 0);

    // Graded lexicographic enumeration: by total occupation, then by the
    // occupation tuple read left to right.
    std::function<void(std::size_t, int)> fill = [&](std::size_t pos, int remaining) {
        if (pos == m) {
            if (remaining == 0) {
                if (states_.size() >= limit)
                    throw BasisCapacityError("FockBasis: state count exceeds the configured limit");
                states_.push_back(occ);
            }
            return;
        }
        int cap = std::min(occupancy_cap_, remaining);
        for (int n = 0; n <= cap; ++n) {
            occ[pos] = static_cast<std::uint8_t>(n);
            fill(pos + 1, remaining - n);
        }
        occ[pos] = 0;
    };
    int max_total = static_cast<int>(m) * occupancy_cap_;
    for (int t = 0; t <= std::min(total_cap_, max_total); ++t) fill(0, t);
    if (m == 0) {
        // fill() above already emitted the vacuum exactly once for t = 0.
    }

    totals_.reserve(states_.size());
    for (std::size_t i = 0; i < states_.size(); ++i) {
        int t = 0;
        for (auto n : states_[i]) t += n;
        totals_.push_back(t);
        index_.emplace(states_[i], i);
    }
}

std::optional<std::size_t> FockBasis::index_of(const std::vector<std::uint8_t>& occ) const {
    auto it = index_.find(occ);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::optional<FockBasis::LadderEntry> FockBasis::lower(std::size_t i, std::size_t mode) const {
    const auto& occ = states_[i];
    if (occ[mode] == 0) return std::nullopt;
    std::vector<std::uint8_t> target = occ;
    target[mode] -= 1;
    auto idx = index_of(target);
    if (!idx) return std::nullopt;
    return LadderEntry{*idx, std::sqrt(static_cast<double>(occ[mode]))};
}

std::optional<FockBasis::LadderEntry> FockBasis::raise(std::size_t i, std::size_t mode) const {
    const auto& occ = states_[i];
    if (occ[mode] >= occupancy_cap_) return std::nullopt;
    if (totals_[i] >= total_cap_) return std::nullopt;
    std::vector<std::uint8_t> target = occ;
    target[mode] += 1;
    auto idx = index_of(target);
    if (!idx) return std::nullopt;
    return LadderEntry{*idx, std::sqrt(static_cast<double>(occ[mode]) + 1.0)};
}

FockBasis build_basis(ModeSet modes, int occupancy_cap, int total_cap, std::size_t limit) {
    return FockBasis(std::move(modes), occupancy_cap, total_cap, limit);
}

FockBasis basis_for_scale(const ModelParams& p, const ShellGrid& grid, int scale) {
    return build_basis(modes_for_scale(p, grid, scale), p.occupancy_cap, p.total_cap,
                       p.basis_limit);
}

ShellFilter ShellFilter::all() {
    ShellFilter f;
    f.include_outer = true;
    for (int s = 0; s < 4096; ++s) f.shells.insert(s);
    return f;
}

ShellFilter ShellFilter::up_to_scale(int scale) {
    ShellFilter f;
    f.include_outer = true;
    for (int s = 0; s < scale; ++s) f.shells.insert(s);
    return f;
}

ShellFilter ShellFilter::single_shell(int shell) {
    ShellFilter f;
    f.include_outer = (shell < 0);
    if (shell >= 0) f.shells.insert(shell);
    return f;
}

bool ShellFilter::contains(int shell_index) const {
    if (shell_index < 0) return include_outer;
    return shells.count(shell_index) > 0;
}

std::pair<OperatorMatrix, OperatorMatrix> ladder_matrices(const FockBasis& basis,
                                                          std::size_t mode) {
    if (mode >= basis.modes().size()) throw DomainError("ladder_matrices: invalid mode");
    const auto n = static_cast<Eigen::Index>(basis.size());
    Matrix a = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (auto e = basis.lower(i, mode))
            a(static_cast<Eigen::Index>(e->target), static_cast<Eigen::Index>(i)) = e->amp;
    }
    Matrix adag = a.adjoint();
    return {OperatorMatrix{std::move(a), basis.tag()},
            OperatorMatrix{std::move(adag), basis.tag()}};
}

OperatorMatrix field_operator(const FockBasis& basis, const ModelParams& p, bool theta_on,
                              const ShellFilter& filter) {
    const auto n = static_cast<Eigen::Index>(basis.size());
    Matrix phi = Matrix::Zero(n, n);
    const auto& modes = basis.modes().modes;
    for (std::size_t j = 0; j < modes.size(); ++j) {
        const Mode& md = modes[j];
        if (!filter.contains(md.shell)) continue;
        if (md.c == 0.0) continue;
        Complex create = md.c * dilation_ratio(md.k, theta_on, p);
        Complex annihilate = md.c * dilation_ratio_conj(md.k, theta_on, p);
        for (std::size_t i = 0; i < basis.size(); ++i) {
            if (auto e = basis.raise(i, j))
                phi(static_cast<Eigen::Index>(e->target), static_cast<Eigen::Index>(i)) +=
                    create * e->amp;
            if (auto e = basis.lower(i, j))
                phi(static_cast<Eigen::Index>(e->target), static_cast<Eigen::Index>(i)) +=
                    annihilate * e->amp;
        }
    }
    return {std::move(phi), basis.tag()};
}

OperatorMatrix photon_hamiltonian(const FockBasis& basis, const ShellFilter& filter) {
    const auto n = static_cast<Eigen::Index>(basis.size());
    Matrix h = Matrix::Zero(n, n);
    const auto& modes = basis.modes().modes;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        double e = 0.0;
        const auto& occ = basis.state(i);
        for (std::size_t j = 0; j < modes.size(); ++j) {
            if (!filter.contains(modes[j].shell)) continue;
            e += modes[j].omega * occ[j];
        }
        h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = e;
    }
    return {std::move(h), basis.tag()};
}

OperatorMatrix photon_parity(const FockBasis& basis) {
    const auto n = static_cast<Eigen::Index>(basis.size());
    Matrix s = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < basis.size(); ++i)
        s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) =
            (basis.total_occupation(i) % 2 == 0) ? 1.0 : -1.0;
    return {std::move(s), basis.tag()};
}

namespace {

// For each fine-basis state: index of its coarse prefix part and whether the
// added modes are unoccupied.
struct EmbedMap {
    std::vector<std::size_t> coarse_index;
    std::vector<bool> new_part_vacuum;
    std::vector<std::vector<std::uint8_t>> new_part;
};

EmbedMap make_embed_map(const FockBasis& coarse, const FockBasis& fine) {
    const auto& cm = coarse.modes().modes;
    const auto& fm = fine.modes().modes;
    if (cm.size() > fm.size())
        throw BasisCompatibilityError("embed: coarse basis has more modes than fine basis");
    for (std::size_t j = 0; j < cm.size(); ++j) {
        if (cm[j].k != fm[j].k || cm[j].shell != fm[j].shell || cm[j].c != fm[j].c)
            throw BasisCompatibilityError("embed: coarse modes are not a prefix of fine modes");
    }
    if (coarse.occupancy_cap() != fine.occupancy_cap() ||
        coarse.total_cap() != fine.total_cap())
        throw BasisCompatibilityError("embed: occupation caps differ");

    EmbedMap map;
    map.coarse_index.resize(fine.size());
    map.new_part_vacuum.resize(fine.size());
    map.new_part.resize(fine.size());
    const std::size_t nc = cm.size();
    for (std::size_t i = 0; i < fine.size(); ++i) {
        const auto& occ = fine.state(i);
        std::vector<std::uint8_t> head(occ.begin(), occ.begin() + static_cast<long>(nc));
        std::vector<std::uint8_t> tail(occ.begin() + static_cast<long>(nc), occ.end());
        auto idx = coarse.index_of(head);
        if (!idx)
            throw BasisCompatibilityError("embed: fine state has no coarse counterpart");
        map.coarse_index[i] = *idx;
        map.new_part[i] = tail;
        map.new_part_vacuum[i] =
            std::all_of(tail.begin(), tail.end(), [](std::uint8_t n) { return n == 0; });
    }
    return map;
}

}  // namespace

Vector embed_vector(const Vector& v, const FockBasis& coarse, const FockBasis& fine) {
    if (v.size() != static_cast<Eigen::Index>(coarse.size()))
        throw BasisCompatibilityError("embed_vector: dimension mismatch");
    EmbedMap map = make_embed_map(coarse, fine);
    Vector out = Vector::Zero(static_cast<Eigen::Index>(fine.size()));
    for (std::size_t i = 0; i < fine.size(); ++i)
        if (map.new_part_vacuum[i])
            out(static_cast<Eigen::Index>(i)) =
                v(static_cast<Eigen::Index>(map.coarse_index[i]));
    return out;
}

OperatorMatrix embed_operator(const OperatorMatrix& op, const FockBasis& coarse,
                              const FockBasis& fine, EmbedKind kind) {
    if (!(op.tag == coarse.tag()))
        throw BasisCompatibilityError("embed_operator: operator not on the coarse basis");
    EmbedMap map = make_embed_map(coarse, fine);
    const auto n = static_cast<Eigen::Index>(fine.size());
    Matrix out = Matrix::Zero(n, n);
    for (std::size_t a = 0; a < fine.size(); ++a) {
        if (kind == EmbedKind::VacuumProjection && !map.new_part_vacuum[a]) continue;
        for (std::size_t b = 0; b < fine.size(); ++b) {
            if (kind == EmbedKind::VacuumProjection && !map.new_part_vacuum[b]) continue;
            if (map.new_part[a] != map.new_part[b]) continue;
            out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                op.m(static_cast<Eigen::Index>(map.coarse_index[a]),
                     static_cast<Eigen::Index>(map.coarse_index[b]));
        }
    }
    return {std::move(out), fine.tag()};
}

Vector embed_vector_spin(const Vector& v, const FockBasis& coarse, const FockBasis& fine) {
    const auto nc = static_cast<Eigen::Index>(coarse.size());
    if (v.size() != 2 * nc) throw BasisCompatibilityError("embed_vector_spin: dimension mismatch");
    Vector up = embed_vector(v.head(nc), coarse, fine);
    Vector down = embed_vector(v.tail(nc), coarse, fine);
    Vector out(2 * up.size());
    out << up, down;
    return out;
}

OperatorMatrix embed_operator_spin(const OperatorMatrix& op, const FockBasis& coarse,
                                   const FockBasis& fine, EmbedKind kind) {
    if (!(op.tag == coarse.spin_tag()))
        throw BasisCompatibilityError("embed_operator_spin: operator not on the coarse basis");
    const auto nc = static_cast<Eigen::Index>(coarse.size());
    const auto nf = static_cast<Eigen::Index>(fine.size());
    Matrix out = Matrix::Zero(2 * nf, 2 * nf);
    for (int sa = 0; sa < 2; ++sa) {
        for (int sb = 0; sb < 2; ++sb) {
            OperatorMatrix block{op.m.block(sa * nc, sb * nc, nc, nc), coarse.tag()};
            OperatorMatrix lifted = embed_operator(block, coarse, fine, kind);
            out.block(sa * nf, sb * nf, nf, nf) = lifted.m;
        }
    }
    return {std::move(out), fine.spin_tag()};
}

}  // namespace spinboson
