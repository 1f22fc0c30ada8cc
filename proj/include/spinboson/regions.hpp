#pragma once

#include <vector>

#include "spinboson/model.hpp"
#include "spinboson/types.hpp"

namespace spinboson {

/// The spectral window near 2: the rectangle
/// [2 - rho0/4, 2 + rho0/4] + i [-s rho0/4, s rho0/4], s = sin(vartheta),
/// swept along the direction -e^{-i vartheta}.
struct RegionA {
    double rho0 = 0.0;
    double vartheta = 0.0;

    bool contains(Complex z) const;
};

/// RegionA with the disk D(2, (s/16) rho0) removed.
struct RegionA0 {
    RegionA base;

    bool contains(Complex z) const;
};

/// RegionA cut below the horizontal line Im z = Im E - depth; used both for
/// the per-scale sets (depth = (s/4) rho_m) and their tilde variants
/// (depth = (s/2) rho_{m+1}).
struct RegionBelowCut {
    RegionA base;
    Complex energy;
    double depth = 0.0;

    bool contains(Complex z) const;
};

RegionA region_a(const ModelParams& p);
RegionA0 region_a0(const ModelParams& p);
RegionBelowCut region_am(const ModelParams& p, Complex energy, double rho_m);
RegionBelowCut region_a_tilde(const ModelParams& p, Complex energy, double rho_next);

/// Deterministic quasi-random points inside a region (Halton-driven
/// rejection over the sweep parametrization). The same arguments always
/// produce the same points.
std::vector<Complex> sample_region_a0(const ModelParams& p, int count);
std::vector<Complex> sample_region_below_cut(const ModelParams& p, const RegionBelowCut& r,
                                             int count, double exclusion_radius = 0.0);

/// Stratified samples for the per-scale resolvent audit: half on a small
/// circle around the energy, half on a larger one, all inside the region.
std::vector<Complex> sample_annulus_in_region(const RegionBelowCut& r, Complex energy,
                                              double r_inner, double r_outer, int count);

double halton(std::size_t index, int base);

}  // namespace spinboson
