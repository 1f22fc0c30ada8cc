#pragma once

#include <vector>

#include "spinboson/model.hpp"
#include "spinboson/types.hpp"

namespace spinboson {

struct ContourSpec;

/// All eigenvalues of a dense complex matrix by Householder reduction to
/// Hessenberg form followed by shifted QR iteration. Kept independent of
/// the factorization-based solve path so the two can check each other.
/// Accuracy on the order of 1e-9 ||M||; dimension capped at 1000.
std::vector<Complex> dense_spectrum(const Matrix& m);

/// Number of eigenvalues enclosed by the contour, from the winding number
/// of det(M - z) tracked along at least 256 nodes; node pairs whose phase
/// jump exceeds pi are refined.
int count_inside(const Matrix& m, const ContourSpec& contour);

/// Second-order perturbative resonance 2 - g^2 I(2) where I(2) is the
/// continuum radial self-energy quadrature at z = 2. Deliberately bypasses
/// the mode discretization.
Complex perturbative_resonance(const ModelParams& p);

/// The self-energy integral I(z) itself (per unit g^2).
Complex self_energy_integral(const ModelParams& p, Complex z);

}  // namespace spinboson
