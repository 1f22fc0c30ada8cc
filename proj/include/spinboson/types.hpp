#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace spinboson {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Identifies the truncated basis an operator lives on. Mixing operators
/// from different truncations is a logic error, not a numerical one.
struct BasisTag {
    std::uint64_t basis_id = 0;
    bool with_spin = false;

    friend bool operator==(const BasisTag&, const BasisTag&) = default;
};

/// Dense complex matrix tagged with the basis it acts on.
struct OperatorMatrix {
    Matrix m;
    BasisTag tag;

    Eigen::Index dim() const { return m.rows(); }
};

inline void require_same_basis(const OperatorMatrix& a, const OperatorMatrix& b,
                               const char* what) {
    if (!(a.tag == b.tag))
        throw std::logic_error(std::string("basis tag mismatch in ") + what);
}

inline OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_basis(a, b, "operator+");
    return {a.m + b.m, a.tag};
}

inline OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_basis(a, b, "operator-");
    return {a.m - b.m, a.tag};
}

inline OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_basis(a, b, "operator*");
    return {a.m * b.m, a.tag};
}

inline OperatorMatrix operator*(Complex s, const OperatorMatrix& a) {
    return {s * a.m, a.tag};
}

class DomainError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A linear solve hit a point too close to the spectrum.
class NearEigenvalueError : public std::runtime_error {
  public:
    NearEigenvalueError(Complex z_, const std::string& msg)
        : std::runtime_error(msg), z(z_) {}
    Complex z;
};

class EigenvalueOnContourError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class NonIdempotentProjectorError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class BasisCapacityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class BasisCompatibilityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class DegenerateOverlapError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class NonConvergenceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class AuditFailure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// splitmix64; used wherever a reproducible pseudo-random stream is needed.
class DeterministicRng {
  public:
    explicit DeterministicRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [-1, 1).
    double next_symmetric() {
        return 2.0 * (static_cast<double>(next_u64() >> 11) * 0x1.0p-53) - 1.0;
    }

    Complex next_complex() {
        double re = next_symmetric();
        double im = next_symmetric();
        return {re, im};
    }

  private:
    std::uint64_t state_;
};

}  // namespace spinboson
