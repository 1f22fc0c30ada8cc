#include "spinboson/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "spinboson/multiscale.hpp"

namespace spinboson {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Givens {
    double c = 1.0;
    Complex s = 0.0;
};

Givens make_givens(Complex f, Complex g) {
    if (g == Complex(0.0, 0.0)) return {1.0, Complex(0.0, 0.0)};
    double af = std::abs(f), ag = std::abs(g);
    double d = std::hypot(af, ag);
    if (af == 0.0) return {0.0, std::conj(g) / d * 1.0};
    Complex sign_f = f / af;
    return {af / d, sign_f * std::conj(g) / d};
}

void hessenberg_reduce(Matrix& a) {
    const Eigen::Index n = a.rows();
    for (Eigen::Index k = 0; k + 2 < n; ++k) {
        Eigen::Index m = n - k - 1;
        Vector x = a.block(k + 1, k, m, 1);
        double xnorm = x.norm();
        if (xnorm == 0.0) continue;
        Complex alpha = x(0) == Complex(0.0, 0.0) ? Complex(1.0, 0.0) : x(0) / std::abs(x(0));
        Vector v = x;
        v(0) += alpha * xnorm;
        double vnorm = v.norm();
        if (vnorm == 0.0) continue;
        v /= vnorm;
        // A <- P A P with P = I - 2 v v* (Hermitian, unitary).
        a.block(k + 1, k, m, n - k) -= 2.0 * v * (v.adjoint() * a.block(k + 1, k, m, n - k));
        a.block(0, k + 1, n, m) -= 2.0 * (a.block(0, k + 1, n, m) * v) * v.adjoint();
        // Clean the explicitly annihilated entries.
        for (Eigen::Index i = k + 2; i < n; ++i) a(i, k) = 0.0;
    }
}

Complex wilkinson_shift(const Matrix& h, Eigen::Index hi) {
    Complex a = h(hi - 1, hi - 1), b = h(hi - 1, hi);
    Complex c = h(hi, hi - 1), d = h(hi, hi);
    Complex tr = a + d;
    Complex disc = std::sqrt((a - d) * (a - d) + 4.0 * b * c);
    Complex l1 = 0.5 * (tr + disc), l2 = 0.5 * (tr - disc);
    return std::abs(l1 - d) < std::abs(l2 - d) ? l1 : l2;
}

}  // namespace

std::vector<Complex> dense_spectrum(const Matrix& m_in) {
    const Eigen::Index n = m_in.rows();
    if (n != m_in.cols()) throw DomainError("dense_spectrum: matrix must be square");
    if (n > 1000) throw DomainError("dense_spectrum: dimension capped at 1000");
    if (n == 0) return {};

    Matrix h = m_in;
    double scale = h.cwiseAbs().maxCoeff();
    if (scale == 0.0) return std::vector<Complex>(static_cast<std::size_t>(n), Complex(0.0, 0.0));
    hessenberg_reduce(h);

    auto subdiag_negligible = [&](Eigen::Index i) {
        return std::abs(h(i, i - 1)) <=
               kEps * (std::abs(h(i, i)) + std::abs(h(i - 1, i - 1)) + scale);
    };

    std::vector<Complex> eig;
    eig.reserve(static_cast<std::size_t>(n));

    Eigen::Index hi = n - 1;
    int iter_since_deflation = 0;
    const int max_total = 80 * static_cast<int>(n);
    int total = 0;

    while (hi >= 0) {
        if (hi == 0) {
            eig.push_back(h(0, 0));
            break;
        }
        if (subdiag_negligible(hi)) {
            h(hi, hi - 1) = 0.0;
            eig.push_back(h(hi, hi));
            --hi;
            iter_since_deflation = 0;
            continue;
        }
        Eigen::Index lo = hi;
        while (lo > 0 && !subdiag_negligible(lo)) --lo;

        if (++total > max_total)
            throw NonConvergenceError("dense_spectrum: QR iteration did not converge");
        ++iter_since_deflation;

        Complex mu = wilkinson_shift(h, hi);
        if (iter_since_deflation % 24 == 0)
            mu = h(hi, hi) + Complex(0.75 * std::abs(h(hi, hi - 1)), 0.0);

        // Explicit shifted QR sweep on the window: factor H - mu I by Givens
        // rotations, then form R Q + mu I. Left rotations span the rows'
        // Hessenberg profile; right rotations span all rows above the
        // restored subdiagonal.
        for (Eigen::Index i = lo; i <= hi; ++i) h(i, i) -= mu;
        std::vector<Givens> rot(static_cast<std::size_t>(hi - lo));
        for (Eigen::Index i = lo; i < hi; ++i) {
            Givens gv = make_givens(h(i, i), h(i + 1, i));
            rot[static_cast<std::size_t>(i - lo)] = gv;
            for (Eigen::Index j = std::max<Eigen::Index>(0, i - 1); j < n; ++j) {
                Complex t1 = h(i, j), t2 = h(i + 1, j);
                h(i, j) = gv.c * t1 + gv.s * t2;
                h(i + 1, j) = -std::conj(gv.s) * t1 + gv.c * t2;
            }
        }
        for (Eigen::Index i = lo; i < hi; ++i) {
            const Givens& gv = rot[static_cast<std::size_t>(i - lo)];
            Eigen::Index bottom = std::min<Eigen::Index>(n - 1, i + 2);
            for (Eigen::Index r = 0; r <= bottom; ++r) {
                Complex t1 = h(r, i), t2 = h(r, i + 1);
                h(r, i) = gv.c * t1 + std::conj(gv.s) * t2;
                h(r, i + 1) = -gv.s * t1 + gv.c * t2;
            }
        }
        for (Eigen::Index i = lo; i <= hi; ++i) h(i, i) += mu;
    }
    std::reverse(eig.begin(), eig.end());
    return eig;
}

int count_inside(const Matrix& m, const ContourSpec& contour) {
    const Eigen::Index n = m.rows();
    int nodes = std::max(contour.nodes, 256);

    auto det_phase = [&](double angle) {
        Complex z = contour.center + contour.radius * std::exp(Complex(0.0, angle));
        Matrix shifted = m;
        shifted.diagonal().array() -= z;
        Eigen::PartialPivLU<Matrix> lu(shifted);
        const Matrix& lu_m = lu.matrixLU();
        double phase = lu.permutationP().determinant() < 0 ? std::numbers::pi : 0.0;
        double min_abs = std::numeric_limits<double>::infinity();
        double max_abs = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            Complex u = lu_m(i, i);
            phase += std::arg(u);
            min_abs = std::min(min_abs, std::abs(u));
            max_abs = std::max(max_abs, std::abs(u));
        }
        if (min_abs == 0.0 || !(max_abs > 0.0))
            throw EigenvalueOnContourError("count_inside: determinant vanished on a node");
        return phase;
    };

    // Phase increments between consecutive nodes, refined until each jump is
    // safely below pi.
    std::function<double(double, double, double, double, int)> walk =
        [&](double a0, double p0, double a1, double p1, int depth) -> double {
        double d = std::remainder(p1 - p0, 2.0 * std::numbers::pi);
        if (std::abs(d) < 0.9 * std::numbers::pi) return d;
        if (depth > 24)
            throw NonConvergenceError("count_inside: phase jump persisted after refinement");
        double am = 0.5 * (a0 + a1);
        double pm = det_phase(am);
        return walk(a0, p0, am, pm, depth + 1) + walk(am, pm, a1, p1, depth + 1);
    };

    double total = 0.0;
    double prev_angle = 0.0;
    double prev_phase = det_phase(0.0);
    double first_phase = prev_phase;
    for (int k = 1; k <= nodes; ++k) {
        double angle = 2.0 * std::numbers::pi * k / nodes;
        double phase = (k == nodes) ? first_phase : det_phase(angle);
        total += walk(prev_angle, prev_phase, angle, phase, 0);
        prev_angle = angle;
        prev_phase = phase;
    }
    double winding = total / (2.0 * std::numbers::pi);
    long rounded = std::lround(winding);
    if (std::abs(winding - static_cast<double>(rounded)) > 0.2)
        throw NonConvergenceError("count_inside: winding number did not settle on an integer");
    // Each enclosed eigenvalue contributes one positive turn of
    // det(M - z) = prod(lambda_i - z) as z travels counterclockwise.
    return static_cast<int>(rounded);
}

Complex self_energy_integral(const ModelParams& p, Complex z) {
    using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
    Complex rot = std::exp(Complex(0.0, -p.vartheta));
    auto integrand = [&](double k) -> Complex {
        Complex f = form_factor(rot * k, p);
        return 4.0 * std::numbers::pi * k * rot * rot * f * f / (rot * k - z);
    };
    double cap = 16.0 * p.lambda_uv;
    return Quad::integrate(integrand, 0.0, cap, 15, 1e-12);
}

Complex perturbative_resonance(const ModelParams& p) {
    if (p.g == 0.0) return Complex(2.0, 0.0);
    return Complex(2.0, 0.0) - p.g * p.g * self_energy_integral(p, Complex(2.0, 0.0));
}

}  // namespace spinboson
