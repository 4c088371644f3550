#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "poincare/errors.hpp"
#include "poincare/fourier.hpp"
#include "poincare/geometry.hpp"
#include "poincare/quadrature.hpp"

namespace poincare::bitsadze {

/// Analytic function on the exterior of the unit circle, bounded at
/// infinity.  Two evaluable representations:
///   - finite Laurent tail  Σ_{m≥0} c_m z^{-m}
///   - boundary integral    scale · ∮ k(τ, z) ρ(τ) dτ  (Cauchy or Schwarz kernel)
/// Both provide first derivatives; the Laurent form also evaluates on the
/// circle itself, which the boundary-residual certificates need.
class ExteriorAnalyticFunction {
public:
    enum class Kind { laurent, cauchy_integral, schwarz_integral };

    static ExteriorAnalyticFunction laurent(std::vector<cplx> tail) {
        ExteriorAnalyticFunction f;
        f.kind_ = Kind::laurent;
        f.tail_ = std::move(tail);
        if (f.tail_.empty()) f.tail_.push_back(0.0);
        return f;
    }

    static ExteriorAnalyticFunction zero() { return laurent({cplx(0.0, 0.0)}); }

    static ExteriorAnalyticFunction integral(Kind kind, geometry::CurveParametrization curve,
                                             quadrature::PeriodicGrid grid,
                                             Eigen::VectorXcd density, cplx scale) {
        if (kind == Kind::laurent) throw Error("integral() expects an integral kind");
        ExteriorAnalyticFunction f;
        f.kind_ = kind;
        f.curve_ = std::move(curve);
        f.grid_ = grid;
        f.density_ = std::move(density);
        f.scale_ = scale;
        return f;
    }

    Kind kind() const { return kind_; }
    bool is_laurent() const { return kind_ == Kind::laurent; }

    const std::vector<cplx>& tail() const {
        if (!is_laurent()) throw Error("tail() requires the Laurent representation");
        return tail_;
    }

    cplx value(cplx z) const {
        switch (kind_) {
            case Kind::laurent: {
                cplx acc = tail_[0], zpow = z;
                for (std::size_t m = 1; m < tail_.size(); ++m) {
                    acc += tail_[m] / zpow;
                    zpow *= z;
                }
                return acc;
            }
            case Kind::cauchy_integral:
                return scale_ * quadrature::cauchy_offboundary(
                                    *curve_, *grid_, density_, z,
                                    quadrature::OffBoundaryKernel::cauchy);
            case Kind::schwarz_integral:
                return scale_ * quadrature::cauchy_offboundary(
                                    *curve_, *grid_, density_, z,
                                    quadrature::OffBoundaryKernel::schwarz);
        }
        return 0.0;
    }

    cplx derivative(cplx z) const {
        switch (kind_) {
            case Kind::laurent: {
                cplx acc = 0.0, zpow = z * z;
                for (std::size_t m = 1; m < tail_.size(); ++m) {
                    acc -= static_cast<double>(m) * tail_[m] / zpow;
                    zpow *= z;
                }
                return acc;
            }
            case Kind::cauchy_integral:
            case Kind::schwarz_integral: {
                // d/dz 1/(τ-z) = 1/(τ-z)²;  d/dz (τ+z)/(τ(τ-z)) = 2/(τ-z)²
                if (quadrature::distance_to_curve(*curve_, *grid_, z) <
                    quadrature::near_boundary_guard(*curve_, *grid_)) {
                    throw TooCloseToBoundary("derivative evaluation inside the guard distance");
                }
                const double factor = (kind_ == Kind::schwarz_integral) ? 2.0 : 1.0;
                cplx acc = 0.0;
                for (int l = 0; l < grid_->N; ++l) {
                    const double theta = grid_->node(l);
                    const cplx tau = curve_->point(theta);
                    acc += density_(l) / ((tau - z) * (tau - z)) * curve_->tangent(theta);
                }
                return scale_ * factor * acc * grid_->weight();
            }
        }
        return 0.0;
    }

    /// Derivative as a new Laurent tail (Laurent representation only).
    ExteriorAnalyticFunction derivative_function() const {
        const auto& t = tail();
        std::vector<cplx> d(t.size() + 1, 0.0);
        for (std::size_t m = 1; m < t.size(); ++m) d[m + 1] = -static_cast<double>(m) * t[m];
        return laurent(std::move(d));
    }

private:
    Kind kind_ = Kind::laurent;
    std::vector<cplx> tail_;
    std::optional<geometry::CurveParametrization> curve_;
    std::optional<quadrature::PeriodicGrid> grid_;
    Eigen::VectorXcd density_;
    cplx scale_ = 1.0;
};

/// Solution field w(z) = z̄ φ(z) + ψ(z) + const of the second-order system
/// equivalent to ∂²w/∂z̄² = 0, with u₁ = Re w, u₂ = Im w.  When ψ had to drop
/// a z^{-1} term of ψ' during antidifferentiation (no single-valued bounded
/// antiderivative exists), the exact ψ' is kept separately so derivative
/// certificates stay exact, and the dropped coefficient is recorded.
struct BitsadzeSolution {
    ExteriorAnalyticFunction phi = ExteriorAnalyticFunction::zero();
    ExteriorAnalyticFunction psi = ExteriorAnalyticFunction::zero();
    std::optional<ExteriorAnalyticFunction> psi_derivative;
    cplx constant = 0.0;
    cplx log_coefficient = 0.0;

    cplx w(cplx z) const { return std::conj(z) * phi.value(z) + psi.value(z) + constant; }

    cplx psi_prime(cplx z) const {
        return psi_derivative ? psi_derivative->value(z) : psi.derivative(z);
    }

    cplx dw_dz(cplx z) const { return std::conj(z) * phi.derivative(z) + psi_prime(z); }
    cplx dw_dzbar(cplx z) const { return phi.value(z); }

    cplx wx(cplx z) const { return dw_dz(z) + dw_dzbar(z); }
    cplx wy(cplx z) const { return cplx(0.0, 1.0) * (dw_dz(z) - dw_dzbar(z)); }

    Eigen::Vector2d u(cplx z) const {
        const cplx v = w(z);
        return {v.real(), v.imag()};
    }

    /// Rows: (∂u₁/∂x, ∂u₁/∂y), (∂u₂/∂x, ∂u₂/∂y).
    Eigen::Matrix2d gradient(cplx z) const {
        const cplx gx = wx(z), gy = wy(z);
        Eigen::Matrix2d g;
        g << gx.real(), gy.real(), gx.imag(), gy.imag();
        return g;
    }

    BitsadzeSolution with_constant(cplx c) const {
        BitsadzeSolution s = *this;
        s.constant = c;
        return s;
    }
};

enum class PresetKind { dirichlet, neumann, special_neumann, problem6 };

/// The boundary matrices of the four reference problems on the unit circle.
struct BoundaryMatrixPreset {
    PresetKind kind;
    std::string name;

    Eigen::Matrix2d P(double theta) const {
        Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
        switch (kind) {
            case PresetKind::dirichlet: break;
            case PresetKind::neumann: m = std::cos(theta) * Eigen::Matrix2d::Identity(); break;
            case PresetKind::special_neumann: m(1, 0) = 1.0; break;
            case PresetKind::problem6: m = Eigen::Matrix2d::Identity(); break;
        }
        return m;
    }

    Eigen::Matrix2d Q(double theta) const {
        Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
        switch (kind) {
            case PresetKind::dirichlet: break;
            case PresetKind::neumann: m = std::sin(theta) * Eigen::Matrix2d::Identity(); break;
            case PresetKind::special_neumann: m(1, 1) = -1.0; break;
            case PresetKind::problem6:
                m(0, 1) = -1.0;
                m(1, 0) = -1.0;
                break;
        }
        return m;
    }

    Eigen::Matrix2d R(double) const {
        Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
        switch (kind) {
            case PresetKind::dirichlet: m = Eigen::Matrix2d::Identity(); break;
            case PresetKind::special_neumann: m(0, 0) = 1.0; break;
            default: break;
        }
        return m;
    }
};

inline BoundaryMatrixPreset preset(PresetKind kind) {
    switch (kind) {
        case PresetKind::dirichlet: return {kind, "dirichlet"};
        case PresetKind::neumann: return {kind, "neumann"};
        case PresetKind::special_neumann: return {kind, "special_neumann"};
        case PresetKind::problem6: return {kind, "problem6"};
    }
    throw Error("unknown preset");
}

inline BoundaryMatrixPreset preset(const std::string& name) {
    if (name == "dirichlet") return preset(PresetKind::dirichlet);
    if (name == "neumann") return preset(PresetKind::neumann);
    if (name == "special_neumann") return preset(PresetKind::special_neumann);
    if (name == "problem6") return preset(PresetKind::problem6);
    throw InvalidProblem("unknown preset name: " + name);
}

inline cplx det_P_plus_iQ(const Eigen::Matrix2d& P, const Eigen::Matrix2d& Q) {
    const Eigen::Matrix2cd m = P.cast<cplx>() + cplx(0.0, 1.0) * Q.cast<cplx>();
    return m.determinant();
}

inline cplx det_P_plus_iQ(const BoundaryMatrixPreset& pre, double theta) {
    return det_P_plus_iQ(pre.P(theta), pre.Q(theta));
}

/// ω_k = z̄ z^{-k} − z^{-(k+1)}, k ≥ 1: vanishes identically on |z| = 1 and is
/// bounded in D⁻ — one member of the infinite null family of the homogeneous
/// Dirichlet problem.
inline BitsadzeSolution dirichlet_null_element(int k) {
    if (k < 1) throw InvalidOrder("dirichlet null elements need k >= 1");
    std::vector<cplx> phi(k + 1, 0.0), psi(k + 2, 0.0);
    phi[k] = 1.0;
    psi[k + 1] = -1.0;
    BitsadzeSolution s;
    s.phi = ExteriorAnalyticFunction::laurent(std::move(phi));
    s.psi = ExteriorAnalyticFunction::laurent(std::move(psi));
    return s;
}

/// ω_0 = 1 and ω_k = z̄ z^{-k} − ((k−1)/(k+1)) z^{-(k+1)}, k ≥ 1: the null
/// family of the homogeneous Neumann problem (radial derivative of both
/// components vanishes on |z| = 1).
inline BitsadzeSolution neumann_null_element(int k) {
    if (k < 0) throw InvalidOrder("neumann null elements need k >= 0");
    BitsadzeSolution s;
    if (k == 0) {
        s.psi = ExteriorAnalyticFunction::laurent({cplx(1.0, 0.0)});
        return s;
    }
    std::vector<cplx> phi(k + 1, 0.0), psi(k + 2, 0.0);
    phi[k] = 1.0;
    psi[k + 1] = -static_cast<double>(k - 1) / static_cast<double>(k + 1);
    s.phi = ExteriorAnalyticFunction::laurent(std::move(phi));
    s.psi = ExteriorAnalyticFunction::laurent(std::move(psi));
    return s;
}

namespace detail_bz {

/// Fourier coefficients f̂(m) = (1/2π)∫ f e^{-imθ} dθ of real samples.
inline Eigen::VectorXcd fourier_modes(const Eigen::VectorXcd& samples) {
    return poincare::detail::dft(samples);
}

inline cplx mode(const Eigen::VectorXcd& coeffs, int m) {
    return poincare::detail::dft_mode(coeffs, m);
}

}  // namespace detail_bz

/// Solves the boundary problem u₁ = f₁, ∂u₁/∂x − ∂u₂/∂y = f₂ on |t| = 1 by
/// the explicit integral representation; requires ∫f₂ dθ = 0.  The boundary
/// integrals are evaluated through their Laurent expansions (term-wise exact
/// for trigonometric data):
///   φ(z)  = Σ_{m≥1} conj(f̂₂(m)) z^{-m}
///   ψ(z)  = −φ(z)/z + 2 Σ_{m≥1} conj(f̂₁(m)) z^{-m} + mean(f₁) + iK.
inline BitsadzeSolution solve_special_neumann(const quadrature::BoundarySamples& f1,
                                              const quadrature::BoundarySamples& f2, double K) {
    if (f1.grid.N != f2.grid.N || f1.components != 1 || f2.components != 1) {
        throw DimensionMismatch("solve_special_neumann expects matching scalar samples");
    }
    const int n = f1.grid.N;
    const double m2 = quadrature::integrate_periodic(f2)(0).real();
    if (std::abs(m2) > 1e-10) throw SolvabilityViolated("f2 moment", m2);

    const Eigen::VectorXcd c1 = detail_bz::fourier_modes(f1.values);
    const Eigen::VectorXcd c2 = detail_bz::fourier_modes(f2.values);
    const int modes = n / 2 - 1;

    std::vector<cplx> phi(modes + 1, 0.0);
    for (int m = 1; m <= modes; ++m) phi[m] = std::conj(detail_bz::mode(c2, m));

    std::vector<cplx> psi(modes + 2, 0.0);
    psi[0] = detail_bz::mode(c1, 0) + cplx(0.0, K);
    for (int m = 1; m <= modes; ++m) psi[m] += 2.0 * std::conj(detail_bz::mode(c1, m));
    for (int m = 1; m <= modes; ++m) psi[m + 1] -= phi[m];

    BitsadzeSolution s;
    s.phi = ExteriorAnalyticFunction::laurent(std::move(phi));
    s.psi = ExteriorAnalyticFunction::laurent(std::move(psi));
    return s;
}

/// Solves 2Re φ(t) = f₁, 2Im[t̄ φ'(t) + ψ'(t)] = f₂ on |t| = 1 in the class
/// vanishing at infinity; solvable iff both data means vanish ("Eq. 9" for
/// f₁, "Eq. 11" for f₂).  ψ is recovered from ψ' by term-wise
/// antidifferentiation with ψ(∞) = 0; a nonzero z^{-1} coefficient of ψ'
/// cannot be antidifferentiated single-valuedly and is recorded as
/// log_coefficient while the exact ψ' is retained for all derivative-level
/// certificates.  The solution carries an arbitrary additive constant.
inline BitsadzeSolution solve_problem6(const quadrature::BoundarySamples& f1,
                                       const quadrature::BoundarySamples& f2) {
    if (f1.grid.N != f2.grid.N || f1.components != 1 || f2.components != 1) {
        throw DimensionMismatch("solve_problem6 expects matching scalar samples");
    }
    const int n = f1.grid.N;
    const double m1 = quadrature::integrate_periodic(f1)(0).real();
    if (std::abs(m1) > 1e-10) throw SolvabilityViolated("Eq. 9", m1);
    const double m2 = quadrature::integrate_periodic(f2)(0).real();
    if (std::abs(m2) > 1e-10) throw SolvabilityViolated("Eq. 11", m2);

    const Eigen::VectorXcd c1 = detail_bz::fourier_modes(f1.values);
    const Eigen::VectorXcd c2 = detail_bz::fourier_modes(f2.values);
    const int modes = n / 2 - 1;

    std::vector<cplx> phi(modes + 1, 0.0);
    for (int m = 1; m <= modes; ++m) phi[m] = std::conj(detail_bz::mode(c1, m));

    // ψ'(z) = −φ'(z)/z + i Σ_{m≥1} conj(f̂₂(m)) z^{-m}  (+·m₂ terms ≈ 0)
    std::vector<cplx> psi_d(modes + 3, 0.0);
    psi_d[0] = cplx(0.0, m2 / (4.0 * std::numbers::pi));
    for (int m = 1; m <= modes; ++m) psi_d[m] += cplx(0.0, 1.0) * std::conj(detail_bz::mode(c2, m));
    for (int m = 1; m <= modes; ++m) psi_d[m + 2] += static_cast<double>(m) * phi[m];

    BitsadzeSolution s;
    s.phi = ExteriorAnalyticFunction::laurent(std::move(phi));
    s.log_coefficient = psi_d[1];

    std::vector<cplx> psi(psi_d.size() - 1, 0.0);
    for (std::size_t m = 2; m < psi_d.size(); ++m) {
        psi[m - 1] = psi_d[m] / (1.0 - static_cast<double>(m));
    }
    s.psi = ExteriorAnalyticFunction::laurent(std::move(psi));
    s.psi_derivative = ExteriorAnalyticFunction::laurent(std::move(psi_d));
    return s;
}

using MatrixFn = std::function<Eigen::Matrix2d(double)>;
using DataFn = std::function<Eigen::Vector2d(double)>;

/// Max-norm boundary residual per component of P u_x + Q u_y + R u − f,
/// sampled on the grid with the solution's analytic derivatives.
inline Eigen::Vector2d boundary_residual(const BitsadzeSolution& sol, const MatrixFn& P,
                                         const MatrixFn& Q, const MatrixFn& R, const DataFn& f,
                                         const quadrature::PeriodicGrid& grid) {
    Eigen::Vector2d worst = Eigen::Vector2d::Zero();
    for (int i = 0; i < grid.N; ++i) {
        const double theta = grid.node(i);
        const cplx t(std::cos(theta), std::sin(theta));
        const Eigen::Matrix2d g = sol.gradient(t);
        const Eigen::Vector2d ux(g(0, 0), g(1, 0));
        const Eigen::Vector2d uy(g(0, 1), g(1, 1));
        const Eigen::Vector2d r =
            P(theta) * ux + Q(theta) * uy + R(theta) * sol.u(t) - f(theta);
        worst = worst.cwiseMax(r.cwiseAbs());
    }
    return worst;
}

inline Eigen::Vector2d boundary_residual(const BitsadzeSolution& sol,
                                         const BoundaryMatrixPreset& pre, const DataFn& f,
                                         const quadrature::PeriodicGrid& grid) {
    return boundary_residual(
        sol, [&](double t) { return pre.P(t); }, [&](double t) { return pre.Q(t); },
        [&](double t) { return pre.R(t); }, f, grid);
}

}  // namespace poincare::bitsadze
