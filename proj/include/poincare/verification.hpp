#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "poincare/errors.hpp"
#include "poincare/fourier.hpp"
#include "poincare/geometry.hpp"
#include "poincare/quadrature.hpp"

namespace poincare::verify {

using VectorField = std::function<Eigen::VectorXd(cplx)>;
using ScalarField = std::function<double(cplx)>;

/// Residual of a_j u_xx + 2 b_j u_xy + c_j u_yy per component by central
/// second differences.  When the raw residual lands in the gray zone between
/// discretization error and a genuine violation, it is refined once by
/// Richardson extrapolation at h/2.
inline Eigen::VectorXd fd_pde_residual(const VectorField& field,
                                       const geometry::EllipticCoefficients& coeffs, cplx point,
                                       double h,
                                       const geometry::CurveParametrization* curve = nullptr,
                                       const quadrature::PeriodicGrid* grid = nullptr) {
    if (h < 1e-6 || h > 1e-3) throw Error("fd_pde_residual step must lie in [1e-6, 1e-3]");
    if (curve != nullptr && grid != nullptr &&
        quadrature::distance_to_curve(*curve, *grid, point) <= 4.0 * h) {
        throw StencilCrossesBoundary("stencil closer than 4h to the boundary");
    }

    auto residual_at = [&](double step) -> Eigen::VectorXd {
        const Eigen::VectorXd c = field(point);
        const Eigen::VectorXd xp = field(point + step), xm = field(point - step);
        const Eigen::VectorXd yp = field(point + cplx(0, step)), ym = field(point - cplx(0, step));
        const Eigen::VectorXd pp = field(point + cplx(step, step)),
                              pm = field(point + cplx(step, -step)),
                              mp = field(point + cplx(-step, step)),
                              mm = field(point + cplx(-step, -step));
        const Eigen::VectorXd uxx = (xp - 2.0 * c + xm) / (step * step);
        const Eigen::VectorXd uyy = (yp - 2.0 * c + ym) / (step * step);
        const Eigen::VectorXd uxy = (pp - pm - mp + mm) / (4.0 * step * step);
        Eigen::VectorXd r(c.size());
        for (Eigen::Index j = 0; j < c.size(); ++j) {
            const int jj = static_cast<int>(j) % coeffs.size();
            r(j) = coeffs.a(jj) * uxx(j) + 2.0 * coeffs.b(jj) * uxy(j) + coeffs.c(jj) * uyy(j);
        }
        return r;
    };

    Eigen::VectorXd r = residual_at(h);
    const double mag = r.lpNorm<Eigen::Infinity>();
    if (mag > 1e-6 && mag < 1e-4) {
        // Truncation error shrinks under extrapolation, rounding noise grows
        // with 1/h²; keep whichever estimate is smaller.  A genuine PDE
        // violation is stable under both and survives either way.
        const Eigen::VectorXd refined = (4.0 * residual_at(h / 2.0) - r) / 3.0;
        if (refined.lpNorm<Eigen::Infinity>() < mag) r = refined;
    }
    return r;
}

/// Central first difference along a unit direction.
inline double fd_directional(const ScalarField& field, cplx point, Eigen::Vector2d direction,
                             double h) {
    direction.normalize();
    const cplx step(direction.x() * h, direction.y() * h);
    return (field(point + step) - field(point - step)) / (2.0 * h);
}

/// Reference minimum-norm least-squares solve via a rank-revealing complete
/// orthogonal decomposition.  Used only as an oracle against the production
/// SVD path, so the two routes stay algorithmically independent.
inline Eigen::VectorXcd brute_solve(const Eigen::MatrixXcd& matrix, const Eigen::VectorXcd& rhs,
                                    double threshold = 1e-10) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(matrix.rows(), matrix.cols());
    cod.setThreshold(threshold);
    cod.compute(matrix);
    return cod.solve(rhs);
}

/// An exactly-known solution of a decomposable system: per-component Laurent
/// seeds φ_j(z_j) = Σ_m seed[m] z_j^{-(m+1)}, the fields u_j = Re φ_j(z_j),
/// their gradients through the affine maps, and boundary data assembled for
/// given P, Q tables.
struct ManufacturedCase {
    geometry::EllipticCoefficients coeffs;
    std::vector<std::vector<cplx>> seeds;  // seeds[j][m] multiplies z_j^{-(m+1)}
    std::vector<std::vector<FourierTable>> P, Q;
    std::vector<geometry::CharacteristicMap> maps;

    int n() const { return coeffs.size(); }

    cplx phi(int j, cplx zj) const {
        cplx acc = 0.0, zpow = zj;
        for (const cplx& c : seeds[j]) {
            acc += c / zpow;
            zpow *= zj;
        }
        return acc;
    }

    cplx phi_prime(int j, cplx zj) const {
        cplx acc = 0.0, zpow = zj * zj;
        for (std::size_t m = 0; m < seeds[j].size(); ++m) {
            acc -= seeds[j][m] * static_cast<double>(m + 1) / zpow;
            zpow *= zj;
        }
        return acc;
    }

    double exact_u(int j, cplx z) const { return phi(j, maps[j].forward(z)).real(); }

    Eigen::Vector2d exact_gradient(int j, cplx z) const {
        const cplx dp = phi_prime(j, maps[j].forward(z));
        return {(dp * maps[j].dz_dx()).real(), (dp * maps[j].dz_dy()).real()};
    }

    Eigen::VectorXd exact_field(cplx z) const {
        Eigen::VectorXd u(n());
        for (int j = 0; j < n(); ++j) u(j) = exact_u(j, z);
        return u;
    }

    /// Boundary data f_k(θ) = Σ_j P_kj ∂u_j/∂x + Q_kj ∂u_j/∂y on the curve.
    Eigen::VectorXd boundary_data(const geometry::CurveParametrization& curve, double theta) const {
        const cplx t = curve.point(theta);
        Eigen::VectorXd f = Eigen::VectorXd::Zero(n());
        for (int k = 0; k < n(); ++k) {
            for (int j = 0; j < n(); ++j) {
                const Eigen::Vector2d g = exact_gradient(j, t);
                f(k) += P[k][j](theta) * g.x() + Q[k][j](theta) * g.y();
            }
        }
        return f;
    }

    /// Fourier tables of the boundary data, fitted from a fine sample.  The
    /// data is analytic, so the coefficients decay geometrically and a
    /// moderate mode count reaches machine precision.
    std::vector<FourierTable> boundary_tables(const geometry::CurveParametrization& curve,
                                              int modes = 64) const {
        const int m = 4 * modes;
        std::vector<FourierTable> tables;
        for (int k = 0; k < n(); ++k) {
            Eigen::VectorXcd samples(m);
            for (int l = 0; l < m; ++l) {
                samples(l) = boundary_data(curve, two_pi * l / m)(k);
            }
            const Eigen::VectorXcd coef = detail::dft(samples);
            Eigen::VectorXd cosc = Eigen::VectorXd::Zero(modes + 1);
            Eigen::VectorXd sinc = Eigen::VectorXd::Zero(modes);
            cosc(0) = coef(0).real();
            for (int k2 = 1; k2 <= modes; ++k2) {
                const cplx c = detail::dft_mode(coef, k2);
                cosc(k2) = 2.0 * c.real();
                sinc(k2 - 1) = -2.0 * c.imag();
            }
            tables.emplace_back(cosc, sinc);
        }
        return tables;
    }
};

inline ManufacturedCase make_manufactured(geometry::EllipticCoefficients coeffs,
                                          std::vector<std::vector<FourierTable>> P,
                                          std::vector<std::vector<FourierTable>> Q,
                                          std::vector<std::vector<cplx>> seeds) {
    ManufacturedCase mc{std::move(coeffs), std::move(seeds), std::move(P), std::move(Q), {}};
    const int n = mc.coeffs.size();
    if (static_cast<int>(mc.seeds.size()) != n || static_cast<int>(mc.P.size()) != n ||
        static_cast<int>(mc.Q.size()) != n) {
        throw DimensionMismatch("manufactured case needs n seeds and n x n boundary tables");
    }
    for (int j = 0; j < n; ++j) mc.maps.emplace_back(mc.coeffs, j);
    return mc;
}

}  // namespace poincare::verify
