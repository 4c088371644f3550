#pragma once

#include <vector>

#include "poincare/decomposable.hpp"
#include "poincare/verification.hpp"

namespace poincare::fixtures {

/// Scalar Laplace exterior Neumann problem on the unit circle with data
/// f = −cos θ, the normal derivative of Re(1/z) on |z| = 1.  The equivalent
/// integral equation has the constant symbol α ≡ π, β ≡ 0, the density is
/// −cos θ / π and the recovered field is exactly Re(1/z).
inline decomposable::PoincareProblem laplace_neumann_problem() {
    decomposable::PoincareProblem p{
        geometry::CurveParametrization::unit_circle(),
        geometry::EllipticCoefficients::laplace(),
        {{FourierTable::harmonic_cos(1, 1.0)}},
        {{FourierTable::harmonic_sin(1, 1.0)}},
        {FourierTable::harmonic_cos(1, -1.0)},
        {}};
    return p;
}

/// Frozen two-component manufactured case: coefficients (1,0,1) and (1,1,2),
/// diagonally dominant P, Q with fixed degree ≤ 2 perturbations, and Laurent
/// seeds φ_j = 1/z_j + 1/(2 z_j²).
inline verify::ManufacturedCase manufactured_case() {
    auto table = [](double c0, double c1, double c2, double s1, double s2) {
        Eigen::VectorXd cosc(3), sinc(2);
        cosc << c0, c1, c2;
        sinc << s1, s2;
        return FourierTable(cosc, sinc);
    };

    std::vector<std::vector<FourierTable>> P(2), Q(2);
    P[0] = {table(0.00, 1.00, 0.08, -0.03, 0.00), table(0.05, 0.00, 0.00, 0.00, 0.04)};
    P[1] = {table(-0.06, 0.05, 0.00, 0.00, 0.00), table(0.02, 1.00, 0.00, 0.00, -0.07)};
    Q[0] = {table(0.00, 0.00, 0.00, 1.00, 0.05), table(-0.04, 0.03, 0.00, 0.00, 0.00)};
    Q[1] = {table(0.02, 0.00, 0.00, 0.05, 0.00), table(0.00, 0.00, 0.06, 1.00, 0.00)};

    return verify::make_manufactured(
        geometry::EllipticCoefficients({1.0, 1.0}, {0.0, 1.0}, {1.0, 2.0}), P, Q,
        {{cplx(1.0, 0.0), cplx(0.5, 0.0)}, {cplx(1.0, 0.0), cplx(0.5, 0.0)}});
}

/// The manufactured case wrapped as a solvable problem file payload.
inline decomposable::PoincareProblem manufactured_problem(int data_modes = 60) {
    const auto mc = manufactured_case();
    const auto curve = geometry::CurveParametrization::unit_circle();
    decomposable::PoincareProblem p{curve, mc.coeffs, mc.P, mc.Q,
                                    mc.boundary_tables(curve, data_modes), {}};
    return p;
}

}  // namespace poincare::fixtures
