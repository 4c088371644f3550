#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "poincare/errors.hpp"
#include "poincare/fourier.hpp"
#include "poincare/geometry.hpp"

namespace poincare::quadrature {

/// Uniform 2π-periodic grid θ_i = 2πi/N with equal weights 2π/N.  The
/// trapezoidal rule on this grid is spectrally accurate for smooth periodic
/// integrands, which is what every integral formula here runs on.
struct PeriodicGrid {
    int N;

    explicit PeriodicGrid(int n) : N(n) {
        if (n < 8 || n % 2 != 0) {
            throw DimensionMismatch("PeriodicGrid requires an even node count >= 8");
        }
    }

    double node(int i) const { return two_pi * i / N; }
    double weight() const { return two_pi / N; }
};

/// Vector data sampled on a PeriodicGrid, node-major: values[i*n + c] is
/// component c at node i.
struct BoundarySamples {
    PeriodicGrid grid;
    int components;
    Eigen::VectorXcd values;

    BoundarySamples(PeriodicGrid g, int n_comp)
        : grid(g), components(n_comp), values(Eigen::VectorXcd::Zero(g.N * n_comp)) {
        if (n_comp < 1) throw DimensionMismatch("BoundarySamples needs >= 1 component");
    }

    static BoundarySamples sample(PeriodicGrid g, const std::function<cplx(double)>& fn) {
        BoundarySamples s(g, 1);
        for (int i = 0; i < g.N; ++i) s.values(i) = fn(g.node(i));
        return s;
    }

    static BoundarySamples sample_vector(PeriodicGrid g, int n_comp,
                                         const std::function<Eigen::VectorXcd(double)>& fn) {
        BoundarySamples s(g, n_comp);
        for (int i = 0; i < g.N; ++i) {
            const Eigen::VectorXcd v = fn(g.node(i));
            if (v.size() != n_comp) throw DimensionMismatch("sampled vector has wrong length");
            s.values.segment(static_cast<Eigen::Index>(i) * n_comp, n_comp) = v;
        }
        return s;
    }

    cplx& at(int node, int comp) { return values(static_cast<Eigen::Index>(node) * components + comp); }
    cplx at(int node, int comp) const {
        return values(static_cast<Eigen::Index>(node) * components + comp);
    }

    Eigen::VectorXcd component(int comp) const {
        Eigen::VectorXcd v(grid.N);
        for (int i = 0; i < grid.N; ++i) v(i) = at(i, comp);
        return v;
    }
};

/// Trapezoidal value of ∫_0^{2π} f dθ per component.
inline Eigen::VectorXcd integrate_periodic(const BoundarySamples& samples) {
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(samples.components);
    for (int i = 0; i < samples.grid.N; ++i) {
        for (int c = 0; c < samples.components; ++c) acc(c) += samples.at(i, c);
    }
    return acc * samples.grid.weight();
}

inline cplx integrate_periodic(const PeriodicGrid& grid, const Eigen::VectorXcd& values) {
    return values.sum() * grid.weight();
}

/// Principal-value Cauchy integral PV ∫_S μ(τ)/(τ − t_i) dτ at a grid node,
/// realized by singularity subtraction:
///
///   PV ∫ μ/(τ−t) dτ = ∫ (μ(τ) − μ(t)) / (τ−t) dτ + μ(t)·πi,
///
/// where πi is the exact Plemelj constant of a smooth closed curve and the
/// regularized integrand is smooth, with diagonal limit μ'(θ_i) obtained by
/// spectral differentiation of the samples.
inline cplx pv_cauchy_apply(const geometry::CurveParametrization& curve, const PeriodicGrid& grid,
                            const Eigen::VectorXcd& density, int target) {
    if (density.size() != grid.N) throw DimensionMismatch("density length must equal grid size");
    const cplx ti = curve.point(grid.node(target));
    const cplx mu_i = density(target);
    const Eigen::VectorXcd dmu = detail::spectral_derivative(density);

    cplx acc = 0.0;
    for (int l = 0; l < grid.N; ++l) {
        if (l == target) {
            acc += dmu(target);
            continue;
        }
        const double theta = grid.node(l);
        acc += (density(l) - mu_i) * curve.tangent(theta) / (curve.point(theta) - ti);
    }
    return acc * grid.weight() + mu_i * cplx(0.0, std::numbers::pi);
}

enum class OffBoundaryKernel {
    cauchy,   // 1/(τ − z)
    schwarz,  // (τ + z) / (τ (τ − z))
};

inline double distance_to_curve(const geometry::CurveParametrization& curve,
                                const PeriodicGrid& grid, cplx z) {
    double d = std::numeric_limits<double>::max();
    for (int i = 0; i < grid.N; ++i) d = std::min(d, std::abs(z - curve.point(grid.node(i))));
    return d;
}

inline double near_boundary_guard(const geometry::CurveParametrization& curve,
                                  const PeriodicGrid& grid) {
    return 5.0 * grid.weight() * curve.max_tangent_norm();
}

/// Plain quadrature of ∮ μ(τ) k(τ, z) dτ for z off the curve.  Accuracy
/// degrades near S; points inside the guard distance are refused.
inline cplx cauchy_offboundary(const geometry::CurveParametrization& curve,
                               const PeriodicGrid& grid, const Eigen::VectorXcd& density, cplx z,
                               OffBoundaryKernel kernel = OffBoundaryKernel::cauchy) {
    if (density.size() != grid.N) throw DimensionMismatch("density length must equal grid size");
    if (distance_to_curve(curve, grid, z) < near_boundary_guard(curve, grid)) {
        throw TooCloseToBoundary("evaluation point is inside the quadrature guard distance");
    }
    cplx acc = 0.0;
    for (int l = 0; l < grid.N; ++l) {
        const double theta = grid.node(l);
        const cplx tau = curve.point(theta);
        cplx k;
        switch (kernel) {
            case OffBoundaryKernel::cauchy: k = 1.0 / (tau - z); break;
            case OffBoundaryKernel::schwarz: k = (tau + z) / (tau * (tau - z)); break;
        }
        acc += density(l) * k * curve.tangent(theta);
    }
    return acc * grid.weight();
}

}  // namespace poincare::quadrature
