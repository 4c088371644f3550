#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "poincare/errors.hpp"
#include "poincare/fourier.hpp"

namespace poincare::geometry {

/// Closed boundary curve t(θ) = x(θ) + i y(θ), 2π-periodic, given by finite
/// trigonometric tables.  Orientation is counterclockwise: walking along S
/// keeps the bounded region on the left and the exterior domain D⁻ on the
/// right-hand normal side.
class CurveParametrization {
public:
    enum class Kind { unit_circle, trigonometric };

    static CurveParametrization unit_circle() {
        CurveParametrization c;
        c.kind_ = Kind::unit_circle;
        c.x_ = FourierTable::harmonic_cos(1, 1.0);
        c.y_ = FourierTable::harmonic_sin(1, 1.0);
        c.finalize();
        return c;
    }

    static CurveParametrization trigonometric(FourierTable x, FourierTable y) {
        CurveParametrization c;
        c.kind_ = Kind::trigonometric;
        c.x_ = std::move(x);
        c.y_ = std::move(y);
        c.finalize();
        return c;
    }

    /// Axis-aligned ellipse x = rx cos θ, y = ry sin θ.
    static CurveParametrization ellipse(double rx, double ry) {
        return trigonometric(FourierTable::harmonic_cos(1, rx), FourierTable::harmonic_sin(1, ry));
    }

    Kind kind() const { return kind_; }
    const FourierTable& x_table() const { return x_; }
    const FourierTable& y_table() const { return y_; }

    cplx point(double theta) const {
        if (kind_ == Kind::unit_circle) return {std::cos(theta), std::sin(theta)};
        return {x_(theta), y_(theta)};
    }

    cplx tangent(double theta) const { return {x_.derivative(theta), y_.derivative(theta)}; }

    cplx second_derivative(double theta) const {
        return {x_.second_derivative(theta), y_.second_derivative(theta)};
    }

    double arc_element(double theta) const { return std::abs(tangent(theta)); }

    double max_tangent_norm() const { return max_tangent_; }
    double min_tangent_norm() const { return min_tangent_; }

private:
    void finalize() {
        // Probe for degeneracy and orientation; finite tables make both
        // checks reliable on a modest grid.
        const int probes = 512;
        min_tangent_ = std::numeric_limits<double>::max();
        max_tangent_ = 0.0;
        double signed_area = 0.0;
        for (int i = 0; i < probes; ++i) {
            const double theta = two_pi * i / probes;
            const double speed = arc_element(theta);
            min_tangent_ = std::min(min_tangent_, speed);
            max_tangent_ = std::max(max_tangent_, speed);
            signed_area += 0.5 * (x_(theta) * y_.derivative(theta) - y_(theta) * x_.derivative(theta));
        }
        signed_area *= two_pi / probes;
        if (min_tangent_ < 1e-10) {
            throw DegenerateCurve("curve parametrization has |t'(θ)| below tolerance");
        }
        if (signed_area <= 0.0) {
            throw DegenerateCurve("curve must be parametrized counterclockwise");
        }
        const cplx gap = point(0.0) - point(two_pi);
        if (std::abs(gap) > 1e-12) {
            throw DegenerateCurve("curve is not closed: t(0) != t(2π)");
        }
    }

    Kind kind_ = Kind::unit_circle;
    FourierTable x_, y_;
    double min_tangent_ = 0.0, max_tangent_ = 0.0;
};

struct Frame {
    cplx tangent;            // t'(θ)
    double arc_element;      // |t'(θ)|
    Eigen::Vector2d normal;  // unit inner normal relative to D⁻ (points away
                             // from the bounded region)
};

/// Tangent, arc element and the inner normal of the exterior domain.  For a
/// counterclockwise curve the normal (y', -x')/|t'| points into D⁻.
inline Frame curve_frame(const CurveParametrization& curve, double theta) {
    const cplx tp = curve.tangent(theta);
    const double speed = std::abs(tp);
    if (speed < 1e-12) throw DegenerateCurve("curve tangent vanishes at requested angle");
    Frame f;
    f.tangent = tp;
    f.arc_element = speed;
    f.normal = Eigen::Vector2d(tp.imag() / speed, -tp.real() / speed);
    return f;
}

inline cplx curve_point(const CurveParametrization& curve, double theta) {
    return curve.point(theta);
}

/// Per-component constants (a_j, b_j, c_j) of a decomposable elliptic system,
/// with δ_j = sqrt(a_j c_j − b_j²).  Construction rejects coefficient sets
/// whose quadratic forms are not positive definite.
class EllipticCoefficients {
public:
    EllipticCoefficients(std::vector<double> a, std::vector<double> b, std::vector<double> c)
        : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
        if (a_.size() != b_.size() || a_.size() != c_.size() || a_.empty()) {
            throw DimensionMismatch("coefficient lists must have equal nonzero length");
        }
        delta_.resize(a_.size());
        for (std::size_t j = 0; j < a_.size(); ++j) {
            const double disc = a_[j] * c_[j] - b_[j] * b_[j];
            if (a_[j] <= 0.0 || disc <= 0.0) {
                throw NotElliptic("component " + std::to_string(j) +
                                  " violates a_j > 0, a_j c_j - b_j^2 > 0");
            }
            delta_[j] = std::sqrt(disc);
        }
    }

    static EllipticCoefficients laplace(int n = 1) {
        return EllipticCoefficients(std::vector<double>(n, 1.0), std::vector<double>(n, 0.0),
                                    std::vector<double>(n, 1.0));
    }

    int size() const { return static_cast<int>(a_.size()); }
    double a(int j) const { return a_.at(j); }
    double b(int j) const { return b_.at(j); }
    double c(int j) const { return c_.at(j); }
    double delta(int j) const { return delta_.at(j); }

private:
    std::vector<double> a_, b_, c_, delta_;
};

/// Affine change of variables z ↦ z_j that reduces component j to the
/// Laplace equation:
///     x_j = x/√a_j,   y_j = (√a_j/δ_j) y − (b_j/(δ_j √a_j)) x.
/// In complex form z_j = p z + q z̄ with p = (c+d)/2, q = (c−d)/2, where
/// c = 1/√a − i b/(δ√a) and d = √a/δ.  The Jacobian determinant is 1/δ_j.
class CharacteristicMap {
public:
    CharacteristicMap(const EllipticCoefficients& coeffs, int j)
        : index_(j), delta_(coeffs.delta(j)) {
        const double a = coeffs.a(j), b = coeffs.b(j);
        const double sa = std::sqrt(a);
        c_factor_ = cplx(1.0 / sa, -b / (delta_ * sa));
        d_factor_ = sa / delta_;
        p_ = 0.5 * (c_factor_ + d_factor_);
        q_ = 0.5 * (c_factor_ - d_factor_);
    }

    int component() const { return index_; }

    cplx forward(cplx z) const { return p_ * z + q_ * std::conj(z); }

    cplx inverse(cplx zj) const {
        // Solve p z + q z̄ = zj; the determinant |p|² − |q|² equals the
        // Jacobian 1/δ > 0, so the map is always invertible.
        const double det = std::norm(p_) - std::norm(q_);
        return (std::conj(p_) * zj - q_ * std::conj(zj)) / det;
    }

    /// Push-forward of tangent vectors (the linear part acting on dz).
    cplx apply_linear(cplx v) const { return p_ * v + q_ * std::conj(v); }

    /// ∂z_j/∂x — the complex factor appearing in the boundary symbols.
    cplx dz_dx() const { return c_factor_; }
    /// ∂z_j/∂y.
    cplx dz_dy() const { return cplx(0.0, d_factor_); }

    double jacobian() const { return 1.0 / delta_; }

    bool is_identity() const {
        return std::abs(p_ - 1.0) < 1e-15 && std::abs(q_) < 1e-15;
    }

private:
    int index_;
    double delta_;
    cplx c_factor_;
    double d_factor_;
    cplx p_, q_;
};

inline cplx characteristic_forward(const CharacteristicMap& map, cplx z) { return map.forward(z); }
inline cplx characteristic_inverse(const CharacteristicMap& map, cplx zj) { return map.inverse(zj); }

struct EllipticityResult {
    bool elliptic = false;
    std::optional<double> witness;  // a real root of det(Aλ² + 2Bλ + C) if one exists
};

/// Decides ellipticity of A u_xx + 2B u_xy + C u_yy = 0 by root-finding on
/// det(Aλ² + 2Bλ + C) as a polynomial in λ (degree ≤ 2n): the system is
/// elliptic iff the determinant has no real root.
inline EllipticityResult ellipticity_check(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                           const Eigen::MatrixXd& C) {
    const Eigen::Index n = A.rows();
    if (A.cols() != n || B.rows() != n || B.cols() != n || C.rows() != n || C.cols() != n) {
        throw DimensionMismatch("ellipticity_check requires square matrices of equal size");
    }
    const int deg = static_cast<int>(2 * n);
    // Determinant values on deg+1 integer nodes, then a Vandermonde solve for
    // the polynomial coefficients.
    Eigen::VectorXd nodes(deg + 1), values(deg + 1);
    for (int i = 0; i <= deg; ++i) {
        const double lam = static_cast<double>(i - n);
        nodes(i) = lam;
        values(i) = (A * lam * lam + 2.0 * B * lam + C).determinant();
    }
    Eigen::MatrixXd vand(deg + 1, deg + 1);
    for (int i = 0; i <= deg; ++i) {
        double p = 1.0;
        for (int k = 0; k <= deg; ++k) {
            vand(i, k) = p;
            p *= nodes(i);
        }
    }
    Eigen::VectorXd coeffs = vand.fullPivLu().solve(values);

    int top = deg;
    const double scale = coeffs.lpNorm<Eigen::Infinity>();
    if (scale == 0.0) return {false, 0.0};  // det ≡ 0: degenerate, not elliptic
    while (top > 0 && std::abs(coeffs(top)) < 1e-12 * scale) --top;
    if (top == 0) return {true, std::nullopt};  // nonzero constant

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(top, top);
    for (int i = 1; i < top; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < top; ++i) companion(i, top - 1) = -coeffs(i) / coeffs(top);
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion.transpose());

    EllipticityResult result;
    result.elliptic = true;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const cplx root = es.eigenvalues()(i);
        if (std::abs(root.imag()) < 1e-10 * std::max(1.0, std::abs(root))) {
            const double lam = root.real();
            const double val = (A * lam * lam + 2.0 * B * lam + C).determinant();
            if (std::abs(val) < 1e-8 * std::max(1.0, scale)) {
                result.elliptic = false;
                result.witness = lam;
                break;
            }
        }
    }
    return result;
}

/// Image of the boundary under a characteristic map: points, tangents and
/// arc elements of S_j = z_j(S), orientation preserved (Jacobian 1/δ_j > 0).
class MappedCurve {
public:
    MappedCurve(const CurveParametrization& curve, const CharacteristicMap& map)
        : curve_(curve), map_(map) {
        const int probes = 512;
        max_tangent_ = 0.0;
        for (int i = 0; i < probes; ++i) {
            max_tangent_ = std::max(max_tangent_, std::abs(tangent(two_pi * i / probes)));
        }
    }

    cplx point(double theta) const { return map_.forward(curve_.point(theta)); }
    cplx tangent(double theta) const { return map_.apply_linear(curve_.tangent(theta)); }
    cplx second_derivative(double theta) const {
        return map_.apply_linear(curve_.second_derivative(theta));
    }
    double arc_element(double theta) const { return std::abs(tangent(theta)); }
    double max_tangent_norm() const { return max_tangent_; }
    const CharacteristicMap& map() const { return map_; }

private:
    CurveParametrization curve_;
    CharacteristicMap map_;
    double max_tangent_ = 0.0;
};

inline MappedCurve image_curve(const CurveParametrization& curve, const CharacteristicMap& map) {
    return MappedCurve(curve, map);
}

}  // namespace poincare::geometry
