#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <random>

#include "poincare/geometry.hpp"

using namespace poincare;
using namespace poincare::geometry;

namespace {
constexpr double kPi = std::numbers::pi;

EllipticCoefficients random_admissible(std::mt19937& rng, int n) {
    std::uniform_real_distribution<double> pos(0.2, 4.0);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> a(n), b(n), c(n);
    for (int j = 0; j < n; ++j) {
        a[j] = pos(rng);
        c[j] = pos(rng);
        // keep b^2 strictly below a c
        b[j] = uni(rng) * 0.9 * std::sqrt(a[j] * c[j]);
    }
    return EllipticCoefficients(a, b, c);
}
}  // namespace

TEST_CASE("curve_point on the unit circle and a trigonometric ellipse", "[geometry]") {
    const auto circle = CurveParametrization::unit_circle();
    CHECK(std::abs(circle.point(0.0) - cplx(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(circle.point(kPi / 2) - cplx(0.0, 1.0)) < 1e-15);

    const auto ell = CurveParametrization::ellipse(2.0, 1.0);
    CHECK(std::abs(ell.point(kPi) - cplx(-2.0, 0.0)) < 1e-14);
}

TEST_CASE("curve_frame produces the exterior inner normal", "[geometry]") {
    const auto circle = CurveParametrization::unit_circle();
    const auto f0 = curve_frame(circle, 0.0);
    CHECK(std::abs(f0.tangent - cplx(0.0, 1.0)) < 1e-15);
    CHECK(f0.normal.isApprox(Eigen::Vector2d(1.0, 0.0), 1e-15));

    const auto f1 = curve_frame(circle, kPi / 2);
    CHECK(std::abs(f1.tangent - cplx(-1.0, 0.0)) < 1e-15);
    CHECK(f1.normal.isApprox(Eigen::Vector2d(0.0, 1.0), 1e-15));

    const auto ell = CurveParametrization::ellipse(2.0, 1.0);
    CHECK(curve_frame(ell, 0.0).normal.isApprox(Eigen::Vector2d(1.0, 0.0), 1e-14));

    // unit circle: ν(θ) = (cos θ, sin θ) exactly, and ν ⊥ t'
    for (int i = 0; i < 64; ++i) {
        const double theta = two_pi * i / 64;
        const auto f = curve_frame(circle, theta);
        CHECK(std::abs(f.normal.x() - std::cos(theta)) < 1e-15);
        CHECK(std::abs(f.normal.y() - std::sin(theta)) < 1e-15);
        const double dot = f.normal.x() * f.tangent.real() + f.normal.y() * f.tangent.imag();
        CHECK(std::abs(dot) < 1e-14);
    }
}

TEST_CASE("degenerate parametrizations are rejected", "[geometry]") {
    // cardioid t(θ) = (1 + cos θ) e^{iθ}: cusp with t'(π) = 0
    Eigen::VectorXd xc(3);
    xc << 0.5, 1.0, 0.5;  // cosθ + (1+cos2θ)/2
    Eigen::VectorXd ys(2);
    ys << 1.0, 0.5;  // sinθ + sin2θ/2
    CHECK_THROWS_AS(
        CurveParametrization::trigonometric(FourierTable(xc, Eigen::VectorXd()),
                                            FourierTable(Eigen::VectorXd::Zero(1), ys)),
        DegenerateCurve);

    // clockwise circle: orientation violation
    CHECK_THROWS_AS(CurveParametrization::trigonometric(FourierTable::harmonic_cos(1, 1.0),
                                                        FourierTable::harmonic_sin(1, -1.0)),
                    DegenerateCurve);
}

TEST_CASE("ellipticity_check on reference systems", "[geometry]") {
    // 2x2 system with A = I, 2B = [[0,-2],[2,0]], C = -I:
    // det(Aλ² + 2Bλ + C) = (λ²+1)², positive on the real axis (value 4 at λ=1).
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd B(2, 2);
    B << 0.0, -1.0, 1.0, 0.0;
    Eigen::MatrixXd C = -Eigen::MatrixXd::Identity(2, 2);
    const auto r = ellipticity_check(A, B, C);
    CHECK(r.elliptic);
    CHECK_FALSE(r.witness.has_value());
    const double at_one = (A + 2.0 * B + C).determinant();
    CHECK(at_one == Catch::Approx(4.0).margin(1e-12));

    const auto laplace = ellipticity_check(Eigen::MatrixXd::Identity(1, 1),
                                           Eigen::MatrixXd::Zero(1, 1),
                                           Eigen::MatrixXd::Identity(1, 1));
    CHECK(laplace.elliptic);

    // a = b = c = 1: (λ+1)² has the real root -1
    const auto degen = ellipticity_check(Eigen::MatrixXd::Identity(1, 1),
                                         Eigen::MatrixXd::Identity(1, 1),
                                         Eigen::MatrixXd::Identity(1, 1));
    CHECK_FALSE(degen.elliptic);
    REQUIRE(degen.witness.has_value());
    CHECK(*degen.witness == Catch::Approx(-1.0).margin(1e-8));
}

TEST_CASE("ellipticity_check property over admissible decomposable triples", "[geometry]") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + trial % 3;
        const auto coeffs = random_admissible(rng, n);
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n), B = A, C = A;
        for (int j = 0; j < n; ++j) {
            A(j, j) = coeffs.a(j);
            B(j, j) = coeffs.b(j);
            C(j, j) = coeffs.c(j);
        }
        CHECK(ellipticity_check(A, B, C).elliptic);
    }
    // scalar failure when a c - b² <= 0
    Eigen::MatrixXd a1(1, 1), b1(1, 1), c1(1, 1);
    a1 << 1.0;
    b1 << 2.0;
    c1 << 1.0;
    CHECK_FALSE(ellipticity_check(a1, b1, c1).elliptic);
}

TEST_CASE("characteristic map formulas and round trip", "[geometry]") {
    const auto identity = CharacteristicMap(EllipticCoefficients::laplace(), 0);
    CHECK(identity.is_identity());
    CHECK(std::abs(identity.forward(cplx(3.0, 4.0)) - cplx(3.0, 4.0)) < 1e-15);

    // a=1, b=1, c=2 → δ=1, y_j = y − x
    const auto m1 = CharacteristicMap(EllipticCoefficients({1.0}, {1.0}, {2.0}), 0);
    CHECK(std::abs(m1.forward(cplx(1.0, 1.0)) - cplx(1.0, 0.0)) < 1e-15);

    // a=4, b=0, c=1 → δ=2, x_j = x/2, y_j = y
    const auto m2 = CharacteristicMap(EllipticCoefficients({4.0}, {0.0}, {1.0}), 0);
    CHECK(std::abs(m2.forward(cplx(1.0, 1.0)) - cplx(0.5, 1.0)) < 1e-15);

    std::mt19937 rng(11);
    std::uniform_real_distribution<double> pt(-10.0, 10.0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto coeffs = random_admissible(rng, 2);
        for (int j = 0; j < 2; ++j) {
            const CharacteristicMap map(coeffs, j);
            for (int i = 0; i < 500; ++i) {
                const cplx z(pt(rng), pt(rng));
                const cplx back = map.inverse(map.forward(z));
                CHECK(std::abs(back - z) <= 1e-12 * std::max(1.0, std::abs(z)));
            }
        }
    }
}

TEST_CASE("characteristic map Jacobian equals 1/delta by finite differences", "[geometry]") {
    std::mt19937 rng(13);
    for (int trial = 0; trial < 25; ++trial) {
        const auto coeffs = random_admissible(rng, 1);
        const CharacteristicMap map(coeffs, 0);
        const double h = 1e-6;
        const cplx z(0.3, -0.7);
        const cplx dx = (map.forward(z + h) - map.forward(z - h)) / (2.0 * h);
        const cplx dy = (map.forward(z + cplx(0, h)) - map.forward(z - cplx(0, h))) / (2.0 * h);
        const double jac = dx.real() * dy.imag() - dx.imag() * dy.real();
        CHECK(std::abs(jac - map.jacobian()) < 1e-9);
        CHECK(std::abs(map.jacobian() - 1.0 / coeffs.delta(0)) < 1e-12);
    }
}

TEST_CASE("image_curve maps the circle to the expected ellipse", "[geometry]") {
    const auto circle = CurveParametrization::unit_circle();

    const auto ident = image_curve(circle, CharacteristicMap(EllipticCoefficients::laplace(), 0));
    for (int i = 0; i < 32; ++i) {
        const double theta = two_pi * i / 32;
        CHECK(std::abs(ident.point(theta) - circle.point(theta)) < 1e-15);
    }

    // a=4, b=0, c=1: (cos θ, sin θ) ↦ (cos θ / 2, sin θ)
    const auto m = CharacteristicMap(EllipticCoefficients({4.0}, {0.0}, {1.0}), 0);
    const auto img = image_curve(circle, m);
    CHECK(std::abs(img.point(0.0) - cplx(0.5, 0.0)) < 1e-15);
    CHECK(std::abs(img.point(kPi / 2) - cplx(0.0, 1.0)) < 1e-15);

    // arc element of the image equals |affine(t'(θ))|
    std::mt19937 rng(17);
    const auto coeffs = random_admissible(rng, 1);
    const CharacteristicMap rm(coeffs, 0);
    const auto rimg = image_curve(circle, rm);
    for (int i = 0; i < 16; ++i) {
        const double theta = two_pi * i / 16 + 0.05;
        CHECK(rimg.arc_element(theta) ==
              Catch::Approx(std::abs(rm.apply_linear(circle.tangent(theta)))).margin(1e-14));
    }
}
