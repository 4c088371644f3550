#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "poincare/sie.hpp"
#include "poincare/verification.hpp"

using namespace poincare;
using namespace poincare::sie;
using geometry::CurveParametrization;
using quadrature::PeriodicGrid;

namespace {
constexpr double kPi = std::numbers::pi;

MatrixFn scalar_fn(const std::function<cplx(double)>& f) {
    return [f](double t) { return Eigen::MatrixXcd::Constant(1, 1, f(t)); };
}

SingularSystem scalar_system(int N, const std::function<cplx(double)>& alpha,
                             const std::function<cplx(double)>& beta,
                             const std::function<cplx(double)>& f) {
    SingularSystem sys{CurveParametrization::unit_circle(), PeriodicGrid(N), 1,
                       scalar_fn(alpha),  scalar_fn(beta),   {},
                       Eigen::VectorXcd::Zero(N)};
    for (int i = 0; i < N; ++i) sys.rhs(i) = f(sys.grid.node(i));
    return sys;
}

// winding of a closed plane curve by dense sampling
int winding_oracle(const std::function<cplx(double)>& g, int samples = 10000) {
    double total = 0.0;
    cplx prev = g(0.0);
    for (int l = 1; l <= samples; ++l) {
        const cplx cur = g(two_pi * (l % samples) / samples);
        total += std::arg(cur / prev);
        prev = cur;
    }
    return static_cast<int>(std::lround(total / two_pi));
}
}  // namespace

TEST_CASE("discretize reference cases", "[sie]") {
    SECTION("alpha = 1, beta = 0, K = 0 gives the identity") {
        auto sys = scalar_system(32, [](double) { return 1.0; }, [](double) { return 0.0; },
                                 [](double) { return 0.0; });
        const auto disc = discretize(sys);
        CHECK((disc.A - Eigen::MatrixXcd::Identity(32, 32)).lpNorm<Eigen::Infinity>() < 1e-14);
    }

    SECTION("pure PV part applied to a constant yields -beta * pi i per row") {
        auto sys = scalar_system(
            64, [](double) { return 0.0; },
            [](double t) { return cplx(1.3 + std::cos(t), 0.4 * std::sin(2.0 * t)); },
            [](double) { return 0.0; });
        const auto disc = discretize(sys);
        const Eigen::VectorXcd row_sums = disc.A * Eigen::VectorXcd::Ones(64);
        for (int i = 0; i < 64; ++i) {
            const cplx beta_i = sys.beta(sys.grid.node(i))(0, 0);
            CHECK(std::abs(row_sums(i) + beta_i * cplx(0.0, kPi)) < 1e-12);
        }
    }

    SECTION("diagonal system solves exactly") {
        auto sys = scalar_system(32, [](double) { return kPi; }, [](double) { return 0.0; },
                                 [](double) { return 1.0; });
        const auto disc = discretize(sys);
        const auto ns = nullspaces(disc.A, sys.node_weights(), 1);
        CHECK(ns.l == 0);
        CHECK(ns.l_prime == 0);
        const auto sol = solve(sys, disc, ns);
        REQUIRE(sol.status == SolveStatus::solvable);
        for (int i = 0; i < 32; ++i) CHECK(std::abs(sol.mu(i) - 1.0 / kPi) < 1e-14);
    }

    SECTION("operator action is linear in the density") {
        auto sys = scalar_system(
            64, [](double t) { return cplx(2.0 + std::sin(t)); },
            [](double t) { return cplx(std::cos(2.0 * t), 0.1); }, [](double) { return 0.0; });
        const auto disc = discretize(sys);
        Eigen::VectorXcd m1(64), m2(64);
        for (int i = 0; i < 64; ++i) {
            const double t = sys.grid.node(i);
            m1(i) = cplx(std::cos(t), std::sin(3.0 * t));
            m2(i) = cplx(1.0, -std::cos(2.0 * t));
        }
        const Eigen::VectorXcd lhs = disc.A * (m1 + m2);
        const Eigen::VectorXcd rhs = disc.A * m1 + disc.A * m2;
        CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() < 1e-12);
    }
}

TEST_CASE("symbol_check fixtures", "[sie]") {
    auto constant = scalar_system(32, [](double) { return kPi; }, [](double) { return 0.0; },
                                  [](double) { return 0.0; });
    const auto sc = symbol_check(constant);
    CHECK(sc.min_det_minus == Catch::Approx(kPi));
    CHECK(sc.min_det_plus == Catch::Approx(kPi));
    CHECK(sc.normal);

    auto rotating = scalar_system(64, [](double t) { return std::cos(t); },
                                  [](double t) { return std::sin(t) / kPi; },
                                  [](double) { return 0.0; });
    const auto sr = symbol_check(rotating);
    CHECK(sr.min_det_minus == Catch::Approx(1.0).margin(1e-12));
    CHECK(sr.min_det_plus == Catch::Approx(1.0).margin(1e-12));
    CHECK(sr.normal);

    auto zero = scalar_system(32, [](double) { return 0.0; }, [](double) { return 0.0; },
                              [](double) { return 0.0; });
    CHECK_FALSE(symbol_check(zero).normal);
}

TEST_CASE("index on reference symbols", "[sie]") {
    CHECK(index(scalar_system(32, [](double) { return kPi; }, [](double) { return 0.0; },
                              [](double) { return 0.0; })) == 0);
    CHECK(index(scalar_system(64, [](double t) { return std::cos(t); },
                              [](double t) { return std::sin(t) / kPi; },
                              [](double) { return 0.0; })) == 2);
    CHECK(index(scalar_system(64, [](double t) { return std::cos(t); },
                              [](double t) { return -std::sin(t) / kPi; },
                              [](double) { return 0.0; })) == -2);
    CHECK_THROWS_AS(index(scalar_system(32, [](double) { return 0.0; },
                                        [](double) { return 0.0; }, [](double) { return 0.0; })),
                    NotNormal);
}

TEST_CASE("index equals the winding difference of the symbol factors", "[sie]") {
    // α = (g₊ + g₋)/2, β = (g₊ − g₋)/(2πi) with nonvanishing trigonometric
    // factors g± = Π (e^{iθ} − a_k) · e^{-imθ}, |a_k| < 1.
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> amp(0.0, 0.6), ang(0.0, two_pi);
    std::uniform_int_distribution<int> nroots(0, 2), shift(0, 1);

    for (int trial = 0; trial < 12; ++trial) {
        auto make_factor = [&](int roots, int m) {
            std::vector<cplx> a;
            for (int k = 0; k < roots; ++k) a.push_back(std::polar(amp(rng), ang(rng)));
            return std::function<cplx(double)>([a, m](double t) {
                cplx v = std::polar(1.0, -m * t);
                for (const cplx& root : a) v *= (std::polar(1.0, t) - root);
                return v;
            });
        };
        const auto gp = make_factor(nroots(rng), shift(rng));
        const auto gm = make_factor(nroots(rng), shift(rng));

        auto sys = scalar_system(
            64, [&](double t) { return 0.5 * (gp(t) + gm(t)); },
            [&](double t) { return (gp(t) - gm(t)) / (2.0 * kPi * cplx(0.0, 1.0)); },
            [](double) { return 0.0; });
        REQUIRE(symbol_check(sys).normal);
        CHECK(index(sys) == winding_oracle(gp) - winding_oracle(gm));
    }
}

TEST_CASE("nullspaces toy fixtures", "[sie]") {
    const Eigen::VectorXd w4 = Eigen::VectorXd::Ones(4);
    const auto id = nullspaces(Eigen::MatrixXcd::Identity(4, 4), w4, 1);
    CHECK(id.l == 0);
    CHECK(id.l_prime == 0);

    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(3, 3);
    d(0, 0) = 1.0;
    d(1, 1) = 1.0;
    const auto ns = nullspaces(d, Eigen::VectorXd::Ones(3), 1);
    CHECK(ns.l == 1);
    CHECK(ns.l_prime == 1);
    REQUIRE(ns.kernel.cols() == 1);
    CHECK(std::abs(std::abs(ns.kernel(2, 0)) - 1.0) < 1e-14);
}

TEST_CASE("Noether counts across grid sizes for the synthetic symbols", "[sie]") {
    for (const int N : {64, 128, 256}) {
        auto sysp = scalar_system(N, [](double t) { return std::cos(t); },
                                  [](double t) { return std::sin(t) / kPi; },
                                  [](double) { return 0.0; });
        const auto discp = discretize(sysp);
        const auto nsp = nullspaces(discp.A, sysp.node_weights(), 1, 1e-8);
        CHECK(nsp.l - nsp.l_prime == 2);
        CHECK(nsp.l == 2);

        auto sysm = scalar_system(N, [](double t) { return std::cos(t); },
                                  [](double t) { return -std::sin(t) / kPi; },
                                  [](double) { return 0.0; });
        const auto discm = discretize(sysm);
        const auto nsm = nullspaces(discm.A, sysm.node_weights(), 1, 1e-8);
        CHECK(nsm.l - nsm.l_prime == -2);
        CHECK(nsm.l_prime == 2);
    }
}

TEST_CASE("kernel of the kappa = 2 system matches the analytic null family", "[sie]") {
    const int N = 128;
    auto sys = scalar_system(N, [](double t) { return std::cos(t); },
                             [](double t) { return std::sin(t) / kPi; },
                             [](double) { return 0.0; });
    const auto disc = discretize(sys);
    Eigen::VectorXcd k1(N), k2(N);
    for (int i = 0; i < N; ++i) {
        const cplx t = sys.curve.point(sys.grid.node(i));
        k1(i) = 1.0 / t - t;
        k2(i) = 1.0 / (t * t) - 1.0;
    }
    CHECK((disc.A * k1).lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK((disc.A * k2).lpNorm<Eigen::Infinity>() < 1e-12);

    // homogeneous solve returns the two-dimensional basis and zero particular
    const auto ns = nullspaces(disc.A, sys.node_weights(), 1);
    const auto sol = solve(sys, disc, ns);
    REQUIRE(sol.status == SolveStatus::solvable);
    CHECK(sol.mu.lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK(sol.kernel_basis.cols() == 2);
}

TEST_CASE("solvability conditions gate the kappa = -2 system", "[sie]") {
    const int N = 64;
    auto sys = scalar_system(N, [](double t) { return std::cos(t); },
                             [](double t) { return -std::sin(t) / kPi; },
                             [](double) { return 0.0; });
    const auto disc = discretize(sys);
    const auto ns = nullspaces(disc.A, sys.node_weights(), 1);
    REQUIRE(ns.l_prime == 2);

    SECTION("generic data is rejected with nonzero residuals") {
        SingularSystem bad = sys;
        for (int i = 0; i < N; ++i) bad.rhs(i) = std::cos(bad.grid.node(i));
        const auto disc_bad = discretize(bad);
        const auto sol = solve(bad, disc_bad, ns);
        CHECK(sol.status == SolveStatus::unsolvable);
        REQUIRE(sol.solvability_residuals.size() == 2);
        double worst = 0.0;
        for (const cplx r : sol.solvability_residuals) worst = std::max(worst, std::abs(r));
        CHECK(worst > 1e-3);
        // brute least squares agrees that no solution exists
        const Eigen::VectorXcd lsq = verify::brute_solve(disc_bad.A, disc_bad.rhs);
        CHECK((disc_bad.A * lsq - disc_bad.rhs).lpNorm<Eigen::Infinity>() > 1e-3);
    }

    SECTION("data in the range is accepted and solved to tolerance") {
        Eigen::VectorXcd smooth(N);
        for (int i = 0; i < N; ++i) {
            const double t = sys.grid.node(i);
            smooth(i) = cplx(std::cos(2.0 * t), 0.3 * std::sin(t));
        }
        SingularSystem ok = sys;
        ok.rhs = disc.A * smooth;
        const auto disc_ok = discretize(ok);
        const auto sol = solve(ok, disc_ok, ns);
        REQUIRE(sol.status == SolveStatus::solvable);
        CHECK(sol.least_squares_residual <= 1e-8);
        const Eigen::VectorXcd lsq = verify::brute_solve(disc_ok.A, disc_ok.rhs);
        CHECK((sol.mu - lsq).lpNorm<Eigen::Infinity>() < 1e-10);
    }
}

TEST_CASE("engine and brute minimum-norm solutions agree", "[sie]") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);

    // random well-conditioned 40x40 complex system
    Eigen::MatrixXcd A(40, 40);
    Eigen::VectorXcd b(40);
    for (int i = 0; i < 40; ++i) {
        b(i) = cplx(uni(rng), uni(rng));
        for (int j = 0; j < 40; ++j) A(i, j) = cplx(uni(rng), uni(rng));
    }
    A += 10.0 * Eigen::MatrixXcd::Identity(40, 40);

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXcd x_svd = svd.solve(b);
    const Eigen::VectorXcd x_cod = verify::brute_solve(A, b);
    CHECK((x_svd - x_cod).lpNorm<Eigen::Infinity>() < 1e-10);

    // suite systems at N = 64
    auto neumann_like = scalar_system(64, [](double) { return kPi; }, [](double) { return 0.0; },
                                      [](double t) { return std::cos(t); });
    const auto disc = discretize(neumann_like);
    const auto ns = nullspaces(disc.A, neumann_like.node_weights(), 1);
    const auto sol = solve(neumann_like, disc, ns);
    REQUIRE(sol.status == SolveStatus::solvable);
    CHECK((sol.mu - verify::brute_solve(disc.A, disc.rhs)).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("diagnose aggregates the Noether data", "[sie]") {
    auto sys = scalar_system(64, [](double t) { return std::cos(t); },
                             [](double t) { return std::sin(t) / kPi; },
                             [](double) { return 0.0; });
    const auto d = diagnose(sys);
    CHECK(d.normal);
    REQUIRE(d.kappa.has_value());
    CHECK(*d.kappa == 2);
    CHECK(d.l == 2);
    CHECK(d.l_prime == 0);
    CHECK(d.noether_consistent);
    CHECK(d.rank_reliable);

    auto zero = scalar_system(32, [](double) { return 0.0; }, [](double) { return 0.0; },
                              [](double) { return 0.0; });
    const auto dz = diagnose(zero);
    CHECK_FALSE(dz.normal);
    CHECK_FALSE(dz.kappa.has_value());
}
