#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "poincare/errors.hpp"
#include "poincare/fourier.hpp"
#include "poincare/geometry.hpp"
#include "poincare/quadrature.hpp"
#include "poincare/sie.hpp"

namespace poincare::decomposable {

/// Exterior boundary-value problem for a decomposable elliptic system:
/// component fields u_j solve a_j u_xx + 2 b_j u_xy + c_j u_yy = 0 in D⁻ and
/// satisfy P ∂u/∂x + Q ∂u/∂y = f on S.  P, Q, f are finite Fourier tables
/// (smooth by construction).  An R term is accepted in the data model but
/// must be identically zero: the representation used here has no place for
/// it, and guessing one would change the problem.
struct PoincareProblem {
    geometry::CurveParametrization curve;
    geometry::EllipticCoefficients coeffs;
    std::vector<std::vector<FourierTable>> P, Q;  // [row k][column j]
    std::vector<FourierTable> f;
    std::vector<std::vector<FourierTable>> R;  // optional; must be all zero

    int n() const { return coeffs.size(); }

    void validate() const {
        const std::size_t nn = static_cast<std::size_t>(n());
        if (P.size() != nn || Q.size() != nn || f.size() != nn) {
            throw DimensionMismatch("P, Q, f must match the component count");
        }
        for (const auto& row : P) {
            if (row.size() != nn) throw DimensionMismatch("P must be n x n");
        }
        for (const auto& row : Q) {
            if (row.size() != nn) throw DimensionMismatch("Q must be n x n");
        }
        if (!R.empty()) {
            if (R.size() != nn) throw DimensionMismatch("R must be n x n when supplied");
            for (const auto& row : R) {
                if (row.size() != nn) throw DimensionMismatch("R must be n x n when supplied");
                for (const auto& entry : row) {
                    if (!entry.is_zero(0.0)) {
                        throw InvalidProblem(
                            "nonzero R is not supported: the boundary representation carries no R term");
                    }
                }
            }
        }
    }
};

namespace detail_dc {

/// Boundary symbol entry g_kj(θ) = P_kj(θ)·∂z_j/∂x + Q_kj(θ)·∂z_j/∂y: the
/// complex factor multiplying φ_j'(t_j) in row k of the boundary condition.
inline cplx symbol_factor(const PoincareProblem& p, const geometry::CharacteristicMap& map, int k,
                          int j, double theta) {
    return p.P[k][j](theta) * map.dz_dx() + p.Q[k][j](theta) * map.dz_dy();
}

}  // namespace detail_dc

/// Builds the equivalent singular integral system.  Writing the boundary
/// condition through the boundary limit of φ_j'(z_j) = −∫ μ_j/(τ_j−z_j) ds
/// gives, for real densities,
///
///   Σ_j Re[ g_kj(t) πi |t'|/t_j' ] μ_j(t)
///     − Σ_j PV ∫ Re[ g_kj(t) |τ'| / (τ_j − t_j) ] μ_j dθ  =  f_k(t).
///
/// The engine symbols are α_kj = Re[πi G_kj], β_kj = Re[G_kj] with
/// G_kj = g_kj |t'|/t_j'; the smooth kernel K is the exact integrand minus
/// the pure Cauchy singularity already carried by β, with the diagonal taken
/// as the analytic limit.
inline sie::SingularSystem assemble(const PoincareProblem& problem, int N) {
    problem.validate();
    const int n = problem.n();
    const auto& curve = problem.curve;

    std::vector<geometry::CharacteristicMap> maps;
    for (int j = 0; j < n; ++j) maps.emplace_back(problem.coeffs, j);

    sie::SingularSystem sys{curve, quadrature::PeriodicGrid(N), n, {}, {}, {}, {}};

    sys.alpha = [problem, maps, curve, n](double theta) {
        Eigen::MatrixXcd a(n, n);
        const cplx tp = curve.tangent(theta);
        const double speed = std::abs(tp);
        const cplx pi_i(0.0, std::numbers::pi);
        for (int j = 0; j < n; ++j) {
            const cplx tjp = maps[j].apply_linear(tp);
            for (int k = 0; k < n; ++k) {
                const cplx G = detail_dc::symbol_factor(problem, maps[j], k, j, theta) * speed / tjp;
                a(k, j) = (pi_i * G).real();
            }
        }
        return a;
    };
    sys.beta = [problem, maps, curve, n](double theta) {
        Eigen::MatrixXcd b(n, n);
        const cplx tp = curve.tangent(theta);
        const double speed = std::abs(tp);
        for (int j = 0; j < n; ++j) {
            const cplx tjp = maps[j].apply_linear(tp);
            for (int k = 0; k < n; ++k) {
                const cplx G = detail_dc::symbol_factor(problem, maps[j], k, j, theta) * speed / tjp;
                b(k, j) = G.real();
            }
        }
        return b;
    };

    // node caches
    const quadrature::PeriodicGrid& grid = sys.grid;
    std::vector<cplx> t(N), tp(N), tpp(N);
    std::vector<double> speed(N), dspeed(N);
    for (int i = 0; i < N; ++i) {
        const double theta = grid.node(i);
        t[i] = curve.point(theta);
        tp[i] = curve.tangent(theta);
        tpp[i] = curve.second_derivative(theta);
        speed[i] = std::abs(tp[i]);
        dspeed[i] = (tpp[i] * std::conj(tp[i])).real() / speed[i];
    }
    std::vector<std::vector<cplx>> tj(n, std::vector<cplx>(N)), tjp(n, std::vector<cplx>(N)),
        tjpp(n, std::vector<cplx>(N));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < N; ++i) {
            tj[j][i] = maps[j].forward(t[i]);
            tjp[j][i] = maps[j].apply_linear(tp[i]);
            tjpp[j][i] = maps[j].apply_linear(tpp[i]);
        }
    }

    sys.kernel = Eigen::MatrixXcd::Zero(sys.dim(), sys.dim());
    for (int i = 0; i < N; ++i) {
        const double theta_i = grid.node(i);
        const Eigen::MatrixXcd beta_i = sys.beta(theta_i);
        Eigen::MatrixXcd g(n, n);
        for (int k = 0; k < n; ++k) {
            for (int j = 0; j < n; ++j) {
                g(k, j) = detail_dc::symbol_factor(problem, maps[j], k, j, theta_i);
            }
        }
        for (int l = 0; l < N; ++l) {
            Eigen::Ref<Eigen::MatrixXcd> block =
                sys.kernel.block(static_cast<Eigen::Index>(i) * n, static_cast<Eigen::Index>(l) * n,
                                 n, n);
            if (l != i) {
                const cplx b_l = tp[l] / (t[l] - t[i]);
                for (int j = 0; j < n; ++j) {
                    const cplx a_jl = speed[l] / (tj[j][l] - tj[j][i]);
                    for (int k = 0; k < n; ++k) {
                        const cplx r = -(g(k, j) * a_jl).real() + beta_i(k, j) * b_l;
                        block(k, j) = r / tp[l];
                    }
                }
            } else {
                // diagonal limit of the subtracted kernel
                const cplx b_diag = tpp[i] / (2.0 * tp[i]);
                for (int j = 0; j < n; ++j) {
                    const cplx u0 =
                        (dspeed[i] - speed[i] * tjpp[j][i] / (2.0 * tjp[j][i])) / tjp[j][i];
                    for (int k = 0; k < n; ++k) {
                        const cplx r = -(g(k, j) * u0).real() + beta_i(k, j) * b_diag;
                        block(k, j) = r / tp[i];
                    }
                }
            }
        }
    }

    sys.rhs = Eigen::VectorXcd::Zero(sys.dim());
    for (int i = 0; i < N; ++i) {
        for (int k = 0; k < n; ++k) {
            sys.rhs(static_cast<Eigen::Index>(i) * n + k) = problem.f[k](grid.node(i));
        }
    }
    return sys;
}

/// Evaluates one component's field from its boundary density through the
/// logarithmic potential φ_j(z_j) = ∫ ln(1 − z_j/τ_j) μ_j ds.  The branch is
/// tracked continuously around the curve; the secular −iθ part left by the
/// winding of the kernel is integrated exactly through the Fourier series of
/// μ|t'|, so the quadrature stays spectral.  The zero-moment condition makes
/// the value independent of the branch start and keeps the potential bounded.
class VekuaEvaluator {
public:
    VekuaEvaluator(const geometry::CurveParametrization& curve,
                   const geometry::CharacteristicMap& map, quadrature::PeriodicGrid grid,
                   Eigen::VectorXd density)
        : map_(map), grid_(grid), density_(std::move(density)) {
        const int N = grid_.N;
        if (density_.size() != N) throw DimensionMismatch("density length must equal grid size");
        tj_.resize(N);
        tjp_.resize(N);
        g_.resize(N);
        max_speed_ = 0.0;
        for (int i = 0; i < N; ++i) {
            const double theta = grid_.node(i);
            tj_(i) = map_.forward(curve.point(theta));
            tjp_(i) = map_.apply_linear(curve.tangent(theta));
            g_(i) = density_(i) * curve.arc_element(theta);
            max_speed_ = std::max(max_speed_, std::abs(tjp_(i)));
        }
        moment_ = g_.sum() * grid_.weight();
        theta_integral_ = detail::weighted_theta_integral(g_.cast<cplx>());
        // derivative of the contour density μ|t'|/τ_j' for the boundary limit
        rho_.resize(N);
        for (int i = 0; i < N; ++i) rho_(i) = g_(i) / tjp_(i);
        rho_prime_ = detail::spectral_derivative(rho_);

        // φ(∞) = −∫ log(τ_j) μ ds along a continuous branch.  The potential
        // is normalized to the φ(∞) = 0 representative: the boundary data
        // sees only gradients, and this pins the free additive constant the
        // same way a decaying Laurent tail does.
        cplx log_tau = std::log(tj_(0));
        cplx acc = log_tau * g_(0);
        for (int i = 1; i < N; ++i) {
            log_tau += std::log(tj_(i) / tj_(i - 1));
            acc += (log_tau - cplx(0.0, grid_.node(i))) * g_(i);
        }
        phi_infinity_ = -(acc * grid_.weight() + cplx(0.0, 1.0) * theta_integral_);
    }

    double moment() const { return moment_; }
    const Eigen::VectorXd& density() const { return density_; }
    const quadrature::PeriodicGrid& grid() const { return grid_; }

    double guard_distance() const { return 5.0 * grid_.weight() * max_speed_; }

    double distance_mapped(cplx zj) const {
        double d = std::numeric_limits<double>::max();
        for (int i = 0; i < grid_.N; ++i) d = std::min(d, std::abs(zj - tj_(i)));
        return d;
    }

    /// φ_j at a point of the original plane (z gets mapped internally).
    cplx phi(cplx z) const { return phi_mapped(map_.forward(z)); }

    cplx phi_prime(cplx z) const {
        const cplx zj = map_.forward(z);
        if (distance_mapped(zj) < guard_distance()) {
            throw TooCloseToBoundary("field evaluation inside the quadrature guard distance");
        }
        cplx acc = 0.0;
        for (int i = 0; i < grid_.N; ++i) acc -= g_(i) / (tj_(i) - zj);
        return acc * grid_.weight();
    }

    double u(cplx z) const { return phi(z).real(); }

    Eigen::Vector2d gradient(cplx z) const {
        const cplx dp = phi_prime(z);
        return {(dp * map_.dz_dx()).real(), (dp * map_.dz_dy()).real()};
    }

    /// Boundary limit of φ_j' at grid node i (approach from D⁻), by the
    /// half-residue formula and the PV subtraction rule on the image curve.
    cplx boundary_phi_prime(int i) const {
        const int N = grid_.N;
        const cplx pi_i(0.0, std::numbers::pi);
        cplx acc = 0.0;
        for (int l = 0; l < N; ++l) {
            if (l == i) {
                acc += rho_prime_(i);
                continue;
            }
            acc += (rho_(l) - rho_(i)) * tjp_(l) / (tj_(l) - tj_(i));
        }
        const cplx pv = acc * grid_.weight() + rho_(i) * pi_i;
        return pi_i * rho_(i) - pv;
    }

    /// Boundary values of (∂u_j/∂x, ∂u_j/∂y) at grid node i.
    Eigen::Vector2d boundary_gradient(int i) const {
        const cplx dp = boundary_phi_prime(i);
        return {(dp * map_.dz_dx()).real(), (dp * map_.dz_dy()).real()};
    }

private:
    cplx phi_mapped(cplx zj) const {
        if (distance_mapped(zj) < guard_distance()) {
            throw TooCloseToBoundary("field evaluation inside the quadrature guard distance");
        }
        const int N = grid_.N;
        cplx acc = 0.0;
        cplx log_branch = std::log(1.0 - zj / tj_(0));
        cplx h_prev = 1.0 - zj / tj_(0);
        cplx h_first = h_prev;
        for (int i = 0; i < N; ++i) {
            if (i > 0) {
                const cplx h = 1.0 - zj / tj_(i);
                log_branch += std::log(h / h_prev);
                h_prev = h;
            }
            acc += (log_branch + cplx(0.0, grid_.node(i))) * g_(i);
        }
        // closing the loop must come back exactly one sheet lower (the kernel
        // winds −1 around the origin for exterior points)
        const cplx wrap = log_branch + std::log(h_first / h_prev);
        if (std::abs(wrap - std::log(h_first) + cplx(0.0, two_pi)) > 1e-6) {
            throw Error("branch tracking failed in the logarithmic potential");
        }
        return acc * grid_.weight() - cplx(0.0, 1.0) * theta_integral_ - phi_infinity_;
    }

    geometry::CharacteristicMap map_;
    quadrature::PeriodicGrid grid_;
    Eigen::VectorXd density_;
    Eigen::VectorXcd tj_, tjp_;
    Eigen::VectorXd g_;
    Eigen::VectorXcd rho_, rho_prime_;
    double max_speed_ = 0.0;
    double moment_ = 0.0;
    cplx theta_integral_ = 0.0;
    cplx phi_infinity_ = 0.0;
};

/// Solved field: densities plus per-component evaluators and the Noether
/// diagnostics of the solve.
struct FieldSolution {
    geometry::CurveParametrization curve;
    quadrature::PeriodicGrid grid;
    std::vector<VekuaEvaluator> components;
    std::vector<double> moments;
    sie::NoetherDiagnostics diagnostics;

    int n() const { return static_cast<int>(components.size()); }

    double evaluate(int j, cplx z) const { return components.at(j).u(z); }

    Eigen::VectorXd evaluate_all(cplx z) const {
        Eigen::VectorXd u(n());
        for (int j = 0; j < n(); ++j) u(j) = components[j].u(z);
        return u;
    }

    Eigen::Vector2d gradient(int j, cplx z) const { return components.at(j).gradient(z); }
};

/// Reconstructs u_j(z) from densities sampled on the boundary; enforces the
/// zero-moment precondition that keeps the potentials bounded.
inline Eigen::VectorXd vekua_reconstruct(const PoincareProblem& problem,
                                         const quadrature::BoundarySamples& mu, cplx z,
                                         double moment_tol = 1e-6) {
    problem.validate();
    const int n = problem.n();
    if (mu.components != n) throw DimensionMismatch("density components must match the problem");
    Eigen::VectorXd u(n);
    for (int j = 0; j < n; ++j) {
        Eigen::VectorXd density(mu.grid.N);
        for (int i = 0; i < mu.grid.N; ++i) density(i) = mu.at(i, j).real();
        VekuaEvaluator ev(problem.curve, geometry::CharacteristicMap(problem.coeffs, j), mu.grid,
                          density);
        if (std::abs(ev.moment()) > moment_tol) {
            throw MomentViolation("component " + std::to_string(j) +
                                  " density moment = " + std::to_string(ev.moment()));
        }
        u(j) = ev.u(z);
    }
    return u;
}

/// Max-norm residual per component of the boundary condition, evaluated on a
/// refined grid with trigonometrically interpolated densities and the
/// analytic boundary limits of the potentials.
inline Eigen::VectorXd boundary_condition_residual(const PoincareProblem& problem,
                                                   const FieldSolution& field, int refine = 2) {
    const int n = problem.n();
    const int M = field.grid.N * refine;
    const quadrature::PeriodicGrid fine(M);

    std::vector<VekuaEvaluator> fine_eval;
    for (int j = 0; j < n; ++j) {
        const Eigen::VectorXcd dense =
            detail::trig_resample(field.components[j].density().cast<cplx>(), M);
        fine_eval.emplace_back(problem.curve, geometry::CharacteristicMap(problem.coeffs, j), fine,
                               dense.real());
    }

    Eigen::VectorXd worst = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < M; ++i) {
        const double theta = fine.node(i);
        for (int k = 0; k < n; ++k) {
            double r = -problem.f[k](theta);
            for (int j = 0; j < n; ++j) {
                const Eigen::Vector2d grad = fine_eval[j].boundary_gradient(i);
                r += problem.P[k][j](theta) * grad.x() + problem.Q[k][j](theta) * grad.y();
            }
            worst(k) = std::max(worst(k), std::abs(r));
        }
    }
    return worst;
}

enum class PoincareStatus { solvable, unsolvable, not_normal };

struct PoincareReport {
    PoincareStatus status = PoincareStatus::not_normal;
    sie::NoetherDiagnostics diagnostics;
    std::optional<FieldSolution> field;
    double least_squares_residual = 0.0;
    double constraint_residual = 0.0;
};

/// Full pipeline: assemble, symbol check, index, Nyström solve with the
/// per-component zero-moment rows bordered on, then field reconstruction.
/// A non-normal symbol short-circuits to diagnostics only.
inline PoincareReport solve_poincare(const PoincareProblem& problem, int N, double tol = 1e-8) {
    PoincareReport report;
    const int n = problem.n();
    sie::SingularSystem sys = assemble(problem, N);

    report.diagnostics.symbol = sie::symbol_check(sys);
    report.diagnostics.normal = report.diagnostics.symbol.normal;
    if (!report.diagnostics.normal) {
        report.status = PoincareStatus::not_normal;
        return report;
    }
    report.diagnostics.kappa = sie::index(sys);

    const sie::Discretization disc = sie::discretize(sys);
    const Eigen::VectorXd w = sys.node_weights();
    const sie::Nullspaces ns = sie::nullspaces(disc.A, w, n, tol);
    report.diagnostics.l = ns.l;
    report.diagnostics.l_prime = ns.l_prime;
    report.diagnostics.rank_gap = ns.gap;
    report.diagnostics.rank_reliable = ns.reliable;
    report.diagnostics.noether_consistent = (ns.l - ns.l_prime == *report.diagnostics.kappa);

    // bordered zero-moment rows, one per component
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, sys.dim());
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < N; ++i) C(j, static_cast<Eigen::Index>(i) * n + j) = w(i);
    }
    const Eigen::VectorXcd c_rhs = Eigen::VectorXcd::Zero(n);

    sie::Solution sol = sie::solve(sys, disc, ns, tol, &C, &c_rhs);
    report.diagnostics.solvability_residuals = sol.solvability_residuals;
    report.least_squares_residual = sol.least_squares_residual;
    report.constraint_residual = (C * sol.mu).lpNorm<Eigen::Infinity>();

    if (sol.status != sie::SolveStatus::solvable ||
        report.constraint_residual > 100.0 * tol * std::max(1.0, sol.mu.lpNorm<Eigen::Infinity>())) {
        report.status = PoincareStatus::unsolvable;
        return report;
    }

    FieldSolution field{problem.curve, sys.grid, {}, {}, report.diagnostics};
    for (int j = 0; j < n; ++j) {
        Eigen::VectorXd density(N);
        for (int i = 0; i < N; ++i) {
            density(i) = sol.mu(static_cast<Eigen::Index>(i) * n + j).real();
        }
        field.components.emplace_back(problem.curve, geometry::CharacteristicMap(problem.coeffs, j),
                                      sys.grid, density);
        field.moments.push_back(field.components.back().moment());
    }
    report.field = std::move(field);
    report.status = PoincareStatus::solvable;
    return report;
}

}  // namespace poincare::decomposable
