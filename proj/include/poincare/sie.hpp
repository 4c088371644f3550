#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "poincare/errors.hpp"
#include "poincare/fourier.hpp"
#include "poincare/geometry.hpp"
#include "poincare/quadrature.hpp"

namespace poincare::sie {

using MatrixFn = std::function<Eigen::MatrixXcd(double)>;

/// Dominant-plus-compact singular integral system on a closed curve:
///
///   T μ = α(t) μ(t) − β(t) · PV ∫_S μ(τ)/(τ−t) dτ + ∫_S K(t,τ) μ(τ) dτ = f(t).
///
/// α, β are supplied as symbol functions of θ so the index computation can
/// refine its grid; the smooth kernel K is tabulated per node pair (block
/// (i,j) holds K(θ_i, θ_j); an empty matrix means K ≡ 0); f is stacked
/// node-major.
struct SingularSystem {
    geometry::CurveParametrization curve;
    quadrature::PeriodicGrid grid;
    int n = 1;
    MatrixFn alpha;
    MatrixFn beta;
    Eigen::MatrixXcd kernel;
    Eigen::VectorXcd rhs;

    Eigen::Index dim() const { return static_cast<Eigen::Index>(n) * grid.N; }

    /// w·|t'(θ_i)| per node: the arc-length quadrature weights defining the
    /// inner product used for the adjoint.
    Eigen::VectorXd node_weights() const {
        Eigen::VectorXd w(grid.N);
        for (int i = 0; i < grid.N; ++i) w(i) = grid.weight() * curve.arc_element(grid.node(i));
        return w;
    }
};

struct Discretization {
    Eigen::MatrixXcd A;
    Eigen::VectorXcd rhs;
};

/// Nyström matrix of the system.  The PV operator is discretized by the
/// subtraction rule of the quadrature module, applied row-wise: the
/// regularized integrand gets the trapezoidal weights, the diagonal carries
/// the spectral differentiation matrix, and the Plemelj constant πi lands on
/// the target node.
inline Discretization discretize(const SingularSystem& sys) {
    const int N = sys.grid.N, n = sys.n;
    const double w = sys.grid.weight();
    const Eigen::MatrixXd D = detail::diff_matrix(N);

    std::vector<cplx> point(N), tangent(N);
    for (int i = 0; i < N; ++i) {
        point[i] = sys.curve.point(sys.grid.node(i));
        tangent[i] = sys.curve.tangent(sys.grid.node(i));
    }

    Discretization out;
    out.A = Eigen::MatrixXcd::Zero(sys.dim(), sys.dim());
    out.rhs = sys.rhs;

    const bool has_kernel = sys.kernel.size() > 0;
    if (has_kernel && (sys.kernel.rows() != sys.dim() || sys.kernel.cols() != sys.dim())) {
        throw DimensionMismatch("kernel table must be (nN) x (nN)");
    }

    for (int i = 0; i < N; ++i) {
        const Eigen::MatrixXcd alpha_i = sys.alpha(sys.grid.node(i));
        const Eigen::MatrixXcd beta_i = sys.beta(sys.grid.node(i));
        if (alpha_i.rows() != n || alpha_i.cols() != n || beta_i.rows() != n || beta_i.cols() != n) {
            throw DimensionMismatch("symbol matrices must be n x n");
        }

        // scalar PV coefficients s_{il}: PV ≈ Σ_l s_{il} μ_l
        Eigen::VectorXcd s = Eigen::VectorXcd::Zero(N);
        cplx diag = cplx(0.0, std::numbers::pi);
        for (int l = 0; l < N; ++l) {
            if (l == i) continue;
            const cplx c = w * tangent[l] / (point[l] - point[i]);
            s(l) = c + w * D(i, l);
            diag -= c;
        }
        s(i) = diag;

        for (int l = 0; l < N; ++l) {
            Eigen::Ref<Eigen::MatrixXcd> block =
                out.A.block(static_cast<Eigen::Index>(i) * n, static_cast<Eigen::Index>(l) * n, n, n);
            if (l == i) block += alpha_i;
            block -= beta_i * s(l);
            if (has_kernel) {
                block += w * tangent[l] *
                         sys.kernel.block(static_cast<Eigen::Index>(i) * n,
                                          static_cast<Eigen::Index>(l) * n, n, n);
            }
        }
    }
    return out;
}

struct SymbolCheck {
    double min_det_minus = 0.0;  // min over nodes of |det(α − πiβ)|
    double min_det_plus = 0.0;   // min over nodes of |det(α + πiβ)|
    bool normal = false;
};

inline SymbolCheck symbol_check(const SingularSystem& sys, double tol = 1e-10) {
    SymbolCheck sc;
    sc.min_det_minus = std::numeric_limits<double>::max();
    sc.min_det_plus = sc.min_det_minus;
    const cplx pi_i(0.0, std::numbers::pi);
    for (int i = 0; i < sys.grid.N; ++i) {
        const double theta = sys.grid.node(i);
        const Eigen::MatrixXcd a = sys.alpha(theta), b = sys.beta(theta);
        sc.min_det_minus = std::min(sc.min_det_minus, std::abs((a - pi_i * b).determinant()));
        sc.min_det_plus = std::min(sc.min_det_plus, std::abs((a + pi_i * b).determinant()));
    }
    sc.normal = sc.min_det_minus > tol && sc.min_det_plus > tol;
    return sc;
}

/// Index κ = winding number of g(θ) = det(α + iπβ)/det(α − iπβ), computed by
/// unwrapped phase increments.  The grid doubles (up to 8×) until every
/// increment is below π/2, so the result is an exact integer.
inline int index(const SingularSystem& sys) {
    if (!symbol_check(sys).normal) throw NotNormal("symbol determinants vanish on the curve");
    const cplx pi_i(0.0, std::numbers::pi);
    for (int refine = 1; refine <= 8; refine *= 2) {
        const int m = sys.grid.N * refine;
        double total = 0.0, worst = 0.0;
        cplx prev;
        cplx first;
        for (int l = 0; l <= m; ++l) {
            const double theta = two_pi * (l % m) / m;
            const Eigen::MatrixXcd a = sys.alpha(theta), b = sys.beta(theta);
            const cplx g = (a + pi_i * b).determinant() / (a - pi_i * b).determinant();
            if (l == 0) {
                prev = first = g;
                continue;
            }
            const double step = std::arg(g / prev);
            worst = std::max(worst, std::abs(step));
            total += step;
            prev = g;
        }
        if (worst < std::numbers::pi / 2.0) {
            const double kappa = total / two_pi;
            const int k = static_cast<int>(std::lround(kappa));
            if (std::abs(kappa - k) > 1e-6) {
                throw PhaseResolutionExceeded("winding number did not converge to an integer");
            }
            return k;
        }
    }
    throw PhaseResolutionExceeded("phase increments stay above π/2 after 8x refinement");
}

namespace detail_sie {

/// Fraction of Fourier energy above |k| > N/4 of a stacked node-major
/// vector, maximized over components.  Genuine Noether null functions of
/// analytic-symbol systems are analytic, so their energy sits in the low
/// band; rank-deficiency directions created by the truncation itself
/// concentrate at the band edge and must not be counted as null functions.
inline double high_band_energy(const Eigen::VectorXcd& v, int n, int N) {
    double worst = 0.0;
    for (int c = 0; c < n; ++c) {
        Eigen::VectorXcd comp(N);
        for (int i = 0; i < N; ++i) comp(i) = v(static_cast<Eigen::Index>(i) * n + c);
        const Eigen::VectorXcd modes = poincare::detail::dft(comp);
        double low = 0.0, high = 0.0;
        for (int k = -N / 2; k < N / 2; ++k) {
            const double e = std::norm(poincare::detail::dft_mode(modes, k));
            (std::abs(k) > N / 4 ? high : low) += e;
        }
        const double tot = low + high;
        if (tot > 0.0) worst = std::max(worst, high / tot);
    }
    return worst;
}

}  // namespace detail_sie

struct Nullspaces {
    Eigen::MatrixXcd kernel;          // columns: resolved null vectors of T
    Eigen::MatrixXcd adjoint_kernel;  // columns: resolved null vectors of T*
    int l = 0;
    int l_prime = 0;
    int raw_null_count = 0;  // all singular values below tolerance
    double gap = std::numeric_limits<double>::infinity();
    bool reliable = true;
};

/// Null spaces of the discrete operator and of its adjoint with respect to
/// the weighted inner product Σ_j w_j |t'_j| u_j v̄_j (so adjoint null
/// vectors are W⁻¹ times left singular vectors).  Vectors whose energy sits
/// at the band edge are reported in raw_null_count but not counted in l/l':
/// they are artifacts of truncating a non-zero-index operator to a square
/// matrix, not approximations of continuous null functions.
inline Nullspaces nullspaces(const Eigen::MatrixXcd& A, const Eigen::VectorXd& node_weights,
                             int n, double tol = 1e-8) {
    if (A.rows() != A.cols()) throw DimensionMismatch("nullspaces expects a square matrix");
    const int N = static_cast<int>(node_weights.size());
    if (A.rows() != static_cast<Eigen::Index>(N) * n) {
        throw DimensionMismatch("weights length inconsistent with matrix size");
    }

    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd sigma = svd.singularValues();
    const double smax = sigma.size() > 0 ? sigma(0) : 0.0;

    Nullspaces ns;
    std::vector<Eigen::Index> null_idx;
    for (Eigen::Index k = 0; k < sigma.size(); ++k) {
        if (sigma(k) < tol * smax) null_idx.push_back(k);
    }
    ns.raw_null_count = static_cast<int>(null_idx.size());

    if (!null_idx.empty()) {
        const Eigen::Index first_null = null_idx.front();
        if (first_null > 0) {
            const double kept = sigma(first_null - 1);
            const double rejected = sigma(first_null);
            ns.gap = rejected > 0.0 ? kept / rejected : std::numeric_limits<double>::infinity();
            ns.reliable = ns.gap >= 10.0;
        }
    }

    // The band filter needs a resolved grid to mean anything; tiny matrices
    // (unit-test toys) are counted raw.
    const bool filter = N >= 16;
    std::vector<Eigen::Index> right_keep, left_keep;
    for (const Eigen::Index k : null_idx) {
        if (!filter || detail_sie::high_band_energy(svd.matrixV().col(k), n, N) < 0.5) {
            right_keep.push_back(k);
        }
        if (!filter || detail_sie::high_band_energy(svd.matrixU().col(k), n, N) < 0.5) {
            left_keep.push_back(k);
        }
    }

    ns.l = static_cast<int>(right_keep.size());
    ns.l_prime = static_cast<int>(left_keep.size());
    ns.kernel.resize(A.rows(), ns.l);
    for (int c = 0; c < ns.l; ++c) ns.kernel.col(c) = svd.matrixV().col(right_keep[c]);

    ns.adjoint_kernel.resize(A.rows(), ns.l_prime);
    for (int c = 0; c < ns.l_prime; ++c) {
        Eigen::VectorXcd v = svd.matrixU().col(left_keep[c]);
        for (int i = 0; i < N; ++i) {
            v.segment(static_cast<Eigen::Index>(i) * n, n) /= node_weights(i);
        }
        ns.adjoint_kernel.col(c) = v;
    }
    return ns;
}

enum class SolveStatus { solvable, unsolvable };

struct Solution {
    SolveStatus status = SolveStatus::unsolvable;
    Eigen::VectorXcd mu;                       // minimum-norm particular solution
    Eigen::MatrixXcd kernel_basis;             // homogeneous solutions (the β_k directions)
    std::vector<cplx> solvability_residuals;   // ∫ f μ*_k dt per adjoint null vector
    double least_squares_residual = 0.0;
};

/// Noether solvability test and minimum-norm solve.  The residuals are the
/// contour integrals ∫ f μ* dt against every adjoint null vector, evaluated
/// as the weighted inner products ⟨f, v_k⟩_W; the system is declared
/// solvable only if all of them vanish within tolerance and the final
/// least-squares residual confirms it.  Optional extra rows append side
/// constraints (e.g. density moment conditions) to the least-squares solve.
inline Solution solve(const SingularSystem& sys, const Discretization& disc, const Nullspaces& ns,
                      double tol = 1e-8, const Eigen::MatrixXcd* extra_rows = nullptr,
                      const Eigen::VectorXcd* extra_rhs = nullptr) {
    if (!symbol_check(sys).normal) throw NotNormal("system is not normally solvable");

    const int N = sys.grid.N, n = sys.n;
    const Eigen::VectorXd w = sys.node_weights();

    Solution sol;
    sol.kernel_basis = ns.kernel;

    Eigen::VectorXcd wf = disc.rhs;
    for (int i = 0; i < N; ++i) wf.segment(static_cast<Eigen::Index>(i) * n, n) *= w(i);
    for (int k = 0; k < ns.l_prime; ++k) {
        sol.solvability_residuals.push_back(ns.adjoint_kernel.col(k).dot(wf));
    }

    const double fscale = std::max(1.0, disc.rhs.lpNorm<Eigen::Infinity>());
    for (const cplx r : sol.solvability_residuals) {
        if (std::abs(r) > tol * fscale) {
            sol.status = SolveStatus::unsolvable;
            return sol;
        }
    }

    Eigen::MatrixXcd A = disc.A;
    Eigen::VectorXcd b = disc.rhs;
    if (extra_rows != nullptr) {
        if (extra_rhs == nullptr || extra_rows->rows() != extra_rhs->size() ||
            extra_rows->cols() != A.cols()) {
            throw DimensionMismatch("constraint rows and right-hand side are inconsistent");
        }
        const Eigen::Index m = A.rows(), e = extra_rows->rows();
        A.conservativeResize(m + e, Eigen::NoChange);
        A.bottomRows(e) = *extra_rows;
        b.conservativeResize(m + e);
        b.tail(e) = *extra_rhs;
    }

    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd sigma = svd.singularValues();
    const double smax = sigma.size() > 0 ? sigma(0) : 0.0;
    Eigen::VectorXcd y = svd.matrixU().adjoint() * b;
    for (Eigen::Index k = 0; k < sigma.size(); ++k) {
        y(k) = (sigma(k) > tol * smax) ? y(k) / sigma(k) : cplx(0.0, 0.0);
    }
    sol.mu = svd.matrixV() * y;

    sol.least_squares_residual = (disc.A * sol.mu - disc.rhs).lpNorm<Eigen::Infinity>();
    sol.status = (sol.least_squares_residual <= 100.0 * tol * fscale) ? SolveStatus::solvable
                                                                      : SolveStatus::unsolvable;
    return sol;
}

/// Everything the Noether theorems quantify for one system: the symbol
/// minima, the index, the two null counts (with the l − l' = κ consistency
/// check made explicit), and whatever solvability residuals a solve produced.
struct NoetherDiagnostics {
    SymbolCheck symbol;
    bool normal = false;
    std::optional<int> kappa;
    int l = 0, l_prime = 0;
    bool noether_consistent = false;
    double rank_gap = std::numeric_limits<double>::infinity();
    bool rank_reliable = true;
    std::vector<cplx> solvability_residuals;
};

inline NoetherDiagnostics diagnose(const SingularSystem& sys, double rank_tol = 1e-8) {
    NoetherDiagnostics d;
    d.symbol = symbol_check(sys);
    d.normal = d.symbol.normal;
    if (!d.normal) return d;
    d.kappa = index(sys);
    const Discretization disc = discretize(sys);
    const Nullspaces ns = nullspaces(disc.A, sys.node_weights(), sys.n, rank_tol);
    d.l = ns.l;
    d.l_prime = ns.l_prime;
    d.rank_gap = ns.gap;
    d.rank_reliable = ns.reliable;
    d.noether_consistent = (d.l - d.l_prime == *d.kappa);
    return d;
}

}  // namespace poincare::sie
