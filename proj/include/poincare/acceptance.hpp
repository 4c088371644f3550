#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "poincare/bitsadze.hpp"
#include "poincare/decomposable.hpp"
#include "poincare/fixtures.hpp"
#include "poincare/problem_io.hpp"
#include "poincare/quadrature.hpp"
#include "poincare/sie.hpp"
#include "poincare/verification.hpp"

namespace poincare::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct Options {
    std::string cli_path;  // empty disables the CLI contract criterion's subprocess runs
    std::string work_dir = "";
};

namespace detail_acc {

class Check {
public:
    void require(bool ok, const std::string& what) {
        if (!ok) {
            failed_ = true;
            if (!first_failure_.empty()) first_failure_ += "; ";
            first_failure_ += what;
        }
    }
    template <typename T>
    void leq(T value, T bound, const std::string& what) {
        std::ostringstream os;
        os << what << " = " << value << " (bound " << bound << ")";
        require(value <= bound, os.str());
        worst_ = std::max(worst_, static_cast<double>(value));
    }
    bool ok() const { return !failed_; }
    std::string message(const std::string& pass_detail) const {
        return failed_ ? first_failure_ : pass_detail;
    }

private:
    bool failed_ = false;
    std::string first_failure_;
    double worst_ = 0.0;
};

inline int run_command(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    return -1;
}

inline std::vector<cplx> guarded_points(int count, unsigned seed, double r0, double r1) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> rad(r0, r1), ang(0.0, two_pi);
    std::vector<cplx> pts;
    for (int i = 0; i < count; ++i) pts.push_back(std::polar(rad(rng), ang(rng)));
    return pts;
}

}  // namespace detail_acc

inline CriterionResult criterion_dirichlet_null_family() {
    detail_acc::Check c;
    double worst_boundary = 0.0, worst_far = 0.0;
    for (int k = 1; k <= 20; ++k) {
        const auto sol = bitsadze::dirichlet_null_element(k);
        for (int i = 0; i < 512; ++i) {
            const double theta = two_pi * i / 512;
            worst_boundary = std::max(
                worst_boundary, std::abs(sol.w(cplx(std::cos(theta), std::sin(theta)))));
        }
        worst_far = std::max(worst_far, std::abs(sol.w(cplx(1e6, 0.0))));
    }
    c.leq(worst_boundary, 1e-12, "max |w_k| on the circle");
    c.leq(worst_far, 2.0, "max |w_k(1e6)|");
    std::ostringstream os;
    os << "20 null elements, max boundary value " << worst_boundary << ", far bound " << worst_far;
    return {1, "Dirichlet counterexample certificate", c.ok(), c.message(os.str()), 0.0};
}

inline CriterionResult criterion_neumann_null_family() {
    detail_acc::Check c;
    double worst = 0.0;
    for (int k = 0; k <= 10; ++k) {
        const auto sol = bitsadze::neumann_null_element(k);
        for (int i = 0; i < 512; ++i) {
            const double theta = two_pi * i / 512;
            const cplx t(std::cos(theta), std::sin(theta));
            const Eigen::Vector2d nu(std::cos(theta), std::sin(theta));
            const double d1 =
                verify::fd_directional([&](cplx z) { return sol.w(z).real(); }, t, nu, 1e-5);
            const double d2 =
                verify::fd_directional([&](cplx z) { return sol.w(z).imag(); }, t, nu, 1e-5);
            worst = std::max({worst, std::abs(d1), std::abs(d2)});
        }
    }
    c.leq(worst, 1e-6, "max normal derivative");
    std::ostringstream os;
    os << "k = 0..10, max finite-difference normal derivative " << worst;
    return {2, "Neumann counterexample certificate", c.ok(), c.message(os.str()), 0.0};
}

inline CriterionResult criterion_determinant_facts() {
    using bitsadze::PresetKind;
    detail_acc::Check c;
    double worst = 0.0;
    for (int i = 0; i < 256; ++i) {
        const double theta = two_pi * i / 256;
        worst = std::max(worst,
                         std::abs(bitsadze::det_P_plus_iQ(bitsadze::preset(PresetKind::dirichlet),
                                                          theta)));
        worst = std::max(
            worst, std::abs(bitsadze::det_P_plus_iQ(bitsadze::preset(PresetKind::special_neumann),
                                                    theta)));
        worst = std::max(worst,
                         std::abs(bitsadze::det_P_plus_iQ(bitsadze::preset(PresetKind::problem6),
                                                          theta) -
                                  cplx(2.0, 0.0)));
        worst = std::max(worst,
                         std::abs(bitsadze::det_P_plus_iQ(bitsadze::preset(PresetKind::neumann),
                                                          theta) -
                                  std::polar(1.0, 2.0 * theta)));
    }
    c.leq(worst, 1e-14, "max determinant deviation");
    std::ostringstream os;
    os << "all four preset determinants match, max deviation " << worst;
    return {3, "boundary determinant facts", c.ok(), c.message(os.str()), 0.0};
}

inline CriterionResult criterion_problem6_round_trip() {
    detail_acc::Check c;
    const quadrature::PeriodicGrid grid(256);
    auto f1 = quadrature::BoundarySamples::sample(
        grid, [](double t) { return cplx(std::cos(t), 0.0); });
    auto f2 = quadrature::BoundarySamples::sample(
        grid, [](double t) { return cplx(std::sin(t), 0.0); });
    const auto sol = bitsadze::solve_problem6(f1, f2);

    const Eigen::Vector2d r = bitsadze::boundary_residual(
        sol, bitsadze::preset(bitsadze::PresetKind::problem6),
        [](double t) { return Eigen::Vector2d(std::cos(t), std::sin(t)); }, grid);
    c.leq(r.maxCoeff(), 1e-8, "boundary residual");

    double worst_phi = 0.0;
    for (const cplx z : detail_acc::guarded_points(20, 5, 1.5, 6.0)) {
        worst_phi = std::max(worst_phi, std::abs(sol.phi.value(z) - 0.5 / z));
    }
    c.leq(worst_phi, 1e-8, "phi vs 1/(2z)");

    bool rejected = false;
    double moment = 0.0;
    try {
        auto bad = quadrature::BoundarySamples::sample(
            grid, [](double t) { return cplx(1.0 + std::cos(t), 0.0); });
        bitsadze::solve_problem6(bad, f2);
    } catch (const SolvabilityViolated& e) {
        rejected = (e.condition() == "Eq. 9");
        moment = e.residual();
    }
    c.require(rejected, "nonzero-mean data must be rejected citing Eq. 9");
    c.leq(std::abs(moment - two_pi), 1e-10, "reported moment vs 2π");

    std::ostringstream os;
    os << "residuals " << r.maxCoeff() << ", phi error " << worst_phi << ", moment "
       << moment;
    return {4, "explicitly solvable problem round trip", c.ok(), c.message(os.str()), 0.0};
}

inline CriterionResult criterion_pv_identity() {
    detail_acc::Check c;
    const quadrature::PeriodicGrid grid(128);
    const Eigen::VectorXcd one = Eigen::VectorXcd::Ones(grid.N);
    const cplx pi_i(0.0, std::numbers::pi);

    const auto circle = geometry::CurveParametrization::unit_circle();
    double worst_circle = 0.0;
    for (int i = 0; i < grid.N; ++i) {
        worst_circle = std::max(
            worst_circle, std::abs(quadrature::pv_cauchy_apply(circle, grid, one, i) - pi_i));
    }
    c.leq(worst_circle, 1e-10, "unit circle PV error");

    const auto ellipse = geometry::CurveParametrization::ellipse(2.0, 1.0);
    double worst_ellipse = 0.0;
    for (int i = 0; i < grid.N; ++i) {
        worst_ellipse = std::max(
            worst_ellipse, std::abs(quadrature::pv_cauchy_apply(ellipse, grid, one, i) - pi_i));
    }
    c.leq(worst_ellipse, 1e-8, "2:1 ellipse PV error");

    std::ostringstream os;
    os << "circle " << worst_circle << ", ellipse " << worst_ellipse;
    return {5, "principal-value identity", c.ok(), c.message(os.str()), 0.0};
}

inline CriterionResult criterion_symbol_fixture() {
    detail_acc::Check c;
    const auto problem = fixtures::laplace_neumann_problem();
    const auto sys = decomposable::assemble(problem, 128);
    double worst = 0.0;
    for (int i = 0; i < 128; ++i) {
        const double theta = sys.grid.node(i);
        worst = std::max(worst, std::abs(sys.alpha(theta)(0, 0) - std::numbers::pi));
        worst = std::max(worst, std::abs(sys.beta(theta)(0, 0)));
    }
    c.leq(worst, 1e-12, "Neumann symbol deviation from (π, 0)");
    c.require(sie::index(sys) == 0, "Neumann index must be 0");

    auto synthetic = [&](int N) {
        sie::SingularSystem s{geometry::CurveParametrization::unit_circle(),
                              quadrature::PeriodicGrid(N),
                              1,
                              [](double t) { return Eigen::MatrixXcd::Constant(1, 1, std::cos(t)); },
                              [](double t) {
                                  return Eigen::MatrixXcd::Constant(1, 1,
                                                                    std::sin(t) / std::numbers::pi);
                              },
                              {},
                              Eigen::VectorXcd::Zero(N)};
        return s;
    };
    c.require(sie::index(synthetic(64)) == 2, "synthetic symbol index must be 2");
    for (const int N : {64, 128, 256}) {
        const auto sys2 = synthetic(N);
        const auto disc = sie::discretize(sys2);
        const auto ns = sie::nullspaces(disc.A, sys2.node_weights(), 1, 1e-8);
        c.require(ns.l - ns.l_prime == 2,
                  "null counts at N = " + std::to_string(N) + " must satisfy l - l' = 2");
    }
    std::ostringstream os;
    os << "Neumann symbol exact to " << worst << ", synthetic index 2 with l - l' = 2";
    return {6, "symbol and index fixtures", c.ok(), c.message(os.str()), 0.0};
}

inline CriterionResult criterion_manufactured_solve() {
    detail_acc::Check c;
    const auto mc = fixtures::manufactured_case();
    const auto problem = fixtures::manufactured_problem();
    const auto pts = detail_acc::guarded_points(50, 41, 2.5, 4.0);

    double scale = 0.0;
    for (const cplx z : pts) scale = std::max(scale, mc.exact_field(z).lpNorm<Eigen::Infinity>());

    auto field_error = [&](int N) {
        const auto report = decomposable::solve_poincare(problem, N);
        if (report.status != decomposable::PoincareStatus::solvable) {
            return std::numeric_limits<double>::infinity();
        }
        double worst = 0.0;
        for (const cplx z : pts) {
            worst = std::max(worst, (report.field->evaluate_all(z) - mc.exact_field(z))
                                        .lpNorm<Eigen::Infinity>());
        }
        return worst / scale;
    };

    const double e64 = field_error(64);
    const double e128 = field_error(128);
    const double e256 = field_error(256);
    c.leq(e256, 1e-6, "relative field error at N = 256");
    c.require(e128 <= e64 / 100.0, "error must improve 100x from N = 64 to N = 128");

    const auto report = decomposable::solve_poincare(problem, 256);
    c.require(report.status == decomposable::PoincareStatus::solvable, "solve must succeed");
    const verify::VectorField field = [&](cplx z) { return report.field->evaluate_all(z); };
    double worst_pde = 0.0;
    for (const cplx z : detail_acc::guarded_points(100, 59, 2.5, 4.0)) {
        worst_pde = std::max(worst_pde, verify::fd_pde_residual(field, problem.coeffs, z, 1e-4)
                                            .lpNorm<Eigen::Infinity>());
    }
    c.leq(worst_pde, 1e-5, "PDE residual");

    std::ostringstream os;
    os << "errors: N64 " << e64 << ", N128 " << e128 << ", N256 " << e256 << ", PDE residual "
       << worst_pde;
    return {7, "manufactured decomposable solve", c.ok(), c.message(os.str()), 0.0};
}

inline CriterionResult criterion_oracle_agreement() {
    detail_acc::Check c;
    const int N = 64;

    // suite systems at N = 64: Neumann-type, kappa = ±2 synthetic
    auto check_system = [&](sie::SingularSystem sys, const std::string& name) {
        const auto disc = sie::discretize(sys);
        const auto ns = sie::nullspaces(disc.A, sys.node_weights(), sys.n);
        const auto sol = sie::solve(sys, disc, ns);
        if (sol.status == sie::SolveStatus::solvable) {
            const Eigen::VectorXcd ref = verify::brute_solve(disc.A, disc.rhs);
            c.leq((sol.mu - ref).lpNorm<Eigen::Infinity>(), 1e-10, name + " engine vs brute");
        }
    };

    {
        auto problem = fixtures::laplace_neumann_problem();
        check_system(decomposable::assemble(problem, N), "Laplace Neumann");
    }
    sie::SingularSystem plus{geometry::CurveParametrization::unit_circle(),
                             quadrature::PeriodicGrid(N),
                             1,
                             [](double t) { return Eigen::MatrixXcd::Constant(1, 1, std::cos(t)); },
                             [](double t) {
                                 return Eigen::MatrixXcd::Constant(1, 1,
                                                                   std::sin(t) / std::numbers::pi);
                             },
                             {},
                             Eigen::VectorXcd::Zero(N)};
    check_system(plus, "kappa=2 homogeneous");

    // kappa = -2: Solvable <=> brute least-squares residual <= 1e-8
    sie::SingularSystem minus = plus;
    minus.beta = [](double t) {
        return Eigen::MatrixXcd::Constant(1, 1, -std::sin(t) / std::numbers::pi);
    };
    const auto disc_h = sie::discretize(minus);
    const auto ns = sie::nullspaces(disc_h.A, minus.node_weights(), 1);
    c.require(ns.l_prime == 2, "kappa=-2 fixture must have two adjoint null vectors");

    sie::SingularSystem generic = minus;
    for (int i = 0; i < N; ++i) generic.rhs(i) = std::cos(generic.grid.node(i));
    const auto disc_g = sie::discretize(generic);
    const auto sol_g = sie::solve(generic, disc_g, ns);
    const Eigen::VectorXcd lsq_g = verify::brute_solve(disc_g.A, disc_g.rhs);
    const double res_g = (disc_g.A * lsq_g - disc_g.rhs).lpNorm<Eigen::Infinity>();
    c.require(sol_g.status == sie::SolveStatus::unsolvable && res_g > 1e-8,
              "generic data: Noether verdict and least-squares residual must both reject");

    sie::SingularSystem ranged = minus;
    Eigen::VectorXcd smooth(N);
    for (int i = 0; i < N; ++i) {
        const double t = ranged.grid.node(i);
        smooth(i) = cplx(std::cos(2.0 * t), 0.3 * std::sin(t));
    }
    ranged.rhs = disc_h.A * smooth;
    const auto disc_r = sie::discretize(ranged);
    const auto sol_r = sie::solve(ranged, disc_r, ns);
    const Eigen::VectorXcd lsq_r = verify::brute_solve(disc_r.A, disc_r.rhs);
    const double res_r = (disc_r.A * lsq_r - disc_r.rhs).lpNorm<Eigen::Infinity>();
    c.require(sol_r.status == sie::SolveStatus::solvable && res_r <= 1e-8,
              "in-range data: Noether verdict and least-squares residual must both accept");
    if (sol_r.status == sie::SolveStatus::solvable) {
        c.leq((sol_r.mu - lsq_r).lpNorm<Eigen::Infinity>(), 1e-10, "kappa=-2 engine vs brute");
    }

    return {8, "engine vs brute-force oracle agreement", c.ok(),
            c.message("minimum-norm solutions and solvability verdicts agree"), 0.0};
}

inline CriterionResult criterion_cli_contract(const Options& opt) {
    detail_acc::Check c;
    if (opt.cli_path.empty()) {
        return {9, "CLI contract", false, "no CLI binary path provided", 0.0};
    }
    namespace fs = std::filesystem;
    const fs::path dir =
        opt.work_dir.empty() ? fs::temp_directory_path() / "poincare_acceptance" : fs::path(opt.work_dir);
    fs::create_directories(dir);

    const std::string quiet = " > " + (dir / "stdout.txt").string() + " 2>&1";
    for (const std::string preset : {"dirichlet", "neumann", "special_neumann", "problem6"}) {
        const int rc = detail_acc::run_command(opt.cli_path + " example " + preset + " --out-dir " +
                                               (dir / preset).string() + quiet);
        c.require(rc == 0, "example " + preset + " must exit 0 (got " + std::to_string(rc) + ")");
    }

    // manufactured problem end to end
    io::ProblemFile pf;
    pf.kind = io::ProblemFile::Kind::decomposable;
    pf.problem = fixtures::manufactured_problem();
    pf.solver.nodes = 256;
    pf.output.grid = "2.5:4.0:5,0.0:6.283185307179586:8";
    const std::string problem_path = (dir / "manufactured.json").string();
    io::write_problem_file(problem_path, pf);

    const std::string out = (dir / "manufactured_out").string();
    const int rc = detail_acc::run_command(opt.cli_path + " solve " + problem_path + " --out-dir " +
                                           out + quiet);
    c.require(rc == 0, "solve must exit 0 (got " + std::to_string(rc) + ")");

    std::ifstream diag(out + "/diagnostics.json");
    c.require(static_cast<bool>(diag), "diagnostics.json must exist");
    if (diag) {
        nlohmann::json j;
        diag >> j;
        for (const char* key : {"normal", "kappa", "l", "l_prime", "residuals", "moments"}) {
            c.require(j.contains(key), std::string("diagnostics must contain ") + key);
        }
        c.require(j.value("normal", false), "manufactured problem must be normal");
        c.require(j.value("kappa", -1) == 0, "manufactured problem must have kappa = 0");
    }

    // emitted field values against the exact manufactured solution
    const auto mc = fixtures::manufactured_case();
    std::ifstream csv(out + "/solution.csv");
    c.require(static_cast<bool>(csv), "solution.csv must exist");
    if (csv) {
        std::string line;
        std::getline(csv, line);
        c.require(line == "x,y,u_1,u_2", "solution.csv header");
        double worst = 0.0;
        int rows = 0;
        while (std::getline(csv, line)) {
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream is(line);
            double x, y, u1, u2;
            is >> x >> y >> u1 >> u2;
            const Eigen::VectorXd exact = mc.exact_field(cplx(x, y));
            worst = std::max({worst, std::abs(u1 - exact(0)), std::abs(u2 - exact(1))});
            ++rows;
        }
        c.require(rows == 40, "solution.csv must hold the full polar grid");
        c.leq(worst, 1e-6, "CSV field error");
    }

    // nonzero-mean Neumann data: documented exit code 2
    io::ProblemFile bad;
    bad.kind = io::ProblemFile::Kind::decomposable;
    bad.problem = fixtures::laplace_neumann_problem();
    bad.problem->f = {FourierTable::constant(1.0)};
    const std::string bad_path = (dir / "bad.json").string();
    io::write_problem_file(bad_path, bad);
    const int rc2 = detail_acc::run_command(opt.cli_path + " solve " + bad_path + " --out-dir " +
                                            (dir / "bad_out").string() + quiet);
    c.require(rc2 == 2, "unsolvable data must exit 2 (got " + std::to_string(rc2) + ")");

    // malformed file: documented exit code 4
    {
        std::ofstream bad_json(dir / "malformed.json");
        bad_json << "{ not json";
    }
    const int rc3 = detail_acc::run_command(opt.cli_path + " solve " +
                                            (dir / "malformed.json").string() + quiet);
    c.require(rc3 == 4, "malformed file must exit 4 (got " + std::to_string(rc3) + ")");

    return {9, "CLI contract", c.ok(), c.message("presets, solve, diagnostics and exit codes"),
            0.0};
}

inline std::vector<CriterionResult> run_all(const Options& opt = {}) {
    std::vector<CriterionResult> results;
    const auto timed = [&](auto&& fn) {
        const auto start = std::chrono::steady_clock::now();
        CriterionResult r = fn();
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        results.push_back(std::move(r));
    };
    timed([] { return criterion_dirichlet_null_family(); });
    timed([] { return criterion_neumann_null_family(); });
    timed([] { return criterion_determinant_facts(); });
    timed([] { return criterion_problem6_round_trip(); });
    timed([] { return criterion_pv_identity(); });
    timed([] { return criterion_symbol_fixture(); });
    timed([] { return criterion_manufactured_solve(); });
    timed([] { return criterion_oracle_agreement(); });
    timed([&] { return criterion_cli_contract(opt); });

    // runtime bounds are part of the contract where stated
    const double inf = std::numeric_limits<double>::infinity();
    const double budgets[] = {1.0, 1.0, inf, 2.0, inf, 5.0, 30.0, inf, inf};
    double total = 0.0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        total += results[i].seconds;
        if (results[i].seconds > budgets[i]) {
            results[i].passed = false;
            results[i].detail += " [runtime " + std::to_string(results[i].seconds) +
                                 "s over budget " + std::to_string(budgets[i]) + "s]";
        }
    }
    if (total > 120.0 && !results.empty()) {
        results.back().passed = false;
        results.back().detail += " [total suite runtime " + std::to_string(total) + "s over 120s]";
    }
    return results;
}

}  // namespace poincare::acceptance
