#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "poincare/fixtures.hpp"
#include "poincare/problem_io.hpp"

#ifndef POINCARE_CLI_PATH
#define POINCARE_CLI_PATH ""
#endif

using namespace poincare;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(POINCARE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("poincare_cli_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("problem files round-trip byte-stable", "[cli]") {
    io::ProblemFile pf;
    pf.kind = io::ProblemFile::Kind::decomposable;
    pf.problem = fixtures::manufactured_problem(12);
    pf.solver.nodes = 64;

    const auto dir = temp_dir("roundtrip");
    const auto path = (dir / "p.json").string();
    io::write_problem_file(path, pf);

    const io::ProblemFile back = io::parse_problem_file(path);
    const auto path2 = (dir / "p2.json").string();
    io::write_problem_file(path2, back);
    REQUIRE(slurp(path) == slurp(path2));

    // parsed problem behaves identically
    REQUIRE(back.problem.has_value());
    const auto r1 = decomposable::solve_poincare(*pf.problem, 64);
    const auto r2 = decomposable::solve_poincare(*back.problem, 64);
    REQUIRE(r1.status == decomposable::PoincareStatus::solvable);
    REQUIRE(r2.status == decomposable::PoincareStatus::solvable);
    CHECK((r1.field->components[0].density() - r2.field->components[0].density())
              .lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("unknown fields are rejected", "[cli]") {
    nlohmann::json j = io::to_json([] {
        io::ProblemFile pf;
        pf.kind = io::ProblemFile::Kind::decomposable;
        pf.problem = fixtures::laplace_neumann_problem();
        return pf;
    }());
    j["surprise"] = 1;
    CHECK_THROWS_AS(io::from_json(j), InvalidProblem);
    j.erase("surprise");
    CHECK_NOTHROW(io::from_json(j));
    j["curve"]["extra"] = true;
    CHECK_THROWS_AS(io::from_json(j), InvalidProblem);
}

TEST_CASE("grid spec parsing", "[cli]") {
    const auto g = io::parse_grid_spec("1.5:4.0:6,0.0:6.2832:8");
    REQUIRE(g.radii.size() == 6);
    REQUIRE(g.angles.size() == 8);
    CHECK(g.radii.front() == Catch::Approx(1.5));
    CHECK(g.radii.back() == Catch::Approx(4.0));
    CHECK(g.angles[1] == Catch::Approx(6.2832 / 8));
    CHECK_THROWS_AS(io::parse_grid_spec("nope"), InvalidProblem);
}

TEST_CASE("solve subcommand end to end on the Laplace Neumann fixture", "[cli]") {
    const auto dir = temp_dir("solve");
    io::ProblemFile pf;
    pf.kind = io::ProblemFile::Kind::decomposable;
    pf.problem = fixtures::laplace_neumann_problem();
    pf.solver.nodes = 128;
    io::write_problem_file((dir / "p.json").string(), pf);

    const int rc = run_cli("solve " + (dir / "p.json").string() + " --out-dir " +
                           (dir / "out").string());
    CHECK(rc == 0);

    nlohmann::json diag;
    std::ifstream(dir / "out" / "diagnostics.json") >> diag;
    CHECK(diag.at("normal").get<bool>());
    CHECK(diag.at("kappa").get<int>() == 0);
    CHECK(diag.at("l").get<int>() == 0);
    CHECK(diag.at("l_prime").get<int>() == 0);
    CHECK(diag.contains("residuals"));
    CHECK(diag.contains("moments"));

    // emitted solution values match Re(1/z)
    std::ifstream csv(dir / "out" / "solution.csv");
    std::string line;
    std::getline(csv, line);
    CHECK(line == "x,y,u_1");
    int rows = 0;
    while (std::getline(csv, line)) {
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream is(line);
        double x, y, u;
        is >> x >> y >> u;
        REQUIRE(std::abs(u - (1.0 / cplx(x, y)).real()) < 1e-8);
        ++rows;
    }
    CHECK(rows == 72);
    CHECK(fs::exists(dir / "out" / "density.csv"));
}

TEST_CASE("solve exit codes cover the contract", "[cli]") {
    const auto dir = temp_dir("codes");

    // unsolvable: nonzero-mean Neumann data
    io::ProblemFile bad;
    bad.kind = io::ProblemFile::Kind::decomposable;
    bad.problem = fixtures::laplace_neumann_problem();
    bad.problem->f = {FourierTable::constant(1.0)};
    io::write_problem_file((dir / "bad.json").string(), bad);
    CHECK(run_cli("solve " + (dir / "bad.json").string() + " --out-dir " + (dir / "o1").string()) ==
          2);

    // not normal: tangential oblique direction
    io::ProblemFile nn;
    nn.kind = io::ProblemFile::Kind::decomposable;
    nn.problem = fixtures::laplace_neumann_problem();
    nn.problem->Q = {{FourierTable::constant(0.0)}};
    io::write_problem_file((dir / "nn.json").string(), nn);
    CHECK(run_cli("solve " + (dir / "nn.json").string() + " --out-dir " + (dir / "o2").string()) ==
          3);

    // malformed input
    std::ofstream(dir / "broken.json") << "{ not json at all";
    CHECK(run_cli("solve " + (dir / "broken.json").string()) == 4);
    CHECK(run_cli("solve " + (dir / "missing.json").string()) == 4);
}

TEST_CASE("diagnose reports the synthetic symbol index", "[cli]") {
    const auto dir = temp_dir("diagnose");

    io::ProblemFile pf;
    pf.kind = io::ProblemFile::Kind::symbol;
    pf.n = 1;
    pf.alpha_re = {{FourierTable::harmonic_cos(1, 1.0)}};
    pf.alpha_im = {{FourierTable::constant(0.0)}};
    pf.beta_re = {{FourierTable::harmonic_sin(1, 1.0 / std::numbers::pi)}};
    pf.beta_im = {{FourierTable::constant(0.0)}};
    pf.solver.nodes = 64;
    io::write_problem_file((dir / "symbol.json").string(), pf);

    CHECK(run_cli("diagnose " + (dir / "symbol.json").string() + " --out-dir " +
                  (dir / "out").string()) == 0);
    nlohmann::json diag;
    std::ifstream(dir / "out" / "diagnostics.json") >> diag;
    CHECK(diag.at("normal").get<bool>());
    CHECK(diag.at("kappa").get<int>() == 2);
    CHECK(diag.at("l").get<int>() - diag.at("l_prime").get<int>() == 2);

    // degenerate symbol: normal = false, kappa null
    io::ProblemFile zero = pf;
    zero.alpha_re = {{FourierTable::constant(0.0)}};
    zero.beta_re = {{FourierTable::constant(0.0)}};
    io::write_problem_file((dir / "zero.json").string(), zero);
    CHECK(run_cli("diagnose " + (dir / "zero.json").string() + " --out-dir " +
                  (dir / "out2").string()) == 0);
    nlohmann::json dz;
    std::ifstream(dir / "out2" / "diagnostics.json") >> dz;
    CHECK_FALSE(dz.at("normal").get<bool>());
    CHECK(dz.at("kappa").is_null());

    // Laplace Neumann problem file: normal with kappa 0
    io::ProblemFile lp;
    lp.kind = io::ProblemFile::Kind::decomposable;
    lp.problem = fixtures::laplace_neumann_problem();
    lp.solver.nodes = 64;
    io::write_problem_file((dir / "laplace.json").string(), lp);
    CHECK(run_cli("diagnose " + (dir / "laplace.json").string() + " --out-dir " +
                  (dir / "out3").string()) == 0);
    nlohmann::json dl;
    std::ifstream(dir / "out3" / "diagnostics.json") >> dl;
    CHECK(dl.at("normal").get<bool>());
    CHECK(dl.at("kappa").get<int>() == 0);
}

TEST_CASE("example subcommand emits certificates for all four presets", "[cli]") {
    const auto dir = temp_dir("example");

    CHECK(run_cli("example dirichlet --k 5 --out-dir " + (dir / "d").string()) == 0);
    CHECK(fs::exists(dir / "d" / "null_family.csv"));

    CHECK(run_cli("example neumann --k 3 --out-dir " + (dir / "n").string()) == 0);

    CHECK(run_cli("example special_neumann --out-dir " + (dir / "sn").string()) == 0);
    CHECK(fs::exists(dir / "sn" / "solution.csv"));

    CHECK(run_cli("example problem6 --out-dir " + (dir / "p6").string()) == 0);
    nlohmann::json diag;
    std::ifstream(dir / "p6" / "diagnostics.json") >> diag;
    CHECK(diag.at("certificate_passed").get<bool>());

    // solvability violation: constant f1 trips the first moment condition
    CHECK(run_cli("example problem6 --f1-cos 1,1 --out-dir " + (dir / "p6bad").string()) == 2);
    nlohmann::json bad;
    std::ifstream(dir / "p6bad" / "diagnostics.json") >> bad;
    CHECK(bad.at("violated_condition").get<std::string>() == "Eq. 9");
}
