#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "poincare/bitsadze.hpp"
#include "poincare/decomposable.hpp"
#include "poincare/errors.hpp"
#include "poincare/fourier.hpp"
#include "poincare/sie.hpp"

namespace poincare::io {

using nlohmann::json;

struct SolverOptions {
    int nodes = 256;
    double tol = 1e-8;
};

struct OutputOptions {
    std::string grid = "1.5:4.0:6,0.0:6.283185307179586:12";
};

/// Parsed problem file.  Three kinds share the container: a decomposable
/// Poincaré problem, a named Bitsadze preset with its boundary data, or a
/// raw scalar-block symbol for diagnostics.
struct ProblemFile {
    enum class Kind { decomposable, bitsadze_preset, symbol };

    int schema_version = 1;
    Kind kind = Kind::decomposable;

    std::optional<decomposable::PoincareProblem> problem;

    std::string preset_name;
    std::vector<FourierTable> preset_f;
    double special_constant = 0.0;
    int k_max = 5;

    int n = 1;
    std::vector<std::vector<FourierTable>> alpha_re, alpha_im, beta_re, beta_im;
    std::vector<FourierTable> symbol_f;

    SolverOptions solver;
    OutputOptions output;
};

namespace detail_io {

inline void check_keys(const json& j, std::initializer_list<const char*> allowed,
                       const std::string& context) {
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                ok = true;
                break;
            }
        }
        if (!ok) throw InvalidProblem("unknown field \"" + item.key() + "\" in " + context);
    }
}

inline json table_to_json(const FourierTable& t) {
    json j;
    j["cos"] = std::vector<double>(t.cosc.data(), t.cosc.data() + t.cosc.size());
    j["sin"] = std::vector<double>(t.sinc.data(), t.sinc.data() + t.sinc.size());
    return j;
}

inline FourierTable table_from_json(const json& j, const std::string& context) {
    if (!j.is_object()) throw InvalidProblem(context + " must be an object with cos/sin arrays");
    check_keys(j, {"cos", "sin"}, context);
    auto vec = [&](const char* key) {
        Eigen::VectorXd v(0);
        if (j.contains(key)) {
            const auto arr = j.at(key).get<std::vector<double>>();
            v.resize(arr.size());
            for (std::size_t i = 0; i < arr.size(); ++i) v(i) = arr[i];
        }
        return v;
    };
    return FourierTable(vec("cos"), vec("sin"));
}

inline json matrix_tables_to_json(const std::vector<std::vector<FourierTable>>& m) {
    json rows = json::array();
    for (const auto& row : m) {
        json r = json::array();
        for (const auto& entry : row) r.push_back(table_to_json(entry));
        rows.push_back(r);
    }
    return rows;
}

inline std::vector<std::vector<FourierTable>> matrix_tables_from_json(const json& j,
                                                                      const std::string& context) {
    if (!j.is_array()) throw InvalidProblem(context + " must be an array of rows");
    std::vector<std::vector<FourierTable>> m;
    for (std::size_t k = 0; k < j.size(); ++k) {
        std::vector<FourierTable> row;
        for (std::size_t l = 0; l < j[k].size(); ++l) {
            row.push_back(table_from_json(j[k][l], context + "[" + std::to_string(k) + "][" +
                                                       std::to_string(l) + "]"));
        }
        m.push_back(std::move(row));
    }
    return m;
}

inline json curve_to_json(const geometry::CurveParametrization& c) {
    json j;
    if (c.kind() == geometry::CurveParametrization::Kind::unit_circle) {
        j["kind"] = "unit_circle";
    } else {
        j["kind"] = "trigonometric";
        j["x"] = table_to_json(c.x_table());
        j["y"] = table_to_json(c.y_table());
    }
    return j;
}

inline geometry::CurveParametrization curve_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind")) {
        throw InvalidProblem("curve must be an object with a kind");
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "unit_circle") {
        check_keys(j, {"kind"}, "curve");
        return geometry::CurveParametrization::unit_circle();
    }
    if (kind == "trigonometric") {
        check_keys(j, {"kind", "x", "y"}, "curve");
        return geometry::CurveParametrization::trigonometric(
            table_from_json(j.at("x"), "curve.x"), table_from_json(j.at("y"), "curve.y"));
    }
    throw InvalidProblem("unknown curve kind: " + kind);
}

}  // namespace detail_io

inline json to_json(const ProblemFile& pf) {
    using namespace detail_io;
    json j;
    j["schema_version"] = pf.schema_version;
    switch (pf.kind) {
        case ProblemFile::Kind::decomposable: {
            const auto& p = *pf.problem;
            j["kind"] = "decomposable";
            j["curve"] = curve_to_json(p.curve);
            j["n"] = p.n();
            std::vector<double> a, b, c;
            for (int k = 0; k < p.n(); ++k) {
                a.push_back(p.coeffs.a(k));
                b.push_back(p.coeffs.b(k));
                c.push_back(p.coeffs.c(k));
            }
            j["a"] = a;
            j["b"] = b;
            j["c"] = c;
            j["P"] = matrix_tables_to_json(p.P);
            j["Q"] = matrix_tables_to_json(p.Q);
            if (!p.R.empty()) j["R"] = matrix_tables_to_json(p.R);
            json f = json::array();
            for (const auto& t : p.f) f.push_back(table_to_json(t));
            j["f"] = f;
            break;
        }
        case ProblemFile::Kind::bitsadze_preset: {
            j["kind"] = "bitsadze_preset";
            j["preset"] = pf.preset_name;
            json f = json::array();
            for (const auto& t : pf.preset_f) f.push_back(detail_io::table_to_json(t));
            j["f"] = f;
            j["K"] = pf.special_constant;
            j["k_max"] = pf.k_max;
            break;
        }
        case ProblemFile::Kind::symbol: {
            j["kind"] = "symbol";
            j["n"] = pf.n;
            j["alpha_re"] = matrix_tables_to_json(pf.alpha_re);
            j["alpha_im"] = matrix_tables_to_json(pf.alpha_im);
            j["beta_re"] = matrix_tables_to_json(pf.beta_re);
            j["beta_im"] = matrix_tables_to_json(pf.beta_im);
            json f = json::array();
            for (const auto& t : pf.symbol_f) f.push_back(detail_io::table_to_json(t));
            j["f"] = f;
            break;
        }
    }
    j["solver"] = json{{"nodes", pf.solver.nodes}, {"tol", pf.solver.tol}};
    j["output"] = json{{"grid", pf.output.grid}};
    return j;
}

inline ProblemFile from_json(const json& j) {
    using namespace detail_io;
    if (!j.is_object()) throw InvalidProblem("problem file must be a JSON object");
    if (!j.contains("schema_version") || j.at("schema_version").get<int>() != 1) {
        throw InvalidProblem("problem file requires schema_version = 1");
    }
    ProblemFile pf;
    const std::string kind = j.value("kind", "decomposable");

    if (j.contains("solver")) {
        check_keys(j.at("solver"), {"nodes", "tol"}, "solver");
        pf.solver.nodes = j.at("solver").value("nodes", pf.solver.nodes);
        pf.solver.tol = j.at("solver").value("tol", pf.solver.tol);
        if (pf.solver.nodes < 8 || pf.solver.nodes % 2 != 0) {
            throw InvalidProblem("solver.nodes must be even and >= 8");
        }
    }
    if (j.contains("output")) {
        check_keys(j.at("output"), {"grid"}, "output");
        pf.output.grid = j.at("output").value("grid", pf.output.grid);
    }

    if (kind == "decomposable") {
        check_keys(j, {"schema_version", "kind", "curve", "n", "a", "b", "c", "P", "Q", "R", "f",
                       "solver", "output"},
                   "problem file");
        pf.kind = ProblemFile::Kind::decomposable;
        const int n = j.at("n").get<int>();
        const auto a = j.at("a").get<std::vector<double>>();
        const auto b = j.at("b").get<std::vector<double>>();
        const auto c = j.at("c").get<std::vector<double>>();
        if (static_cast<int>(a.size()) != n || static_cast<int>(b.size()) != n ||
            static_cast<int>(c.size()) != n) {
            throw InvalidProblem("coefficient arrays must have length n");
        }
        decomposable::PoincareProblem p{curve_from_json(j.at("curve")),
                                        geometry::EllipticCoefficients(a, b, c),
                                        matrix_tables_from_json(j.at("P"), "P"),
                                        matrix_tables_from_json(j.at("Q"), "Q"),
                                        {},
                                        {}};
        if (j.contains("R")) p.R = matrix_tables_from_json(j.at("R"), "R");
        for (std::size_t k = 0; k < j.at("f").size(); ++k) {
            p.f.push_back(table_from_json(j.at("f")[k], "f[" + std::to_string(k) + "]"));
        }
        p.validate();
        pf.problem = std::move(p);
        return pf;
    }
    if (kind == "bitsadze_preset") {
        check_keys(j, {"schema_version", "kind", "preset", "f", "K", "k_max", "solver", "output"},
                   "problem file");
        pf.kind = ProblemFile::Kind::bitsadze_preset;
        pf.preset_name = j.at("preset").get<std::string>();
        bitsadze::preset(pf.preset_name);  // validates the name
        if (j.contains("f")) {
            for (std::size_t k = 0; k < j.at("f").size(); ++k) {
                pf.preset_f.push_back(table_from_json(j.at("f")[k], "f[" + std::to_string(k) + "]"));
            }
        }
        pf.special_constant = j.value("K", 0.0);
        pf.k_max = j.value("k_max", 5);
        return pf;
    }
    if (kind == "symbol") {
        check_keys(j, {"schema_version", "kind", "n", "alpha_re", "alpha_im", "beta_re", "beta_im",
                       "f", "solver", "output"},
                   "problem file");
        pf.kind = ProblemFile::Kind::symbol;
        pf.n = j.at("n").get<int>();
        pf.alpha_re = matrix_tables_from_json(j.at("alpha_re"), "alpha_re");
        pf.alpha_im = matrix_tables_from_json(j.at("alpha_im"), "alpha_im");
        pf.beta_re = matrix_tables_from_json(j.at("beta_re"), "beta_re");
        pf.beta_im = matrix_tables_from_json(j.at("beta_im"), "beta_im");
        if (j.contains("f")) {
            for (std::size_t k = 0; k < j.at("f").size(); ++k) {
                pf.symbol_f.push_back(table_from_json(j.at("f")[k], "f[" + std::to_string(k) + "]"));
            }
        }
        const auto square = [&](const std::vector<std::vector<FourierTable>>& m, const char* name) {
            if (static_cast<int>(m.size()) != pf.n) {
                throw InvalidProblem(std::string(name) + " must be n x n");
            }
            for (const auto& row : m) {
                if (static_cast<int>(row.size()) != pf.n) {
                    throw InvalidProblem(std::string(name) + " must be n x n");
                }
            }
        };
        square(pf.alpha_re, "alpha_re");
        square(pf.alpha_im, "alpha_im");
        square(pf.beta_re, "beta_re");
        square(pf.beta_im, "beta_im");
        return pf;
    }
    throw InvalidProblem("unknown problem kind: " + kind);
}

/// Canonical serialization: keys sorted (nlohmann default), two-space
/// indentation, trailing newline.  A file written by the tool re-parses and
/// re-serializes to identical bytes.
inline std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

inline ProblemFile parse_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidProblem("cannot open problem file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InvalidProblem(std::string("malformed JSON: ") + e.what());
    }
    return from_json(j);
}

inline void write_problem_file(const std::string& path, const ProblemFile& pf) {
    std::ofstream out(path);
    if (!out) throw InvalidProblem("cannot open output file: " + path);
    out << canonical_dump(to_json(pf));
}

/// Symbol-kind payload assembled into an engine system on the unit circle.
inline sie::SingularSystem symbol_system(const ProblemFile& pf, int nodes) {
    if (pf.kind != ProblemFile::Kind::symbol) throw InvalidProblem("not a symbol problem");
    const int n = pf.n;
    auto eval = [n](const std::vector<std::vector<FourierTable>>& re,
                    const std::vector<std::vector<FourierTable>>& im, double theta) {
        Eigen::MatrixXcd m(n, n);
        for (int k = 0; k < n; ++k) {
            for (int j2 = 0; j2 < n; ++j2) m(k, j2) = cplx(re[k][j2](theta), im[k][j2](theta));
        }
        return m;
    };
    const auto are = pf.alpha_re, aim = pf.alpha_im, bre = pf.beta_re, bim = pf.beta_im;
    sie::SingularSystem sys{geometry::CurveParametrization::unit_circle(),
                            quadrature::PeriodicGrid(nodes),
                            n,
                            [are, aim, eval](double t) { return eval(are, aim, t); },
                            [bre, bim, eval](double t) { return eval(bre, bim, t); },
                            {},
                            {}};
    sys.rhs = Eigen::VectorXcd::Zero(sys.dim());
    for (int i = 0; i < nodes && !pf.symbol_f.empty(); ++i) {
        for (int k = 0; k < n && k < static_cast<int>(pf.symbol_f.size()); ++k) {
            sys.rhs(static_cast<Eigen::Index>(i) * n + k) = pf.symbol_f[k](sys.grid.node(i));
        }
    }
    return sys;
}

struct PolarGrid {
    std::vector<double> radii;
    std::vector<double> angles;
};

/// Parses "r0:r1:nr,t0:t1:nt": nr radii spanning [r0, r1] inclusive and nt
/// angles t0 + k (t1−t0)/nt, k = 0..nt−1.
inline PolarGrid parse_grid_spec(const std::string& spec) {
    const auto comma = spec.find(',');
    if (comma == std::string::npos) throw InvalidProblem("grid spec needs \"r0:r1:nr,t0:t1:nt\"");
    auto parse3 = [](const std::string& part, double& x0, double& x1, int& count) {
        const auto c1 = part.find(':'), c2 = part.rfind(':');
        if (c1 == std::string::npos || c2 == c1) throw InvalidProblem("bad grid spec range");
        x0 = std::stod(part.substr(0, c1));
        x1 = std::stod(part.substr(c1 + 1, c2 - c1 - 1));
        count = std::stoi(part.substr(c2 + 1));
        if (count < 1) throw InvalidProblem("grid spec counts must be >= 1");
    };
    double r0 = 0.0, r1 = 0.0, t0 = 0.0, t1 = 0.0;
    int nr = 0, nt = 0;
    parse3(spec.substr(0, comma), r0, r1, nr);
    parse3(spec.substr(comma + 1), t0, t1, nt);
    PolarGrid g;
    for (int i = 0; i < nr; ++i) {
        g.radii.push_back(nr == 1 ? r0 : r0 + (r1 - r0) * i / (nr - 1));
    }
    for (int k = 0; k < nt; ++k) g.angles.push_back(t0 + (t1 - t0) * k / nt);
    return g;
}

/// CSV with '.' decimals, comma separators and a header row.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw Error("cannot open CSV output: " + path);
        out_.precision(16);
    }

    void header(const std::vector<std::string>& names) {
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (i > 0) out_ << ',';
            out_ << names[i];
        }
        out_ << '\n';
    }

    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i > 0) out_ << ',';
            out_ << values[i];
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

}  // namespace poincare::io
