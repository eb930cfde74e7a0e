#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string cli_path() {
    const char* p = std::getenv("FUZZYGEOM_CLI");
    REQUIRE_MESSAGE(p != nullptr, "FUZZYGEOM_CLI must point at the built binary");
    return p;
}

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string out_file = "/tmp/fuzzygeom_cli_test_out.txt";
    const std::string cmd = cli_path() + " " + args + " > " + out_file + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream f(out_file, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    r.out = ss.str();
    return r;
}

std::string first_line(const std::string& s) {
    return s.substr(0, s.find('\n'));
}

}  // namespace

TEST_CASE("sphere sweep: header contract and closed-form chi column") {
    const auto r = run("fuzzy sphere --n 2..5 --chi --zero-timing");
    CHECK(r.exit_code == 0);
    CHECK(first_line(r.out) == "N,hbar,chi_hat,chi_err,kappa,lambda_min,runtime_ms");

    std::stringstream ss(r.out);
    std::string line;
    std::getline(ss, line);  // header
    int expected_n = 2;
    while (std::getline(ss, line)) {
        std::stringstream ls(line);
        std::string tok;
        std::getline(ls, tok, ',');
        CHECK(std::stoi(tok) == expected_n);
        std::getline(ls, tok, ',');  // hbar
        CHECK(std::stod(tok) ==
              doctest::Approx(2.0 / std::sqrt(expected_n * expected_n - 1.0)).epsilon(1e-14));
        std::getline(ls, tok, ',');  // chi_hat
        CHECK(std::stod(tok) ==
              doctest::Approx(2.0 * expected_n / std::sqrt(expected_n * expected_n - 1.0))
                  .epsilon(1e-12));
        ++expected_n;
    }
    CHECK(expected_n == 6);
    // LF line endings only.
    CHECK(r.out.find('\r') == std::string::npos);
}

TEST_CASE("deterministic output: identical bytes across runs and job counts") {
    const auto a = run("fuzzy sphere --n 2..8 --chi --spectrum --zero-timing");
    const auto b = run("fuzzy sphere --n 2..8 --chi --spectrum --zero-timing");
    const auto c = run("fuzzy sphere --n 2..8 --chi --spectrum --zero-timing --jobs 3");
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
}

TEST_CASE("json report: field order and content") {
    const std::string path = "/tmp/fuzzygeom_cli_test.json";
    const auto r = run("fuzzy torus --n 4,8 --chi --spectrum --zero-timing --out " + path);
    CHECK(r.exit_code == 0);
    std::ifstream f(path);
    nlohmann::ordered_json j;
    f >> j;
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 2);
    const auto& rep = j[0];
    // Fixed field order.
    auto it = rep.begin();
    CHECK(it.key() == "surface");
    ++it;
    CHECK(it.key() == "N");
    CHECK(rep["N"] == 4);
    CHECK(std::abs(rep["chi_hat"].get<double>()) < 1e-11);
    CHECK(rep["bound_satisfied"].get<bool>());
    CHECK(rep["formulation"] == "normals");
    std::remove(path.c_str());
}

TEST_CASE("axial solve: hbar column equals 2/sqrt(N^2-1)") {
    const auto r = run("fuzzy axial --n 8,16 --chi --zero-timing");
    CHECK(r.exit_code == 0);
    std::stringstream ss(r.out);
    std::string line;
    std::getline(ss, line);
    for (int n : {8, 16}) {
        REQUIRE(std::getline(ss, line));
        std::stringstream ls(line);
        std::string tok;
        std::getline(ls, tok, ',');
        CHECK(std::stoi(tok) == n);
        std::getline(ls, tok, ',');
        CHECK(std::stod(tok) == doctest::Approx(2.0 / std::sqrt(n * n - 1.0)).epsilon(1e-9));
    }
}

TEST_CASE("exit codes: usage, precondition, bound failure") {
    CHECK(run("fuzzy sphere --badflag").exit_code == 2);
    CHECK(run("fuzzy sphere --n 5,3").exit_code == 2);
    CHECK(run("fuzzy bogus").exit_code == 2);
    CHECK(run("continuum --preset sphere --grid 16 --check gauss-bonnet").exit_code == 3);
    CHECK(run("continuum --preset sphere --grid 16 --check bogus").exit_code == 2);
    CHECK(run("bound sphere --n 70..71").exit_code == 2);  // superoperator cap
    // Axial quartic at small N violates the bound: table emitted, exit 1.
    const auto r = run("bound axial --n 4..5");
    CHECK(r.exit_code == 1);
    CHECK(first_line(r.out) == "N,kappa,lambda_min_nonzero,two_kappa,satisfied");
}

TEST_CASE("bound tables: sphere saturates, torus passes") {
    const auto r = run("bound sphere --n 2..6");
    CHECK(r.exit_code == 0);
    std::stringstream ss(r.out);
    std::string line;
    std::getline(ss, line);
    while (std::getline(ss, line)) {
        std::stringstream ls(line);
        std::string tok;
        std::getline(ls, tok, ',');  // N
        std::getline(ls, tok, ',');
        CHECK(std::stod(tok) == doctest::Approx(1.0).epsilon(1e-9));  // kappa
        std::getline(ls, tok, ',');
        CHECK(std::stod(tok) == doctest::Approx(2.0).epsilon(1e-9));  // lambda_min
        std::getline(ls, tok, ',');
        std::getline(ls, tok, ',');
        CHECK(tok == "1");  // satisfied
    }
    CHECK(run("bound torus --n 4..6").exit_code == 0);
}

TEST_CASE("continuum curvature table shape") {
    const auto r = run("continuum --preset torus_rev --grid 16,32 --check curvature");
    CHECK(r.exit_code == 0);
    CHECK(first_line(r.out) == "grid,h,max_K_error");
    std::stringstream ss(r.out);
    std::string line;
    std::getline(ss, line);
    int rows = 0;
    while (std::getline(ss, line)) {
        ++rows;
        std::stringstream ls(line);
        std::string tok;
        std::getline(ls, tok, ',');
        std::getline(ls, tok, ',');
        std::getline(ls, tok, ',');
        CHECK(std::stod(tok) < 1e-10);  // band-limited embedding: rounding only
    }
    CHECK(rows == 2);
}

TEST_CASE("continuum identities run on the clifford torus") {
    const auto r = run("continuum --preset clifford --grid 16 --check identities");
    CHECK(r.exit_code == 0);
    CHECK(first_line(r.out).rfind("grid,h,pi_idempotency,gram_eigen,gram_count,leibniz",
                                  0) == 0);
}
