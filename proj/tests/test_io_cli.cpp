#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include <renyi/divergences.hpp>
#include <renyi/io.hpp>
#include <renyi/verify.hpp>

using namespace renyi;
using Catch::Approx;

namespace {

std::filesystem::path tmp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

struct CmdResult {
    int code = -1;
    std::string out;
};

CmdResult run_cli(const std::string& args, bool merge_stderr = false, const std::string& env = "") {
    const char* cli = std::getenv("RENYI_CLI");
    REQUIRE(cli != nullptr);
    std::string cmd = (env.empty() ? "" : env + " ") + std::string(cli) + " " + args +
                      (merge_stderr ? " 2>&1" : " 2>/dev/null");
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    std::string out;
    size_t got;
    while ((got = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, got);
    int st = pclose(p);
    CmdResult r;
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    r.out = std::move(out);
    return r;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("doubles serialize round-trippably with textual infinities") {
    REQUIRE(format_double(kInf) == "inf");
    REQUIRE(format_double(-kInf) == "-inf");
    REQUIRE(format_double(std::nan("")) == "nan");
    REQUIRE(json_token(kInf) == "\"inf\"");
    REQUIRE(json_token(0.5) == "0.5");
    double v = 1.0 / 3.0;
    REQUIRE(std::stod(format_double(v)) == v);
}

TEST_CASE("operators survive a save and load round trip") {
    auto rho = random_density(3, 3, 5);
    auto path = tmp_file("renyi_roundtrip.json");
    save_operator(rho, path.string());
    auto back = load_operator(path.string());
    REQUIRE((back.entries - rho.entries).cwiseAbs().maxCoeff() < 1e-15);
    std::filesystem::remove(path);
}

TEST_CASE("operator loading rejects broken inputs by name") {
    REQUIRE_THROWS_AS(load_operator("/nonexistent/op.json"), precondition_error);
    auto bad = tmp_file("renyi_bad.json");
    std::ofstream(bad.string()) << "{ not json";
    REQUIRE_THROWS_AS(load_operator(bad.string()), precondition_error);
    std::ofstream(bad.string()) << "{\"dim\": 2, \"entries\": [[1.0, 0.0]]}";
    REQUIRE_THROWS_AS(load_operator(bad.string()), precondition_error);
    std::ofstream(bad.string())
        << "{\"dim\": 2, \"entries\": [[1.0, 0.0], [0.5, 0.1], [0.5, 0.2], [1.0, 0.0]]}";
    REQUIRE_THROWS_WITH(load_operator(bad.string()),
                        Catch::Matchers::ContainsSubstring("asymmetry"));
    std::filesystem::remove(bad);
}

TEST_CASE("grid grammars parse inclusively and reject malformed specs") {
    auto g = parse_real_grid("0:1:0.25");
    REQUIRE(g.size() == 5);
    REQUIRE(g.front() == 0.0);
    REQUIRE(g.back() == Approx(1.0));
    REQUIRE(parse_real_grid("2") == std::vector<double>{2.0});
    REQUIRE_THROWS_AS(parse_real_grid("abc"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_real_grid("0:1"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_real_grid("0:1:0"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_real_grid("1:0:0.5"), std::invalid_argument);
    REQUIRE(parse_n_list("3") == std::vector<int>{3});
    REQUIRE(parse_n_list("2..5") == std::vector<int>{2, 3, 4, 5});
    REQUIRE_THROWS_AS(parse_n_list("0"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_n_list("5..2"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_n_list("x..2"), std::invalid_argument);
}

TEST_CASE("cli help and usage errors use the documented exit codes") {
    REQUIRE(run_cli("--help").code == 0);
    REQUIRE(run_cli("divergence --help").code == 0);
    REQUIRE(run_cli("").code == 1);
    REQUIRE(run_cli("--no-such-flag").code == 1);
    REQUIRE(run_cli("divergence --kind bogus").code == 1);
    REQUIRE(run_cli("simulate np --n 1..3").code == 1);  // missing --a
}

TEST_CASE("cli divergence sweep emits the pinned header and correct values") {
    auto r = run_cli("divergence --alpha 0.25:3:0.55");
    REQUIRE(r.code == 0);
    REQUIRE(first_line(r.out) == "alpha,value_old,value_new,unit");
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    auto P = canonical_pair();
    int rows = 0;
    while (std::getline(lines, line)) {
        std::istringstream cells(line);
        std::string tok;
        std::getline(cells, tok, ',');
        double alpha = std::stod(tok);
        std::getline(cells, tok, ',');
        REQUIRE(std::stod(tok) == Approx(renyi_old(P, alpha)).margin(1e-12));
        std::getline(cells, tok, ',');
        REQUIRE(std::stod(tok) == Approx(renyi_new(P, alpha)).margin(1e-12));
        std::getline(cells, tok, ',');
        REQUIRE(tok == "nats");
        ++rows;
    }
    REQUIRE(rows == 6);
}

TEST_CASE("cli alpha=1 is a usage error pointing to umegaki") {
    auto r = run_cli("divergence --alpha 1 --kind new", true);
    REQUIRE(r.code == 1);
    REQUIRE(r.out.find("alpha=1: use --kind umegaki") != std::string::npos);
    REQUIRE(run_cli("divergence --alpha 0.5:3:0.5").code == 1);  // sweep hits alpha=1
    REQUIRE(run_cli("divergence --alpha 1 --kind umegaki").code == 0);
}

TEST_CASE("cli unit conversion divides nat values by log two once") {
    auto nats = run_cli("divergence --alpha 2 --kind new");
    auto bits = run_cli("divergence --alpha 2 --kind new --unit bits");
    REQUIRE(nats.code == 0);
    REQUIRE(bits.code == 0);
    auto pick = [](const std::string& out) {
        std::istringstream lines(out);
        std::string header, row;
        std::getline(lines, header);
        std::getline(lines, row);
        std::istringstream cells(row);
        std::string tok;
        for (int i = 0; i < 3; ++i) std::getline(cells, tok, ',');
        return std::stod(tok);
    };
    REQUIRE(pick(bits.out) == Approx(pick(nats.out) / std::log(2.0)).margin(1e-12));
    REQUIRE(bits.out.find("bits") != std::string::npos);
}

TEST_CASE("cli loads operators from fixture files") {
    const char* fixtures = std::getenv("RENYI_FIXTURES");
    REQUIRE(fixtures != nullptr);
    std::string rho = std::string(fixtures) + "/rho_canonical.json";
    std::string sigma = std::string(fixtures) + "/sigma_canonical.json";
    auto r = run_cli("divergence --rho " + rho + " --sigma " + sigma + " --alpha 2 --kind new");
    REQUIRE(r.code == 0);
    auto builtin = run_cli("divergence --alpha 2 --kind new");
    REQUIRE(r.out == builtin.out);
    REQUIRE(run_cli("divergence --rho /missing.json").code == 2);
}

TEST_CASE("cli exponent sweeps carry their pinned headers") {
    auto r = run_cli("exponents --quantity converse-hoeffding --r-grid 0:1:0.25");
    REQUIRE(r.code == 0);
    REQUIRE(first_line(r.out) == "r,Hr_star,a_r,phi");
    auto c = run_cli("exponents --quantity cutoff --kappa-grid 0.5");
    REQUIRE(c.code == 0);
    REQUIRE(first_line(c.out) == "kappa,C_kappa,r_kappa");
    auto p = run_cli("exponents --quantity psi --s-grid 0:2:1");
    REQUIRE(p.code == 0);
    REQUIRE(first_line(p.out) == "s,psi");
    REQUIRE(run_cli("exponents").code == 1);  // --quantity is required
}

TEST_CASE("cli simulate emits rate table rows with bound flags") {
    auto r = run_cli("simulate --a 0.15 --n 1..4");
    REQUIRE(r.code == 0);
    REQUIRE(first_line(r.out) ==
            "n,a,phi_a,rate_success,rate_type2,limit_success,limit_type2,dev_success,"
            "dev_type2,ok_quotient,ok_success,ok_type2");
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    int rows = 0;
    while (std::getline(lines, line)) {
        REQUIRE(line.substr(line.size() - 5) == "1,1,1");
        ++rows;
    }
    REQUIRE(rows == 4);
    auto np = run_cli("simulate np --a 0.15 --n 2..3");
    REQUIRE(np.code == 0);
    REQUIRE(first_line(np.out) == "n,a,alpha_err,beta_err");
}

TEST_CASE("cli json format emits parseable arrays") {
    auto r = run_cli("divergence --alpha 0.5 --format json");
    REQUIRE(r.code == 0);
    auto parsed = nlohmann::json::parse(r.out);
    REQUIRE(parsed.is_array());
    REQUIRE(parsed.size() == 1);
    REQUIRE(parsed[0]["alpha"] == 0.5);
    REQUIRE(parsed[0]["unit"] == "nats");
}

TEST_CASE("cli verify emits a report array and exit zero on success") {
    auto r = run_cli("verify alt --trials 10 --seed 42");
    REQUIRE(r.code == 0);
    auto parsed = nlohmann::json::parse(r.out);
    REQUIRE(parsed.is_array());
    REQUIRE(parsed.size() == 1);
    REQUIRE(parsed[0]["check_name"] == "alt");
    REQUIRE(parsed[0]["passed"] == true);
    REQUIRE(parsed[0]["seed"] == 42);
}

TEST_CASE("cli respects the tensor cap override with exit code two") {
    auto r = run_cli("simulate np --a 0.1 --n 6..6", false, "RENYI_MAX_DIM=16");
    REQUIRE(r.code == 2);
    auto ok = run_cli("simulate np --a 0.1 --n 4..4", false, "RENYI_MAX_DIM=16");
    REQUIRE(ok.code == 0);
}

TEST_CASE("cli output files are byte identical across reruns") {
    auto p1 = tmp_file("renyi_out1.csv");
    auto p2 = tmp_file("renyi_out2.csv");
    std::string args = "exponents --quantity hoeffding --r-grid 0:0.02:0.01 --out ";
    REQUIRE(run_cli(args + p1.string()).code == 0);
    REQUIRE(run_cli(args + p2.string()).code == 0);
    std::ifstream f1(p1.string()), f2(p2.string());
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    REQUIRE(s1.str() == s2.str());
    REQUIRE(first_line(s1.str()) == "r,Hr");
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
}
