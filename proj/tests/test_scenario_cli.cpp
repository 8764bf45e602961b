#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "longidesign/cli.hpp"
#include "longidesign/scenario.hpp"
#include "longidesign/solvers.hpp"

using namespace longidesign;
using nlohmann::json;

namespace {

json minimal_doc() {
    return json::parse(R"({
      "schema_version": 1,
      "hypothesis": "cmd",
      "grid": { "r": 6, "mode": "fixed_s", "value": 3.0 },
      "population": { "pe": 0.79 },
      "covariance": { "type": "cs", "sigma2": 0.3214, "rho": 0.857 },
      "effect": { "mu00": 3.5086, "p1": 0.1 }
    })");
}

int run_cli(std::vector<std::string> args) {
    std::vector<char*> argv;
    args.insert(args.begin(), "longidesign");
    for (std::string& a : args) argv.push_back(a.data());
    return longidesign::run(static_cast<int>(argv.size()), argv.data());
}

std::string write_temp(const json& doc, const std::string& name) {
    const std::string path = "/tmp/" + name;
    std::ofstream f(path);
    f << doc.dump(2);
    return path;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("minimal scenario parses with the default alpha echoed") {
    const Scenario sc = parse_scenario(minimal_doc());
    CHECK(sc.query.alpha == 0.05);
    CHECK(sc.raw.at("alpha") == 0.05);
    CHECK(sc.query.hyp == Hypothesis::CMD);
    CHECK(sc.query.pop.v_t0 == 0.0);
    CHECK(sc.query.grid.spacing() == 3.0);
}

TEST_CASE("unknown keys are rejected with the offending path") {
    json doc = minimal_doc();
    doc["grid"]["spacing"] = 3.0;
    try {
        parse_scenario(doc);
        FAIL("expected a validation error");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("grid.spacing") != std::string::npos);
    }
}

TEST_CASE("population invariants are enforced with field context") {
    json doc = minimal_doc();
    doc["population"]["rho_e_t0"] = 0.5;  // with v_t0 = 0
    try {
        parse_scenario(doc);
        FAIL("expected a validation error");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("population") != std::string::npos);
    }
}

TEST_CASE("reliability-notation random slopes block") {
    json doc = minimal_doc();
    doc["hypothesis"] = "ldd";
    doc["effect"] = {{"mu00", 3.5}, {"p1", 0.1}, {"p2", -0.182}, {"p3", 0.1}};
    doc["grid"] = {{"r", 6}, {"mode", "fixed_tau"}, {"value", 18.0}};
    doc["covariance"] = {
        {"type", "rs"},
        {"intuitive",
         {{"sigma_t0_2", 0.34},
          {"rho_t0", 0.877},
          {"rho_b0b1", -0.32},
          {"slope_rel", 0.364},
          {"r_tilde", 6},
          {"mode", "fixed_tau"},
          {"horizon", 18.0}}}};
    const Scenario sc = parse_scenario(doc);
    const auto& rs = std::get<RsParams>(sc.query.cov.v);
    REQUIRE(rs.intuitive.has_value());
    CHECK(rs.intuitive->slope_rel == 0.364);
    CHECK(rs.raw.sigma_b0_2 == doctest::Approx(0.877 * 0.34));
    CHECK(rs.raw.sigma_w2 == doctest::Approx(0.123 * 0.34));

    // Supplying both notations is ambiguous.
    doc["covariance"]["raw"] = {{"sigma_w2", 1.0},
                                {"sigma_b0_2", 0.0},
                                {"sigma_b1_2", 0.0},
                                {"sigma_b0b1", 0.0}};
    CHECK_THROWS_AS(parse_scenario(doc), DomainError);
}

TEST_CASE("scenario serialization round-trips") {
    json doc = minimal_doc();
    doc["target_power"] = 0.9;
    doc["cost"] = {{"c1", 80.0}, {"kappa", 20.0}, {"budget", 15000.0}};
    doc["r_max"] = 18;
    const Scenario sc = parse_scenario(doc);
    const Scenario back = parse_scenario(scenario_to_json(sc));
    CHECK(back.query.alpha == sc.query.alpha);
    CHECK(back.query.grid.r == sc.query.grid.r);
    CHECK(back.query.pop.pe == sc.query.pop.pe);
    CHECK(*back.target_power == 0.9);
    REQUIRE(back.cost.has_value());
    CHECK(back.cost->kappa == 20.0);
    CHECK(std::get<Budget>(back.cost->constraint).total == 15000.0);
    CHECK(*back.r_max == 18);
    // The two parses drive the solver identically.
    CHECK(required_n(0.9, back.query).n == required_n(0.9, sc.query).n);
}

TEST_CASE("schema version is enforced") {
    json doc = minimal_doc();
    doc["schema_version"] = 2;
    CHECK_THROWS_AS(parse_scenario(doc), DomainError);
    doc.erase("schema_version");
    CHECK_THROWS_AS(parse_scenario(doc), DomainError);
}

TEST_CASE("cli: required sample size from a scenario file") {
    json doc = minimal_doc();
    doc["hypothesis"] = "ldd";
    doc["effect"] = {{"mu00", 3.5086}, {"p1", 0.1}, {"p2", -0.182}, {"p3", 0.1}};
    doc["grid"] = {{"r", 6}, {"mode", "fixed_tau"}, {"value", 18.0}};
    doc["target_power"] = 0.9;
    const std::string path = write_temp(doc, "cli_n.json");
    const std::string out = "/tmp/cli_n_out.json";
    CHECK(run_cli({"n", "--scenario", path, "--format", "json", "--out", out}) ==
          0);
    const json res = json::parse(slurp(out));
    CHECK(res.at("n") == 918);
    std::remove(path.c_str());
    std::remove(out.c_str());
}

TEST_CASE("cli: power with a zero effect is the two-sided type-I rate") {
    json doc = minimal_doc();
    doc["effect"] = {{"mu00", 3.5086}, {"p1", 0.0}};
    doc["n"] = 500;
    const std::string path = write_temp(doc, "cli_p0.json");
    const std::string out = "/tmp/cli_p0_out.json";
    CHECK(run_cli({"power", "--scenario", path, "--format", "json", "--out",
                   out}) == 0);
    const json res = json::parse(slurp(out));
    CHECK(res.at("power").get<double>() == doctest::Approx(0.025).epsilon(1e-9));
    std::remove(path.c_str());
    std::remove(out.c_str());
}

TEST_CASE("cli: exit codes distinguish bad input from unattainable targets") {
    // Malformed scenario -> validation failure (2).
    json doc = minimal_doc();
    doc["bogus"] = 1;
    const std::string bad = write_temp(doc, "cli_bad.json");
    CHECK(run_cli({"n", "--scenario", bad, "--out", "/tmp/cli_sink.txt"}) == 2);
    std::remove(bad.c_str());

    // Unreachable power for any r -> computation failure (1).
    json hard = minimal_doc();
    hard["target_power"] = 0.9;
    hard["n"] = 60.0;
    const std::string path = write_temp(hard, "cli_hard.json");
    CHECK(run_cli({"r", "--scenario", path, "--out", "/tmp/cli_sink.txt"}) == 1);
    std::remove(path.c_str());

    // Missing scenario file.
    CHECK(run_cli({"power", "--scenario", "/tmp/no_such_file.json"}) == 2);
}

TEST_CASE("cli: sweep emits one row per axis value") {
    json doc = minimal_doc();
    doc["target_power"] = 0.9;
    doc["sweep"] = {
        {"solve", "n"},
        {"axes", json::array({{{"path", "covariance.rho"},
                               {"values", {0.3, 0.5, 0.7}}}})}};
    const std::string path = write_temp(doc, "cli_sweep.json");
    const std::string out = "/tmp/cli_sweep_out.json";
    CHECK(run_cli({"sweep", "--scenario", path, "--format", "json", "--out",
                   out}) == 0);
    const json res = json::parse(slurp(out));
    REQUIRE(res.is_array());
    REQUIRE(res.size() == 3);
    CHECK(res[0].at("covariance.rho") == 0.3);
    // Stronger within-person correlation inflates the level-difference
    // variance (1 + r rho), so the required sample grows along the axis.
    CHECK(res[2].at("n").get<long long>() > res[0].at("n").get<long long>());
    std::remove(path.c_str());
    std::remove(out.c_str());
}

TEST_CASE("cli: verify exits zero and reports every check") {
    const std::string out = "/tmp/cli_verify_out.json";
    CHECK(run_cli({"verify", "--replicates", "5000", "--seed", "11",
                   "--format", "json", "--out", out}) == 0);
    const json res = json::parse(slurp(out));
    REQUIRE(res.is_array());
    CHECK(res.size() >= 10);
    for (const json& row : res) CHECK(row.at("passed") == true);
    std::remove(out.c_str());
}
