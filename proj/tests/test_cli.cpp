#include "powermdp/cli.hpp"
#include "powermdp/errors.hpp"
#include "powermdp/figures.hpp"
#include "powermdp/report.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace powermdp;

namespace {

struct Outcome {
    int code;
    std::string out, err;
};

Outcome call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string fixture(const std::string& name) { return (kFixtureDir / name).string(); }

Json results_of(const Outcome& o) { return Json::parse(o.out).at("results"); }

} // namespace

TEST_CASE("exit codes") {
    CHECK(call({"validate", "--mdp", fixture("fig6.json")}).code == cli::kExitOk);
    CHECK(call({"validate", "--mdp", fixture("broken.json")}).code == cli::kExitDomain);
    CHECK(call({"validate", "--mdp", fixture("no_such.json")}).code == cli::kExitUsage);
    CHECK(call({"power", "--mdp", fixture("fig6.json"), "--bogus"}).code == cli::kExitUsage);
    CHECK(call({}).code == cli::kExitUsage);
    CHECK(call({"figures", "fig99"}).code == cli::kExitUsage);
    CHECK(call({"power", "--mdp", fixture("fig6.json"), "--state", "nowhere"}).code == cli::kExitUsage);
    CHECK(call({"power", "--mdp", fixture("fig6.json"), "--state", "s1", "--samples", "10"}).code == cli::kExitUsage);
    CHECK(call({"power", "--mdp", fixture("fig6.json"), "--state", "s1", "--gamma", "1:0:0.1"}).code == cli::kExitUsage);
    CHECK(call({"--help"}).code == cli::kExitOk);
}

TEST_CASE("gamma grids") {
    CHECK(cli::parse_gamma_grid("0.5") == std::vector<double>{0.5});
    const auto g = cli::parse_gamma_grid("0.1:0.3:0.1");
    REQUIRE(g.size() == 3);
    CHECK(g.back() == doctest::Approx(0.3));
    CHECK_THROWS_AS(cli::parse_gamma_grid("2"), InvalidArgument);
    CHECK_THROWS_AS(cli::parse_gamma_grid("0:1"), InvalidArgument);
    CHECK_THROWS_AS(cli::parse_gamma_grid("0:1:0"), InvalidArgument);
}

TEST_CASE("power reports are deterministic and thread invariant") {
    const std::vector<std::string> base{"power", "--mdp", fixture("fig2a.json"), "--state", "hub", "--gamma", "0.5",
                                        "--samples", "5000", "--seed", "3"};
    auto one = base, many = base;
    one.insert(one.end(), {"--threads", "1"});
    many.insert(many.end(), {"--threads", "3"});
    const auto a = call(one), b = call(many);
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(results_of(a) == results_of(b));
}

TEST_CASE("reports round-trip and sweeps write CSV") {
    const auto dir = std::filesystem::temp_directory_path() / "power_mdp_cli_test";
    std::filesystem::create_directories(dir);
    const auto json = (dir / "sweep.json").string();
    const auto o = call({"power", "--mdp", fixture("fig6.json"), "--state", "s2", "--gamma", "0.2:0.8:0.3",
                         "--samples", "2000", "--out", json});
    REQUIRE(o.code == 0);
    std::ifstream in(json);
    const auto j = Json::parse(in);
    const auto rep = AnalysisReport::from_json(j);
    CHECK(AnalysisReport::from_json(rep.to_json()) == rep);
    CHECK(rep.command.front() == "power_mdp");
    CHECK(std::filesystem::exists((dir / "sweep.csv").string()));
    std::ifstream csv((dir / "sweep.csv").string());
    std::string header;
    std::getline(csv, header);
    CHECK(header == "gamma,target,estimate,stderr");
    std::filesystem::remove_all(dir);
}

TEST_CASE("subcommands produce reports") {
    const auto f6 = fixture("fig6.json");
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"nondom", "--mdp", f6, "--state", "s2"},
             {"rsd", "--mdp", f6, "--state", "s2", "--nondominated"},
             {"optprob", "--mdp", f6, "--state", "s2", "--gamma", "0.5", "--samples", "2000"},
             {"optprob", "--mdp", f6, "--state", "s2", "--at-state", "s2", "--actions", "up,right", "--gamma", "1",
              "--samples", "2000"},
             {"shifts", "--mdp", fixture("fig10.json"), "--state", "s1", "--reward", fixture("fig10_reward.json")},
             {"check", "graph-options", "--mdp", fixture("graph_options.json"), "--state", "s", "--at-state", "sp",
              "--actions", "a,a_prime", "--samples", "2000"},
             {"check", "rsd-sim", "--mdp", fixture("fig2_union.json"), "--state", "s1", "--other-state", "s2",
              "--samples", "2000"},
             {"figures", "fig1", "--samples", "1000"},
         }) {
        CAPTURE(args[0]);
        const auto o = call(args);
        CHECK(o.code == 0);
        CHECK_NOTHROW(results_of(o));
    }
}
