#include "oracles.hpp"

#include "powermdp/errors.hpp"
#include "powermdp/figures.hpp"
#include "powermdp/reward_dist.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace powermdp;

namespace {

std::vector<double> sample(const RewardDistSpec& d, std::size_t n) {
    std::vector<double> xs;
    for (std::uint64_t i = 0; i < n; ++i) xs.push_back(d.draw(17, i, 1)(0));
    return xs;
}

} // namespace

TEST_CASE("parse accepts the three forms and rejects the rest") {
    CHECK(RewardDistSpec::parse("uniform").kind() == RewardDistSpec::Kind::uniform);
    const auto p = RewardDistSpec::parse("pow:2");
    CHECK(p.kind() == RewardDistSpec::Kind::power_cdf);
    CHECK(p.exponent() == 2.0);
    CHECK(RewardDistSpec::parse(p.describe()).exponent() == 2.0);
    const auto t = RewardDistSpec::parse("table:" + (kFixtureDir / "uniform_table.csv").string());
    CHECK(t.kind() == RewardDistSpec::Kind::table);
    CHECK(t.inverse_cdf(0.3) == doctest::Approx(0.3));
    for (const char* bad : {"", "normal", "pow:0", "pow:-1", "pow:x"})
        CHECK_THROWS_AS(RewardDistSpec::parse(bad), InvalidArgument);
    CHECK_THROWS(RewardDistSpec::parse("table:/no/such/file.csv"));
    CHECK_THROWS_AS(RewardDistSpec::table(parse_knots_csv("0.2,0\n1,1\n")), InvalidArgument);
    CHECK_THROWS_AS(RewardDistSpec::table(parse_knots_csv("0,0.5\n1,0.2\n")), InvalidArgument);
    CHECK_THROWS_AS(parse_knots_csv("0;0\n1;1\n"), InvalidArgument);
}

TEST_CASE("draws follow the requested distribution") {
    const auto u = RewardDistSpec::uniform();
    CHECK(oracle::ks_statistic(sample(u, 20000), [](double x) { return x; }) < 0.015);
    const auto p = RewardDistSpec::power_cdf(3.0);
    CHECK(oracle::ks_statistic(sample(p, 20000), [](double x) { return x * x * x; }) < 0.015);
    const auto t = RewardDistSpec::table({{0.0, 0.0}, {0.5, 0.8}, {1.0, 1.0}});
    CHECK(oracle::ks_statistic(sample(t, 20000), [&](double x) { return t.cdf(x); }) < 0.015);
    CHECK(t.cdf(0.8) == doctest::Approx(0.5));
}

TEST_CASE("draws are a pure function of seed and index") {
    const auto u = RewardDistSpec::uniform();
    CHECK((u.draw(5, 9, 4) - u.draw(5, 9, 4)).norm() == 0.0);
    CHECK((u.draw(5, 9, 4) - u.draw(5, 10, 4)).norm() > 0.0);
}

TEST_CASE("means and expected maxima have closed forms") {
    CHECK(RewardDistSpec::uniform().mean() == doctest::Approx(0.5));
    CHECK(RewardDistSpec::uniform().expected_max_of(3) == doctest::Approx(0.75));
    for (double k : {0.5, 2.0, 3.0}) {
        const auto d = RewardDistSpec::power_cdf(k);
        CHECK(d.mean() == doctest::Approx(k / (k + 1)));
        for (std::size_t m : {1u, 2u, 5u}) CHECK(d.expected_max_of(m) == doctest::Approx(oracle::expected_max_power_cdf(k, m)));
    }
    const auto t = RewardDistSpec::table({{0.0, 0.0}, {1.0, 1.0}});
    CHECK(t.mean() == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(t.expected_max_of(4) == doctest::Approx(0.8).epsilon(1e-4));
}
