#include "powermdp/errors.hpp"
#include "powermdp/figures.hpp"
#include "powermdp/power.hpp"

#include <doctest.h>

#include <cmath>

using namespace powermdp;

namespace {

const auto kUniform = RewardDistSpec::uniform();

McConfig mc(std::uint64_t n, std::uint64_t seed = 1, unsigned threads = 0) {
    McConfig c;
    c.samples = n;
    c.seed = seed;
    c.threads = threads;
    return c;
}

void check_close(const PowerEstimate& p, double want, double sigmas = 4.0) {
    CAPTURE(p.estimate);
    CAPTURE(p.std_error);
    CHECK(std::abs(p.estimate - want) <= sigmas * p.std_error + 1e-12);
}

} // namespace

TEST_CASE("a forced move into an absorbing state has the mean reward as POWER") {
    const auto mdp = MdpBuilder{}.edge("s", "t").self_loop("t").build();
    for (double g : {0.1, 0.5, 0.9}) check_close(power_at(mdp, 0, g, kUniform, mc(40000)), 0.5);
    check_close(power_at(mdp, 0, 0.5, RewardDistSpec::power_cdf(2.0), mc(40000)), 2.0 / 3);
}

TEST_CASE("fig2 left component closed forms") {
    const auto mdp = load_fixture("fig2a");
    const auto s1 = mdp.state_id("s1"), hub = mdp.state_id("hub");
    for (double g : {0.25, 2.0 / 3, 0.9}) {
        check_close(power_at(mdp, hub, g, kUniform, mc(40000)), 0.75);
        check_close(power_at(mdp, s1, g, kUniform, mc(40000)), (1 - g) * 0.5 + g * 0.75);
    }
    const auto z = power_limit_0(mdp, hub, kUniform);
    CHECK(z.method == "closed-form");
    CHECK(z.estimate == doctest::Approx(0.75));
    check_close(power_limit_1(mdp, s1, kUniform, mc(40000)), 0.75);
    check_close(power_any(mdp, s1, 1.0, kUniform, mc(40000)), 0.75);
    CHECK(power_any(mdp, s1, 0.0, kUniform, mc(1000)).estimate == doctest::Approx(0.5));
}

TEST_CASE("gamma -> 0 limit with a stochastic action stays inside its bracket") {
    // E max((r1 + r2) / 2, r3) for uniform rewards is 31/48.
    const auto mdp = MdpBuilder{}
                         .action("s", "split", {{"t1", 0.5}, {"t2", 0.5}})
                         .edge("s", "t3")
                         .self_loop("t1")
                         .self_loop("t2")
                         .self_loop("t3")
                         .build();
    const auto p = power_limit_0(mdp, 0, kUniform, mc(200000));
    check_close(p, 31.0 / 48);
    REQUIRE(p.bracket);
    CHECK(p.bracket->first <= p.estimate);
    CHECK(p.estimate <= p.bracket->second);
}

TEST_CASE("estimates are independent of the thread count") {
    const auto mdp = load_fixture("fig6");
    const auto s2 = mdp.state_id("s2");
    const auto a = power_at(mdp, s2, 0.7, kUniform, mc(30000, 9, 1));
    const auto b = power_at(mdp, s2, 0.7, kUniform, mc(30000, 9, 4));
    CHECK(a.estimate == b.estimate);
    CHECK(a.std_error == b.std_error);
    CHECK(power_at(mdp, s2, 0.7, kUniform, mc(30000, 10, 1)).estimate != a.estimate);
}

TEST_CASE("invalid requests are rejected") {
    const auto mdp = load_fixture("fig6");
    CHECK_THROWS_AS(power_at(mdp, 0, 0.5, kUniform, mc(99)), InvalidArgument);
    CHECK_THROWS_AS(power_at(mdp, 0, 1.0, kUniform, mc(1000)), InvalidArgument);
    CHECK_THROWS_AS(power_any(mdp, 0, 1.5, kUniform, mc(1000)), InvalidArgument);
    CHECK_THROWS_AS(power_any(mdp, 99, 0.5, kUniform, mc(1000)), LookupError);
}

TEST_CASE("strict comparison needs a 3 SE gap") {
    PowerEstimate a, b;
    a.estimate = 0.6;
    b.estimate = 0.5;
    a.std_error = b.std_error = 0.01;
    CHECK(strictly_greater(a, b));
    CHECK_FALSE(strictly_greater(b, a));
    a.std_error = b.std_error = 0.03;
    CHECK_FALSE(strictly_greater(a, b));
}

TEST_CASE("moving toward more options seeks power") {
    const auto mdp = load_fixture("fig6");
    const auto s2 = mdp.state_id("s2");
    const auto order = power_seeking_order(mdp, s2, 0.9, kUniform, mc(40000));
    REQUIRE(order.classes.size() == 2);
    CHECK(mdp.action_name(s2, order.classes[0].actions.front()) == "right");
    check_close(order.classes[0].expected_power, 2.0 / 3);
    check_close(order.classes[1].expected_power, 0.5);
    CHECK(order.strict[0][1]);
    CHECK_FALSE(order.strict[1][0]);
    const auto best = max_power_policy(mdp, 0.9, kUniform, mc(40000));
    CHECK(mdp.action_name(s2, best.policy.action[s2]) == "right");
}

TEST_CASE("POWER with respect to policy-generating functions") {
    const auto mdp = load_fixture("fig15");
    const auto s0 = mdp.state_id("s0");
    for (double g : {0.3, 0.9, 1.0}) check_close(power_wrt_polfn(mdp, s0, g, kUniform, uniform_random_polfn(mdp), mc(20000)), 0.5);

    // An optimal generator recovers POWER itself.
    const auto f6 = load_fixture("fig6");
    const auto s2 = f6.state_id("s2");
    const auto via = power_wrt_polfn(f6, s2, 0.6, kUniform, optimal_polfn(f6), mc(40000, 3));
    const auto direct = power_at(f6, s2, 0.6, kUniform, mc(40000, 4));
    CHECK(std::abs(via.estimate - direct.estimate) <= 4 * std::hypot(via.std_error, direct.std_error));

    const PolicyGenerator broken = [](const Eigen::VectorXd&, double) -> StochasticPolicy {
        throw std::runtime_error("boom");
    };
    CHECK_THROWS_AS(power_wrt_polfn(mdp, s0, 0.5, kUniform, broken, mc(1000)), PolicyGeneratorError);
}

TEST_CASE("gamma -> 0 bracket without sure children") {
    const auto mdp = MdpBuilder{}.action("s", "split", {{"t1", 0.5}, {"t2", 0.5}}).self_loop("t1").self_loop("t2").build();
    const auto p = power_limit_0(mdp, 0, kUniform, mc(20000));
    REQUIRE(p.bracket);
    CHECK(p.bracket->first == doctest::Approx(0.5));
    CHECK(p.bracket->second == doctest::Approx(2.0 / 3));
    check_close(p, 0.5);
    const auto one = MdpBuilder{}.edge("s", "t").self_loop("t").build();
    CHECK(power_limit_0(one, 0, kUniform).estimate == doctest::Approx(0.5));
}

TEST_CASE("fig2 right component has POWER 2/3 at every discount") {
    const auto mdp = load_fixture("fig2b");
    const auto s2 = mdp.state_id("s2");
    for (double g : {0.1, 0.5, 0.9}) check_close(power_at(mdp, s2, g, kUniform, mc(100000)), 2.0 / 3);
}
