#include "oracles.hpp"

#include "powermdp/errors.hpp"
#include "powermdp/figures.hpp"
#include "powermdp/mdp_io.hpp"
#include "powermdp/shifts.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace powermdp;

namespace {

// s0 either takes one unit of reward next step or waits a step for r_far
// forever. The far branch wins above gamma = 1 / (1 + r_far).
RewardlessMdp near_or_far() {
    return MdpBuilder{}
        .edge("s0", "near")
        .edge("s0", "x")
        .edge("near", "zero")
        .self_loop("zero")
        .edge("x", "far")
        .self_loop("far")
        .build();
}

} // namespace

TEST_CASE("one transversal breakpoint between a near and a far payoff") {
    const auto mdp = near_or_far();
    const auto r = parse_reward(R"({"near": 1.0, "far": 0.3333333333333333})", mdp);
    const auto fs = enumerate_visit_dists(mdp, 0);
    REQUIRE(fs.size() == 2);
    const auto near = visiting(fs, mdp.state_id("near")), far = visiting(fs, mdp.state_id("far"));
    CHECK(optimal_signature(fs, r, 0.5) == near);
    CHECK(optimal_signature(fs, r, 0.9) == far);
    const auto p = detect_shifts(fs, r);
    REQUIRE(p.breakpoints.size() == 1);
    CHECK(p.breakpoints[0].gamma == doctest::Approx(0.75).epsilon(1e-8));
    CHECK_FALSE(p.breakpoints[0].tangential);
    CHECK(p.breakpoints[0].before == near);
    CHECK(p.breakpoints[0].after == far);
    CHECK(p.breakpoints[0].at.size() == 2);
    REQUIRE(p.intervals.size() == 2);
    CHECK(blackwell_set(fs, r).signature == far);
    CHECK_THROWS_AS(detect_shifts(fs, r, 0.5), InvalidArgument);
}

TEST_CASE("figure shift scenarios") {
    for (const char* id : {"fig10", "subopt", "thm53-root"}) {
        CAPTURE(id);
        const auto b = run_figure(id, McConfig{});
        CHECK(b.pass());
    }
}

TEST_CASE("shift characterization on deterministic MDPs") {
    const auto mdp = near_or_far();
    const auto w = shift_possible(mdp, 0);
    REQUIRE(w);
    const auto hub = load_fixture("fig2a");
    CHECK_FALSE(shift_possible(hub, hub.state_id("hub")));
    const auto split = MdpBuilder{}.action("s", "a", {{"s", 0.5}, {"t", 0.5}}).self_loop("t").build();
    CHECK_THROWS_AS(shift_possible(split, 0), UnsupportedStructure);
}

TEST_CASE("transferred rewards reproduce the optimal actions at the target rate") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const auto mdp = oracle::random_mdp(rng, 3 + trial % 3, 3, 0.5);
        Eigen::VectorXd r(static_cast<Eigen::Index>(mdp.num_states()));
        for (auto& x : r) x = unit(rng);
        const double gs = 0.2 + 0.7 * unit(rng), gt = 0.2 + 0.7 * unit(rng);
        const auto moved = transfer_reward(mdp, r, gs, gt);
        CHECK(oracle::optimal_actions(mdp, moved, gt, 1e-7) == oracle::optimal_actions(mdp, r, gs, 1e-7));
    }
    CHECK_THROWS_AS(transfer_reward(near_or_far(), Eigen::VectorXd::Zero(6), 0.5, 1.0), InvalidArgument);
}

TEST_CASE("constant rewards and shift-free MDPs have no breakpoints") {
    const auto mdp = load_fixture("fig6");
    const auto fs = enumerate_visit_dists(mdp, mdp.state_id("s2"));
    CHECK(detect_shifts(fs, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(mdp.num_states()), 0.3)).breakpoints.empty());

    const auto hub = load_fixture("fig2a");
    const auto h = hub.state_id("hub");
    REQUIRE_FALSE(shift_possible(hub, h));
    const auto hfs = enumerate_visit_dists(hub, h);
    const auto u = RewardDistSpec::uniform();
    for (std::uint64_t i = 0; i < 100; ++i)
        CHECK(detect_shifts(hfs, u.draw(77, i, hub.num_states()), 1e-2).breakpoints.empty());
}

TEST_CASE("subopt reward transferred from 0.7 to 0.2 keeps its optimal set") {
    const auto mdp = load_fixture("subopt");
    const auto r = load_reward(kFixtureDir / "subopt_reward.json", mdp);
    const auto fs = enumerate_visit_dists(mdp, mdp.state_id("s0"));
    const auto moved = transfer_reward(mdp, r, 0.7, 0.2);
    CHECK(optimal_signature(fs, moved, 0.2) == optimal_signature(fs, r, 0.7));
}
