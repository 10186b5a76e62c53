#include "powermdp/errors.hpp"
#include "powermdp/figures.hpp"
#include "powermdp/mdp.hpp"
#include "powermdp/mdp_io.hpp"
#include "powermdp/policy.hpp"

#include <doctest.h>

#include <filesystem>

using namespace powermdp;

namespace {

RewardlessMdp two_way() {
    return MdpBuilder{}.edge("s1", "s2").edge("s1", "s3").self_loop("s2").self_loop("s3").build();
}

} // namespace

TEST_CASE("builder creates states on demand and names actions") {
    const auto m = two_way();
    CHECK(m.num_states() == 3);
    CHECK(m.num_actions(0) == 2);
    CHECK(m.state_id("s3") == 2);
    CHECK(validate(m).empty());
    CHECK(m.is_deterministic());
    CHECK_THROWS_AS(m.state_id("nope"), LookupError);
}

TEST_CASE("validate reports every broken invariant") {
    MdpBuilder b;
    b.action("s", "a", {{"s", 0.9}});
    b.action("s", "b", {{"s", 1.2}, {"t", -0.2}});
    b.state("t");
    const auto m = b.build();
    const auto v = validate(m);
    CHECK(v.size() == 3);
    CHECK_THROWS_AS(m.require_valid(), InvalidMdp);
}

TEST_CASE("every fixture validates") {
    for (const auto& e : std::filesystem::directory_iterator(kFixtureDir)) {
        const auto name = e.path().stem().string();
        if (e.path().extension() != ".json" || name == "broken" || name.find("_reward") != std::string::npos) continue;
        CAPTURE(name);
        CHECK(validate(load_fixture(name)).empty());
    }
    CHECK_FALSE(validate(load_fixture("broken")).empty());
}

TEST_CASE("MDP JSON round trip and errors") {
    const auto m = load_fixture("fig14");
    const auto again = parse_mdp(dump_mdp(m));
    REQUIRE(again.num_states() == m.num_states());
    for (StateId s = 0; s < m.num_states(); ++s) {
        CHECK(again.state_name(s) == m.state_name(s));
        for (ActionId a = 0; a < m.num_actions(s); ++a)
            CHECK((again.dense_row(s, a) - m.dense_row(s, a)).norm() == 0.0);
    }
    CHECK_THROWS_AS(parse_mdp("{not json"), InvalidArgument);
    CHECK_THROWS_AS(parse_mdp(R"({"states": ["a"]})"), InvalidArgument);
    CHECK_THROWS_AS(read_text_file("/nonexistent/file.json"), LookupError);
}

TEST_CASE("reward files default unlisted states to zero") {
    const auto m = two_way();
    const auto r = parse_reward(R"({"s2": 0.25, "s3": -1})", m);
    CHECK(r(0) == 0.0);
    CHECK(r(1) == 0.25);
    CHECK(r(2) == -1.0);
    CHECK_THROWS_AS(parse_reward(R"({"zz": 1})", m), LookupError);
}

TEST_CASE("children, sure children and equivalent actions") {
    const auto m = load_fixture("fig14");
    const auto s1 = m.state_id("s1"), s2 = m.state_id("s2");
    CHECK(children(m, s1).count() == 3);
    CHECK(sure_children(m, s1).count() == 3);
    CHECK(children(m, s2).count() == 2);
    CHECK(sure_children(m, s2).empty());

    MdpBuilder b;
    b.edge("s", "t").edge("s", "t").edge("s", "u").self_loop("t").self_loop("u");
    const auto dup = b.build();
    const auto blocks = equivalent_actions(dup, 0);
    REQUIRE(blocks.size() == 2);
    CHECK(blocks[0] == std::vector<ActionId>{0, 1});
    CHECK(equivalent(dup, 0, 0, 1));
    CHECK_FALSE(equivalent(dup, 0, 0, 2));
    CHECK(action_classes(dup, 0).size() == 2);
}

TEST_CASE("reachability and bottlenecks") {
    const auto m = load_fixture("graph_options");
    const auto s = m.state_id("s"), sp = m.state_id("sp");
    CHECK(reachable_from(m, s).count() == m.num_states());
    const auto a = m.action_id(sp, "a");
    const auto reach = reach_after(m, sp, a);
    CHECK(reach.contains(m.state_id("l3")));
    CHECK_FALSE(reach.contains(m.state_id("r3")));
    ActionSet via(m.num_actions(sp), {a});
    CHECK(is_bottleneck(m, s, sp, via, reach).holds);

    const auto f = load_fixture("fig18");
    const auto start = f.state_id("s");
    ActionSet up(f.num_actions(start), {f.action_id(start, "up")});
    const auto b = is_bottleneck(f, start, start, up, reach_after(f, start, f.action_id(start, "up")));
    CHECK_FALSE(b.holds);
    CHECK_FALSE(b.violating_path.empty());
}

TEST_CASE("policy enumeration counts and cap") {
    const auto m = load_fixture("fig6");
    const auto s2 = m.state_id("s2");
    std::size_t n = 0;
    for_each_reachable_policy(m, s2, {}, [&](const Policy&, const StateSet&) { ++n; });
    CHECK(n == 3);
    CHECK(reachable_policy_count(m, s2) >= 3.0);
    CHECK_THROWS_AS(for_each_reachable_policy(m, s2, EnumerationConfig{2}, [](const Policy&, const StateSet&) {}),
                    EnumerationTooLarge);
    CHECK_THROWS_AS(check_policy(m, Policy{{0}}), InvalidArgument);
}
