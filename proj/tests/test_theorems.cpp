#include "powermdp/errors.hpp"
#include "powermdp/figures.hpp"
#include "powermdp/rsd.hpp"
#include "powermdp/theorems.hpp"

#include <doctest.h>

using namespace powermdp;

namespace {

Eigen::MatrixXd column(std::initializer_list<double> xs) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(xs.size()), 1);
    Eigen::Index i = 0;
    for (double x : xs) m(i++, 0) = x;
    return m;
}

McConfig mc(std::uint64_t n) {
    McConfig c;
    c.samples = n;
    c.seed = 5;
    return c;
}

} // namespace

TEST_CASE("similarity search finds and replays permutations") {
    const std::vector<Eigen::MatrixXd> a{column({1, 0, 0}), column({0, 1, 0})};
    const std::vector<Eigen::MatrixXd> b{column({0, 0, 1}), column({0, 1, 0})};
    const StateSet none(3);
    const auto r = find_similarity(a, b, none);
    REQUIRE(r.outcome == SearchOutcome::found);
    REQUIRE(r.permutation);
    CHECK(replay_similarity(r, a, b, none, SimilarityMode::equal));
    CHECK(r.permutation->apply(a[0]).isApprox(b[r.image[0]]));

    // Fixing state 0 forbids moving e1 anywhere else.
    const StateSet fix0(3, {0});
    CHECK(find_similarity(a, b, fix0).outcome == SearchOutcome::none);

    const std::vector<Eigen::MatrixXd> bigger{column({0, 0, 1}), column({0, 1, 0}), column({1, 0, 0})};
    CHECK(find_similarity(a, bigger, fix0, SimilarityMode::into_subset).outcome == SearchOutcome::found);
    CHECK(find_similarity(a, bigger, fix0, SimilarityMode::equal).outcome == SearchOutcome::none);
    CHECK(find_similarity(a, bigger, none, SimilarityMode::into_subset, 1).outcome == SearchOutcome::inconclusive);
    CHECK_THROWS_AS(find_similarity(a, {column({1, 0})}, none), InvalidArgument);
}

TEST_CASE("graph options: the two-branch fixture holds and fig18 is rejected") {
    const auto mdp = load_fixture("graph_options");
    const StateId sp = mdp.state_id("sp");
    const auto v = check_graph_options(mdp, mdp.state_id("s"), sp, mdp.action_id(sp, "a"),
                                       mdp.action_id(sp, "a_prime"), RewardDistSpec::uniform(), mc(20000));
    CHECK(v.hypotheses_hold);
    CHECK(v.strict);
    CHECK(v.holds);
    REQUIRE(v.permutation);
    CHECK_FALSE(v.confirmations.empty());

    const auto f18 = load_fixture("fig18");
    const StateId s = f18.state_id("s");
    const auto w = check_graph_options(f18, s, s, f18.action_id(s, "up"), f18.action_id(s, "down"),
                                       RewardDistSpec::uniform(), mc(20000));
    CHECK_FALSE(w.hypotheses_hold);
    CHECK_FALSE(w.holds);
    CHECK_FALSE(w.failing_clause.empty());
}

TEST_CASE("rsd-ic rejects subsets that share support with outsiders") {
    // RSD_nd(s) holds x alone, the x-z cycle and y alone; x is shared.
    const auto mdp = MdpBuilder{}
                         .edge("s", "x")
                         .edge("s", "y")
                         .self_loop("x")
                         .edge("x", "z")
                         .edge("z", "x")
                         .self_loop("y")
                         .build();
    const auto nd = nondominated_rsds(mdp, 0).members;
    REQUIRE(nd.size() == 3);
    std::size_t only_x = nd.size(), only_y = nd.size();
    for (std::size_t i = 0; i < nd.size(); ++i) {
        if (nd[i].distribution(static_cast<Eigen::Index>(mdp.state_id("x"))) == doctest::Approx(1.0)) only_x = i;
        if (nd[i].distribution(static_cast<Eigen::Index>(mdp.state_id("y"))) == doctest::Approx(1.0)) only_y = i;
    }
    REQUIRE(only_x < nd.size());
    REQUIRE(only_y < nd.size());
    const auto u = RewardDistSpec::uniform();
    CHECK_THROWS_AS(check_rsd_ic(mdp, 0, {only_x}, {only_y}, u, mc(1000)), PreconditionViolation);
    CHECK_THROWS_AS(check_rsd_ic(mdp, 0, {7}, {only_y}, u, mc(1000)), LookupError);
}

TEST_CASE("rsd-sim power: three terminals beat two as gamma -> 1") {
    const auto mdp = load_fixture("fig2_union");
    const auto u = RewardDistSpec::uniform();
    const auto v = check_rsd_sim_power(mdp, mdp.state_id("s1"), mdp.state_id("s2"), u, mc(40000));
    CHECK(v.hypotheses_hold);
    CHECK(v.strict);
    CHECK(v.holds);
    const auto back = check_rsd_sim_power(mdp, mdp.state_id("s2"), mdp.state_id("s1"), u, mc(1000));
    CHECK_FALSE(back.hypotheses_hold);
    CHECK_FALSE(back.holds);
}
