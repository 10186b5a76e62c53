#include "powermdp/errors.hpp"
#include "powermdp/figures.hpp"
#include "powermdp/rsd.hpp"

#include <doctest.h>

#include <algorithm>

using namespace powermdp;

TEST_CASE("recurrent state distributions of fig2 left and fig14") {
    const auto f2 = load_fixture("fig2a");
    CHECK(enumerate_rsds(f2, f2.state_id("s1")).size() == 3);

    const auto mdp = load_fixture("fig14");
    const auto s1 = mdp.state_id("s1");
    const auto analysis = nondominated_rsds(mdp, s1);
    Eigen::VectorXd half = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mdp.num_states()));
    half(static_cast<Eigen::Index>(mdp.state_id("s3"))) = 0.5;
    half(static_cast<Eigen::Index>(mdp.state_id("s4"))) = 0.5;
    const auto it = std::find_if(analysis.all.begin(), analysis.all.end(), [&](const Rsd& d) {
        return (d.distribution - half).cwiseAbs().maxCoeff() <= kRsdTolerance;
    });
    REQUIRE(it != analysis.all.end());
    for (const auto& d : analysis.members) CHECK((d.distribution - half).cwiseAbs().maxCoeff() > kRsdTolerance);
    CHECK(analysis.members.size() == 2);
    for (const auto& d : analysis.all) CHECK(d.distribution.sum() == doctest::Approx(1.0));
}

TEST_CASE("stochastic policies mix the recurrent classes") {
    const auto mdp = load_fixture("fig1");
    const auto s = StochasticPolicy::uniform(mdp);
    const auto d = rsd_of_policy(mdp, s, 0);
    CHECK(d.sum() == doctest::Approx(1.0));
    CHECK((d.array() >= 0.0).all());
    CHECK_THROWS_AS(rsd_of_policy(mdp, s, 99), LookupError);
}

TEST_CASE("discounted visits approach the RSD as gamma -> 1") {
    const auto mdp = load_fixture("fig6");
    for (const auto& d : enumerate_rsds(mdp, mdp.state_id("s2"))) {
        const double far = rsd_limit_consistency(mdp, d.policy, mdp.state_id("s2"), 0.99);
        const double near = rsd_limit_consistency(mdp, d.policy, mdp.state_id("s2"), 0.9999);
        CHECK(near < 1e-3);
        CHECK(near < far);
    }
}
