#include "powermdp/errors.hpp"
#include "powermdp/figures.hpp"
#include "powermdp/nondom.hpp"
#include "powermdp/optprob.hpp"
#include "powermdp/rsd.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace powermdp;

namespace {

const auto kUniform = RewardDistSpec::uniform();

McConfig mc(std::uint64_t n, std::uint64_t seed = 1) {
    McConfig c;
    c.samples = n;
    c.seed = seed;
    return c;
}

std::vector<Target> singletons(std::size_t k) {
    std::vector<Target> out;
    for (std::size_t i = 0; i < k; ++i) out.push_back({i});
    return out;
}

} // namespace

TEST_CASE("optprob matches an independent simulation on fig6") {
    const auto mdp = load_fixture("fig6");
    const auto s2 = mdp.state_id("s2");
    const auto fs = nondominated_functions(enumerate_visit_dists(mdp, s2));
    REQUIRE(fs.size() == 3);
    const double g = 0.5;
    const auto est = optprob(fs, singletons(3), g, kUniform, mc(100000));

    // Reference: argmax of f(g)^T r with rewards from a different generator.
    const auto cols = stack_at(fs, g);
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> hits(3, 0.0);
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd r(cols.rows());
        for (auto& x : r) x = unit(rng);
        Eigen::Index best = 0;
        (cols.transpose() * r).maxCoeff(&best);
        hits[static_cast<std::size_t>(best)] += 1.0;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double ref = hits[i] / n;
        const double se = std::hypot(est.std_errors[i], std::sqrt(ref * (1 - ref) / n));
        CHECK(std::abs(est.probabilities[i] - ref) <= 4 * se);
        total += est.probabilities[i];
    }
    CHECK(total == doctest::Approx(1.0));
    CHECK(est.ties == 0);
}

TEST_CASE("identical candidates tie on every sample") {
    Eigen::MatrixXd c(2, 2);
    c << 1.0, 1.0,
         0.0, 0.0;
    const auto est = optprob_columns(c, singletons(2), kUniform, mc(500), 0.5);
    CHECK(est.ties == 500);
    CHECK(est.probabilities[0] == 0.0);
    CHECK_THROWS_AS(optprob_columns(c, {{5}}, kUniform, mc(500), 0.5), LookupError);
}

TEST_CASE("targets may group several candidates and the paired difference is reported") {
    const auto mdp = load_fixture("fig15");
    const auto fs = nondominated_functions(enumerate_visit_dists(mdp, mdp.state_id("s0")));
    REQUIRE(fs.size() == 5);
    const auto left = restrict_by_action(mdp, fs, mdp.state_id("s0"), mdp.action_id(mdp.state_id("s0"), "left"));
    const auto right = restrict_by_action(mdp, fs, mdp.state_id("s0"), mdp.action_id(mdp.state_id("s0"), "right"));
    CHECK(left.size() == 2);
    CHECK(right.size() == 3);
    const auto est = optprob(fs, {left, right}, 0.9, kUniform, mc(100000));
    CHECK(std::abs(est.probabilities[0] - 0.4) <= 4 * est.std_errors[0]);
    CHECK(std::abs(est.paired_difference + 0.2) <= 4 * est.paired_std_error);
}

TEST_CASE("restriction keeps functions that never visit the state") {
    const auto mdp = load_fixture("fig6");
    const auto s2 = mdp.state_id("s2"), m = mdp.state_id("m");
    const auto fs = nondominated_functions(enumerate_visit_dists(mdp, s2));
    const auto up_at_m = restrict_by_action(mdp, fs, m, mdp.action_id(m, "up"));
    // The function going up at s2 never reaches m.
    CHECK(up_at_m.size() == 2);
    CHECK_THROWS_AS(restrict_by_action(mdp, fs, m, 7), LookupError);
}

TEST_CASE("near-1 and RSD-level answers agree on fig17") {
    const auto mdp = load_fixture("fig17");
    const auto s1 = mdp.state_id("s1");
    const auto fs = nondominated_functions(enumerate_visit_dists(mdp, s1));
    const auto right = restrict_by_action(mdp, fs, s1, mdp.action_id(s1, "right"));
    const auto f1 = optprob_near1(fs, {right}, kUniform, mc(50000));
    CHECK(f1.warnings.empty());
    CHECK(std::abs(f1.probabilities[0] - 0.4) <= 4 * f1.std_errors[0]);

    const auto rsds = nondominated_rsds(mdp, s1).members;
    REQUIRE(rsds.size() == 5);
    const auto r1 = optprob_gamma1(rsds, singletons(5), kUniform, mc(50000));
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(r1.probabilities[i] - 0.2) <= 4 * r1.std_errors[i]);
}

TEST_CASE("robust instrumentality verdicts on fig17") {
    const auto mdp = load_fixture("fig17");
    const auto s1 = mdp.state_id("s1");
    const auto right = mdp.action_id(s1, "right"), t1 = mdp.action_id(s1, "to_t1"), t2 = mdp.action_id(s1, "to_t2");
    CHECK(robust_instrumentality(mdp, s1, s1, right, t1, 0.999, kUniform, mc(50000)).verdict == "a");
    CHECK(robust_instrumentality(mdp, s1, s1, t1, right, 0.999, kUniform, mc(50000)).verdict == "a_prime");
    CHECK(robust_instrumentality(mdp, s1, s1, t1, t2, 0.999, kUniform, mc(50000)).verdict == "tie");
}

TEST_CASE("fig8 action restrictions") {
    const auto mdp = load_fixture("fig8");
    const auto s1 = mdp.state_id("s1");
    const auto fs = nondominated_functions(enumerate_visit_dists(mdp, s1));
    CHECK(restrict_by_action(mdp, fs, s1, mdp.action_id(s1, "up")).size() == 1);
    CHECK(restrict_by_action(mdp, fs, s1, mdp.action_id(s1, "right")).size() == 2);
}

TEST_CASE("estimates are additive, rarely tied and continuous in gamma") {
    const auto mdp = load_fixture("fig6");
    const auto fs = nondominated_functions(enumerate_visit_dists(mdp, mdp.state_id("s2")));
    std::vector<double> previous;
    for (int k = 1; k < 20; ++k) {
        const double g = 0.05 * k;
        const auto e = optprob(fs, singletons(fs.size()), g, kUniform, mc(100000));
        CHECK(static_cast<double>(e.ties) / static_cast<double>(e.samples) < 1e-3);
        double total = 0.0, se = 0.0;
        for (std::size_t i = 0; i < fs.size(); ++i) {
            total += e.probabilities[i];
            se += e.std_errors[i];
            CHECK(e.probabilities[i] > 0.0);
        }
        CHECK(std::abs(total - 1.0) <= static_cast<double>(e.ties) / static_cast<double>(e.samples) + 3 * se);
        // The up branch has the closed form (3 - gamma) / 6.
        CHECK(std::abs(e.probabilities[0] - (3 - g) / 6) <= 4 * e.std_errors[0]);
        if (!previous.empty())
            for (std::size_t i = 0; i < fs.size(); ++i)
                CHECK(std::abs(e.probabilities[i] - previous[i]) < 0.1 + 6 * e.std_errors[i]);
        previous = e.probabilities;
    }
}
