#include "powermdp/errors.hpp"
#include "powermdp/figures.hpp"
#include "powermdp/nondom.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace powermdp;

namespace {

bool certificate_holds(const Eigen::MatrixXd& c, std::size_t i, const StrictOptCertificate& cert) {
    const Eigen::VectorXd v = c.transpose() * cert.witness;
    for (Eigen::Index j = 0; j < v.size(); ++j)
        if (static_cast<std::size_t>(j) != i && !(v(static_cast<Eigen::Index>(i)) > v(j))) return false;
    return (cert.witness.array() >= 0.0).all() && (cert.witness.array() <= 1.0 + 1e-12).all();
}

} // namespace

TEST_CASE("convex combinations and pointwise-worse columns are dominated") {
    // Columns: e1, e2, their midpoint, and a strictly smaller copy of e1.
    Eigen::MatrixXd c(2, 4);
    c << 1.0, 0.0, 0.5, 0.8,
         0.0, 1.0, 0.5, 0.0;
    const auto res = nondominated_columns(c);
    CHECK(res.members == std::vector<std::size_t>{0, 1});
    for (auto i : res.members) {
        REQUIRE(res.entries[i].certificate);
        CHECK(certificate_holds(c, i, *res.entries[i].certificate));
    }
    CHECK_FALSE(res.entries[2].included);
    CHECK_FALSE(res.entries[3].included);
}

TEST_CASE("a single candidate is included with infinite margin") {
    const Eigen::MatrixXd c = Eigen::MatrixXd::Constant(3, 1, 0.25);
    const auto res = nondominated_columns(c);
    CHECK(res.members == std::vector<std::size_t>{0});
    CHECK(std::isinf(res.entries[0].margin));
}

TEST_CASE("vertices of random polytopes are exactly the strictly optimal columns") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n = 2 + trial % 3, k = 3 + trial % 5;
        Eigen::MatrixXd c(n, k + 1);
        for (Eigen::Index j = 0; j < k; ++j)
            for (Eigen::Index i = 0; i < n; ++i) c(i, j) = unit(rng);
        // The appended average is never strictly optimal.
        c.col(k) = c.leftCols(k).rowwise().mean();
        const auto res = nondominated_columns(c);
        CHECK_FALSE(res.entries[static_cast<std::size_t>(k)].included);
        for (auto i : res.members) CHECK(certificate_holds(c, i, *res.entries[i].certificate));
        // Every column that wins some random reward must be a member.
        for (int probe = 0; probe < 200; ++probe) {
            Eigen::VectorXd r(n);
            for (auto& x : r) x = unit(rng);
            Eigen::Index best = 0;
            (c.transpose() * r).maxCoeff(&best);
            CHECK(res.entries[static_cast<std::size_t>(best)].included);
        }
    }
}

TEST_CASE("fig13b drops the dominated visit distribution") {
    const auto mdp = load_fixture("fig13b");
    const auto fs = enumerate_visit_dists(mdp, mdp.state_id("A"));
    const auto res = nondominated_set(fs, 0.5);
    const StateId b = mdp.state_id("B"), c = mdp.state_id("C");
    // Exactly the functions passing through B and then C are dominated.
    const auto through_b = visiting(fs, b), through_c = visiting(fs, c);
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const bool both = std::count(through_b.begin(), through_b.end(), i) && std::count(through_c.begin(), through_c.end(), i);
        CHECK(res.entries[i].included == !both);
    }
    CHECK(res.members.size() + 2 == fs.size());
    for (auto i : res.members) {
        const auto& cert = *res.entries[i].certificate;
        CHECK(is_strictly_optimal_for(fs, i, cert.witness, 0.5));
    }
    // Membership does not depend on the check discount.
    for (double g : {0.2, 0.8}) CHECK(nondominated_set(fs, g).members == res.members);
    CHECK_THROWS_AS(nondominated_set(fs, 1.0), InvalidArgument);
}
