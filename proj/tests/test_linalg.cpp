#include "oracles.hpp"

#include "powermdp/linalg.hpp"
#include "powermdp/simplex.hpp"

#include <doctest.h>

#include <random>

using namespace powermdp;

TEST_CASE("simplex agrees with vertex enumeration on random bounded LPs") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> coef(-1.0, 1.0), pos(0.1, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index n = 2 + trial % 3, m = 2 + trial % 4;
        Eigen::MatrixXd a(m + n, n);
        Eigen::VectorXd b(m + n), c(n);
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) a(i, j) = coef(rng);
            b(i) = trial % 5 == 0 ? coef(rng) : pos(rng);
        }
        // Box rows keep the problem bounded.
        a.bottomRows(n) = Eigen::MatrixXd::Identity(n, n);
        b.tail(n).setConstant(3.0);
        for (Eigen::Index j = 0; j < n; ++j) c(j) = coef(rng);

        lp::Problem<double> p{a, b, std::vector<lp::Sense>(static_cast<std::size_t>(m + n), lp::Sense::less_equal), c};
        const auto sol = lp::solve(p);
        const double want = oracle::lp_by_vertices(a, b, c);
        CAPTURE(trial);
        if (std::isinf(want)) {
            CHECK(sol.status == lp::Status::infeasible);
        } else {
            REQUIRE(sol.status == lp::Status::optimal);
            CHECK(sol.objective == doctest::Approx(want).epsilon(1e-9));
            CHECK(((a * sol.x - b).array() <= 1e-9).all());
            CHECK((sol.x.array() >= -1e-12).all());
        }
    }
}

TEST_CASE("simplex handles equality, >= rows and unboundedness") {
    // max x + y  s.t.  x + y = 1, x >= 0.25
    lp::Problem<double> p;
    p.A = (Eigen::MatrixXd(2, 2) << 1, 1, 1, 0).finished();
    p.b = Eigen::Vector2d(1.0, 0.25);
    p.sense = {lp::Sense::equal, lp::Sense::greater_equal};
    p.c = Eigen::Vector2d(1.0, 2.0);
    const auto sol = lp::solve(p);
    REQUIRE(sol.status == lp::Status::optimal);
    CHECK(sol.objective == doctest::Approx(1.75));
    CHECK(sol.x(0) == doctest::Approx(0.25));

    lp::Problem<double> u;
    u.A = (Eigen::MatrixXd(1, 2) << 1, -1).finished();
    u.b = Eigen::VectorXd::Constant(1, 1.0);
    u.sense = {lp::Sense::less_equal};
    u.c = Eigen::Vector2d(0.0, 1.0);
    CHECK(lp::solve(u).status == lp::Status::unbounded);

    lp::Problem<double> inf;
    inf.A = (Eigen::MatrixXd(2, 1) << 1, 1).finished();
    inf.b = Eigen::Vector2d(1.0, 2.0);
    inf.sense = {lp::Sense::less_equal, lp::Sense::greater_equal};
    inf.c = Eigen::VectorXd::Constant(1, 1.0);
    CHECK(lp::solve(inf).status == lp::Status::infeasible);
}

TEST_CASE("discounted visits match the truncated series") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const auto mdp = oracle::random_mdp(rng, 2 + trial % 4, 2, 0.4);
        const Policy pi{std::vector<ActionId>(mdp.num_states(), 0)};
        const auto p = oracle::chain(mdp, pi);
        for (double g : {0.0, 0.3, 0.9, 0.99}) {
            const auto f = linalg::discounted_visits<double>(p, 0, g);
            CHECK((f - oracle::series_visits(p, 0, g)).cwiseAbs().maxCoeff() < 1e-9);
            CHECK(f.sum() == doctest::Approx(1.0 / (1.0 - g)));
        }
        // Central difference against the analytic derivative.
        const double h = 1e-6;
        const Eigen::VectorXd fd =
            (linalg::discounted_visits<double>(p, 0, 0.5 + h) - linalg::discounted_visits<double>(p, 0, 0.5 - h)) / (2 * h);
        CHECK((fd - linalg::discounted_visits_derivative<double>(p, 0, 0.5)).cwiseAbs().maxCoeff() < 1e-5);
    }
}

TEST_CASE("strongly connected components and Cesaro rows") {
    // 0 -> 1 <-> 2 (period two), 0 -> 3 absorbing.
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(4, 4);
    p(0, 1) = 0.25;
    p(0, 3) = 0.75;
    p(1, 2) = 1.0;
    p(2, 1) = 1.0;
    p(3, 3) = 1.0;
    const auto scc = linalg::strongly_connected_components<double>(p);
    CHECK(scc.size() == 3);
    const auto row = linalg::cesaro_row<double>(p, 0);
    CHECK(row(0) == doctest::Approx(0.0));
    CHECK(row(1) == doctest::Approx(0.125));
    CHECK(row(2) == doctest::Approx(0.125));
    CHECK(row(3) == doctest::Approx(0.75));
    CHECK((row - oracle::cesaro_average(p, 0, 200000)).cwiseAbs().maxCoeff() < 1e-4);
}
