#include "powermdp/nondom.hpp"

#include "powermdp/errors.hpp"
#include "powermdp/rng.hpp"
#include "powermdp/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace powermdp {

namespace {

constexpr std::uint64_t kScreenSeed = 0x5EED5C12EE7ULL;
constexpr std::size_t kScreenSamples = 256;
constexpr std::size_t kCutsPerRound = 8;

} // namespace

MarginLp strict_margin(const Eigen::MatrixXd& candidates, std::size_t index) {
    const auto n = candidates.rows();
    const auto k = static_cast<std::size_t>(candidates.cols());
    MarginLp out;
    if (k <= 1) {
        out.margin = std::numeric_limits<double>::infinity();
        out.reward = Eigen::VectorXd::Constant(n, 0.5);
        out.ok = true;
        return out;
    }
    const Eigen::VectorXd v = candidates.col(static_cast<Eigen::Index>(index));
    std::vector<std::size_t> others;
    for (std::size_t j = 0; j < k; ++j)
        if (j != index) others.push_back(j);

    Eigen::MatrixXd diffs(n, static_cast<Eigen::Index>(others.size()));
    double big = 0.0;
    for (std::size_t c = 0; c < others.size(); ++c) {
        diffs.col(static_cast<Eigen::Index>(c)) = v - candidates.col(static_cast<Eigen::Index>(others[c]));
        big = std::max(big, diffs.col(static_cast<Eigen::Index>(c)).lpNorm<1>());
    }
    if (big == 0.0) {
        out.margin = 0.0;
        out.reward = Eigen::VectorXd::Constant(n, 0.5);
        out.ok = true;
        return out;
    }

    // Variables (r, t) >= 0 with delta = t - big; maximize t subject to
    //   t - d_j^T r <= big  for the active cuts,  r_i <= 1.
    std::vector<std::size_t> active;
    std::vector<bool> is_active(others.size(), false);
    const auto add_most_violated = [&](const Eigen::VectorXd& r, double delta) {
        const Eigen::VectorXd g = diffs.transpose() * r;
        std::vector<std::size_t> order(others.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return g(a) < g(b); });
        std::size_t added = 0;
        for (auto c : order) {
            if (added == kCutsPerRound) break;
            if (is_active[c] || g(static_cast<Eigen::Index>(c)) >= delta - 1e-12 * big) continue;
            is_active[c] = true;
            active.push_back(c);
            ++added;
        }
        return added;
    };
    add_most_violated(Eigen::VectorXd::Constant(n, 0.5), std::numeric_limits<double>::infinity());

    for (std::size_t round = 0; round < others.size() + 1; ++round) {
        const auto m = static_cast<Eigen::Index>(active.size()) + n;
        lp::Problem<double> p;
        p.A = Eigen::MatrixXd::Zero(m, n + 1);
        p.b.resize(m);
        p.sense.assign(static_cast<std::size_t>(m), lp::Sense::less_equal);
        p.c = Eigen::VectorXd::Zero(n + 1);
        p.c(n) = 1.0;
        for (std::size_t c = 0; c < active.size(); ++c) {
            const auto row = static_cast<Eigen::Index>(c);
            p.A.block(row, 0, 1, n) = -diffs.col(static_cast<Eigen::Index>(active[c])).transpose();
            p.A(row, n) = 1.0;
            p.b(row) = big;
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto row = static_cast<Eigen::Index>(active.size()) + i;
            p.A(row, i) = 1.0;
            p.b(row) = 1.0;
        }
        const auto sol = lp::solve(p);
        if (sol.status != lp::Status::optimal) {
            out.failure = sol.status == lp::Status::iteration_limit ? "simplex iteration limit"
                                                                    : "simplex reported an unexpected status";
            return out;
        }
        const Eigen::VectorXd r = sol.x.head(n).cwiseMax(0.0).cwiseMin(1.0);
        const double delta = sol.x(n) - big;
        if (add_most_violated(r, delta) == 0) {
            out.reward = r;
            out.margin = (diffs.transpose() * r).minCoeff();
            out.ok = true;
            return out;
        }
    }
    out.failure = "cutting-plane loop did not converge";
    return out;
}

NondomResult nondominated_columns(const Eigen::MatrixXd& candidates, double gamma_tag) {
    NondomResult out;
    out.gamma = gamma_tag;
    const auto n = candidates.rows();
    const auto k = static_cast<std::size_t>(candidates.cols());
    out.entries.resize(k);
    for (std::size_t i = 0; i < k; ++i) out.entries[i].index = i;
    if (k == 0) return out;
    if (k == 1) {
        auto& e = out.entries[0];
        e.included = true;
        e.margin = std::numeric_limits<double>::infinity();
        e.certificate = StrictOptCertificate{Eigen::VectorXd::Constant(n, 0.5), e.margin, gamma_tag};
        out.members.push_back(0);
        return out;
    }

    // Strict optimality for some reward is unchanged by shifting a state's
    // coordinate across all candidates or scaling it by a positive factor, so
    // every state with any spread is mapped to [0, 1]. Without this, states
    // first reached after many steps at small gamma carry differences far
    // below the margin threshold.
    const Eigen::VectorXd lo = candidates.rowwise().minCoeff();
    const Eigen::VectorXd spread = candidates.rowwise().maxCoeff() - lo;
    const double top = candidates.cwiseAbs().maxCoeff();
    Eigen::VectorXd weight = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i)
        if (spread(i) > 1e-14 * top) weight(i) = 1.0 / spread(i);
    const Eigen::MatrixXd scaled = weight.asDiagonal() * (candidates.colwise() - lo);

    // The reward in original coordinates that realises a scaled witness.
    const auto certify = [&](std::size_t i, const Eigen::VectorXd& scaled_reward) {
        Eigen::VectorXd r = weight.cwiseProduct(scaled_reward);
        if (r.maxCoeff() > 0.0) r /= r.maxCoeff();
        const Eigen::VectorXd values = candidates.transpose() * r;
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j)
            if (j != i) gap = std::min(gap, values(static_cast<Eigen::Index>(i)) - values(static_cast<Eigen::Index>(j)));
        return StrictOptCertificate{r, gap, gamma_tag};
    };

    // Random rewards whose argmax wins by a clear gap settle a candidate
    // without an LP; the gap is a valid (if not maximal) margin.
    std::vector<bool> settled(k, false);
    Eigen::VectorXd r(n);
    for (std::uint64_t sample = 0; sample < kScreenSamples; ++sample) {
        for (Eigen::Index i = 0; i < n; ++i)
            r(i) = rng::uniform(kScreenSeed, sample, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(i));
        const Eigen::VectorXd values = scaled.transpose() * r;
        Eigen::Index best = 0;
        values.maxCoeff(&best);
        double second = -std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < values.size(); ++j)
            if (j != best) second = std::max(second, values(j));
        const double gap = values(best) - second;
        const auto b = static_cast<std::size_t>(best);
        auto& e = out.entries[b];
        if (gap > kMarginThreshold && (!settled[b] || gap > e.margin)) {
            settled[b] = true;
            e.included = true;
            e.margin = gap;
            e.certificate = certify(b, r);
        }
    }

    for (std::size_t i = 0; i < k; ++i) {
        if (settled[i]) continue;
        auto& e = out.entries[i];
        const auto lp = strict_margin(scaled, i);
        if (!lp.ok) {
            e.failure = lp.failure;
            continue;
        }
        e.margin = lp.margin;
        if (lp.margin > kMarginThreshold) {
            e.included = true;
            e.certificate = certify(i, lp.reward);
        }
    }
    for (std::size_t i = 0; i < k; ++i)
        if (out.entries[i].included) out.members.push_back(i);
    return out;
}

NondomResult nondominated_set(const std::vector<VisitDistFn>& fs, double gamma_check) {
    if (!(gamma_check > 0.0 && gamma_check < 1.0)) throw InvalidArgument("gamma_check must lie in (0, 1)");
    return nondominated_columns(stack_at(fs, gamma_check), gamma_check);
}

NondomResult nondominated_set(const RewardlessMdp& mdp, StateId s, double gamma_check, const EnumerationConfig& cfg) {
    return nondominated_set(enumerate_visit_dists(mdp, s, cfg), gamma_check);
}

std::vector<VisitDistFn> nondominated_functions(const std::vector<VisitDistFn>& fs, double gamma_check) {
    const auto res = nondominated_set(fs, gamma_check);
    std::vector<VisitDistFn> out;
    for (auto i : res.members) out.push_back(fs[i]);
    return out;
}

bool is_strictly_optimal_for(const std::vector<VisitDistFn>& fs, std::size_t index, const Eigen::VectorXd& reward,
                             double gamma) {
    if (index >= fs.size()) throw LookupError("visit distribution index out of range");
    const double mine = fs[index](gamma).dot(reward);
    for (std::size_t j = 0; j < fs.size(); ++j)
        if (j != index && !(mine > fs[j](gamma).dot(reward) + kTieTolerance)) return false;
    return true;
}

} // namespace powermdp
