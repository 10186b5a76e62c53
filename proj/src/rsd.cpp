#include "powermdp/rsd.hpp"

#include "powermdp/errors.hpp"
#include "powermdp/linalg.hpp"
#include "powermdp/visit.hpp"

namespace powermdp {

Rsd rsd_of_policy(const RewardlessMdp& mdp, const Policy& pi, StateId s) {
    if (s >= mdp.num_states()) throw LookupError("state index out of range");
    return {linalg::cesaro_row<double>(transition_matrix(mdp, pi), static_cast<Eigen::Index>(s)), pi};
}

Eigen::VectorXd rsd_of_policy(const RewardlessMdp& mdp, const StochasticPolicy& pi, StateId s) {
    if (s >= mdp.num_states()) throw LookupError("state index out of range");
    return linalg::cesaro_row<double>(transition_matrix(mdp, pi), static_cast<Eigen::Index>(s));
}

std::vector<Rsd> enumerate_rsds(const RewardlessMdp& mdp, StateId s, const EnumerationConfig& cfg) {
    std::vector<Rsd> out;
    for_each_reachable_policy(mdp, s, cfg, [&](const Policy& pi, const StateSet&) {
        auto d = rsd_of_policy(mdp, pi, s);
        for (const auto& seen : out)
            if ((seen.distribution - d.distribution).cwiseAbs().maxCoeff() <= kRsdTolerance) return;
        out.push_back(std::move(d));
    });
    return out;
}

double rsd_limit_consistency(const RewardlessMdp& mdp, const Policy& pi, StateId s, double gamma) {
    const auto d = rsd_of_policy(mdp, pi, s);
    return ((1.0 - gamma) * visit_dist_at(mdp, pi, s, gamma) - d.distribution).lpNorm<1>();
}

Eigen::MatrixXd stack(const std::vector<Rsd>& rsds) {
    if (rsds.empty()) return {};
    Eigen::MatrixXd out(rsds.front().distribution.size(), static_cast<Eigen::Index>(rsds.size()));
    for (std::size_t i = 0; i < rsds.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = rsds[i].distribution;
    return out;
}

RsdAnalysis nondominated_rsds(std::vector<Rsd> all) {
    RsdAnalysis out;
    out.all = std::move(all);
    out.nondominated = nondominated_columns(stack(out.all), 1.0);
    for (auto i : out.nondominated.members) out.members.push_back(out.all[i]);
    return out;
}

RsdAnalysis nondominated_rsds(const RewardlessMdp& mdp, StateId s, const EnumerationConfig& cfg) {
    return nondominated_rsds(enumerate_rsds(mdp, s, cfg));
}

} // namespace powermdp
