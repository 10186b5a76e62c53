#include "powermdp/power.hpp"

#include "powermdp/errors.hpp"
#include "powermdp/linalg.hpp"
#include "powermdp/nondom.hpp"
#include "powermdp/rsd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace powermdp {

namespace {

void check_samples(const McConfig& mc) {
    if (mc.samples < kMinPowerSamples)
        throw InvalidArgument("at least " + std::to_string(kMinPowerSamples) + " samples are required");
}

// Mean over samples of max_j (columns^T r)_j.
RunningStats mean_of_max(const Eigen::MatrixXd& columns, const RewardDistSpec& spec, const McConfig& mc) {
    const auto n = static_cast<std::size_t>(columns.rows());
    return run_chunked<RunningStats>(
        mc.samples, mc.threads, [] { return RunningStats{}; },
        [&](std::uint64_t i, RunningStats& acc) {
            const Eigen::VectorXd r = spec.draw(mc.seed, i, n);
            acc.add((columns.transpose() * r).maxCoeff());
        },
        [](RunningStats& total, const RunningStats& part) { total.merge(part); });
}

PowerEstimate from_stats(const RunningStats& st, double gamma, std::string method) {
    PowerEstimate out;
    out.estimate = st.mean;
    out.std_error = st.std_error();
    out.samples = st.count;
    out.gamma = gamma;
    out.method = std::move(method);
    return out;
}

} // namespace

bool strictly_greater(const PowerEstimate& a, const PowerEstimate& b) {
    return a.estimate - b.estimate > kStrictnessSigmas * std::hypot(a.std_error, b.std_error);
}

PowerEstimate power_at(const std::vector<VisitDistFn>& nondominated, StateId s, double gamma,
                       const RewardDistSpec& spec, const McConfig& mc) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidArgument("power_at needs 0 < gamma < 1");
    check_samples(mc);
    if (nondominated.empty()) throw InvalidArgument("empty set of visit distribution functions");
    Eigen::MatrixXd columns = stack_at(nondominated, gamma);
    columns.row(static_cast<Eigen::Index>(s)).array() -= 1.0;
    columns *= (1.0 - gamma) / gamma;
    return from_stats(mean_of_max(columns, spec, mc), gamma, "mc");
}

PowerEstimate power_at(const RewardlessMdp& mdp, StateId s, double gamma, const RewardDistSpec& spec,
                       const McConfig& mc, const EnumerationConfig& cfg) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidArgument("power_at needs 0 < gamma < 1");
    check_samples(mc);
    return power_at(nondominated_functions(enumerate_visit_dists(mdp, s, cfg)), s, gamma, spec, mc);
}

PowerEstimate power_limit_0(const RewardlessMdp& mdp, StateId s, const RewardDistSpec& spec, const McConfig& mc) {
    mdp.require_valid();
    const auto ch = children(mdp, s).count();
    const auto sure = sure_children(mdp, s).count();
    PowerEstimate out;
    out.gamma = 0.0;
    if (mdp.is_deterministic_at(s)) {
        out.estimate = spec.expected_max_of(ch);
        out.method = "closed-form";
        return out;
    }
    check_samples(mc);
    const auto n = static_cast<Eigen::Index>(mdp.num_states());
    const auto classes = action_classes(mdp, s);
    Eigen::MatrixXd rows(n, static_cast<Eigen::Index>(classes.size()));
    for (std::size_t c = 0; c < classes.size(); ++c)
        rows.col(static_cast<Eigen::Index>(c)) = mdp.dense_row(s, classes.representative[c]);
    out = from_stats(mean_of_max(rows, spec, mc), 0.0, "mc");
    out.bracket = {spec.expected_max_of(std::max<std::size_t>(1, sure)), spec.expected_max_of(ch)};
    return out;
}

PowerEstimate power_limit_1(const RewardlessMdp& mdp, StateId s, const RewardDistSpec& spec, const McConfig& mc,
                            const EnumerationConfig& cfg) {
    check_samples(mc);
    const auto rsds = nondominated_rsds(mdp, s, cfg);
    if (rsds.members.empty()) throw NumericFailure("no non-dominated recurrent state distribution found");
    return from_stats(mean_of_max(stack(rsds.members), spec, mc), 1.0, "rsd-limit");
}

PowerEstimate power_any(const RewardlessMdp& mdp, StateId s, double gamma, const RewardDistSpec& spec,
                        const McConfig& mc, const EnumerationConfig& cfg) {
    if (gamma == 0.0) return power_limit_0(mdp, s, spec, mc);
    if (gamma == 1.0) return power_limit_1(mdp, s, spec, mc, cfg);
    return power_at(mdp, s, gamma, spec, mc, cfg);
}

PowerTable::PowerTable(const RewardlessMdp& mdp, double gamma, RewardDistSpec spec, McConfig mc,
                       EnumerationConfig cfg)
    : mdp_(mdp), gamma_(gamma), spec_(std::move(spec)), mc_(mc), cfg_(cfg) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidArgument("discount must lie in [0, 1]");
}

const PowerEstimate& PowerTable::at(StateId s) {
    if (auto it = cache_.find(s); it != cache_.end()) return it->second;
    return cache_.emplace(s, power_any(mdp_, s, gamma_, spec_, mc_, cfg_)).first->second;
}

PowerEstimate PowerTable::expected_after(StateId s, ActionId a) {
    PowerEstimate out;
    out.gamma = gamma_;
    for (const auto& t : mdp_.row(s, a)) {
        if (t.probability <= 0.0) continue;
        const auto& p = at(t.target);
        out.estimate += t.probability * p.estimate;
        // Estimates share the sample stream, so errors are added linearly.
        out.std_error += t.probability * p.std_error;
        out.samples = p.samples;
        out.method = p.method;
    }
    return out;
}

PowerSeekingOrder power_seeking_order(const RewardlessMdp& mdp, StateId s, double gamma, const RewardDistSpec& spec,
                                      const McConfig& mc, const EnumerationConfig& cfg) {
    mdp.require_valid();
    if (s >= mdp.num_states()) throw LookupError("state index out of range");
    PowerTable table(mdp, gamma, spec, mc, cfg);
    PowerSeekingOrder out;
    out.state = s;
    out.gamma = gamma;
    for (const auto& block : equivalent_actions(mdp, s))
        out.classes.push_back({block, table.expected_after(s, block.front())});
    std::stable_sort(out.classes.begin(), out.classes.end(), [](const auto& a, const auto& b) {
        return a.expected_power.estimate > b.expected_power.estimate;
    });
    const auto k = out.classes.size();
    out.strict.assign(k, std::vector<bool>(k, false));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            out.strict[i][j] = strictly_greater(out.classes[i].expected_power, out.classes[j].expected_power);
    return out;
}

MaxPowerPolicy max_power_policy(const RewardlessMdp& mdp, double gamma, const RewardDistSpec& spec,
                                const McConfig& mc, const EnumerationConfig& cfg) {
    mdp.require_valid();
    PowerTable table(mdp, gamma, spec, mc, cfg);
    MaxPowerPolicy out;
    out.policy.action.assign(mdp.num_states(), 0);
    for (StateId s = 0; s < mdp.num_states(); ++s) {
        PowerEstimate best;
        for (ActionId a = 0; a < mdp.num_actions(s); ++a) {
            auto e = table.expected_after(s, a);
            if (a == 0 || e.estimate > best.estimate) {
                best = e;
                out.policy.action[s] = a;
            }
        }
        out.chosen.push_back(best);
    }
    return out;
}

PowerEstimate power_wrt_polfn(const RewardlessMdp& mdp, StateId s, double gamma, const RewardDistSpec& spec,
                              const PolicyGenerator& polfn, const McConfig& mc) {
    mdp.require_valid();
    if (s >= mdp.num_states()) throw LookupError("state index out of range");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidArgument("discount must lie in [0, 1]");
    check_samples(mc);
    const auto n = mdp.num_states();
    const auto si = static_cast<Eigen::Index>(s);
    const auto st = run_chunked<RunningStats>(
        mc.samples, mc.threads, [] { return RunningStats{}; },
        [&](std::uint64_t i, RunningStats& acc) {
            const Eigen::VectorXd r = spec.draw(mc.seed, i, n);
            StochasticPolicy pi;
            try {
                pi = polfn(r, gamma);
                check_policy(mdp, pi);
            } catch (const std::exception& e) {
                throw PolicyGeneratorError(i, e.what());
            }
            const Eigen::MatrixXd P = transition_matrix(mdp, pi);
            if (gamma < 1.0) {
                const Eigen::VectorXd v = linalg::policy_values<double>(P, r, gamma);
                acc.add((1.0 - gamma) * P.row(si).dot(v));
            } else {
                acc.add(linalg::cesaro_row<double>(P, si).dot(r));
            }
        },
        [](RunningStats& total, const RunningStats& part) { total.merge(part); });
    return from_stats(st, gamma, "mc");
}

PolicyGenerator uniform_random_polfn(const RewardlessMdp& mdp) {
    const auto pi = StochasticPolicy::uniform(mdp);
    return [pi](const Eigen::VectorXd&, double) { return pi; };
}

PolicyGenerator optimal_polfn(const RewardlessMdp& mdp) {
    return [&mdp](const Eigen::VectorXd& r, double gamma) {
        return StochasticPolicy::from(mdp, optimal_policy(mdp, r, gamma).policy);
    };
}

} // namespace powermdp
