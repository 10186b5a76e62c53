#pragma once

#include "powermdp/mdp.hpp"
#include "powermdp/montecarlo.hpp"
#include "powermdp/policy.hpp"
#include "powermdp/reward_dist.hpp"
#include "powermdp/visit.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace powermdp {

inline constexpr std::uint64_t kMinPowerSamples = 100;
/// Strict comparisons between estimates require a gap above this many standard errors.
inline constexpr double kStrictnessSigmas = 3.0;

struct PowerEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
    double gamma = 0.0;
    /// "mc", "rsd-limit" or "closed-form".
    std::string method;
    /// [lower, upper] for the gamma -> 0 limit when it is not pinned down exactly.
    std::optional<std::pair<double, double>> bracket;
};

/// a - b > 3 * sqrt(se_a^2 + se_b^2).
bool strictly_greater(const PowerEstimate& a, const PowerEstimate& b);

/// POWER(s, gamma) for 0 < gamma < 1 by Monte Carlo over F_nd(s).
PowerEstimate power_at(const RewardlessMdp& mdp, StateId s, double gamma, const RewardDistSpec& spec,
                       const McConfig& mc, const EnumerationConfig& cfg = {});
/// Same, with F_nd(s) supplied by the caller.
PowerEstimate power_at(const std::vector<VisitDistFn>& nondominated, StateId s, double gamma,
                       const RewardDistSpec& spec, const McConfig& mc);

/// gamma -> 0 limit. Exact (E max over |Ch(s)| draws) when every action at s
/// is deterministic; otherwise a Monte Carlo estimate of
/// E[max_a T(s,a)^T r] carrying the [|CH_sure|, |Ch|] expected-max bracket.
PowerEstimate power_limit_0(const RewardlessMdp& mdp, StateId s, const RewardDistSpec& spec,
                            const McConfig& mc = {});

/// gamma -> 1 limit: E[max over RSD_nd(s) of d^T r].
PowerEstimate power_limit_1(const RewardlessMdp& mdp, StateId s, const RewardDistSpec& spec, const McConfig& mc,
                            const EnumerationConfig& cfg = {});

/// Dispatches on gamma: 0 and 1 to the limits, otherwise power_at().
PowerEstimate power_any(const RewardlessMdp& mdp, StateId s, double gamma, const RewardDistSpec& spec,
                        const McConfig& mc, const EnumerationConfig& cfg = {});

struct ActionClassPower {
    std::vector<ActionId> actions;
    /// E_{s' ~ T(s,a)} POWER(s', gamma) with a combined standard error.
    PowerEstimate expected_power;
};

struct PowerSeekingOrder {
    StateId state = 0;
    double gamma = 0.0;
    /// Sorted by decreasing expected power.
    std::vector<ActionClassPower> classes;
    /// strict[i][j]: classes[i] seeks strictly more POWER than classes[j].
    std::vector<std::vector<bool>> strict;
};

/// Caches POWER per state so several queries share estimates.
class PowerTable {
public:
    PowerTable(const RewardlessMdp& mdp, double gamma, RewardDistSpec spec, McConfig mc, EnumerationConfig cfg = {});

    const PowerEstimate& at(StateId s);
    /// E_{s' ~ T(s,a)} POWER(s', gamma).
    PowerEstimate expected_after(StateId s, ActionId a);

private:
    const RewardlessMdp& mdp_;
    double gamma_;
    RewardDistSpec spec_;
    McConfig mc_;
    EnumerationConfig cfg_;
    std::map<StateId, PowerEstimate> cache_;
};

PowerSeekingOrder power_seeking_order(const RewardlessMdp& mdp, StateId s, double gamma, const RewardDistSpec& spec,
                                      const McConfig& mc, const EnumerationConfig& cfg = {});

struct MaxPowerPolicy {
    Policy policy;
    /// Expected child POWER of the chosen action, per state.
    std::vector<PowerEstimate> chosen;
};

MaxPowerPolicy max_power_policy(const RewardlessMdp& mdp, double gamma, const RewardDistSpec& spec,
                                const McConfig& mc, const EnumerationConfig& cfg = {});

/// Policy-generating function (R, gamma) -> policy. Must be reentrant.
using PolicyGenerator = std::function<StochasticPolicy(const Eigen::VectorXd& reward, double gamma)>;

/// Mean over sampled R of (1-gamma) E_{s' ~ T(s, pi(s))} V^pi_R(s', gamma), pi = polfn(R, gamma).
/// At gamma = 1 the value is the average reward earned from s.
PowerEstimate power_wrt_polfn(const RewardlessMdp& mdp, StateId s, double gamma, const RewardDistSpec& spec,
                              const PolicyGenerator& polfn, const McConfig& mc);

/// Uniformly random action at every state.
PolicyGenerator uniform_random_polfn(const RewardlessMdp& mdp);
/// An optimal deterministic policy (policy iteration); gamma < 1.
PolicyGenerator optimal_polfn(const RewardlessMdp& mdp);

} // namespace powermdp
