#pragma once

#include "powermdp/mdp.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace powermdp {

/// Deterministic stationary policy: one action index per state.
struct Policy {
    std::vector<ActionId> action;

    friend bool operator==(const Policy&, const Policy&) = default;
};

/// Stationary policy with a distribution over actions at every state.
struct StochasticPolicy {
    std::vector<Eigen::VectorXd> probabilities;

    static StochasticPolicy from(const RewardlessMdp& mdp, const Policy& pi);
    static StochasticPolicy uniform(const RewardlessMdp& mdp);
};

/// Throws InvalidArgument when an action index is out of range.
void check_policy(const RewardlessMdp& mdp, const Policy& pi);
void check_policy(const RewardlessMdp& mdp, const StochasticPolicy& pi);

/// Row-stochastic chain induced by the policy.
Eigen::MatrixXd transition_matrix(const RewardlessMdp& mdp, const Policy& pi);
Eigen::MatrixXd transition_matrix(const RewardlessMdp& mdp, const StochasticPolicy& pi);

/// Readable "state:action" pairs for the states in `states` (all when empty).
std::string describe(const RewardlessMdp& mdp, const Policy& pi, const StateSet& states = {});

struct EnumerationConfig {
    double max_policies = 1e6;
};

/// Product over states reachable from s of the number of action classes.
double reachable_policy_count(const RewardlessMdp& mdp, StateId s);

/// Calls `visit` once for every assignment of action classes to the states
/// the policy actually reaches from s. Unreached states keep action 0.
/// Throws EnumerationTooLarge when reachable_policy_count exceeds the cap.
void for_each_reachable_policy(const RewardlessMdp& mdp, StateId s, const EnumerationConfig& cfg,
                               const std::function<void(const Policy&, const StateSet& reached)>& visit);

} // namespace powermdp
