#pragma once

#include "powermdp/mdp.hpp"
#include "powermdp/nondom.hpp"
#include "powermdp/policy.hpp"

#include <Eigen/Dense>

#include <vector>

namespace powermdp {

/// Two recurrent state distributions closer than this (max norm) are the same.
inline constexpr double kRsdTolerance = 1e-8;

/// Limiting visitation frequencies from a start state under one policy.
struct Rsd {
    Eigen::VectorXd distribution;
    Policy policy;
};

/// Cesaro-limit row of the induced chain for start s.
Rsd rsd_of_policy(const RewardlessMdp& mdp, const Policy& pi, StateId s);
Eigen::VectorXd rsd_of_policy(const RewardlessMdp& mdp, const StochasticPolicy& pi, StateId s);

/// RSD(s), deduplicated, in policy enumeration order.
std::vector<Rsd> enumerate_rsds(const RewardlessMdp& mdp, StateId s, const EnumerationConfig& cfg = {});

/// || (1-gamma) f^pi_s(gamma) - rsd ||_1.
double rsd_limit_consistency(const RewardlessMdp& mdp, const Policy& pi, StateId s, double gamma = 0.999);

struct RsdAnalysis {
    std::vector<Rsd> all;
    NondomResult nondominated;
    /// all[i] for i in nondominated.members.
    std::vector<Rsd> members;
};

RsdAnalysis nondominated_rsds(const RewardlessMdp& mdp, StateId s, const EnumerationConfig& cfg = {});
RsdAnalysis nondominated_rsds(std::vector<Rsd> all);

/// Columns are the distributions.
Eigen::MatrixXd stack(const std::vector<Rsd>& rsds);

} // namespace powermdp
