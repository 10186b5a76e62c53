#pragma once

#include "powermdp/mdp.hpp"
#include "powermdp/montecarlo.hpp"
#include "powermdp/reward_dist.hpp"
#include "powermdp/rsd.hpp"
#include "powermdp/visit.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace powermdp {

/// A target is a set of indices into the candidate list (F_nd(s) or RSD_nd(s)).
using Target = std::vector<std::size_t>;

struct OptProbEstimate {
    std::vector<double> probabilities;
    std::vector<double> std_errors;
    /// Samples whose best and second-best values were within kTieTolerance.
    /// They are credited to no target.
    std::uint64_t ties = 0;
    std::uint64_t samples = 0;
    double gamma = 0.0;
    /// Mean and standard error of 1[target 0] - 1[target 1] per sample.
    double paired_difference = 0.0;
    double paired_std_error = 0.0;
    std::vector<std::string> warnings;
};

/// Core estimator over candidate columns.
OptProbEstimate optprob_columns(const Eigen::MatrixXd& candidates, const std::vector<Target>& targets,
                                const RewardDistSpec& spec, const McConfig& mc, double gamma_tag);

/// P(target, gamma) for targets drawn from F_nd(s); 0 < gamma < 1.
OptProbEstimate optprob(const std::vector<VisitDistFn>& nondominated, const std::vector<Target>& targets,
                        double gamma, const RewardDistSpec& spec, const McConfig& mc);

/// f-level question at gamma -> 1, answered at 0.99 and 0.999. The 0.999
/// estimate is returned; disagreement beyond 3 SE adds a warning.
OptProbEstimate optprob_near1(const std::vector<VisitDistFn>& nondominated, const std::vector<Target>& targets,
                              const RewardDistSpec& spec, const McConfig& mc);

/// P(target, 1) for targets drawn from RSD_nd(s).
OptProbEstimate optprob_gamma1(const std::vector<Rsd>& nondominated, const std::vector<Target>& targets,
                               const RewardDistSpec& spec, const McConfig& mc);

/// Members of F_nd(s) induced by a policy taking an action equivalent to a at
/// `at_state`. Functions that never visit `at_state` qualify for every action.
Target restrict_by_action(const RewardlessMdp& mdp, const std::vector<VisitDistFn>& nondominated, StateId at_state,
                          ActionId a);

struct RobustInstrumentality {
    OptProbEstimate estimate;
    /// "a", "a_prime" or "tie".
    std::string verdict;
};

/// Compares P(F_nd(start | a at s'), gamma) with the a' restriction; a
/// verdict is strict only when the paired difference exceeds 3 SE.
RobustInstrumentality robust_instrumentality(const RewardlessMdp& mdp, StateId start, StateId at_state, ActionId a,
                                             ActionId a_prime, double gamma, const RewardDistSpec& spec,
                                             const McConfig& mc, const EnumerationConfig& cfg = {});

} // namespace powermdp
