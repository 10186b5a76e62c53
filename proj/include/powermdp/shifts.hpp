#pragma once

#include "powermdp/mdp.hpp"
#include "powermdp/visit.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace powermdp {

/// Sorted indices into F(s): the functions optimal at some discount rate.
using Signature = std::vector<std::size_t>;

/// Relative tolerance for optimal-value ties in shift analysis.
inline constexpr double kShiftTieTolerance = 1e-9;
inline constexpr double kBreakpointWidth = 1e-9;

struct Breakpoint {
    double gamma = 0.0;
    Signature before;
    Signature after;
    /// Optimal set at gamma itself; contains before and after.
    Signature at;
    /// before == after: the optimal set grows only at gamma itself.
    bool tangential = false;
};

struct ShiftProfile {
    std::vector<Breakpoint> breakpoints;
    /// Optimal set on each open interval between consecutive breakpoints
    /// (breakpoints.size() + 1 entries).
    std::vector<Signature> intervals;
    double grid_step = 1e-3;
    double tolerance = kBreakpointWidth;
};

/// Optimal signature at gamma (value ties within kShiftTieTolerance relative).
Signature optimal_signature(const std::vector<VisitDistFn>& fs, const Eigen::VectorXd& reward, double gamma);

/// Grid scan at offsets (k + 1/2) * grid_step followed by bisection on each
/// bracketed change. Tangential contacts, where another function touches the
/// optimum without overtaking it, are found from local minima of the gap and
/// refined on its derivative.
ShiftProfile detect_shifts(const std::vector<VisitDistFn>& fs, const Eigen::VectorXd& reward,
                           double grid_step = 1e-3);
ShiftProfile detect_shifts(const RewardlessMdp& mdp, const Eigen::VectorXd& reward, StateId s,
                           double grid_step = 1e-3, const EnumerationConfig& cfg = {});

struct BlackwellResult {
    Signature signature;
    /// Discount rates at which the returned signature was confirmed.
    double confirmed_at = 0.0;
    double confirmed_again_at = 0.0;
};

/// Optimal set as gamma -> 1. Throws Indeterminate when no two consecutive
/// probes in {0.999, 0.9999, 1-1e-5, 1-1e-6, 1-1e-7} agree.
BlackwellResult blackwell_set(const std::vector<VisitDistFn>& fs, const Eigen::VectorXd& reward);

struct ShiftWitness {
    StateId s1 = 0;
    StateId s1_prime = 0;
    StateId s2_prime = 0;
};

/// Whether some reward makes the optimal action at s0 change with gamma, for
/// deterministic MDPs. Throws UnsupportedStructure otherwise.
std::optional<ShiftWitness> shift_possible(const RewardlessMdp& mdp, StateId s0);

/// R' = (I - gamma_target P*) V*, where pi* is optimal for R at gamma_star and
/// V* its value; R' at gamma_target has the optimal policies of R at gamma_star.
Eigen::VectorXd transfer_reward(const RewardlessMdp& mdp, const Eigen::VectorXd& reward, double gamma_star,
                                double gamma_target);

} // namespace powermdp
