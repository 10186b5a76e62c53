#pragma once

#include "powermdp/mdp.hpp"
#include "powermdp/policy.hpp"

#include <Eigen/Dense>

#include <memory>
#include <vector>

namespace powermdp {

/// Tolerance on |f(gamma)^T R - max| for membership in an argmax set.
inline constexpr double kTieTolerance = 1e-9;
/// Two visit distribution functions are equal when they agree at every probe within this.
inline constexpr double kProbeTolerance = 1e-8;

/// 2n+1 Chebyshev points in (0, 0.95) at which visit distribution functions
/// are compared. Each coordinate of f is rational in gamma with numerator
/// and denominator degree at most n, so agreement at 2n+1 points is equality.
std::vector<double> probe_gammas(std::size_t num_states);

/// f^pi_s(gamma): discounted state visitation from s under pi.
Eigen::VectorXd visit_dist_at(const RewardlessMdp& mdp, const Policy& pi, StateId s, double gamma);

/// gamma -> f^pi_s(gamma) for one policy and start state. Evaluations are
/// memoised behind a lock, so a shared instance can be queried from several
/// threads. Copies share the cache.
class VisitDistFn {
public:
    VisitDistFn(const RewardlessMdp& mdp, Policy pi, StateId start);

    const Policy& policy() const noexcept;
    StateId start() const noexcept;
    const Eigen::MatrixXd& chain() const noexcept;
    std::size_t num_states() const noexcept;

    /// Requires 0 <= gamma < 1.
    Eigen::VectorXd operator()(double gamma) const;
    Eigen::VectorXd derivative(double gamma) const;

    /// Column k holds f(probe_gammas()[k]).
    const Eigen::MatrixXd& probe_values() const;

    /// States the policy can reach from the start.
    const StateSet& reached() const noexcept;

    /// Action classes at state u taken by some enumerated policy that induces
    /// this function (empty outside enumerate_visit_dists()).
    const std::vector<std::vector<bool>>& inducing_classes() const noexcept;
    void add_inducing_policy(const RewardlessMdp& mdp, const Policy& pi);

    bool same_function(const VisitDistFn& other) const;

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

/// One representative per distinct visit distribution function in F(s),
/// in depth-first enumeration order. Throws EnumerationTooLarge over the cap.
std::vector<VisitDistFn> enumerate_visit_dists(const RewardlessMdp& mdp, StateId s,
                                               const EnumerationConfig& cfg = {});

/// f^pi_s(gamma)^T R.
double policy_value(const RewardlessMdp& mdp, const Policy& pi, const Eigen::VectorXd& reward, StateId s,
                    double gamma);

struct OptimalValue {
    double value = 0.0;
    /// Indices into the function list attaining value within kTieTolerance.
    std::vector<std::size_t> argmax;
};

OptimalValue optimal_value(const std::vector<VisitDistFn>& fs, const Eigen::VectorXd& reward, double gamma);
OptimalValue optimal_value(const RewardlessMdp& mdp, const Eigen::VectorXd& reward, StateId s, double gamma,
                           const EnumerationConfig& cfg = {});

struct OptimalPolicy {
    Policy policy;
    Eigen::VectorXd values;
};

/// Policy iteration from every state at once. Ties keep the incumbent action.
OptimalPolicy optimal_policy(const RewardlessMdp& mdp, const Eigen::VectorXd& reward, double gamma);

/// Matrix whose columns are the listed functions evaluated at gamma.
Eigen::MatrixXd stack_at(const std::vector<VisitDistFn>& fs, double gamma);

} // namespace powermdp
