#include "powermdp/policy.hpp"

#include "powermdp/errors.hpp"

#include <cmath>
#include <sstream>

namespace powermdp {

StochasticPolicy StochasticPolicy::from(const RewardlessMdp& mdp, const Policy& pi) {
    check_policy(mdp, pi);
    StochasticPolicy out;
    for (StateId s = 0; s < mdp.num_states(); ++s) {
        Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mdp.num_actions(s)));
        p(static_cast<Eigen::Index>(pi.action[s])) = 1.0;
        out.probabilities.push_back(std::move(p));
    }
    return out;
}

StochasticPolicy StochasticPolicy::uniform(const RewardlessMdp& mdp) {
    StochasticPolicy out;
    for (StateId s = 0; s < mdp.num_states(); ++s) {
        const auto k = static_cast<Eigen::Index>(mdp.num_actions(s));
        out.probabilities.push_back(Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k)));
    }
    return out;
}

void check_policy(const RewardlessMdp& mdp, const Policy& pi) {
    if (pi.action.size() != mdp.num_states())
        throw InvalidArgument("policy has " + std::to_string(pi.action.size()) + " entries for " +
                              std::to_string(mdp.num_states()) + " states");
    for (StateId s = 0; s < mdp.num_states(); ++s)
        if (pi.action[s] >= mdp.num_actions(s))
            throw InvalidArgument("policy picks a missing action at state " + mdp.state_name(s));
}

void check_policy(const RewardlessMdp& mdp, const StochasticPolicy& pi) {
    if (pi.probabilities.size() != mdp.num_states())
        throw InvalidArgument("stochastic policy does not cover every state");
    for (StateId s = 0; s < mdp.num_states(); ++s) {
        const auto& p = pi.probabilities[s];
        if (p.size() != static_cast<Eigen::Index>(mdp.num_actions(s)) || (p.array() < 0.0).any() ||
            std::abs(p.sum() - 1.0) > kRowSumTolerance)
            throw InvalidArgument("stochastic policy is not a distribution over the actions at " + mdp.state_name(s));
    }
}

Eigen::MatrixXd transition_matrix(const RewardlessMdp& mdp, const Policy& pi) {
    check_policy(mdp, pi);
    const auto n = static_cast<Eigen::Index>(mdp.num_states());
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
    for (StateId s = 0; s < mdp.num_states(); ++s)
        for (const auto& t : mdp.row(s, pi.action[s]))
            P(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t.target)) += t.probability;
    return P;
}

Eigen::MatrixXd transition_matrix(const RewardlessMdp& mdp, const StochasticPolicy& pi) {
    check_policy(mdp, pi);
    const auto n = static_cast<Eigen::Index>(mdp.num_states());
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
    for (StateId s = 0; s < mdp.num_states(); ++s)
        for (ActionId a = 0; a < mdp.num_actions(s); ++a) {
            const double w = pi.probabilities[s](static_cast<Eigen::Index>(a));
            if (w == 0.0) continue;
            for (const auto& t : mdp.row(s, a))
                P(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t.target)) += w * t.probability;
        }
    return P;
}

std::string describe(const RewardlessMdp& mdp, const Policy& pi, const StateSet& states) {
    std::ostringstream os;
    bool first = true;
    for (StateId s = 0; s < mdp.num_states(); ++s) {
        if (states.universe() != 0 && !states.contains(s)) continue;
        if (!first) os << ' ';
        first = false;
        os << mdp.state_name(s) << ':' << mdp.action_name(s, pi.action.at(s));
    }
    return os.str();
}

double reachable_policy_count(const RewardlessMdp& mdp, StateId s) {
    double product = 1.0;
    for (auto u : reachable_from(mdp, s).members()) product *= static_cast<double>(action_classes(mdp, u).size());
    return product;
}

namespace {

struct Enumerator {
    const RewardlessMdp& mdp;
    const std::vector<ActionClasses>& classes;
    const std::function<void(const Policy&, const StateSet&)>& visit;
    Policy pi;
    std::vector<bool> assigned;
    // Number of assigned states whose rows reach each state.
    std::vector<int> reached_by;
    StateId start;

    void mark(StateId u, int delta) {
        for (const auto& t : mdp.row(u, pi.action[u])) {
            if (t.probability <= 0.0) continue;
            reached_by[t.target] += delta;
        }
    }

    bool is_reached(StateId u) const { return u == start || reached_by[u] > 0; }

    void recurse() {
        StateId next = mdp.num_states();
        for (StateId u = 0; u < mdp.num_states(); ++u) {
            if (!assigned[u] && is_reached(u)) {
                next = u;
                break;
            }
        }
        if (next == mdp.num_states()) {
            StateSet r(mdp.num_states());
            for (StateId u = 0; u < mdp.num_states(); ++u)
                if (assigned[u]) r.insert(u);
            visit(pi, r);
            return;
        }
        assigned[next] = true;
        for (auto rep : classes[next].representative) {
            pi.action[next] = rep;
            mark(next, +1);
            recurse();
            mark(next, -1);
        }
        pi.action[next] = 0;
        assigned[next] = false;
    }
};

} // namespace

void for_each_reachable_policy(const RewardlessMdp& mdp, StateId s, const EnumerationConfig& cfg,
                               const std::function<void(const Policy&, const StateSet& reached)>& visit) {
    mdp.require_valid();
    if (s >= mdp.num_states()) throw LookupError("state index out of range");
    const double count = reachable_policy_count(mdp, s);
    if (count > cfg.max_policies) {
        std::ostringstream os;
        os << "policy enumeration from " << mdp.state_name(s) << " needs " << count
           << " action-class assignments (cap " << cfg.max_policies << ")";
        throw EnumerationTooLarge(os.str());
    }
    std::vector<ActionClasses> classes;
    for (StateId u = 0; u < mdp.num_states(); ++u) classes.push_back(action_classes(mdp, u));

    Enumerator e{mdp, classes, visit, Policy{std::vector<ActionId>(mdp.num_states(), 0)},
                 std::vector<bool>(mdp.num_states(), false), std::vector<int>(mdp.num_states(), 0), s};
    e.recurse();
}

} // namespace powermdp
