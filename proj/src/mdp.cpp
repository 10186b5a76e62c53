#include "powermdp/mdp.hpp"

#include "powermdp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

namespace powermdp {

RewardlessMdp::RewardlessMdp(std::vector<State> states) : states_(std::move(states)) {}

StateId RewardlessMdp::state_id(std::string_view name) const {
    for (StateId s = 0; s < states_.size(); ++s)
        if (states_[s].name == name) return s;
    throw LookupError("unknown state '" + std::string(name) + "'");
}

ActionId RewardlessMdp::action_id(StateId s, std::string_view name) const {
    const auto& acts = states_.at(s).actions;
    for (ActionId a = 0; a < acts.size(); ++a)
        if (acts[a].name == name) return a;
    throw LookupError("unknown action '" + std::string(name) + "' at state '" + states_.at(s).name + "'");
}

Eigen::VectorXd RewardlessMdp::dense_row(StateId s, ActionId a) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_states()));
    for (const auto& t : row(s, a)) out(static_cast<Eigen::Index>(t.target)) += t.probability;
    return out;
}

bool RewardlessMdp::is_deterministic_at(StateId s) const {
    for (ActionId a = 0; a < num_actions(s); ++a) {
        const auto r = dense_row(s, a);
        if (r.maxCoeff() < 1.0 - kActionEquivalenceTolerance) return false;
    }
    return true;
}

bool RewardlessMdp::is_deterministic() const {
    for (StateId s = 0; s < num_states(); ++s)
        if (!is_deterministic_at(s)) return false;
    return true;
}

void RewardlessMdp::require_valid() const {
    const auto v = validate(*this);
    if (v.empty()) return;
    std::ostringstream os;
    os << "invalid MDP:";
    for (const auto& line : v) os << "\n  " << line;
    throw InvalidMdp(os.str());
}

MdpBuilder& MdpBuilder::state(const std::string& name) {
    index_of(name);
    return *this;
}

std::size_t MdpBuilder::index_of(const std::string& name) {
    for (std::size_t i = 0; i < states_.size(); ++i)
        if (states_[i].name == name) return i;
    states_.push_back({name, {}});
    return states_.size() - 1;
}

MdpBuilder& MdpBuilder::action(const std::string& from, const std::string& name,
                               std::vector<std::pair<std::string, double>> targets) {
    const auto s = index_of(from);
    SparseRow row;
    for (const auto& [to, p] : targets) row.push_back({index_of(to), p});
    states_[s].actions.push_back({name, std::move(row)});
    return *this;
}

MdpBuilder& MdpBuilder::edge(const std::string& from, const std::string& to) {
    return action(from, from == to ? "stay" : "to_" + to, {{to, 1.0}});
}

RewardlessMdp MdpBuilder::build() const { return RewardlessMdp(states_); }

std::vector<std::string> validate(const RewardlessMdp& mdp) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& st : mdp.states()) {
        if (!seen.insert(st.name).second) out.push_back("duplicate state name \"" + st.name + "\"");
    }
    for (const auto& st : mdp.states()) {
        if (st.actions.empty()) out.push_back("state " + st.name + " has no actions");
        std::set<std::string> anames;
        for (const auto& act : st.actions) {
            if (!anames.insert(act.name).second)
                out.push_back("duplicate action name \"" + act.name + "\" at state " + st.name);
            double sum = 0.0;
            bool bad_target = false;
            for (const auto& t : act.row) {
                if (t.target >= mdp.num_states()) {
                    bad_target = true;
                    continue;
                }
                if (!(t.probability >= 0.0) || !std::isfinite(t.probability)) {
                    std::ostringstream os;
                    os << "row (" << st.name << "," << act.name << ") has negative entry " << t.probability
                       << " for " << mdp.state_name(t.target);
                    out.push_back(os.str());
                }
                sum += t.probability;
            }
            if (bad_target) out.push_back("row (" + st.name + "," + act.name + ") targets an unknown state");
            if (!(std::abs(sum - 1.0) <= kRowSumTolerance)) {
                std::ostringstream os;
                os << "row (" << st.name << "," << act.name << ") sums to " << sum;
                out.push_back(os.str());
            }
        }
    }
    return out;
}

StateSet children(const RewardlessMdp& mdp, StateId s) {
    if (s >= mdp.num_states()) throw LookupError("state index out of range");
    StateSet out(mdp.num_states());
    for (ActionId a = 0; a < mdp.num_actions(s); ++a)
        for (const auto& t : mdp.row(s, a))
            if (t.probability > 0.0) out.insert(t.target);
    return out;
}

StateSet sure_children(const RewardlessMdp& mdp, StateId s) {
    if (s >= mdp.num_states()) throw LookupError("state index out of range");
    StateSet out(mdp.num_states());
    for (ActionId a = 0; a < mdp.num_actions(s); ++a) {
        const auto row = mdp.dense_row(s, a);
        for (Eigen::Index j = 0; j < row.size(); ++j)
            if (row(j) >= 1.0 - kActionEquivalenceTolerance) out.insert(static_cast<StateId>(j));
    }
    return out;
}

bool equivalent(const RewardlessMdp& mdp, StateId s, ActionId a, ActionId b) {
    const Eigen::VectorXd diff = (mdp.dense_row(s, a) - mdp.dense_row(s, b)).cwiseAbs();
    return diff.size() == 0 || diff.maxCoeff() <= kActionEquivalenceTolerance;
}

ActionClasses action_classes(const RewardlessMdp& mdp, StateId s) {
    ActionClasses out;
    const auto n = mdp.num_actions(s);
    out.class_of.assign(n, 0);
    for (ActionId a = 0; a < n; ++a) {
        bool placed = false;
        for (std::size_t c = 0; c < out.representative.size(); ++c) {
            if (equivalent(mdp, s, a, out.representative[c])) {
                out.class_of[a] = c;
                placed = true;
                break;
            }
        }
        if (!placed) {
            out.class_of[a] = out.representative.size();
            out.representative.push_back(a);
        }
    }
    return out;
}

std::vector<std::vector<ActionId>> equivalent_actions(const RewardlessMdp& mdp, StateId s) {
    const auto classes = action_classes(mdp, s);
    std::vector<std::vector<ActionId>> blocks(classes.size());
    for (ActionId a = 0; a < classes.class_of.size(); ++a) blocks[classes.class_of[a]].push_back(a);
    return blocks;
}

namespace {

// Breadth-first closure over positive-probability edges. `allowed(s, a)`
// filters actions; parents are recorded for path reconstruction.
template <class Allowed>
StateSet closure(const RewardlessMdp& mdp, const std::vector<StateId>& sources, Allowed allowed,
                 std::vector<long>* parent = nullptr) {
    StateSet seen(mdp.num_states());
    std::deque<StateId> queue;
    if (parent) parent->assign(mdp.num_states(), -1);
    for (auto s : sources) {
        if (!seen.contains(s)) {
            seen.insert(s);
            queue.push_back(s);
        }
    }
    while (!queue.empty()) {
        const auto s = queue.front();
        queue.pop_front();
        for (ActionId a = 0; a < mdp.num_actions(s); ++a) {
            if (!allowed(s, a)) continue;
            for (const auto& t : mdp.row(s, a)) {
                if (t.probability <= 0.0 || seen.contains(t.target)) continue;
                seen.insert(t.target);
                if (parent) (*parent)[t.target] = static_cast<long>(s);
                queue.push_back(t.target);
            }
        }
    }
    return seen;
}

} // namespace

StateSet reachable_from(const RewardlessMdp& mdp, StateId s) {
    return closure(mdp, {s}, [](StateId, ActionId) { return true; });
}

StateSet reach_after(const RewardlessMdp& mdp, StateId s, ActionId a) {
    std::vector<StateId> support;
    for (const auto& t : mdp.row(s, a))
        if (t.probability > 0.0) support.push_back(t.target);
    return closure(mdp, support, [](StateId, ActionId) { return true; });
}

BottleneckResult is_bottleneck(const RewardlessMdp& mdp, StateId start, StateId via_state,
                               const ActionSet& via_actions, const StateSet& targets) {
    BottleneckResult out;
    const auto reach = reachable_from(mdp, start);
    if (!reach.intersects(targets)) {
        out.reason = "start cannot reach the target set";
        out.cut_side = reach;
        return out;
    }

    // Any action equivalent to a designated one counts as designated.
    const auto classes = action_classes(mdp, via_state);
    std::vector<bool> blocked(mdp.num_actions(via_state), false);
    for (ActionId a = 0; a < mdp.num_actions(via_state); ++a)
        for (auto d : via_actions.members())
            if (d < classes.class_of.size() && classes.class_of[a] == classes.class_of[d]) blocked[a] = true;

    std::vector<long> parent;
    const auto restricted = closure(
        mdp, {start}, [&](StateId s, ActionId a) { return s != via_state || !blocked[a]; }, &parent);
    out.cut_side = restricted;

    for (StateId t = 0; t < mdp.num_states(); ++t) {
        if (!targets.contains(t) || !restricted.contains(t)) continue;
        std::vector<StateId> path;
        for (long cur = static_cast<long>(t); cur >= 0; cur = parent[static_cast<std::size_t>(cur)])
            path.push_back(static_cast<StateId>(cur));
        std::reverse(path.begin(), path.end());
        out.violating_path = std::move(path);
        out.reason = "target " + mdp.state_name(t) + " reachable without the designated actions at " +
                     mdp.state_name(via_state);
        return out;
    }
    out.holds = true;
    return out;
}

} // namespace powermdp
