#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace powermdp {

using StateId = std::size_t;
using ActionId = std::size_t;

/// Tolerance on |sum(row) - 1| accepted by validate().
inline constexpr double kRowSumTolerance = 1e-9;
/// Entrywise tolerance under which two transition rows are the same action.
inline constexpr double kActionEquivalenceTolerance = 1e-12;

/// Fixed-size bit set over indices of one kind (states or actions).
template <class Tag>
class IndexSet {
public:
    IndexSet() = default;
    explicit IndexSet(std::size_t universe) : bits_(universe, false) {}
    IndexSet(std::size_t universe, std::initializer_list<std::size_t> members) : bits_(universe, false) {
        for (auto m : members) insert(m);
    }

    static IndexSet all(std::size_t universe) {
        IndexSet s(universe);
        s.bits_.assign(universe, true);
        return s;
    }

    std::size_t universe() const noexcept { return bits_.size(); }
    bool contains(std::size_t i) const { return i < bits_.size() && bits_[i]; }
    void insert(std::size_t i) { bits_.at(i) = true; }
    void erase(std::size_t i) { bits_.at(i) = false; }

    std::size_t count() const {
        std::size_t n = 0;
        for (bool b : bits_) n += b ? 1 : 0;
        return n;
    }
    bool empty() const { return count() == 0; }

    std::vector<std::size_t> members() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i]) out.push_back(i);
        return out;
    }

    IndexSet& operator|=(const IndexSet& other) {
        for (std::size_t i = 0; i < bits_.size() && i < other.bits_.size(); ++i)
            bits_[i] = bits_[i] || other.bits_[i];
        return *this;
    }
    friend IndexSet operator|(IndexSet a, const IndexSet& b) { return a |= b; }

    bool intersects(const IndexSet& other) const {
        for (std::size_t i = 0; i < bits_.size() && i < other.bits_.size(); ++i)
            if (bits_[i] && other.bits_[i]) return true;
        return false;
    }
    bool is_subset_of(const IndexSet& other) const {
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i] && !other.contains(i)) return false;
        return true;
    }

    IndexSet complement() const {
        IndexSet out(bits_.size());
        for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = !bits_[i];
        return out;
    }

    friend bool operator==(const IndexSet&, const IndexSet&) = default;

private:
    std::vector<bool> bits_;
};

struct StateTag {};
struct ActionTag {};
using StateSet = IndexSet<StateTag>;
using ActionSet = IndexSet<ActionTag>;

struct Transition {
    StateId target;
    double probability;
};
using SparseRow = std::vector<Transition>;

/// Finite state/action sets with stochastic transition rows and no reward.
///
/// The object stores exactly what it was given: malformed rows are kept so
/// that validate() can report them. Analysis routines call require_valid()
/// before touching the numbers.
class RewardlessMdp {
public:
    struct Action {
        std::string name;
        SparseRow row;
    };
    struct State {
        std::string name;
        std::vector<Action> actions;
    };

    RewardlessMdp() = default;
    explicit RewardlessMdp(std::vector<State> states);

    std::size_t num_states() const noexcept { return states_.size(); }
    std::size_t num_actions(StateId s) const { return states_.at(s).actions.size(); }

    const std::string& state_name(StateId s) const { return states_.at(s).name; }
    const std::string& action_name(StateId s, ActionId a) const { return states_.at(s).actions.at(a).name; }
    const std::vector<State>& states() const noexcept { return states_; }

    /// Throws LookupError for unknown names.
    StateId state_id(std::string_view name) const;
    ActionId action_id(StateId s, std::string_view name) const;

    const SparseRow& row(StateId s, ActionId a) const { return states_.at(s).actions.at(a).row; }
    Eigen::VectorXd dense_row(StateId s, ActionId a) const;

    /// Every action moves to a single successor with probability 1.
    bool is_deterministic() const;
    bool is_deterministic_at(StateId s) const;

    /// Throws InvalidMdp listing the violations when validate() is non-empty.
    void require_valid() const;

private:
    std::vector<State> states_;
};

/// Incremental construction by name; used by tests and fixtures.
class MdpBuilder {
public:
    MdpBuilder& state(const std::string& name);
    /// Adds an action; target states are created on demand.
    MdpBuilder& action(const std::string& from, const std::string& name,
                       std::vector<std::pair<std::string, double>> targets);
    /// Shorthand for a deterministic action.
    MdpBuilder& edge(const std::string& from, const std::string& to);
    MdpBuilder& self_loop(const std::string& s) { return edge(s, s); }

    RewardlessMdp build() const;

private:
    std::size_t index_of(const std::string& name);

    std::vector<RewardlessMdp::State> states_;
};

/// One entry per invariant violation; empty iff the MDP is well formed.
std::vector<std::string> validate(const RewardlessMdp& mdp);

/// { s' | exists a: T(s,a,s') > 0 }.
StateSet children(const RewardlessMdp& mdp, StateId s);
/// { s' | exists a: T(s,a,s') = 1 }.
StateSet sure_children(const RewardlessMdp& mdp, StateId s);

/// Partition of the actions at s into blocks with identical rows.
/// Blocks are ordered by their smallest member and members are ascending.
std::vector<std::vector<ActionId>> equivalent_actions(const RewardlessMdp& mdp, StateId s);

/// Dense view of equivalent_actions(): class index per action plus one
/// representative (the smallest action id) per class.
struct ActionClasses {
    std::vector<std::size_t> class_of;
    std::vector<ActionId> representative;

    std::size_t size() const noexcept { return representative.size(); }
};
ActionClasses action_classes(const RewardlessMdp& mdp, StateId s);

bool equivalent(const RewardlessMdp& mdp, StateId s, ActionId a, ActionId b);

/// States reachable with positive probability from s at any step >= 0.
StateSet reachable_from(const RewardlessMdp& mdp, StateId s);
/// States visitable with positive probability at steps >= 1 after taking a in s.
StateSet reach_after(const RewardlessMdp& mdp, StateId s, ActionId a);

struct BottleneckResult {
    bool holds = false;
    /// Human readable reason when holds is false.
    std::string reason;
    /// Positive-probability path from start into the target set avoiding the
    /// designated actions at the bottleneck (empty when none exists).
    std::vector<StateId> violating_path;
    /// States reachable from start once the designated actions at the
    /// bottleneck are removed; disjoint from the target set when holds.
    StateSet cut_side;
};

/// Starting from start, is `via_state` a bottleneck for `targets` via `via_actions`?
BottleneckResult is_bottleneck(const RewardlessMdp& mdp, StateId start, StateId via_state,
                               const ActionSet& via_actions, const StateSet& targets);

} // namespace powermdp
