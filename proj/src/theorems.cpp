#include "powermdp/theorems.hpp"

#include "powermdp/errors.hpp"
#include "powermdp/nondom.hpp"
#include "powermdp/power.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace powermdp {

Eigen::MatrixXd StatePermutation::apply(const Eigen::MatrixXd& x) const {
    Eigen::MatrixXd out(x.rows(), x.cols());
    for (std::size_t i = 0; i < map.size(); ++i)
        out.row(static_cast<Eigen::Index>(map[i])) = x.row(static_cast<Eigen::Index>(i));
    return out;
}

bool StatePermutation::is_identity() const {
    for (std::size_t i = 0; i < map.size(); ++i)
        if (map[i] != i) return false;
    return true;
}

namespace {

using Profile = std::vector<double>;

Profile profile(const std::vector<Eigen::MatrixXd>& set, Eigen::Index row) {
    Profile p;
    for (const auto& e : set)
        for (Eigen::Index j = 0; j < e.cols(); ++j) p.push_back(e(row, j));
    std::sort(p.begin(), p.end());
    return p;
}

bool same_profile(const Profile& a, const Profile& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > kSimilarityTolerance) return false;
    return true;
}

// Greedy sub-multiset test on sorted profiles.
bool sub_profile(const Profile& a, const Profile& b) {
    std::size_t j = 0;
    for (double v : a) {
        while (j < b.size() && b[j] < v - kSimilarityTolerance) ++j;
        if (j == b.size() || b[j] > v + kSimilarityTolerance) return false;
        ++j;
    }
    return true;
}

bool rows_match(const Eigen::MatrixXd& a, Eigen::Index ra, const Eigen::MatrixXd& b, Eigen::Index rb) {
    return (a.row(ra) - b.row(rb)).cwiseAbs().maxCoeff() <= kSimilarityTolerance;
}

struct Search {
    const std::vector<Eigen::MatrixXd>& a;
    const std::vector<Eigen::MatrixXd>& b;
    SimilarityMode mode;
    std::uint64_t cap;
    std::vector<std::vector<StateId>> candidates;
    std::vector<StateId> order;
    std::vector<StateId> map;
    std::vector<bool> used;
    std::uint64_t nodes = 0;
    bool capped = false;

    // compat[k]: elements of B still consistent with element k of A.
    bool filter(std::vector<std::vector<std::size_t>>& compat, StateId i, StateId j) const {
        for (std::size_t k = 0; k < a.size(); ++k) {
            auto& c = compat[k];
            c.erase(std::remove_if(c.begin(), c.end(),
                                   [&](std::size_t q) {
                                       return !rows_match(a[k], static_cast<Eigen::Index>(i), b[q],
                                                          static_cast<Eigen::Index>(j));
                                   }),
                    c.end());
            if (c.empty()) return false;
        }
        return true;
    }

    std::optional<std::vector<std::size_t>> leaf(const std::vector<std::vector<std::size_t>>& compat) const {
        std::vector<std::size_t> image;
        std::vector<bool> taken(b.size(), false);
        for (const auto& c : compat) {
            // B has no duplicates, so a full assignment pins a single image.
            const auto q = c.front();
            if (taken[q]) return std::nullopt;
            taken[q] = true;
            image.push_back(q);
        }
        if (mode == SimilarityMode::equal && image.size() != b.size()) return std::nullopt;
        return image;
    }

    std::optional<std::vector<std::size_t>> recurse(std::size_t depth, const std::vector<std::vector<std::size_t>>& compat) {
        if (depth == order.size()) return leaf(compat);
        const auto i = order[depth];
        for (auto j : candidates[i]) {
            if (used[j]) continue;
            if (++nodes > cap) {
                capped = true;
                return std::nullopt;
            }
            auto next = compat;
            if (!filter(next, i, j)) continue;
            map[i] = j;
            used[j] = true;
            if (auto r = recurse(depth + 1, next)) return r;
            used[j] = false;
            if (capped) return std::nullopt;
        }
        return std::nullopt;
    }
};

} // namespace

SimilarityResult find_similarity(const std::vector<Eigen::MatrixXd>& a, const std::vector<Eigen::MatrixXd>& b,
                                 const StateSet& fixed, SimilarityMode mode, std::uint64_t node_cap) {
    SimilarityResult out;
    const auto n = fixed.universe();
    for (const auto* set : {&a, &b})
        for (const auto& e : *set)
            if (static_cast<std::size_t>(e.rows()) != n)
                throw InvalidArgument("similarity sets must live on the same state space");
    if (mode == SimilarityMode::equal ? a.size() != b.size() : a.size() > b.size()) return out;

    std::vector<Profile> pa, pb;
    for (std::size_t i = 0; i < n; ++i) {
        pa.push_back(profile(a, static_cast<Eigen::Index>(i)));
        pb.push_back(profile(b, static_cast<Eigen::Index>(i)));
    }
    const auto compatible = [&](std::size_t i, std::size_t j) {
        return mode == SimilarityMode::equal ? same_profile(pa[i], pb[j]) : sub_profile(pa[i], pb[j]);
    };

    Search search{a, b, mode, node_cap, std::vector<std::vector<StateId>>(n), {}, std::vector<StateId>(n, 0),
                  std::vector<bool>(n, false)};
    std::vector<std::vector<std::size_t>> compat(a.size());
    for (auto& c : compat) {
        c.resize(b.size());
        std::iota(c.begin(), c.end(), std::size_t{0});
    }
    for (StateId i = 0; i < n; ++i) {
        if (!fixed.contains(i)) continue;
        if (!compatible(i, i) || !search.filter(compat, i, i)) return out;
        search.map[i] = i;
        search.used[i] = true;
    }
    for (StateId i = 0; i < n; ++i) {
        if (fixed.contains(i)) continue;
        for (StateId j = 0; j < n; ++j)
            if (!fixed.contains(j) && compatible(i, j)) search.candidates[i].push_back(j);
        if (search.candidates[i].empty()) return out;
        search.order.push_back(i);
    }
    std::stable_sort(search.order.begin(), search.order.end(), [&](auto x, auto y) {
        return search.candidates[x].size() < search.candidates[y].size();
    });

    if (a.empty()) {
        // Any permutation works; report the identity.
        std::vector<StateId> id(n);
        std::iota(id.begin(), id.end(), StateId{0});
        out.outcome = SearchOutcome::found;
        out.permutation = StatePermutation{id};
        return out;
    }

    auto image = search.recurse(0, compat);
    out.nodes = search.nodes;
    if (image) {
        out.outcome = SearchOutcome::found;
        out.permutation = StatePermutation{search.map};
        out.image = std::move(*image);
    } else {
        out.outcome = search.capped ? SearchOutcome::inconclusive : SearchOutcome::none;
    }
    return out;
}

bool replay_similarity(const SimilarityResult& r, const std::vector<Eigen::MatrixXd>& a,
                       const std::vector<Eigen::MatrixXd>& b, const StateSet& fixed, SimilarityMode mode) {
    if (r.outcome != SearchOutcome::found || !r.permutation) return false;
    const auto& map = r.permutation->map;
    std::vector<bool> hit(map.size(), false);
    for (std::size_t i = 0; i < map.size(); ++i) {
        if (map[i] >= map.size() || hit[map[i]]) return false;
        hit[map[i]] = true;
        if (fixed.contains(i) && map[i] != i) return false;
    }
    if (r.image.size() != a.size()) return false;
    std::vector<bool> taken(b.size(), false);
    for (std::size_t k = 0; k < a.size(); ++k) {
        const auto q = r.image[k];
        if (q >= b.size() || taken[q]) return false;
        taken[q] = true;
        if ((r.permutation->apply(a[k]) - b[q]).cwiseAbs().maxCoeff() > kSimilarityTolerance) return false;
    }
    return mode != SimilarityMode::equal || a.size() == b.size();
}

std::vector<Eigen::MatrixXd> probe_elements(const std::vector<VisitDistFn>& fs) {
    std::vector<Eigen::MatrixXd> out;
    for (const auto& f : fs) out.push_back(f.probe_values());
    return out;
}

std::vector<Eigen::MatrixXd> vector_elements(const std::vector<Rsd>& rsds) {
    std::vector<Eigen::MatrixXd> out;
    for (const auto& d : rsds) out.push_back(d.distribution);
    return out;
}

namespace {

template <class T>
std::vector<T> pick(const std::vector<T>& all, const std::vector<std::size_t>& idx) {
    std::vector<T> out;
    for (auto i : idx) out.push_back(all.at(i));
    return out;
}

NumericConfirmation compare(double gamma, std::string quantity, double larger, double larger_se, double smaller,
                            double smaller_se, double difference_se, bool strict) {
    NumericConfirmation c{gamma, std::move(quantity), larger, larger_se, smaller, smaller_se, difference_se, strict,
                          false};
    const double gap = larger - smaller;
    const double slack = kStrictnessSigmas * difference_se;
    c.confirmed = strict ? gap > slack : gap >= -slack;
    return c;
}

void finish(TheoremVerdict& v) {
    v.holds = v.hypotheses_hold && !v.inconclusive &&
              std::all_of(v.confirmations.begin(), v.confirmations.end(), [](const auto& c) { return c.confirmed; });
}

StateSet support(const Eigen::VectorXd& d) {
    StateSet s(static_cast<std::size_t>(d.size()));
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (d(i) > kRsdTolerance) s.insert(static_cast<std::size_t>(i));
    return s;
}

} // namespace

TheoremVerdict check_graph_options(const RewardlessMdp& mdp, StateId start, StateId s_prime, ActionId a,
                                   ActionId a_prime, const RewardDistSpec& spec, const McConfig& mc,
                                   const EnumerationConfig& cfg) {
    mdp.require_valid();
    if (start >= mdp.num_states() || s_prime >= mdp.num_states()) throw LookupError("state index out of range");
    if (a >= mdp.num_actions(s_prime) || a_prime >= mdp.num_actions(s_prime))
        throw LookupError("action index out of range");

    TheoremVerdict v;
    v.theorem = "graph-options";
    const auto n = mdp.num_states();
    const bool same = equivalent(mdp, s_prime, a, a_prime);

    const auto fs = enumerate_visit_dists(mdp, start, cfg);
    const auto fnd = nondominated_functions(fs);
    const auto fa_idx = restrict_by_action(mdp, fnd, s_prime, a);
    const auto fb_idx = restrict_by_action(mdp, fnd, s_prime, a_prime);

    if (same) {
        v.hypotheses_hold = true;
        v.notes.push_back("a' is equivalent to a at s', so both restricted sets coincide");
        std::vector<StateId> id(n);
        std::iota(id.begin(), id.end(), StateId{0});
        v.permutation = StatePermutation{id};
        v.image.resize(fb_idx.size());
        std::iota(v.image.begin(), v.image.end(), std::size_t{0});
    } else {
        const auto reach_a = reach_after(mdp, s_prime, a);
        const auto reach_b = reach_after(mdp, s_prime, a_prime);
        for (StateId u = 0; u < n; ++u) {
            if (reach_a.contains(u) && reach_b.contains(u)) {
                v.failing_clause = "REACH(s',a) and REACH(s',a') overlap at " + mdp.state_name(u);
                finish(v);
                return v;
            }
        }
        for (const auto& [act, reach] : {std::pair{a, reach_a}, std::pair{a_prime, reach_b}}) {
            ActionSet via(mdp.num_actions(s_prime));
            via.insert(act);
            auto b = is_bottleneck(mdp, start, s_prime, via, reach);
            const bool ok = b.holds;
            v.bottlenecks.push_back(b);
            if (!ok) {
                v.failing_clause = "s' is not a bottleneck for REACH(s'," + mdp.action_name(s_prime, act) +
                                   ") from start: " + b.reason;
                finish(v);
                return v;
            }
        }

        const auto fixed = (reach_a | reach_b).complement();
        const auto fa = probe_elements(pick(fnd, fa_idx));
        const auto fb = probe_elements(pick(fnd, fb_idx));
        const auto sim = find_similarity(fb, fa, fixed, SimilarityMode::into_subset);
        if (sim.outcome == SearchOutcome::inconclusive) {
            v.inconclusive = true;
            v.failing_clause = "similarity search exceeded its node cap";
            finish(v);
            return v;
        }
        if (sim.outcome == SearchOutcome::none) {
            v.failing_clause = "no permutation fixing the states outside both reach sets maps F_a' into F_a";
            finish(v);
            return v;
        }
        v.hypotheses_hold = true;
        v.permutation = sim.permutation;
        v.image = sim.image;
        v.strict = sim.image.size() < fa_idx.size();
    }

    for (double gamma : {0.25, 0.5, 0.75}) {
        const auto p = optprob(fnd, {fa_idx, fb_idx}, gamma, spec, mc);
        v.confirmations.push_back(compare(gamma, "optprob", p.probabilities[0], p.std_errors[0], p.probabilities[1],
                                          p.std_errors[1], p.paired_std_error, v.strict));
        PowerTable table(mdp, gamma, spec, mc, cfg);
        const auto pa = table.expected_after(s_prime, a);
        const auto pb = table.expected_after(s_prime, a_prime);
        v.confirmations.push_back(compare(gamma, "power", pa.estimate, pa.std_error, pb.estimate, pb.std_error,
                                          std::hypot(pa.std_error, pb.std_error), v.strict));
    }
    finish(v);
    return v;
}

TheoremVerdict check_rsd_sim_power(const RewardlessMdp& mdp, StateId s, StateId s_prime, const RewardDistSpec& spec,
                                   const McConfig& mc, const EnumerationConfig& cfg) {
    mdp.require_valid();
    if (s >= mdp.num_states() || s_prime >= mdp.num_states()) throw LookupError("state index out of range");
    TheoremVerdict v;
    v.theorem = "rsd-sim-power";
    const auto here = nondominated_rsds(mdp, s, cfg).members;
    const auto there = nondominated_rsds(mdp, s_prime, cfg).members;
    const auto sim = find_similarity(vector_elements(there), vector_elements(here), StateSet(mdp.num_states()),
                                     SimilarityMode::into_subset);
    if (sim.outcome == SearchOutcome::inconclusive) {
        v.inconclusive = true;
        v.failing_clause = "similarity search exceeded its node cap";
        finish(v);
        return v;
    }
    if (sim.outcome == SearchOutcome::none) {
        v.failing_clause = "RSD_nd(s') is not similar to any subset of RSD_nd(s)";
        finish(v);
        return v;
    }
    v.hypotheses_hold = true;
    v.permutation = sim.permutation;
    v.image = sim.image;
    v.strict = sim.image.size() < here.size();
    const auto ps = power_limit_1(mdp, s, spec, mc, cfg);
    const auto pt = power_limit_1(mdp, s_prime, spec, mc, cfg);
    v.confirmations.push_back(compare(1.0, "power", ps.estimate, ps.std_error, pt.estimate, pt.std_error,
                                      std::hypot(ps.std_error, pt.std_error), v.strict));
    finish(v);
    return v;
}

TheoremVerdict check_rsd_ic(const RewardlessMdp& mdp, StateId s, const std::vector<std::size_t>& d,
                            const std::vector<std::size_t>& d_prime, const RewardDistSpec& spec, const McConfig& mc,
                            const EnumerationConfig& cfg) {
    mdp.require_valid();
    if (s >= mdp.num_states()) throw LookupError("state index out of range");
    TheoremVerdict v;
    v.theorem = "rsd-ic";
    const auto nd = nondominated_rsds(mdp, s, cfg).members;
    for (const auto* set : {&d, &d_prime})
        for (auto i : *set)
            if (i >= nd.size()) throw LookupError("RSD index " + std::to_string(i) + " is not in RSD_nd(s)");

    // Each subset must have support disjoint from the rest of RSD_nd(s).
    for (const auto* set : {&d, &d_prime}) {
        std::vector<bool> in(nd.size(), false);
        for (auto i : *set) in[i] = true;
        for (std::size_t i = 0; i < nd.size(); ++i) {
            if (!in[i]) continue;
            const auto si = support(nd[i].distribution);
            for (std::size_t j = 0; j < nd.size(); ++j) {
                if (in[j] || !si.intersects(support(nd[j].distribution))) continue;
                std::ostringstream os;
                os << "RSD " << i << " in the subset shares support with RSD " << j << " outside it";
                throw PreconditionViolation(os.str());
            }
        }
    }

    const auto sim = find_similarity(vector_elements(pick(nd, d_prime)), vector_elements(pick(nd, d)),
                                     StateSet(mdp.num_states()), SimilarityMode::into_subset);
    if (sim.outcome == SearchOutcome::inconclusive) {
        v.inconclusive = true;
        v.failing_clause = "similarity search exceeded its node cap";
        finish(v);
        return v;
    }
    if (sim.outcome == SearchOutcome::none) {
        v.failing_clause = "D' is not similar to any subset of D";
        finish(v);
        return v;
    }
    v.hypotheses_hold = true;
    v.permutation = sim.permutation;
    v.image = sim.image;
    v.strict = sim.image.size() < d.size();
    const auto p = optprob_gamma1(nd, {d, d_prime}, spec, mc);
    v.confirmations.push_back(compare(1.0, "optprob", p.probabilities[0], p.std_errors[0], p.probabilities[1],
                                      p.std_errors[1], p.paired_std_error, v.strict));
    finish(v);
    return v;
}

} // namespace powermdp
