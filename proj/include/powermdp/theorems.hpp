#pragma once

#include "powermdp/mdp.hpp"
#include "powermdp/montecarlo.hpp"
#include "powermdp/optprob.hpp"
#include "powermdp/reward_dist.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace powermdp {

/// phi as an index map: state i is sent to map[i].
struct StatePermutation {
    std::vector<StateId> map;

    /// (P_phi x)_{phi(i)} = x_i, applied to every column.
    Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
    bool is_identity() const;
};

enum class SimilarityMode {
    /// phi(A) = B.
    equal,
    /// phi(A) is a subset of B.
    into_subset,
};

enum class SearchOutcome { found, none, inconclusive };

struct SimilarityResult {
    SearchOutcome outcome = SearchOutcome::none;
    std::optional<StatePermutation> permutation;
    /// For each element of A, the index of its image in B.
    std::vector<std::size_t> image;
    std::uint64_t nodes = 0;
};

inline constexpr std::uint64_t kSimilarityNodeCap = 10'000'000;
inline constexpr double kSimilarityTolerance = 1e-8;

/// Backtracking search for a state permutation fixing `fixed` that maps the
/// set A onto (or into) B. Elements are n x m matrices: probe evaluations for
/// visit distribution functions, a single column for plain vectors. Both sets
/// are assumed free of duplicates.
SimilarityResult find_similarity(const std::vector<Eigen::MatrixXd>& a, const std::vector<Eigen::MatrixXd>& b,
                                 const StateSet& fixed, SimilarityMode mode = SimilarityMode::equal,
                                 std::uint64_t node_cap = kSimilarityNodeCap);

/// Re-checks a returned permutation against both sets.
bool replay_similarity(const SimilarityResult& r, const std::vector<Eigen::MatrixXd>& a,
                       const std::vector<Eigen::MatrixXd>& b, const StateSet& fixed, SimilarityMode mode);

std::vector<Eigen::MatrixXd> probe_elements(const std::vector<VisitDistFn>& fs);
std::vector<Eigen::MatrixXd> vector_elements(const std::vector<Rsd>& rsds);

struct NumericConfirmation {
    double gamma = 0.0;
    /// "optprob" or "power".
    std::string quantity;
    double larger = 0.0;
    double larger_se = 0.0;
    double smaller = 0.0;
    double smaller_se = 0.0;
    /// Standard error of larger - smaller.
    double difference_se = 0.0;
    bool strict_expected = false;
    bool confirmed = false;
};

struct TheoremVerdict {
    std::string theorem;
    bool hypotheses_hold = false;
    /// The similarity search hit its node cap; no claim either way.
    bool inconclusive = false;
    std::string failing_clause;
    bool strict = false;
    /// Hypotheses hold and every numeric confirmation passed.
    bool holds = false;
    std::optional<StatePermutation> permutation;
    std::vector<std::size_t> image;
    std::vector<BottleneckResult> bottlenecks;
    std::vector<NumericConfirmation> confirmations;
    std::vector<std::string> notes;
};

/// Graph-options sufficient condition: at s' (reached from start) action a
/// leads to strictly more options than a'.
TheoremVerdict check_graph_options(const RewardlessMdp& mdp, StateId start, StateId s_prime, ActionId a,
                                   ActionId a_prime, const RewardDistSpec& spec, const McConfig& mc,
                                   const EnumerationConfig& cfg = {});

/// RSD reachability sufficient condition for POWER at gamma -> 1.
TheoremVerdict check_rsd_sim_power(const RewardlessMdp& mdp, StateId s, StateId s_prime, const RewardDistSpec& spec,
                                   const McConfig& mc, const EnumerationConfig& cfg = {});

/// Access to more RSDs makes reaching them more probably optimal at gamma -> 1.
/// D and D' index into RSD_nd(s) (the `members` of nondominated_rsds()).
TheoremVerdict check_rsd_ic(const RewardlessMdp& mdp, StateId s, const std::vector<std::size_t>& d,
                            const std::vector<std::size_t>& d_prime, const RewardDistSpec& spec, const McConfig& mc,
                            const EnumerationConfig& cfg = {});

} // namespace powermdp
