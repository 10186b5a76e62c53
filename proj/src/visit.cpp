#include "powermdp/visit.hpp"

#include "powermdp/errors.hpp"
#include "powermdp/linalg.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <unordered_map>

namespace powermdp {

namespace {

void check_gamma(double gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidArgument("discount must lie in [0, 1)");
}

constexpr std::size_t kCacheLimit = 4096;

} // namespace

std::vector<double> probe_gammas(std::size_t num_states) {
    const std::size_t m = 2 * num_states + 1;
    std::vector<double> out(m);
    for (std::size_t k = 0; k < m; ++k)
        out[k] = 0.475 * (1.0 - std::cos((2.0 * static_cast<double>(k) + 1.0) * std::numbers::pi /
                                          (2.0 * static_cast<double>(m))));
    return out;
}

Eigen::VectorXd visit_dist_at(const RewardlessMdp& mdp, const Policy& pi, StateId s, double gamma) {
    check_gamma(gamma);
    if (s >= mdp.num_states()) throw LookupError("state index out of range");
    return linalg::discounted_visits<double>(transition_matrix(mdp, pi), static_cast<Eigen::Index>(s), gamma);
}

struct VisitDistFn::Impl {
    Policy policy;
    StateId start;
    Eigen::MatrixXd chain;
    StateSet reached;
    Eigen::MatrixXd probes;
    std::vector<std::vector<bool>> classes;
    mutable std::mutex mutex;
    mutable std::map<double, Eigen::VectorXd> cache;
};

VisitDistFn::VisitDistFn(const RewardlessMdp& mdp, Policy pi, StateId start) : impl_(std::make_shared<Impl>()) {
    if (start >= mdp.num_states()) throw LookupError("state index out of range");
    impl_->chain = transition_matrix(mdp, pi);
    impl_->policy = std::move(pi);
    impl_->start = start;

    // Reachability under the induced chain.
    StateSet seen(mdp.num_states());
    std::vector<StateId> stack{start};
    seen.insert(start);
    while (!stack.empty()) {
        const auto u = stack.back();
        stack.pop_back();
        for (StateId v = 0; v < mdp.num_states(); ++v) {
            if (impl_->chain(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) > 0.0 && !seen.contains(v)) {
                seen.insert(v);
                stack.push_back(v);
            }
        }
    }
    impl_->reached = std::move(seen);

    const auto gammas = probe_gammas(mdp.num_states());
    impl_->probes.resize(static_cast<Eigen::Index>(mdp.num_states()), static_cast<Eigen::Index>(gammas.size()));
    for (std::size_t k = 0; k < gammas.size(); ++k)
        impl_->probes.col(static_cast<Eigen::Index>(k)) =
            linalg::discounted_visits<double>(impl_->chain, static_cast<Eigen::Index>(start), gammas[k]);
}

const Policy& VisitDistFn::policy() const noexcept { return impl_->policy; }
StateId VisitDistFn::start() const noexcept { return impl_->start; }
const Eigen::MatrixXd& VisitDistFn::chain() const noexcept { return impl_->chain; }
std::size_t VisitDistFn::num_states() const noexcept { return static_cast<std::size_t>(impl_->chain.rows()); }
const Eigen::MatrixXd& VisitDistFn::probe_values() const { return impl_->probes; }
const StateSet& VisitDistFn::reached() const noexcept { return impl_->reached; }
const std::vector<std::vector<bool>>& VisitDistFn::inducing_classes() const noexcept { return impl_->classes; }

Eigen::VectorXd VisitDistFn::operator()(double gamma) const {
    check_gamma(gamma);
    {
        std::lock_guard lock(impl_->mutex);
        if (auto it = impl_->cache.find(gamma); it != impl_->cache.end()) return it->second;
    }
    Eigen::VectorXd f =
        linalg::discounted_visits<double>(impl_->chain, static_cast<Eigen::Index>(impl_->start), gamma);
    std::lock_guard lock(impl_->mutex);
    if (impl_->cache.size() >= kCacheLimit) impl_->cache.clear();
    impl_->cache.emplace(gamma, f);
    return f;
}

Eigen::VectorXd VisitDistFn::derivative(double gamma) const {
    check_gamma(gamma);
    return linalg::discounted_visits_derivative<double>(impl_->chain, static_cast<Eigen::Index>(impl_->start),
                                                        gamma);
}

void VisitDistFn::add_inducing_policy(const RewardlessMdp& mdp, const Policy& pi) {
    auto& classes = impl_->classes;
    if (classes.empty()) {
        for (StateId u = 0; u < mdp.num_states(); ++u)
            classes.emplace_back(action_classes(mdp, u).size(), false);
    }
    for (auto u : impl_->reached.members()) classes[u][action_classes(mdp, u).class_of[pi.action[u]]] = true;
}

bool VisitDistFn::same_function(const VisitDistFn& other) const {
    const auto& a = probe_values();
    const auto& b = other.probe_values();
    return a.rows() == b.rows() && a.cols() == b.cols() && (a - b).cwiseAbs().maxCoeff() <= kProbeTolerance;
}

std::vector<VisitDistFn> enumerate_visit_dists(const RewardlessMdp& mdp, StateId s, const EnumerationConfig& cfg) {
    std::vector<VisitDistFn> out;
    // Buckets keyed by a coarse scalar summary of the probe matrix; near
    // bucket boundaries the neighbours are checked as well.
    std::unordered_map<long long, std::vector<std::size_t>> buckets;
    constexpr double kBucket = 1e-5;
    const auto summary = [](const Eigen::MatrixXd& probes) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < probes.cols(); ++j)
            for (Eigen::Index i = 0; i < probes.rows(); ++i)
                acc += probes(i, j) * (1.0 + 0.5 * std::sin(static_cast<double>(i * 31 + j * 7)));
        return acc;
    };

    for_each_reachable_policy(mdp, s, cfg, [&](const Policy& pi, const StateSet&) {
        VisitDistFn f(mdp, pi, s);
        const auto key = static_cast<long long>(std::floor(summary(f.probe_values()) / kBucket));
        for (long long k = key - 1; k <= key + 1; ++k) {
            const auto it = buckets.find(k);
            if (it == buckets.end()) continue;
            for (auto idx : it->second) {
                if (out[idx].same_function(f)) {
                    out[idx].add_inducing_policy(mdp, pi);
                    return;
                }
            }
        }
        f.add_inducing_policy(mdp, pi);
        buckets[key].push_back(out.size());
        out.push_back(std::move(f));
    });
    return out;
}

double policy_value(const RewardlessMdp& mdp, const Policy& pi, const Eigen::VectorXd& reward, StateId s,
                    double gamma) {
    if (reward.size() != static_cast<Eigen::Index>(mdp.num_states()))
        throw InvalidArgument("reward vector length does not match the state count");
    return visit_dist_at(mdp, pi, s, gamma).dot(reward);
}

OptimalValue optimal_value(const std::vector<VisitDistFn>& fs, const Eigen::VectorXd& reward, double gamma) {
    if (fs.empty()) throw InvalidArgument("empty set of visit distribution functions");
    OptimalValue out;
    std::vector<double> values;
    values.reserve(fs.size());
    for (const auto& f : fs) {
        if (reward.size() != static_cast<Eigen::Index>(f.num_states()))
            throw InvalidArgument("reward vector length does not match the state count");
        values.push_back(f(gamma).dot(reward));
    }
    out.value = *std::max_element(values.begin(), values.end());
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] >= out.value - kTieTolerance) out.argmax.push_back(i);
    return out;
}

OptimalValue optimal_value(const RewardlessMdp& mdp, const Eigen::VectorXd& reward, StateId s, double gamma,
                           const EnumerationConfig& cfg) {
    return optimal_value(enumerate_visit_dists(mdp, s, cfg), reward, gamma);
}

OptimalPolicy optimal_policy(const RewardlessMdp& mdp, const Eigen::VectorXd& reward, double gamma) {
    mdp.require_valid();
    check_gamma(gamma);
    if (reward.size() != static_cast<Eigen::Index>(mdp.num_states()))
        throw InvalidArgument("reward vector length does not match the state count");
    OptimalPolicy out{Policy{std::vector<ActionId>(mdp.num_states(), 0)}, {}};
    const double eps = 1e-12 * std::max(1.0, reward.cwiseAbs().maxCoeff()) / (1.0 - gamma);
    for (std::size_t iter = 0; iter < 10000; ++iter) {
        out.values = linalg::policy_values<double>(transition_matrix(mdp, out.policy), reward, gamma);
        bool changed = false;
        for (StateId s = 0; s < mdp.num_states(); ++s) {
            const auto q = [&](ActionId a) {
                return reward(static_cast<Eigen::Index>(s)) + gamma * mdp.dense_row(s, a).dot(out.values);
            };
            ActionId best = out.policy.action[s];
            double best_q = q(best);
            for (ActionId a = 0; a < mdp.num_actions(s); ++a) {
                const double qa = q(a);
                if (qa > best_q + eps) {
                    best = a;
                    best_q = qa;
                }
            }
            if (best != out.policy.action[s]) {
                out.policy.action[s] = best;
                changed = true;
            }
        }
        if (!changed) return out;
    }
    throw NumericFailure("policy iteration did not converge");
}

Eigen::MatrixXd stack_at(const std::vector<VisitDistFn>& fs, double gamma) {
    if (fs.empty()) return {};
    Eigen::MatrixXd out(static_cast<Eigen::Index>(fs.front().num_states()), static_cast<Eigen::Index>(fs.size()));
    for (std::size_t i = 0; i < fs.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = fs[i](gamma);
    return out;
}

} // namespace powermdp
